"""
Database Initialization Utility

This module handles automatic creation of:
- The cache directory holding the sqlite file
- All database tables (the result cache)

All operations are idempotent - they won't fail if objects already exist.
"""

from app import db
from flask import current_app
import logging
import os

logger = logging.getLogger(__name__)


def ensure_cache_dir():
    """Create the cache directory if it doesn't exist"""
    uri = current_app.config['SQLALCHEMY_DATABASE_URI']
    if not uri.startswith('sqlite:///'):
        return
    cache_dir = os.path.dirname(uri[len('sqlite:///'):])
    if cache_dir:
        os.makedirs(cache_dir, exist_ok=True)
        logger.debug(f"Cache directory {cache_dir} verified")


def create_all_tables():
    """Create all database tables if they don't exist"""
    try:
        # Import all models to ensure SQLAlchemy knows about them
        from app.models import CacheRecord

        # Create all tables (idempotent - won't recreate existing tables)
        db.create_all()
        logger.debug("All database tables created/verified successfully")
    except Exception as e:
        logger.error(f"Error creating tables: {e}")
        raise


def initialize_database():
    """
    Main initialization function that sets up the cache database.
    This function is idempotent and safe to call multiple times.
    """
    try:
        logger.debug("Starting database initialization...")

        # Step 1: Cache directory
        ensure_cache_dir()

        # Step 2: Create all tables
        create_all_tables()

        logger.debug("Database initialization completed successfully!")
        return True
    except Exception as e:
        logger.error(f"Database initialization failed: {e}")
        db.session.rollback()
        return False
