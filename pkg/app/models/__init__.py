"""
SQLAlchemy Models Package

- Cache: CacheRecord (persisted results of the engine operations)
"""

from app.models.cache_record import CacheRecord

__all__ = [
    'CacheRecord',
]
