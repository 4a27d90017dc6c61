from flask import Flask
from flask_sqlalchemy import SQLAlchemy
from flask_migrate import Migrate

db = SQLAlchemy()
migrate = Migrate()


def create_app(config_class=None, cache_dir=None):
    """Application factory pattern"""
    if config_class is None:
        from config import Config
        config_class = Config

    app = Flask(__name__)
    app.config.from_object(config_class)

    # --cache-dir overrides the configured location for one run
    if cache_dir:
        from config import sqlite_uri
        app.config['CACHE_DIR'] = cache_dir
        app.config['SQLALCHEMY_DATABASE_URI'] = sqlite_uri(cache_dir)

    # Initialize extensions
    db.init_app(app)
    migrate.init_app(app, db)

    # Register command blueprints
    from app.commands import relations, socle, matrix, verify, ranks, cache

    app.register_blueprint(relations.bp)
    app.register_blueprint(socle.bp)
    app.register_blueprint(matrix.bp)
    app.register_blueprint(verify.bp)
    app.register_blueprint(ranks.bp)
    app.register_blueprint(cache.bp)

    return app
