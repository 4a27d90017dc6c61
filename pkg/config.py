import os

ARTIFACT_VERSION = '1.0.0'


def _cache_dir():
    return os.path.expanduser(os.environ.get('TAUTRING_CACHE_DIR') or '~/.cache/tautring')


def sqlite_uri(cache_dir):
    return f'sqlite:///{os.path.join(cache_dir, "cache.sqlite3")}'


class Config:
    """Base configuration"""
    SECRET_KEY = os.environ.get('SECRET_KEY') or 'dev-secret-key'
    CACHE_DIR = _cache_dir()
    SQLALCHEMY_DATABASE_URI = os.environ.get('DATABASE_URL') or sqlite_uri(CACHE_DIR)
    SQLALCHEMY_TRACK_MODIFICATIONS = False

    # Every cache key and every JSON report carries this
    ARTIFACT_VERSION = os.environ.get('TAUTRING_ARTIFACT_VERSION') or ARTIFACT_VERSION

    CACHE_ENABLED = (os.environ.get('TAUTRING_CACHE') or 'on').lower() not in ('0', 'off', 'false', 'no')

    # Worker pool size for verify
    VERIFY_WORKERS = int(os.environ.get('TAUTRING_WORKERS') or 1)

    # Seed of the random decomposition sweep
    RANDOM_SEED = int(os.environ.get('TAUTRING_SEED') or 0)
    SPAN_SAMPLES = int(os.environ.get('TAUTRING_SPAN_SAMPLES') or 100)


class DevelopmentConfig(Config):
    DEBUG = True


class ProductionConfig(Config):
    DEBUG = False


class TestingConfig(Config):
    TESTING = True
    SQLALCHEMY_DATABASE_URI = 'sqlite://'
    CACHE_ENABLED = True
    VERIFY_WORKERS = 1
    SPAN_SAMPLES = 10


config = {
    'development': DevelopmentConfig,
    'production': ProductionConfig,
    'testing': TestingConfig,
    'default': DevelopmentConfig
}
