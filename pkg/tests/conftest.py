import pytest

from app import create_app, db
from app.utils.db_init import initialize_database
from config import TestingConfig


@pytest.fixture
def app(tmp_path):
    app = create_app(TestingConfig)
    app.config['CACHE_DIR'] = str(tmp_path)
    with app.app_context():
        assert initialize_database()
        yield app
        db.session.remove()
        db.drop_all()


@pytest.fixture
def runner(app):
    return app.test_cli_runner()
