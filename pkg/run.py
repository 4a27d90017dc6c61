from dotenv import load_dotenv
load_dotenv()  # Load .env file

from app import create_app as build_app
from app.utils.db_init import initialize_database
from app.utils.errors import TautringError
from config import config
from flask.cli import FlaskGroup, ScriptInfo
import click
import logging
import os
import sys

# Configure logging
logging.basicConfig(
    level=logging.INFO,
    format='%(asctime)s - %(name)s - %(levelname)s - %(message)s'
)
logger = logging.getLogger(__name__)


def make_app():
    """Build the app for the configured environment and make sure the cache schema exists"""
    ctx = click.get_current_context(silent=True)
    script_info = ctx.find_object(ScriptInfo) if ctx is not None else None
    cache_dir = script_info.data.get('cache_dir') if script_info is not None else None

    app = build_app(config.get(os.environ.get('TAUTRING_ENV', 'development'), config['default']), cache_dir)
    with app.app_context():
        if not initialize_database():
            logger.warning("Cache database unavailable - results will not be cached")
            app.config['CACHE_ENABLED'] = False
    return app


def _remember_cache_dir(ctx, param, value):
    if value:
        ctx.ensure_object(ScriptInfo).data['cache_dir'] = os.path.expanduser(value)
    return value


def _set_verbose(ctx, param, value):
    if value:
        logging.getLogger().setLevel(logging.DEBUG)
    return value


cli = FlaskGroup(
    name='tautring',
    create_app=make_app,
    help='Exact tautological rings R*(M_{g,n}) for g <= 4.',
    params=[
        click.Option(['--cache-dir'], default=None, is_eager=True, expose_value=False,
                     callback=_remember_cache_dir, help='Cache directory for this run.'),
        click.Option(['--verbose', '-v'], is_flag=True, is_eager=True, expose_value=False,
                     callback=_set_verbose, help='Log at DEBUG level.'),
    ],
)


def run(argv=None):
    """
    Parse argv, dispatch, and return the exit status:
    0 success, 1 verification failure, 2 usage or parameter error.
    """
    try:
        rv = cli.main(args=list(argv) if argv is not None else None, prog_name='tautring', standalone_mode=False)
    except click.ClickException as e:
        e.show()
        return e.exit_code
    except click.Abort:
        click.echo('Aborted!', err=True)
        return 1
    except TautringError as e:
        logger.error(f'{type(e).__name__}: {e}')
        return 1
    return rv if isinstance(rv, int) else 0


if __name__ == '__main__':
    sys.exit(run(sys.argv[1:]))
