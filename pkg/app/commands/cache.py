"""Result cache maintenance"""
import click
from flask import Blueprint, current_app

from app.utils import cache
from app.utils.helpers import finish, report_options

bp = Blueprint('cache', __name__, cli_group='cache')


@bp.cli.command('clear')
@click.option('--operation', default=None, help='Only entries of this operation.')
def clear_command(operation):
    """Delete cached results"""
    count = cache.clear(operation)
    current_app.logger.info(f'cache: removed {count} entries')
    click.echo(f'removed {count} entries')


@bp.cli.command('stats')
@report_options
def stats_command(fmt, output, no_cache, jobs):
    """Entries and payload bytes per operation"""
    rows = [dict(operation=operation, **entry) for operation, entry in sorted(cache.stats().items())]
    finish('cache stats', rows, fmt, output, columns=['operation', 'entries', 'bytes', 'versions'])
