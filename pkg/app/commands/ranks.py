"""Rank table"""
import click
from flask import Blueprint, current_app

from app.engine.rank_lab import rank_table
from app.utils.cache import cached_many
from app.utils.errors import ConsistencyError, VerificationFailure
from app.utils.helpers import finish, parse_n_range, report_options, usage_errors

bp = Blueprint('ranks', __name__, cli_group=None)


def rank_row(g, n):
    """{'g', 'n', 'r0', ..., 'r{g-1}'}, or {'g', 'n', 'error'} when certification fails"""
    row = {'g': g, 'n': n}
    try:
        table = rank_table(g, n)
    except (ConsistencyError, VerificationFailure) as e:
        row['error'] = str(e)
        return row
    for degree, value in enumerate(table):
        row[f'r{degree}'] = value
    return row


@bp.cli.command('ranks')
@click.option('--genus', 'g', type=click.IntRange(1, 4), required=True)
@click.option('--n', 'n_range', required=True, help='Inclusive range a..b of marked points.')
@report_options
@usage_errors
def ranks_command(g, n_range, fmt, output, no_cache, jobs):
    """Ranks of R^d(M_{G,n}) for every degree d"""
    tasks = [{'g': g, 'n': n} for n in parse_n_range(n_range)]
    rows = cached_many('ranks', tasks, rank_row, jobs=jobs or current_app.config['VERIFY_WORKERS'],
                       enabled=False if no_cache else None)
    failed = [row for row in rows if 'error' in row]
    current_app.logger.info(f'ranks g={g} n={n_range}: {len(rows)} rows')
    for row in failed:
        current_app.logger.warning(f"ranks g={g} n={row['n']}: {row['error']}")
    columns = ['g', 'n'] + [f'r{d}' for d in range(g)] + (['error'] if failed else [])
    finish('ranks', rows, fmt, output, ok=not failed, columns=columns)
