"""Export of the genus-4 pairing matrices"""
import click
from flask import Blueprint, current_app

from app.engine.socle import PairingMatrix, build_matrices, matrix_to_csv
from app.utils.cache import cached_many
from app.utils.errors import DomainError
from app.utils.helpers import build_report, render, usage_errors, report_options, write_report

bp = Blueprint('matrix', __name__, cli_group=None)


def pairing_matrix(n, which):
    """to_dict() of M or M-hat on n points"""
    if which not in ('M', 'Mhat'):
        raise DomainError(f'unknown matrix {which!r}')
    m, mhat = build_matrices(n)
    return (m if which == 'M' else mhat).to_dict()


@bp.cli.command('matrix')
@click.option('--n', 'n', type=int, required=True, help='Number of marked points.')
@click.option('--which', type=click.Choice(['M', 'Mhat']), default='Mhat', show_default=True)
@report_options
@usage_errors
def matrix_command(n, which, fmt, output, no_cache, jobs):
    """The pairing matrix M or its rescaled integer form M-hat"""
    if n < 1:
        raise DomainError(f'matrix needs n >= 1, got {n}')
    data = cached_many('matrix', [{'n': n, 'which': which}], pairing_matrix,
                       enabled=False if no_cache else None)[0]
    current_app.logger.info(f'matrix {which} n={n}: {len(data["labels"])} x {len(data["labels"])}')
    if fmt == 'csv':
        write_report(matrix_to_csv(PairingMatrix.from_dict(data)), output)
    else:
        write_report(render(build_report('matrix', [dict(data, which=which)]), fmt), output)
