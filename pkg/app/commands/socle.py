"""Top-degree evaluation of a class"""
import click
from flask import Blueprint, current_app

from app.engine.socle import socle_express_general, top_no_points
from app.engine.taut_ring import RingContext, parse_expression, to_multi_basis
from app.utils.errors import DomainError
from app.utils.helpers import finish, report_options, to_plain, usage_errors

bp = Blueprint('socle', __name__, cli_group=None)


def evaluate(g, n, text):
    """
    {'class', 'basis', 'coefficients'} for a class of degree g-1 given in
    text form; with n = 0 the basis is kappa_{g-2} in degree g-2.
    """
    ctx = RingContext(g, n)
    expr = parse_expression(text, ctx)
    if n == 0:
        if not expr.is_homogeneous(g - 2):
            raise DomainError(f'a class on M_{g} must have degree g-2={g - 2}')
        total = 0
        for (_, multi), c in to_multi_basis(expr).items():
            total += c * top_no_points(g, () if multi is None else multi.indices)
        return {'class': expr.to_text(), 'basis': [f'k{g - 2}'], 'coefficients': to_plain([total])}
    vector = socle_express_general(expr, ctx)
    return {
        'class': expr.to_text(),
        'basis': [f'p{i}^{g - 1}' for i in range(1, n + 1)],
        'coefficients': vector.to_list(),
    }


@bp.cli.command('socle')
@click.option('--genus', 'g', type=int, required=True)
@click.option('--n', 'n', type=int, required=True, help='Number of marked points.')
@click.option('--class', 'text', required=True, help='Class in text form, e.g. "k1^2*p1 - 3/2*K(1,1)".')
@report_options
@usage_errors
def socle_command(g, n, text, fmt, output, no_cache, jobs):
    """Express a top-degree class on the psi_i^{G-1} basis"""
    result = evaluate(g, n, text)
    current_app.logger.info(f'socle g={g} n={n}: {result["class"]}')
    finish('socle', [result], fmt, output)
