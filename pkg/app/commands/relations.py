"""Relation generation"""
import click
from flask import Blueprint, current_app

from app.engine.pixton import enumerate_admissible, pixton_relation
from app.engine.taut_ring import RingContext
from app.utils.cache import cached_many
from app.utils.errors import DomainError
from app.utils.helpers import finish, report_options, usage_errors

bp = Blueprint('relations', __name__, cli_group=None)


def family_relations(g, n, d, family_only):
    """[{family, sigma, a, relation}] for the admissible data of (g, n, d)"""
    if d < 0:
        raise DomainError(f'degree must be >= 0, got {d}')
    ctx = RingContext(g, n)
    out = []
    for family in enumerate_admissible(ctx, d):
        members = [family.representative(n)] if family_only else family.members(n)
        for params in members:
            relation = pixton_relation(params)
            out.append({
                'family': family.label,
                'sigma': list(params.sigma),
                'a': list(params.a),
                'terms': len(relation.terms),
                'relation': relation.to_text(),
            })
    return out


@bp.cli.command('relations')
@click.option('--genus', 'g', type=int, required=True)
@click.option('--n', 'n', type=int, required=True, help='Number of marked points.')
@click.option('--degree', 'd', type=int, required=True)
@click.option('--family-only', is_flag=True, help='One representative per S_n-orbit.')
@report_options
@usage_errors
def relations_command(g, n, d, family_only, fmt, output, no_cache, jobs):
    """Generated relations of degree D on M_{G,N}"""
    RingContext(g, n)
    params = {'g': g, 'n': n, 'd': d, 'family_only': family_only}
    results = cached_many('relations', [params], family_relations, enabled=False if no_cache else None)[0]
    current_app.logger.info(f'relations g={g} n={n} d={d}: {len(results)} relations')
    finish('relations', results, fmt, output, columns=['family', 'sigma', 'a', 'terms', 'relation'])
