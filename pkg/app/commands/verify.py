"""Verification suites"""
import click
from flask import Blueprint, current_app

from app.engine.rank_lab import SUITES, run_suite
from app.utils.cache import cached_many
from app.engine.verdict import Verdict
from app.utils.errors import ConsistencyError, DomainError, VerificationFailure
from app.utils.helpers import finish, parse_n_range, report_options, usage_errors

bp = Blueprint('verify', __name__, cli_group=None)

VERDICT_COLUMNS = ['check', 'params', 'verdict', 'coordinate', 'expected', 'actual', 'details']


def suite_verdicts(suite, n, samples=None, seed=None):
    """to_dict() of every verdict of one suite at one n"""
    options = {}
    if suite == 'span':
        options = {k: v for k, v in (('samples', samples), ('seed', seed)) if v is not None}
    try:
        verdicts = run_suite(suite, n, **options)
    except (ConsistencyError, VerificationFailure) as e:
        verdicts = [Verdict.mismatch(suite, {'n': n}, 'error', None, str(e))]
    return [verdict.to_dict() for verdict in verdicts]


def suite_tasks(names, n_range, samples, seed):
    tasks = []
    for name in names:
        for n in n_range:
            if not SUITES[name].covers(n):
                continue
            task = {'suite': name, 'n': n}
            if name == 'span':
                task.update(samples=samples, seed=seed)
            tasks.append(task)
    return tasks


@bp.cli.command('verify')
@click.argument('suite', type=click.Choice(sorted(SUITES) + ['all']))
@click.option('--n', 'n_range', required=True, help='Inclusive range a..b of marked points.')
@report_options
@usage_errors
def verify_command(suite, n_range, fmt, output, no_cache, jobs):
    """Run a verification SUITE over a range of n; exit 1 on any failure"""
    names = list(SUITES) if suite == 'all' else [suite]
    config = current_app.config
    tasks = suite_tasks(names, parse_n_range(n_range), config['SPAN_SAMPLES'], config['RANDOM_SEED'])
    if not tasks:
        raise DomainError(f'suite {suite} covers no n in {n_range}')
    batches = cached_many('verify', tasks, suite_verdicts, jobs=jobs or config['VERIFY_WORKERS'],
                          enabled=False if no_cache else None)
    results = [verdict for batch in batches for verdict in batch]
    failed = [r for r in results if r['verdict'] != 'ok']
    current_app.logger.info(f'verify {suite} n={n_range}: {len(results) - len(failed)}/{len(results)} ok')
    for r in failed:
        current_app.logger.warning(f"{r['check']} {r['params']} failed at {r.get('coordinate')}")
    finish('verify', results, fmt, output, ok=not failed, columns=VERDICT_COLUMNS)
