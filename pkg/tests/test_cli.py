import csv
import io
import json

import pytest

from app.engine.verdict import Verdict
from app.models import CacheRecord
from app.utils.errors import ConsistencyError, VerificationFailure
from run import run


def invoke_json(runner, tmp_path, *args):
    output = tmp_path / 'report.json'
    result = runner.invoke(args=[*args, '--format', 'json', '--output', str(output)])
    assert result.exit_code == 0, result.output
    return json.loads(output.read_text())


def test_relations_report(runner, tmp_path):
    report = invoke_json(runner, tmp_path, 'relations', '--genus', '3', '--n', '4', '--degree', '2', '--family-only')
    assert report['command'] == 'relations'
    assert report['version'] == '1.0.0'
    assert len(report['results']) == 4
    assert all(r['relation'] != '0' for r in report['results'])


def test_relations_all_members(runner, tmp_path):
    families = invoke_json(runner, tmp_path, 'relations', '--genus', '3', '--n', '3', '--degree', '2', '--family-only')
    members = invoke_json(runner, tmp_path, 'relations', '--genus', '3', '--n', '3', '--degree', '2')
    assert len(members['results']) > len(families['results'])
    assert {r['family'] for r in members['results']} == {r['family'] for r in families['results']}


def test_relations_unstable_context_is_a_usage_error(runner):
    result = runner.invoke(args=['relations', '--genus', '0', '--n', '1', '--degree', '1'])
    assert result.exit_code == 2
    assert 'not stable' in result.output


def test_socle_command(runner, tmp_path):
    report = invoke_json(runner, tmp_path, 'socle', '--genus', '3', '--n', '2', '--class', 'p1^2')
    assert report['results'][0]['coefficients'] == ['1', '0']
    report = invoke_json(runner, tmp_path, 'socle', '--genus', '3', '--n', '2', '--class', 'k2')
    first, second = report['results'][0]['coefficients']
    assert first == second
    report = invoke_json(runner, tmp_path, 'socle', '--genus', '4', '--n', '0', '--class', 'K(1,1)')
    assert report['results'][0]['coefficients'] == ['35/3']


def test_socle_wrong_degree(runner):
    result = runner.invoke(args=['socle', '--genus', '3', '--n', '2', '--class', 'k1'])
    assert result.exit_code == 2


def test_matrix_csv(runner):
    result = runner.invoke(args=['matrix', '--n', '1', '--which', 'Mhat', '--format', 'csv'])
    assert result.exit_code == 0
    assert result.output.endswith('label,empty,1\nempty,35,39\n1,7,35\n')


def test_matrix_output_is_deterministic(runner, tmp_path):
    first = tmp_path / 'first.csv'
    second = tmp_path / 'second.csv'
    runner.invoke(args=['matrix', '--n', '2', '--which', 'M', '--format', 'csv', '--output', str(first)])
    assert CacheRecord.query.filter_by(operation='matrix').count() == 1
    runner.invoke(args=['matrix', '--n', '2', '--which', 'M', '--format', 'csv', '--output', str(second)])
    assert first.read_bytes() == second.read_bytes()


def test_verify_det(runner, tmp_path):
    report = invoke_json(runner, tmp_path, 'verify', 'det', '--n', '1..4')
    assert [r['verdict'] for r in report['results']] == ['ok'] * 4
    assert report['results'][0]['details']['det'] == 952


def test_verify_csv_columns(runner, tmp_path):
    output = tmp_path / 'verify.csv'
    result = runner.invoke(args=['verify', 'complement', '--n', '2..3', '--format', 'csv', '--output', str(output)])
    assert result.exit_code == 0
    rows = list(csv.DictReader(io.StringIO(output.read_text())))
    assert [row['verdict'] for row in rows] == ['ok', 'ok']
    assert rows[0]['check'] == 'complement'


def test_verify_without_coverage_is_a_usage_error(runner):
    result = runner.invoke(args=['verify', 'eigen', '--n', '1..3'])
    assert result.exit_code == 2


@pytest.mark.parametrize('n_range', ['x', '5..2', '1..'])
def test_verify_bad_range(runner, n_range):
    result = runner.invoke(args=['verify', 'det', '--n', n_range])
    assert result.exit_code == 2


def test_verify_failure_exits_one(runner, tmp_path, monkeypatch):
    def failing(suite, n, **options):
        return [Verdict.mismatch(suite, {'n': n}, 'det', 1, 2)]

    monkeypatch.setattr('app.commands.verify.run_suite', failing)
    output = tmp_path / 'fail.json'
    result = runner.invoke(args=['verify', 'det', '--n', '1', '--no-cache', '--format', 'json',
                                 '--output', str(output)])
    assert result.exit_code == 1
    report = json.loads(output.read_text())
    assert report['results'][0]['expected'] == 1
    assert report['results'][0]['actual'] == 2


def test_no_cache_leaves_cache_empty(runner):
    result = runner.invoke(args=['verify', 'det', '--n', '1..2', '--no-cache'])
    assert result.exit_code == 0
    assert CacheRecord.query.count() == 0


def test_ranks_csv(runner, tmp_path):
    output = tmp_path / 'ranks.csv'
    result = runner.invoke(args=['ranks', '--genus', '4', '--n', '1..3', '--format', 'csv', '--output', str(output)])
    assert result.exit_code == 0
    rows = list(csv.DictReader(io.StringIO(output.read_text())))
    for row in rows:
        n = int(row['n'])
        assert int(row['r3']) == n
        assert int(row['r2']) == n * (n + 1) // 2 + 1


def test_cache_commands(runner, tmp_path):
    runner.invoke(args=['verify', 'det', '--n', '1..2'])
    report = invoke_json(runner, tmp_path, 'cache', 'stats')
    assert report['results'] == [{'bytes': report['results'][0]['bytes'], 'entries': 2, 'operation': 'verify',
                                  'versions': ['1.0.0']}]
    result = runner.invoke(args=['cache', 'clear'])
    assert result.exit_code == 0
    assert 'removed 2 entries' in result.output
    assert CacheRecord.query.count() == 0


def test_run_entry_point(tmp_path):
    output = tmp_path / 'det.json'
    status = run(['--cache-dir', str(tmp_path / 'cache'), 'verify', 'det', '--n', '1..2', '--format', 'json',
                  '--output', str(output)])
    assert status == 0
    assert len(json.loads(output.read_text())['results']) == 2
    assert (tmp_path / 'cache' / 'cache.sqlite3').exists()


def test_run_usage_errors(tmp_path):
    cache_dir = str(tmp_path / 'cache')
    assert run(['--cache-dir', cache_dir, 'verify', 'det', '--n', 'nope']) == 2
    assert run(['--cache-dir', cache_dir, 'no-such-command']) == 2


def test_verify_internal_error_becomes_failed_verdict(runner, tmp_path, monkeypatch):
    def broken(suite, n, **options):
        raise ConsistencyError('decomposition left a residual')

    monkeypatch.setattr('app.commands.verify.run_suite', broken)
    output = tmp_path / 'broken.json'
    result = runner.invoke(args=['verify', 'det', '--n', '1', '--no-cache', '--format', 'json',
                                 '--output', str(output)])
    assert result.exit_code == 1
    [verdict] = json.loads(output.read_text())['results']
    assert verdict['verdict'] == 'fail'
    assert verdict['coordinate'] == 'error'
    assert 'residual' in verdict['actual']


def test_ranks_certification_failure_exits_one(runner, tmp_path, monkeypatch):
    def uncertified(g, n):
        raise VerificationFailure('genus3', {'n': n}, 'rank', 3, 2)

    monkeypatch.setattr('app.commands.ranks.rank_table', uncertified)
    output = tmp_path / 'ranks.csv'
    result = runner.invoke(args=['ranks', '--genus', '3', '--n', '1..2', '--no-cache', '--format', 'csv',
                                 '--output', str(output)])
    assert result.exit_code == 1
    rows = list(csv.DictReader(io.StringIO(output.read_text())))
    assert [row['n'] for row in rows] == ['1', '2']
    assert all(row['error'].startswith('genus3 failed') for row in rows)


def test_run_maps_package_errors_to_one(tmp_path, monkeypatch):
    def inconsistent(n):
        raise ConsistencyError('M and M-hat are not proportional')

    monkeypatch.setattr('app.commands.matrix.build_matrices', inconsistent)
    assert run(['--cache-dir', str(tmp_path / 'cache'), 'matrix', '--n', '2', '--no-cache']) == 1
