"""Helper utility functions"""
from concurrent.futures import ProcessPoolExecutor
import csv
import functools
import io
import json
import os
import re
import tempfile

import click
from flask import current_app

from app.engine.exact_core import to_plain
from app.utils.errors import DomainError

_RANGE = re.compile(r'^\s*(\d+)\s*(?:\.\.\s*(\d+)\s*)?$')


def parse_n_range(text):
    """'a..b' (inclusive) or a single 'a' -> range"""
    match = _RANGE.match(str(text))
    if not match:
        raise DomainError(f'invalid n-range {text!r}; expected a..b')
    start = int(match.group(1))
    stop = int(match.group(2)) if match.group(2) is not None else start
    if stop < start:
        raise DomainError(f'empty n-range {text!r}')
    return range(start, stop + 1)


def build_report(command, results):
    return {
        'version': current_app.config['ARTIFACT_VERSION'],
        'command': command,
        'results': to_plain(results),
    }


def _cell(value):
    if isinstance(value, (dict, list)):
        return json.dumps(value, sort_keys=True, separators=(',', ':'))
    if value is None:
        return ''
    return str(value)


def render_json(report):
    return json.dumps(report, indent=2, sort_keys=True) + '\n'


def render_csv(report, columns=None):
    """One row per result; nested values are embedded as compact JSON"""
    results = report['results']
    if columns is None:
        columns = []
        for result in results:
            columns.extend(k for k in result if k not in columns)
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator='\n')
    writer.writerow(columns)
    for result in results:
        writer.writerow([_cell(result.get(c)) for c in columns])
    return buffer.getvalue()


def render_text(report):
    lines = [f"# {report['command']} (version {report['version']})"]
    for result in report['results']:
        lines.append('  '.join(f'{k}={_cell(v)}' for k, v in result.items()))
    return '\n'.join(lines) + '\n'


def render(report, fmt, columns=None):
    if fmt == 'json':
        return render_json(report)
    if fmt == 'csv':
        return render_csv(report, columns)
    return render_text(report)


def write_report(text, output=None):
    """
    Write text to output, or stdout when output is None.

    Files are written to a temporary sibling and renamed into place, so a
    failed run never leaves a partial report.
    """
    if not output:
        click.echo(text, nl=False)
        return
    directory = os.path.dirname(os.path.abspath(output))
    os.makedirs(directory, exist_ok=True)
    fd, tmp_path = tempfile.mkstemp(prefix='.tautring-', dir=directory)
    try:
        with os.fdopen(fd, 'w', encoding='utf-8', newline='') as f:
            f.write(text)
        os.replace(tmp_path, output)
    except BaseException:
        if os.path.exists(tmp_path):
            os.remove(tmp_path)
        raise


_REPORT_OPTIONS = (
    click.option('--format', 'fmt', type=click.Choice(['json', 'csv', 'text']), default='text', show_default=True),
    click.option('--output', type=click.Path(dir_okay=False), default=None, help='Write the report to this file.'),
    click.option('--no-cache', is_flag=True, help='Bypass the result cache.'),
    click.option('--jobs', type=click.IntRange(min=1), default=None, help='Worker processes.'),
)


def report_options(f):
    """--format, --output, --no-cache and --jobs shared by every report command"""
    for option in reversed(_REPORT_OPTIONS):
        f = option(f)
    return f


def usage_errors(f):
    """Turn DomainError into a usage error (exit status 2)"""
    @functools.wraps(f)
    def wrapper(*args, **kwargs):
        try:
            return f(*args, **kwargs)
        except DomainError as e:
            raise click.UsageError(str(e))
    return wrapper


def finish(command, results, fmt, output, ok=True, columns=None):
    """Render and write the report; exit status 1 when ok is false"""
    write_report(render(build_report(command, results), fmt, columns), output)
    if not ok:
        click.get_current_context().exit(1)


def run_tasks(worker, tasks, jobs=1):
    """
    [worker(**task) for task in tasks], fanned out to a process pool when
    jobs > 1.  Results keep the task order.
    """
    if jobs <= 1 or len(tasks) <= 1:
        return [worker(**task) for task in tasks]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        futures = [pool.submit(worker, **task) for task in tasks]
        return [future.result() for future in futures]
