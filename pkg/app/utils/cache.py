"""
Result cache

Results are stored as canonical JSON text in CacheRecord rows keyed by
(operation, canonical params, artifact version).  Every load verifies the
sha256 checksum; a corrupted row is discarded and the result recomputed.
"""
import hashlib
import json
import logging

from flask import current_app
from sqlalchemy.exc import IntegrityError, SQLAlchemyError

from app import db
from app.models.cache_record import CacheRecord
from app.utils.helpers import run_tasks

logger = logging.getLogger(__name__)


def canonical(value):
    return json.dumps(value, sort_keys=True, separators=(',', ':'))


def checksum(payload):
    return hashlib.sha256(payload.encode('utf-8')).hexdigest()


def cache_key(operation, params, version=None):
    """(operation, canonical params, version)"""
    if version is None:
        version = current_app.config['ARTIFACT_VERSION']
    return operation, canonical(params), version


def _lookup(key):
    operation, params, version = key
    return CacheRecord.query.filter_by(operation=operation, params=params, version=version).first()


def store(operation, params, payload, version=None):
    """
    Persist payload (a str) under the key; an existing row for the key wins.

    Returns the stored CacheRecord, or None if the database refused it.
    """
    key = cache_key(operation, params, version)
    record = CacheRecord(operation=key[0], params=key[1], version=key[2], payload=payload, checksum=checksum(payload))
    try:
        db.session.add(record)
        db.session.commit()
        return record
    except IntegrityError:
        # another writer got there first
        db.session.rollback()
        return _lookup(key)
    except SQLAlchemyError as e:
        db.session.rollback()
        logger.warning(f'Could not store cache entry {operation} {key[1]}: {e}')
        return None


def load(operation, params, version=None):
    """Payload stored under the key, or None when absent or corrupted"""
    key = cache_key(operation, params, version)
    try:
        record = _lookup(key)
    except SQLAlchemyError as e:
        db.session.rollback()
        logger.warning(f'Could not read cache entry {operation} {key[1]}: {e}')
        return None
    if record is None:
        return None
    if record.payload is None or checksum(record.payload) != record.checksum:
        logger.warning(f'Discarding corrupted cache entry {record.operation} {record.params}')
        try:
            db.session.delete(record)
            db.session.commit()
        except SQLAlchemyError as e:
            db.session.rollback()
            logger.warning(f'Could not delete corrupted cache entry: {e}')
        return None
    return record.payload


def cached(operation, params, compute, enabled=None):
    """
    Decoded JSON result of compute() through the cache.

    compute must return a JSON-serializable value built from str, int,
    bool, None, lists and dicts.
    """
    if enabled is None:
        enabled = current_app.config.get('CACHE_ENABLED', True)
    if enabled:
        payload = load(operation, params)
        if payload is not None:
            logger.debug(f'cache hit {operation} {canonical(params)}')
            return json.loads(payload)
    payload = canonical(compute())
    if enabled:
        store(operation, params, payload)
    return json.loads(payload)


def cache_roundtrip(record):
    """Store a transient CacheRecord's payload and load it back"""
    params = json.loads(record.params)
    store(record.operation, params, record.payload, record.version)
    return load(record.operation, params, record.version)


def clear(operation=None):
    """Delete cache rows, optionally only those of one operation; returns the count"""
    query = CacheRecord.query
    if operation is not None:
        query = query.filter_by(operation=operation)
    try:
        count = query.delete()
        db.session.commit()
        return count
    except SQLAlchemyError as e:
        db.session.rollback()
        logger.error(f'Could not clear cache: {e}')
        raise


def stats():
    """{operation: {'entries', 'bytes', 'versions'}}"""
    out = {}
    for record in CacheRecord.query.order_by(CacheRecord.operation, CacheRecord.id).all():
        entry = out.setdefault(record.operation, {'entries': 0, 'bytes': 0, 'versions': []})
        entry['entries'] += 1
        entry['bytes'] += len(record.payload or '')
        if record.version not in entry['versions']:
            entry['versions'].append(record.version)
    return out


def cached_many(operation, tasks, worker, jobs=1, enabled=None):
    """
    cached() over a list of parameter dicts; the misses are computed with
    run_tasks(worker, misses, jobs) and stored from this process only.
    """
    if enabled is None:
        enabled = current_app.config.get('CACHE_ENABLED', True)
    results = [None] * len(tasks)
    missing = []
    for position, params in enumerate(tasks):
        payload = load(operation, params) if enabled else None
        if payload is None:
            missing.append(position)
        else:
            results[position] = json.loads(payload)
    logger.debug(f'{operation}: {len(tasks) - len(missing)} cached, {len(missing)} to compute')
    computed = run_tasks(worker, [tasks[p] for p in missing], jobs)
    for position, result in zip(missing, computed):
        payload = canonical(result)
        if enabled:
            store(operation, tasks[position], payload)
        # decode the payload so hits and misses render identically
        results[position] = json.loads(payload)
    return results
