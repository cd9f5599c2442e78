"""
Runs benchmark instances through the evaluation chain and collects one CSV
row per (family, n, seed, mode).
"""

import csv
import logging
import time
from itertools import groupby

from celery import group

from engine.evalchain import MODE_ALIASES, evaluate_chain, split_program
from engine.exceptions import BoundExceeded
from engine.limits import get_limits

from .generators import build_instance

logger = logging.getLogger(__name__)

CSV_COLUMNS = (
    'family', 'n', 'seed', 'mode', 'answer_count', 'unit_groundings', 'unit_solves',
    'conflicts', 'learned_constraints', 'wall_ms',
)


def _row(family, n, seed, mode, **values):
    row = dict.fromkeys(CSV_COLUMNS, '')
    row.update(family=family, n=n, seed=seed, mode=mode, **values)
    return row


def run_instance(family, n, seed, mode, limits=None):
    """Generate and evaluate one instance. A passed bound is recorded as 'bound:<name>'."""
    mode = MODE_ALIASES.get(mode, mode)
    limits = limits or get_limits()
    started = time.perf_counter()
    try:
        instance = build_instance(family, n, seed)
        registry = instance.registry()
        chain = split_program(instance.program, registry)
        result = evaluate_chain(chain, mode=mode, registry=registry, limits=limits)
    except BoundExceeded as exc:
        logger.warning("%s n=%d seed=%d %s: %s", family, n, seed, mode, exc)
        return _row(family, n, seed, mode, answer_count=f"bound:{exc.limit}",
                    wall_ms=round((time.perf_counter() - started) * 1000))
    logger.info("%s n=%d seed=%d %s: %d answer sets, solves %s", family, n, seed, mode,
                len(result.answer_sets), result.column('solves'))
    return _row(
        family, n, seed, mode,
        answer_count=len(result.answer_sets),
        unit_groundings=result.column('groundings'),
        unit_solves=result.column('solves'),
        conflicts=result.total('conflicts'),
        learned_constraints=len(result.learned),
        wall_ms=round((time.perf_counter() - started) * 1000),
    )


def timeout_row(family, n, seed, mode):
    return _row(family, n, seed, mode, answer_count='timeout')


def _jobs(family, sizes, seeds, modes):
    return [(family, n, seed, MODE_ALIASES.get(mode, mode)) for n in sizes for seed in seeds for mode in modes]


def check_agreement(rows):
    """Log every instance whose modes found different numbers of answer sets."""
    disagreeing = []
    key = lambda row: (row['family'], row['n'], row['seed'])
    for instance, group_rows in groupby(sorted(rows, key=key), key=key):
        counts = {row['mode']: row['answer_count'] for row in group_rows if isinstance(row['answer_count'], int)}
        if len(set(counts.values())) > 1:
            logger.error("modes disagree on %s n=%d seed=%d: %s", *instance, counts)
            disagreeing.append(instance)
    return disagreeing


def run_suite(family, sizes, seeds, modes, jobs=1):
    """
    All rows in (n, seed, mode) order. With jobs > 1 the instances are
    dispatched as a celery group, each with the configured soft time limit.
    """
    from .tasks import run_instance_task

    work = _jobs(family, sizes, seeds, modes)
    logger.info("running %d %s instances with %d job(s)", len(work), family, jobs)
    if jobs > 1:
        timeout = get_limits().bench_timeout_s
        signatures = group([run_instance_task.s(*args).set(soft_time_limit=timeout) for args in work])
        rows = [result.get() for result in signatures.apply_async().results]
    else:
        rows = [run_instance(*args) for args in work]
    check_agreement(rows)
    return rows


def write_csv(rows, stream):
    writer = csv.DictWriter(stream, fieldnames=CSV_COLUMNS, lineterminator='\n')
    writer.writeheader()
    writer.writerows(rows)
