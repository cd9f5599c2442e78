from celery import shared_task
from celery.exceptions import SoftTimeLimitExceeded

from .suite import run_instance, timeout_row


@shared_task(name='bench.tasks.run_instance_task')
def run_instance_task(family, n, seed, mode):
    try:
        return run_instance(family, n, seed, mode)
    except SoftTimeLimitExceeded:
        return timeout_row(family, n, seed, mode)
