from __future__ import annotations

import logging
from typing import List

from .errors import ConfigurationError
from .fjspInstance import FjspInstance, ObjectiveKind, Operation
from .seededStreams import Purpose, stream

logger = logging.getLogger(__name__)

MAKESPAN_DURATION = (1, 99)
DELAY_LOW_CHOICES = (3, 5, 7, 9)
DELAY_SPAN_CHOICES = (9, 12, 15, 18, 21)
RELEASE_STEP = (0, 15)
TARGET_SLACK = (0, 30)


def _check_counts(num_machines: int, num_jobs: int, ops_per_job: int) -> None:
    if min(num_machines, num_jobs, ops_per_job) < 1:
        raise ConfigurationError(
            f"instance sizes must be >= 1, got ({num_machines}, {num_jobs}, {ops_per_job})"
        )


def gen_makespan_instance(seed: int, num_machines: int, num_jobs: int, ops_per_job: int) -> FjspInstance:
    """Random-subset compatibility with U[1, 99] durations and no release times."""
    _check_counts(num_machines, num_jobs, ops_per_job)
    rng = stream(seed, Purpose.INSTANCE)
    jobs: List[tuple] = []
    for j in range(num_jobs):
        job = []
        for k in range(1, ops_per_job + 1):
            size = int(rng.integers(1, num_machines, endpoint=True))
            machines = sorted(int(m) for m in rng.choice(num_machines, size=size, replace=False))
            durations = rng.integers(*MAKESPAN_DURATION, size=size, endpoint=True)
            job.append(Operation(j, k, {m: int(d) for m, d in zip(machines, durations)}))
        jobs.append(tuple(job))
    return FjspInstance(num_machines, tuple(jobs), ObjectiveKind.MAKESPAN, seed)


def gen_delay_instance(
    seed: int,
    num_machines: int,
    num_jobs: int,
    ops_per_job: int,
    objective: ObjectiveKind = ObjectiveKind.TOTAL_START_DELAY,
) -> FjspInstance:
    """
    Every machine compatible, durations from a per-instance range inside [3, 30],
    cumulative U[0, 15] release steps and targets at release + U[0, 30].
    """
    _check_counts(num_machines, num_jobs, ops_per_job)
    rng = stream(seed, Purpose.INSTANCE)
    low = int(rng.choice(DELAY_LOW_CHOICES))
    high = low + int(rng.choice(DELAY_SPAN_CHOICES))
    logger.debug("delay instance seed=%s duration range [%d, %d]", seed, low, high)

    jobs: List[tuple] = []
    for j in range(num_jobs):
        job = []
        release = 0
        for k in range(1, ops_per_job + 1):
            release += int(rng.integers(*RELEASE_STEP, endpoint=True))
            target = release + int(rng.integers(*TARGET_SLACK, endpoint=True))
            durations = rng.integers(low, high, size=num_machines, endpoint=True)
            job.append(
                Operation(
                    j,
                    k,
                    {m: int(d) for m, d in enumerate(durations)},
                    release_time=release,
                    target_end_time=target,
                )
            )
        jobs.append(tuple(job))
    return FjspInstance(num_machines, tuple(jobs), objective, seed)
