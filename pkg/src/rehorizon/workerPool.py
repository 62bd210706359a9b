from __future__ import annotations

import logging
import os
import uuid
from concurrent.futures import FIRST_COMPLETED, ProcessPoolExecutor, wait
from functools import partial
from typing import Callable, List, Optional, Sequence, TypeVar

from .errors import ConfigurationError
from .sharedCounter import SharedProgress

logger = logging.getLogger(__name__)

WORKERS_ENV = "REHORIZON_WORKERS"
POLL_SECONDS = 5.0

T = TypeVar("T")
R = TypeVar("R")

# progress of the pool task running in this worker process, if any
_active: Optional[SharedProgress] = None


def default_workers() -> int:
    text = os.environ.get(WORKERS_ENV, "1")
    try:
        workers = int(text)
    except ValueError:
        raise ConfigurationError(f"{WORKERS_ENV} must be an integer, got {text!r}") from None
    return max(workers, 1)


def report_window(committed: int) -> None:
    """Count one solved RHO window towards the enclosing pool's progress; a no-op outside pool workers."""
    if _active is not None:
        _active.add_window(committed)


def _tracked(fn: Callable[[T], R], progress_name: str, item: T) -> R:
    global _active
    _active = SharedProgress(progress_name)
    try:
        return fn(item)
    finally:
        _active.close()
        _active = None


def run_pool(
    fn: Callable[[T], R],
    items: Sequence[T],
    workers: Optional[int] = None,
    poll_seconds: float = POLL_SECONDS,
) -> List[R]:
    """
    Apply `fn` to every item, in worker processes when `workers` > 1.

    Results come back in item order whatever order tasks finish in. `fn` must
    be picklable (a module-level function or a partial of one). While tasks
    run, the parent logs finished tasks and the windows workers have solved
    so far, every `poll_seconds` and whenever a task finishes.
    """
    workers = default_workers() if workers is None else workers
    items = list(items)
    if workers <= 1 or len(items) <= 1:
        return [fn(item) for item in items]

    progress = SharedProgress(f"rh{uuid.uuid4().hex[:10]}")
    try:
        with ProcessPoolExecutor(max_workers=min(workers, len(items))) as pool:
            futures = [pool.submit(partial(_tracked, fn, progress.name), item) for item in items]
            pending = set(futures)
            while pending:
                _, pending = wait(pending, timeout=poll_seconds, return_when=FIRST_COMPLETED)
                windows, operations = progress.snapshot()
                failed = sum(1 for f in futures if f.done() and f.exception() is not None)
                logger.info(
                    "%d/%d tasks finished (%d failed), %d windows solved, %d operations committed",
                    len(futures) - len(pending), len(futures), failed, windows, operations,
                )
            return [future.result() for future in futures]
    finally:
        progress.close()
        progress.unlink()
