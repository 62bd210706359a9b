from __future__ import annotations

import math
from dataclasses import dataclass
from functools import partial
from typing import Optional, Sequence, Tuple

import numpy as np

from .closedForm import FirstMethod, Method, RandomMethod, check_method
from .errors import ConfigurationError
from .seededStreams import Purpose, stream
from .workerPool import run_pool

CHUNK = 10_000


@dataclass(frozen=True)
class MonteCarloEstimate:
    expected_fp: float
    expected_fn: float
    fp_stderr: float
    fn_stderr: float
    trials: int

    def agrees(self, fp: float, fn: float, rel: float = 0.01, sigmas: float = 3.0) -> bool:
        """True when both estimates are within `rel` relative error or `sigmas` standard errors."""

        def close(estimate, stderr, target):
            return abs(estimate - target) <= max(rel * abs(target), sigmas * stderr, 1e-12)

        return close(self.expected_fp, self.fp_stderr, fp) and close(self.expected_fn, self.fn_stderr, fn)


def _select(method: Method, oracle: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    trials, width = oracle.shape
    if isinstance(method, RandomMethod):
        return rng.random((trials, width)) < method.sigma
    if isinstance(method, FirstMethod):
        prefix = np.arange(width) < math.floor(method.sigma * width + 1e-9)
        return np.broadcast_to(prefix, oracle.shape)
    keep = rng.random((trials, width))
    return np.where(oracle, keep >= method.beta, keep < method.alpha)


def _chunk(index_and_size: Tuple[int, int], method: Method, pfix: np.ndarray, seed: int):
    index, size = index_and_size
    rng = stream(seed, Purpose.MONTE_CARLO, index)
    oracle = rng.random((size, len(pfix))) < pfix
    selected = _select(method, oracle, rng)
    fp = np.sum(selected & ~oracle, axis=1, dtype=np.float64)
    fn = np.sum(~selected & oracle, axis=1, dtype=np.float64)
    return size, fp.sum(), (fp**2).sum(), fn.sum(), (fn**2).sum()


def monte_carlo_errors(
    method: Method,
    pfix: Sequence[float],
    trials: int,
    seed: int = 0,
    *,
    workers: int = 1,
    chunk: Optional[int] = None,
) -> MonteCarloEstimate:
    """
    Sampled FP/FN counts: oracle membership is Bernoulli(pfix(i)) per position
    and the method selects from it (First takes the floor(sigma * W) prefix).
    Chunks draw from their own seeded streams.
    """
    if trials < 1:
        raise ConfigurationError(f"trials must be >= 1, got {trials}")
    check_method(method)
    p = np.asarray(pfix, dtype=np.float64)
    size = chunk or CHUNK
    sizes = [(i, min(size, trials - start)) for i, start in enumerate(range(0, trials, size))]
    parts = run_pool(partial(_chunk, method=method, pfix=p, seed=seed), sizes, workers)
    n = sum(part[0] for part in parts)
    fp_sum, fp_sq, fn_sum, fn_sq = (sum(part[k] for part in parts) for k in range(1, 5))

    def mean_and_stderr(total, squares):
        mean = total / n
        if n < 2:
            return mean, 0.0
        var = max(squares - n * mean * mean, 0.0) / (n - 1)
        return mean, math.sqrt(var / n)

    fp, fp_se = mean_and_stderr(fp_sum, fp_sq)
    fn, fn_se = mean_and_stderr(fn_sum, fn_sq)
    return MonteCarloEstimate(fp, fn, fp_se, fn_se, n)
