from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple, Optional, Tuple, Union

import numpy as np

from .errors import ConfigurationError, UndefinedMetricError

TOLERANCE = 1e-12


@dataclass(frozen=True)
class LinearDecay:
    """Fix probability p(i) = b - m * i / W of the i-th overlapping operation."""

    b: float
    m: float
    W: int

    def __post_init__(self):
        if self.W < 1:
            raise ConfigurationError(f"overlap width must be >= 1, got {self.W}")
        p = self.pfix()
        if p.min() < -TOLERANCE or p.max() > 1.0 + TOLERANCE:
            raise ConfigurationError(f"b={self.b}, m={self.m} gives fix probabilities outside [0, 1]")

    def pfix(self) -> np.ndarray:
        i = np.arange(1, self.W + 1, dtype=np.float64)
        return self.b - self.m * i / self.W

    @property
    def expected_fix(self) -> float:
        return (self.b - self.m / 2.0) * self.W - self.m / 2.0


@dataclass(frozen=True)
class RandomMethod:
    sigma: float


@dataclass(frozen=True)
class FirstMethod:
    sigma: float


@dataclass(frozen=True)
class LRhoMethod:
    alpha: float
    beta: float


Method = Union[RandomMethod, FirstMethod, LRhoMethod]


def _check_fraction(name: str, value: float) -> None:
    if not 0.0 <= value <= 1.0:
        raise ConfigurationError(f"{name} must lie in [0, 1], got {value}")


def check_method(method: Method) -> None:
    if isinstance(method, LRhoMethod):
        _check_fraction("alpha", method.alpha)
        _check_fraction("beta", method.beta)
    elif isinstance(method, (RandomMethod, FirstMethod)):
        _check_fraction("sigma", method.sigma)
    else:
        raise ConfigurationError(f"unknown method {method!r}")


@dataclass(frozen=True)
class ErrorPair:
    """Expected false-positive/false-negative counts and rates over one overlap."""

    expected_fp: float
    expected_fn: float
    fpr: Optional[float]
    fnr: Optional[float]

    @classmethod
    def from_errors(cls, fp: float, fn: float, W: int, expected_fix: float) -> "ErrorPair":
        negatives = W - expected_fix
        return cls(
            fp,
            fn,
            fp / negatives if negatives > 0 else None,
            fn / expected_fix if expected_fix > 0 else None,
        )

    @classmethod
    def from_rates(cls, alpha: float, beta: float, W: int, expected_fix: float) -> "ErrorPair":
        return cls.from_errors(alpha * (W - expected_fix), beta * expected_fix, W, expected_fix)


def closed_form_errors(method: Method, decay: LinearDecay, approximate: bool = False) -> ErrorPair:
    """
    Expected FP and FN counts under a linear fix-probability decay.

    The exact forms keep the m/2 tail of the expected fix count; `approximate`
    drops it everywhere.
    """
    check_method(method)
    b, m, W = decay.b, decay.m, decay.W
    tail = 0.0 if approximate else m / 2.0
    expected = (b - m / 2.0) * W - tail
    if isinstance(method, RandomMethod):
        s = method.sigma
        fp, fn = s * (W - expected), (1.0 - s) * expected
    elif isinstance(method, FirstMethod):
        s = method.sigma
        fp = s * ((1.0 - b + m * s / 2.0) * W + tail)
        fn = expected - s * ((b - m * s / 2.0) * W - tail)
    else:
        fp, fn = method.alpha * (W - expected), method.beta * expected
    return ErrorPair.from_errors(fp, fn, W, expected)


class RatePairs(NamedTuple):
    random: Tuple[float, float]
    first: Tuple[float, float]


def first_random_rates(decay: LinearDecay, sigma: float) -> RatePairs:
    """(alpha, beta) of Random and First at the same sigma, ignoring the m/2 tail."""
    _check_fraction("sigma", sigma)
    b, m = decay.b, decay.m
    positive = b - m / 2.0
    negative = 1.0 - b + m / 2.0
    if positive <= 0 or negative <= 0:
        raise UndefinedMetricError(f"rates undefined for b={b}, m={m}")
    alpha = sigma * (1.0 - b + m * sigma / 2.0) / negative
    beta = 1.0 - sigma * (b - m * sigma / 2.0) / positive
    return RatePairs((sigma, 1.0 - sigma), (alpha, beta))
