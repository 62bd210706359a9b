from __future__ import annotations

import logging
from collections import Counter, defaultdict
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence

import numpy as np
from scipy import stats

from .closedForm import LinearDecay
from .errors import ConfigurationError, InsufficientDataError
from .features import StateRecord

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class EmpiricalPfix:
    p_hat: np.ndarray
    stderr: np.ndarray
    iterations: int
    records: int

    @property
    def W(self) -> int:
        return len(self.p_hat)

    @property
    def positions(self) -> np.ndarray:
        """i / W for i = 1..W."""
        return np.arange(1, self.W + 1, dtype=np.float64) / self.W


def empirical_pfix(records: Sequence[StateRecord]) -> EmpiricalPfix:
    """
    Fraction of overlapping operations the look-ahead fixes, by overlap position.

    Labels are first averaged over instances within each iteration index, then
    across iteration indices; stderr is the spread of the per-iteration means.
    Records whose overlap width differs from the most common one are skipped.
    """
    labelled = [r for r in records if r.labels is not None and r.width > 0]
    if not labelled:
        raise InsufficientDataError("no labelled records with a non-empty overlap")
    width, _ = Counter(r.width for r in labelled).most_common(1)[0]
    kept = [r for r in labelled if r.width == width]
    if len(kept) < len(labelled):
        logger.warning("skipped %d records whose overlap width is not %d", len(labelled) - len(kept), width)

    by_iteration: Dict[int, List[np.ndarray]] = defaultdict(list)
    for record in kept:
        by_iteration[record.iteration].append(record.overlap_labels().astype(np.float64))
    means = np.array([np.mean(rows, axis=0) for _, rows in sorted(by_iteration.items())])
    p_hat = means.mean(axis=0)
    if len(means) > 1:
        stderr = means.std(axis=0, ddof=1) / np.sqrt(len(means))
    else:
        stderr = np.zeros(width)
    return EmpiricalPfix(p_hat, stderr, len(means), len(kept))


@dataclass(frozen=True)
class FittedDecay:
    """Least-squares line through p_hat against i/W; b and m are unconstrained."""

    b: float
    m: float
    W: int
    slope_pvalue: Optional[float]

    def line(self) -> np.ndarray:
        i = np.arange(1, self.W + 1, dtype=np.float64)
        return self.b - self.m * i / self.W

    def clamped(self) -> LinearDecay:
        b = min(max(self.b, 0.0), 1.0)
        m = min(max(self.m, 0.0), b)
        return LinearDecay(b, m, self.W)


def fit_linear_decay(p_hat: Sequence[float]) -> FittedDecay:
    """
    OLS fit of p_hat(i) = b - m * i / W. `slope_pvalue` is the one-sided
    p-value against a non-negative slope, None when W = 2.
    """
    y = np.asarray(p_hat, dtype=np.float64)
    W = len(y)
    if W < 2:
        raise ConfigurationError(f"need at least two positions to fit, got {W}")
    x = np.arange(1, W + 1, dtype=np.float64) / W
    slope, intercept = np.polyfit(x, y, 1)
    pvalue = None
    if W > 2:
        residual = y - (intercept + slope * x)
        dof = W - 2
        sxx = float(np.sum((x - x.mean()) ** 2))
        scale = float(np.sqrt(np.sum(residual**2) / dof / sxx))
        if scale > 0:
            pvalue = float(stats.t.cdf(slope / scale, dof))
        else:
            pvalue = 0.0 if slope < 0 else 1.0
    return FittedDecay(float(intercept), float(-slope), W, pvalue)
