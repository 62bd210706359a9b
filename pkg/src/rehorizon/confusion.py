from __future__ import annotations

from typing import AbstractSet, NamedTuple, Optional, Sequence

import numpy as np

from .errors import ConfigurationError


def _ratio(num: float, den: float) -> Optional[float]:
    return None if den == 0 else num / den


class Confusion(NamedTuple):
    tp: int
    fp: int
    fn: int
    tn: int
    accuracy: Optional[float]
    precision: Optional[float]
    recall: Optional[float]
    alpha: Optional[float]
    beta: Optional[float]


def confusion(predicted_fix: AbstractSet, oracle_fix: AbstractSet, overlap: AbstractSet) -> Confusion:
    """
    Predicted fix set against the look-ahead fix set over one overlap.

    alpha = FP / (|overlap| - |oracle|) and beta = FN / |oracle|; undefined
    ratios come back as None.
    """
    predicted, oracle, overlap = set(predicted_fix), set(oracle_fix), set(overlap)
    if not predicted <= overlap or not oracle <= overlap:
        raise ConfigurationError("fix sets must be subsets of the overlap")
    tp = len(predicted & oracle)
    fp = len(predicted - oracle)
    fn = len(oracle - predicted)
    tn = len(overlap) - tp - fp - fn
    return Confusion(
        tp,
        fp,
        fn,
        tn,
        _ratio(tp + tn, len(overlap)),
        _ratio(tp, tp + fp),
        _ratio(tp, tp + fn),
        _ratio(fp, len(overlap) - len(oracle)),
        _ratio(fn, len(oracle)),
    )


class ClassifierMetrics(NamedTuple):
    accuracy: Optional[float]
    tpr: Optional[float]
    tnr: Optional[float]
    precision: Optional[float]
    recall: Optional[float]


def classifier_metrics(probabilities: Sequence[float], labels: Sequence[int], threshold: float = 0.5) -> ClassifierMetrics:
    predicted = np.asarray(probabilities, dtype=np.float64) >= threshold
    actual = np.asarray(labels) == 1
    if predicted.shape != actual.shape:
        raise ConfigurationError(f"{predicted.shape[0]} predictions for {actual.shape[0]} labels")
    tp = int(np.sum(predicted & actual))
    tn = int(np.sum(~predicted & ~actual))
    fp = int(np.sum(predicted & ~actual))
    fn = int(np.sum(~predicted & actual))
    return ClassifierMetrics(
        _ratio(tp + tn, actual.size),
        _ratio(tp, tp + fn),
        _ratio(tn, tn + fp),
        _ratio(tp, tp + fp),
        _ratio(tp, tp + fn),
    )
