from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Dict, List, Sequence, Tuple

from .errors import ConfigurationError

WINDOW_STEPS = (
    (50, 15), (50, 20), (50, 25), (50, 30),
    (80, 20), (80, 25), (80, 30), (80, 35), (80, 40),
    (100, 20), (100, 30), (100, 40), (100, 50),
)
TIME_LIMITS = ((15, 2), (30, 3), (60, 3))
BUCKET_STEP = 0.1


def default_grid() -> List[Tuple[int, int, str]]:
    """(H, S, budget) for every window/step pair and wall-clock limit pair."""
    return [(h, s, f"wall:{t},{es}") for (h, s), (t, es) in itertools.product(WINDOW_STEPS, TIME_LIMITS)]


@dataclass(frozen=True)
class SweepPoint:
    method: str
    H: int
    S: int
    budget: str
    objective: float
    effort: float


def objective_bucket(objective: float, obj_star: float, step: float = BUCKET_STEP) -> int:
    if math.isinf(step):
        return 0
    rel = (objective - obj_star) / max(obj_star, 1.0)
    # round away representation noise before flooring onto the bucket edge
    return max(int(math.floor(round(rel / step, 9))), 0)


def line_search_select(points: Sequence[SweepPoint], obj_star: float, step: float = BUCKET_STEP) -> SweepPoint:
    """
    Fastest point in the lowest non-empty objective bucket, buckets being
    [obj* (1 + i step), obj* (1 + (i + 1) step)). An infinite step puts every
    point in one bucket.
    """
    if not points:
        raise ConfigurationError("cannot select from an empty grid")
    return min(points, key=lambda p: (objective_bucket(p.objective, obj_star, step), p.effort, p.H, p.S, p.budget))


def select_per_method(points: Sequence[SweepPoint], step: float = BUCKET_STEP) -> Dict[str, SweepPoint]:
    """Best setting per method against the best objective over all methods and settings."""
    if not points:
        raise ConfigurationError("cannot select from an empty grid")
    obj_star = min(p.objective for p in points)
    methods = sorted({p.method for p in points})
    return {m: line_search_select([p for p in points if p.method == m], obj_star, step) for m in methods}
