from __future__ import annotations

from dataclasses import asdict, dataclass, field
from typing import List, Optional, Tuple

from .errors import UndefinedMetricError

EFFORT_SECONDS = "seconds"
EFFORT_MOVES = "moves"


@dataclass(frozen=True)
class RunReport:
    """Outcome of one method on one instance."""

    method: str
    objective: int
    effort: float
    effort_unit: str = EFFORT_SECONDS
    instance_id: Optional[int] = None
    iterations: int = 0
    ti_percent: Optional[float] = None
    oi_percent: Optional[float] = None
    # (fp, fn) per iteration against look-ahead labels when they were computed
    fp_fn: List[Tuple[int, int]] = field(default_factory=list)

    def row(self) -> dict:
        """Flat dict for CSV output."""
        row = asdict(self)
        fp_fn = row.pop("fp_fn")
        row["fp_total"] = sum(fp for fp, _ in fp_fn)
        row["fn_total"] = sum(fn for _, fn in fp_fn)
        return row


def improvement_metrics(base: RunReport, other: RunReport) -> Tuple[float, float]:
    """(OI%, TI%) of `other` over `base`; negative values indicate degradation."""
    if base.objective <= 0:
        raise UndefinedMetricError(f"base objective {base.objective} is not positive")
    if base.effort <= 0:
        raise UndefinedMetricError(f"base effort {base.effort} is not positive")
    if base.effort_unit != other.effort_unit:
        raise UndefinedMetricError(
            f"cannot compare {other.effort_unit} against {base.effort_unit}"
        )
    oi = (base.objective - other.objective) / base.objective * 100.0
    ti = (base.effort - other.effort) / base.effort * 100.0
    return oi, ti
