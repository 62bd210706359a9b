from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, FrozenSet, Mapping, Optional, Tuple

from .fjspCheck import Boundary
from .fjspInstance import DurationTable, FjspInstance, OpKey, Solution


@dataclass(frozen=True)
class RhoState:
    """Everything known at the start of one rolling-horizon iteration."""

    instance: FjspInstance
    iteration: int
    plan_ops: Tuple[OpKey, ...]
    overlap_ops: Tuple[OpKey, ...]
    new_ops: Tuple[OpKey, ...]
    # previous window's assignment and starts, restricted to overlap_ops
    prev_solution: Solution = field(default_factory=Solution)
    # durations the previous window was planned with
    prev_durations: DurationTable = field(default_factory=dict)
    executed: Solution = field(default_factory=Solution)
    boundary: Boundary = field(default_factory=lambda: Boundary({}, {}))
    clock: int = 0
    down: FrozenSet[int] = frozenset()
    prev_down: FrozenSet[int] = frozenset()
    duration_overlay: Optional[DurationTable] = None

    def observed_durations(self) -> Dict[OpKey, Mapping[int, int]]:
        """Durations the current window is planned with."""
        if self.duration_overlay is not None:
            return {k: self.duration_overlay[k] for k in self.plan_ops}
        return {k: self.instance.op(k).compatible for k in self.plan_ops}

    def prev_machine(self, key: OpKey) -> int:
        return self.prev_solution.assignment[key]

    def prev_duration(self, key: OpKey) -> int:
        durations = self.prev_durations.get(key) or self.instance.op(key).compatible
        return durations[self.prev_machine(key)]
