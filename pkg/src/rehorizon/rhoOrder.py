from __future__ import annotations

from fractions import Fraction
from typing import List, Optional

from .errors import ConfigurationError
from .fjspInstance import FjspInstance, ObjectiveKind, OpKey


def rho_order(instance: FjspInstance, objective: Optional[ObjectiveKind] = None) -> List[OpKey]:
    """
    Total order in which the rolling horizon visits operations.

    Makespan: relative position k/n_j inside the job. Delay objectives: release
    time. Ties fall back to (job_id, op_index) in both cases.
    """
    objective = objective or instance.objective
    if objective is ObjectiveKind.MAKESPAN:
        return sorted(
            instance.keys(),
            key=lambda key: (Fraction(key[1], len(instance.jobs[key[0]])), key),
        )

    ops = list(instance.operations())
    if any(op.release_time is None for op in ops):
        raise ConfigurationError(f"ordering for {objective.value} needs release times")
    return [op.key for op in sorted(ops, key=lambda op: (op.release_time, op.key))]
