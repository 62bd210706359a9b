from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass
from enum import Enum
from typing import AbstractSet, Iterable, List, Mapping, NamedTuple, Optional, Tuple

from .errors import ConfigurationError, IncompleteSolutionError
from .fjspInstance import DurationTable, FjspInstance, ObjectiveKind, OpKey, Solution


class Boundary(NamedTuple):
    """Earliest allowed start per job and earliest allowed use per machine."""

    prev_job_end: Mapping[int, int]
    prev_machine_end: Mapping[int, int]


class ViolationKind(Enum):
    UNASSIGNED = "Unassigned"
    INCOMPATIBLE_MACHINE = "IncompatibleMachine"
    UNAVAILABLE_MACHINE = "UnavailableMachine"
    PRECEDENCE = "PrecedenceViolation"
    MACHINE_OVERLAP = "MachineOverlap"
    RELEASE = "ReleaseViolation"
    JOB_BOUNDARY = "JobBoundaryViolation"
    MACHINE_BOUNDARY = "MachineBoundaryViolation"


@dataclass(frozen=True)
class Violation:
    kind: ViolationKind
    ops: Tuple[OpKey, ...]
    detail: str = ""

    def __str__(self) -> str:
        return f"{self.kind.value}{list(self.ops)}: {self.detail}"


def _scope(instance: FjspInstance, scope: Optional[Iterable[OpKey]]) -> List[OpKey]:
    return list(instance.keys()) if scope is None else list(scope)


def evaluate_objective(
    instance: FjspInstance,
    solution: Solution,
    *,
    objective: Optional[ObjectiveKind] = None,
    durations: Optional[DurationTable] = None,
    scope: Optional[Iterable[OpKey]] = None,
) -> int:
    """Objective value of `solution` over `scope` (all operations by default)."""
    objective = objective or instance.objective
    durations = durations if durations is not None else instance.durations()
    keys = _scope(instance, scope)
    missing = [k for k in keys if k not in solution.assignment or k not in solution.start]
    if missing:
        raise IncompleteSolutionError(f"{len(missing)} operations lack a machine or start, e.g. {missing[0]}")
    ops = [instance.op(k) for k in keys]
    if objective.needs_release and any(op.release_time is None for op in ops):
        raise ConfigurationError(f"objective {objective.value} needs release times")
    if objective.needs_target and any(op.target_end_time is None for op in ops):
        raise ConfigurationError(f"objective {objective.value} needs target end times")

    if objective is ObjectiveKind.MAKESPAN:
        return max((solution.end(k, durations) for k in keys), default=0)
    total = sum(solution.start[op.key] - op.release_time for op in ops)
    if objective is ObjectiveKind.START_PLUS_END_DELAY:
        total += sum(max(solution.end(op.key, durations) - op.target_end_time, 0) for op in ops)
    return total


def check_feasibility(
    instance: FjspInstance,
    solution: Solution,
    boundary: Optional[Boundary] = None,
    *,
    durations: Optional[DurationTable] = None,
    scope: Optional[Iterable[OpKey]] = None,
    unavailable: AbstractSet[int] = frozenset(),
) -> List[Violation]:
    """All constraint violations of `solution`; an empty list means feasible."""
    durations = durations if durations is not None else instance.durations()
    keys = _scope(instance, scope)
    in_scope = set(keys)
    violations: List[Violation] = []

    placed: List[OpKey] = []
    for key in keys:
        if key not in solution.assignment or key not in solution.start:
            violations.append(Violation(ViolationKind.UNASSIGNED, (key,), "no machine or start"))
            continue
        machine = solution.assignment[key]
        if machine not in instance.op(key).compatible:
            violations.append(
                Violation(ViolationKind.INCOMPATIBLE_MACHINE, (key,), f"machine {machine}")
            )
            continue
        if machine in unavailable:
            violations.append(Violation(ViolationKind.UNAVAILABLE_MACHINE, (key,), f"machine {machine}"))
        placed.append(key)

    placed_set = set(placed)
    for key in placed:
        op = instance.op(key)
        start = solution.start[key]
        if op.release_time is not None and start < op.release_time:
            violations.append(
                Violation(ViolationKind.RELEASE, (key,), f"start {start} < release {op.release_time}")
            )
        pred = (op.job_id, op.op_index - 1)
        if pred in placed_set:
            pred_end = solution.end(pred, durations)
            if pred_end > start:
                violations.append(
                    Violation(ViolationKind.PRECEDENCE, (pred, key), f"end {pred_end} > start {start}")
                )
        elif boundary is not None and pred not in in_scope:
            floor = boundary.prev_job_end.get(op.job_id)
            if floor is not None and start < floor:
                violations.append(
                    Violation(ViolationKind.JOB_BOUNDARY, (key,), f"start {start} < job end {floor}")
                )
        if boundary is not None:
            floor = boundary.prev_machine_end.get(solution.assignment[key])
            if floor is not None and start < floor:
                violations.append(
                    Violation(ViolationKind.MACHINE_BOUNDARY, (key,), f"start {start} < machine end {floor}")
                )

    by_machine = defaultdict(list)
    for key in placed:
        by_machine[solution.assignment[key]].append((solution.start[key], solution.end(key, durations), key))
    for machine, windows in by_machine.items():
        windows.sort()
        for (_, end_a, key_a), (start_b, _, key_b) in zip(windows, windows[1:]):
            if start_b < end_a:
                violations.append(
                    Violation(ViolationKind.MACHINE_OVERLAP, (key_a, key_b), f"machine {machine}")
                )
    return violations
