from __future__ import annotations

import logging
import re
from collections import deque
from dataclasses import dataclass, field
from functools import cached_property
from typing import AbstractSet, Dict, FrozenSet, List, Mapping, Optional, Sequence, Tuple, Union

from .errors import ConfigurationError, InfeasibleOrderError
from .fjspCheck import Boundary, evaluate_objective
from .fjspInstance import DurationTable, FjspInstance, ObjectiveKind, OpKey, Solution

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class MoveCount:
    """Deterministic budget: stop after `max_moves` moves or `stall_moves` without improvement."""

    max_moves: int
    stall_moves: int

    def __post_init__(self):
        if self.max_moves < 0 or self.stall_moves < 0:
            raise ConfigurationError("move budgets must be non-negative")
        if self.stall_moves > self.max_moves:
            raise ConfigurationError(f"stall {self.stall_moves} exceeds limit {self.max_moves}")

    def __str__(self) -> str:
        return f"moves:{self.max_moves},{self.stall_moves}"


@dataclass(frozen=True)
class WallClock:
    limit_secs: float
    stall_secs: float

    def __post_init__(self):
        if self.limit_secs <= 0 or self.stall_secs <= 0:
            raise ConfigurationError("wall-clock budgets must be positive")
        if self.stall_secs > self.limit_secs:
            raise ConfigurationError(f"stall {self.stall_secs} exceeds limit {self.limit_secs}")

    def __str__(self) -> str:
        return f"wall:{self.limit_secs:g},{self.stall_secs:g}"


Budget = Union[MoveCount, WallClock]

_BUDGET_RE = re.compile(r"^(moves|wall):([0-9.]+)(?:,([0-9.]+))?$")


def parse_budget(text: str) -> Budget:
    """`moves:<max>[,<stall>]` or `wall:<limit>[,<stall>]`; stall defaults to the limit."""
    match = _BUDGET_RE.match(text.strip())
    if match is None:
        raise ConfigurationError(f"cannot parse budget {text!r}")
    mode, limit, stall = match.groups()
    try:
        if mode == "moves":
            return MoveCount(int(limit), int(stall) if stall else int(limit))
        return WallClock(float(limit), float(stall) if stall else float(limit))
    except ValueError as exc:
        raise ConfigurationError(f"cannot parse budget {text!r}") from exc


@dataclass(frozen=True)
class Subproblem:
    """One planning window: its operations, boundary maps, restrictions and observed durations."""

    instance: FjspInstance
    plan_ops: Tuple[OpKey, ...]
    objective: ObjectiveKind
    prev_job_end: Mapping[int, int] = field(default_factory=dict)
    prev_machine_end: Mapping[int, int] = field(default_factory=dict)
    fixed_assignment: Mapping[OpKey, int] = field(default_factory=dict)
    unavailable_machines: FrozenSet[int] = frozenset()
    duration_overlay: Optional[DurationTable] = None
    warm_start: Optional[Solution] = None

    def __post_init__(self):
        plan = set(self.plan_ops)
        if len(plan) != len(self.plan_ops):
            raise ConfigurationError("plan_ops contains duplicates")
        for key, machine in self.fixed_assignment.items():
            if key not in plan:
                raise ConfigurationError(f"fixed operation {key} is not in the window")
            if machine not in self.instance.op(key).compatible:
                raise ConfigurationError(f"operation {key} fixed to incompatible machine {machine}")
            if machine in self.unavailable_machines:
                raise ConfigurationError(f"operation {key} fixed to unavailable machine {machine}")
        for key in self.plan_ops:
            if not self.allowed_machines(key):
                raise ConfigurationError(f"operation {key} has no available machine")
            if self.duration_overlay is not None and key not in self.duration_overlay:
                raise ConfigurationError(f"duration overlay misses operation {key}")

    @classmethod
    def build(
        cls,
        instance: FjspInstance,
        plan_ops: Sequence[OpKey],
        boundary: Optional[Boundary] = None,
        *,
        objective: Optional[ObjectiveKind] = None,
        fixed_assignment: Optional[Mapping[OpKey, int]] = None,
        unavailable_machines: AbstractSet[int] = frozenset(),
        duration_overlay: Optional[DurationTable] = None,
        warm_start: Optional[Solution] = None,
    ) -> "Subproblem":
        """Like the constructor, but drops fixes that point at broken machines."""
        unavailable = frozenset(unavailable_machines)
        fixed = dict(fixed_assignment or {})
        dropped = [key for key, machine in fixed.items() if machine in unavailable]
        for key in dropped:
            del fixed[key]
        if dropped:
            logger.warning("dropped %d fixes on unavailable machines", len(dropped))
        boundary = boundary or Boundary({}, {})
        return cls(
            instance,
            tuple(plan_ops),
            objective or instance.objective,
            dict(boundary.prev_job_end),
            dict(boundary.prev_machine_end),
            fixed,
            unavailable,
            duration_overlay,
            warm_start,
        )

    @property
    def boundary(self) -> Boundary:
        return Boundary(self.prev_job_end, self.prev_machine_end)

    @cached_property
    def durations(self) -> Dict[OpKey, Dict[int, int]]:
        if self.duration_overlay is not None:
            return {key: dict(self.duration_overlay[key]) for key in self.plan_ops}
        return {key: dict(self.instance.op(key).compatible) for key in self.plan_ops}

    def allowed_machines(self, key: OpKey) -> Tuple[int, ...]:
        if key in self.fixed_assignment:
            return (self.fixed_assignment[key],)
        return tuple(m for m in sorted(self.instance.op(key).compatible) if m not in self.unavailable_machines)

    def evaluate(self, solution: Solution) -> int:
        return evaluate_objective(
            self.instance,
            solution,
            objective=self.objective,
            durations=self.durations,
            scope=self.plan_ops,
        )

    def compile(self) -> "CompiledSubproblem":
        return CompiledSubproblem(self)

    def __len__(self) -> int:
        return len(self.plan_ops)


class CompiledSubproblem:
    """
    Index-based view of a Subproblem used by the search code.

    Operations are numbered by their window position; machine sequences are
    lists of those indices.
    """

    def __init__(self, subproblem: Subproblem):
        self.subproblem = subproblem
        self.keys: List[OpKey] = list(subproblem.plan_ops)
        self.index: Dict[OpKey, int] = {key: i for i, key in enumerate(self.keys)}
        self.n = len(self.keys)
        self.options: List[Tuple[int, ...]] = [subproblem.allowed_machines(k) for k in self.keys]
        self.duration: List[Dict[int, int]] = [subproblem.durations[k] for k in self.keys]
        self.min_duration: List[int] = [min(self.duration[i][m] for m in self.options[i]) for i in range(self.n)]
        self.job_pred: List[int] = []
        self.floor: List[int] = []
        self.release: List[int] = []
        self.target: List[int] = []
        instance = subproblem.instance
        for job_id, op_index in self.keys:
            op = instance.op((job_id, op_index))
            pred = self.index.get((job_id, op_index - 1), -1)
            self.job_pred.append(pred)
            release = op.release_time or 0
            floor = release
            if pred < 0:
                floor = max(floor, subproblem.prev_job_end.get(job_id, 0))
            self.floor.append(floor)
            self.release.append(release)
            self.target.append(op.target_end_time if op.target_end_time is not None else 0)
        self.job_succ: List[int] = [-1] * self.n
        for i, pred in enumerate(self.job_pred):
            if pred >= 0:
                self.job_succ[pred] = i
        self.machine_floor: Dict[int, int] = dict(subproblem.prev_machine_end)
        self.objective = subproblem.objective

    def decode(self, assignment: Sequence[int], sequences: Mapping[int, Sequence[int]]) -> Optional[List[int]]:
        """Semi-active start times, or None when the orders contain a cycle."""
        machine_pred = [-1] * self.n
        indegree = [0] * self.n
        for seq in sequences.values():
            for a, b in zip(seq, seq[1:]):
                machine_pred[b] = a
                indegree[b] += 1
        machine_succ = [-1] * self.n
        for b, a in enumerate(machine_pred):
            if a >= 0:
                machine_succ[a] = b
        for i, pred in enumerate(self.job_pred):
            if pred >= 0:
                indegree[i] += 1

        start = [0] * self.n
        ready = deque(i for i in range(self.n) if indegree[i] == 0)
        done = 0
        while ready:
            i = ready.popleft()
            machine = assignment[i]
            s = max(self.floor[i], self.machine_floor.get(machine, 0))
            if self.job_pred[i] >= 0:
                p = self.job_pred[i]
                s = max(s, start[p] + self.duration[p][assignment[p]])
            if machine_pred[i] >= 0:
                p = machine_pred[i]
                s = max(s, start[p] + self.duration[p][assignment[p]])
            start[i] = s
            done += 1
            for succ in (self.job_succ[i], machine_succ[i]):
                if succ >= 0:
                    indegree[succ] -= 1
                    if indegree[succ] == 0:
                        ready.append(succ)
        return start if done == self.n else None

    def score(self, assignment: Sequence[int], start: Sequence[int]) -> Tuple[int, int]:
        """(objective, sum of end times); the second entry breaks ties in the search."""
        ends = [start[i] + self.duration[i][assignment[i]] for i in range(self.n)]
        if self.objective is ObjectiveKind.MAKESPAN:
            value = max(ends, default=0)
        else:
            value = sum(start[i] - self.release[i] for i in range(self.n))
            if self.objective is ObjectiveKind.START_PLUS_END_DELAY:
                value += sum(max(ends[i] - self.target[i], 0) for i in range(self.n))
        return value, sum(ends)

    def to_solution(self, assignment: Sequence[int], start: Sequence[int]) -> Solution:
        return Solution(
            {k: assignment[i] for i, k in enumerate(self.keys)},
            {k: start[i] for i, k in enumerate(self.keys)},
        )


def schedule_from_order(
    subproblem: Subproblem,
    assignment: Mapping[OpKey, int],
    machine_sequences: Mapping[int, Sequence[OpKey]],
) -> Solution:
    """Semi-active schedule for a given assignment and per-machine processing order."""
    compiled = subproblem.compile()
    seen = set()
    sequences: Dict[int, List[int]] = {}
    for machine, seq in machine_sequences.items():
        for key in seq:
            if key not in compiled.index:
                raise ConfigurationError(f"sequenced operation {key} is not in the window")
            if assignment.get(key) != machine:
                raise ConfigurationError(f"operation {key} sequenced on machine {machine} but assigned elsewhere")
            if key in seen:
                raise ConfigurationError(f"operation {key} sequenced twice")
            seen.add(key)
        sequences[machine] = [compiled.index[key] for key in seq]
    if seen != set(compiled.keys):
        raise ConfigurationError("machine sequences do not cover the window")
    for key, machine in assignment.items():
        if key not in compiled.index:
            raise ConfigurationError(f"assigned operation {key} is not in the window")
        if machine not in compiled.options[compiled.index[key]]:
            raise ConfigurationError(f"operation {key} assigned to disallowed machine {machine}")

    vector = [assignment[k] for k in compiled.keys]
    start = compiled.decode(vector, sequences)
    if start is None:
        raise InfeasibleOrderError("machine sequences contradict job precedence")
    return compiled.to_solution(vector, start)
