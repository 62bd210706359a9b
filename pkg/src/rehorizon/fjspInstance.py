from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from functools import cached_property
from typing import Dict, Iterator, Mapping, Optional, Tuple

from .errors import ConfigurationError

# (job_id, op_index); job ids are 0-based, op indices 1-based
OpKey = Tuple[int, int]
DurationTable = Mapping[OpKey, Mapping[int, int]]


class ObjectiveKind(Enum):
    MAKESPAN = "makespan"
    TOTAL_START_DELAY = "start_delay"
    START_PLUS_END_DELAY = "start_end_delay"

    @property
    def needs_release(self) -> bool:
        return self is not ObjectiveKind.MAKESPAN

    @property
    def needs_target(self) -> bool:
        return self is ObjectiveKind.START_PLUS_END_DELAY


@dataclass(frozen=True)
class Operation:
    """One operation O_{j,k}: machine -> duration over its compatible machines."""

    job_id: int
    op_index: int
    compatible: Dict[int, int]
    release_time: Optional[int] = None
    target_end_time: Optional[int] = None

    def __post_init__(self):
        if not self.compatible:
            raise ConfigurationError(f"operation {self.key} has no compatible machine")
        for machine, duration in self.compatible.items():
            if duration < 1:
                raise ConfigurationError(
                    f"operation {self.key} has duration {duration} on machine {machine}"
                )
        if self.release_time is not None and self.release_time < 0:
            raise ConfigurationError(f"operation {self.key} has a negative release time")
        if self.target_end_time is not None and self.target_end_time < 0:
            raise ConfigurationError(f"operation {self.key} has a negative target time")

    @property
    def key(self) -> OpKey:
        return (self.job_id, self.op_index)

    def duration(self, machine: int) -> int:
        return self.compatible[machine]


@dataclass(frozen=True)
class FjspInstance:
    num_machines: int
    jobs: Tuple[Tuple[Operation, ...], ...]
    objective: ObjectiveKind = ObjectiveKind.MAKESPAN
    seed: Optional[int] = None

    def __post_init__(self):
        if self.num_machines < 1:
            raise ConfigurationError("an instance needs at least one machine")
        for j, job in enumerate(self.jobs):
            if not job:
                raise ConfigurationError(f"job {j} has no operations")
            last_release = None
            for k, op in enumerate(job, start=1):
                if op.key != (j, k):
                    raise ConfigurationError(f"operation {op.key} stored at position {(j, k)}")
                if any(m < 0 or m >= self.num_machines for m in op.compatible):
                    raise ConfigurationError(f"operation {op.key} names an unknown machine")
                if op.release_time is not None:
                    if last_release is not None and op.release_time < last_release:
                        raise ConfigurationError(f"release times decrease within job {j}")
                    last_release = op.release_time
        self.require_objective_data(self.objective)

    def require_objective_data(self, objective: ObjectiveKind) -> None:
        ops = list(self.operations())
        if objective.needs_release and any(op.release_time is None for op in ops):
            raise ConfigurationError(f"objective {objective.value} needs release times")
        if objective.needs_target and any(op.target_end_time is None for op in ops):
            raise ConfigurationError(f"objective {objective.value} needs target end times")

    def operations(self) -> Iterator[Operation]:
        for job in self.jobs:
            yield from job

    @cached_property
    def _by_key(self) -> Dict[OpKey, Operation]:
        return {op.key: op for op in self.operations()}

    def op(self, key: OpKey) -> Operation:
        return self._by_key[key]

    def keys(self) -> Tuple[OpKey, ...]:
        return tuple(self._by_key)

    @property
    def num_jobs(self) -> int:
        return len(self.jobs)

    @property
    def num_operations(self) -> int:
        return len(self._by_key)

    def durations(self) -> Dict[OpKey, Dict[int, int]]:
        return {key: dict(op.compatible) for key, op in self._by_key.items()}

    def with_objective(self, objective: ObjectiveKind) -> "FjspInstance":
        return FjspInstance(self.num_machines, self.jobs, objective, self.seed)


@dataclass(frozen=True)
class Solution:
    """Machine assignment m and start times pi; end times are derived."""

    assignment: Dict[OpKey, int] = field(default_factory=dict)
    start: Dict[OpKey, int] = field(default_factory=dict)

    def __len__(self) -> int:
        return len(self.assignment)

    def __contains__(self, key: object) -> bool:
        return key in self.assignment

    def keys(self):
        return self.assignment.keys()

    def end(self, key: OpKey, durations: DurationTable) -> int:
        return self.start[key] + durations[key][self.assignment[key]]

    def restricted(self, keys) -> "Solution":
        keys = [k for k in keys if k in self.assignment]
        return Solution({k: self.assignment[k] for k in keys}, {k: self.start[k] for k in keys})

    def merged(self, other: "Solution") -> "Solution":
        assignment = dict(self.assignment)
        assignment.update(other.assignment)
        start = dict(self.start)
        start.update(other.start)
        return Solution(assignment, start)
