from __future__ import annotations

import bisect
import logging
import math
from dataclasses import dataclass
from enum import Enum
from typing import FrozenSet, Tuple

from .errors import ConfigurationError
from .fjspInstance import FjspInstance
from .seededStreams import Purpose, stream

logger = logging.getLogger(__name__)

FIRST_EVENT = (50, 150)


@dataclass(frozen=True)
class BreakdownIntensity:
    dur: int
    w_lb: int
    w_ub: int
    p_b: float

    def __post_init__(self):
        if self.dur < 1:
            raise ConfigurationError(f"breakdown duration must be >= 1, got {self.dur}")
        if not 0 <= self.w_lb <= self.w_ub:
            raise ConfigurationError(f"invalid gap bounds [{self.w_lb}, {self.w_ub}]")
        if not 0.0 <= self.p_b <= 1.0:
            raise ConfigurationError(f"p_b must lie in [0, 1], got {self.p_b}")


class BreakdownLevel(Enum):
    LOW = BreakdownIntensity(100, 400, 600, 0.2)
    MID = BreakdownIntensity(100, 175, 300, 0.35)
    HIGH = BreakdownIntensity(50, 100, 200, 0.5)


@dataclass(frozen=True)
class BreakdownEvent:
    start: int
    duration: int
    down_machines: FrozenSet[int]

    @property
    def end(self) -> int:
        return self.start + self.duration


@dataclass(frozen=True)
class BreakdownSchedule:
    """Sorted, non-overlapping breakdown events."""

    events: Tuple[BreakdownEvent, ...] = ()

    def __post_init__(self):
        for a, b in zip(self.events, self.events[1:]):
            if b.start < a.end:
                raise ConfigurationError(f"breakdown events at {a.start} and {b.start} overlap")

    def __len__(self) -> int:
        return len(self.events)

    def down_at(self, t: int) -> FrozenSet[int]:
        """Machines that are down at time t (an event covers [start, end))."""
        i = bisect.bisect_right([e.start for e in self.events], t) - 1
        if i >= 0 and t < self.events[i].end:
            return self.events[i].down_machines
        return frozenset()

    def boundaries(self) -> Tuple[int, ...]:
        return tuple(sorted({t for e in self.events for t in (e.start, e.end)}))

    def next_boundary_after(self, t: int) -> float:
        """First breakdown start or end strictly after t; inf when none is left."""
        times = self.boundaries()
        i = bisect.bisect_right(times, t)
        return times[i] if i < len(times) else math.inf

    def is_down(self, machine: int, begin: int, end: int) -> bool:
        """True when `machine` is down anywhere in [begin, end)."""
        return any(
            machine in e.down_machines and e.start < end and begin < e.end for e in self.events
        )


def default_horizon(instance: FjspInstance) -> int:
    return sum(max(op.compatible.values()) for op in instance.operations())


def gen_breakdowns(
    seed: int,
    intensity: BreakdownIntensity,
    horizon: int,
    num_machines: int,
) -> BreakdownSchedule:
    """Events from t0 ~ U[50, 150] with gaps dur + U[w_lb, w_ub] until past `horizon`."""
    if horizon <= 0:
        raise ConfigurationError(f"horizon must be positive, got {horizon}")
    if isinstance(intensity, BreakdownLevel):
        intensity = intensity.value
    rng = stream(seed, Purpose.BREAKDOWN)
    events = []
    start = int(rng.integers(*FIRST_EVENT, endpoint=True))
    while start <= horizon:
        mask = rng.random(num_machines) < intensity.p_b
        events.append(BreakdownEvent(start, intensity.dur, frozenset(int(m) for m in mask.nonzero()[0])))
        start += intensity.dur + int(rng.integers(intensity.w_lb, intensity.w_ub, endpoint=True))
    logger.debug("generated %d breakdown events up to t=%d", len(events), horizon)
    return BreakdownSchedule(tuple(events))


def events_for(instance: FjspInstance, intensity: BreakdownIntensity, instance_id: int) -> BreakdownSchedule:
    """The breakdown schedule every method sees on one instance."""
    return gen_breakdowns(instance_id, intensity, default_horizon(instance), instance.num_machines)
