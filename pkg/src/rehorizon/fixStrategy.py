from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Callable, Dict, FrozenSet, List, NamedTuple, Optional

import numpy as np

from .errors import ConfigurationError
from .features import extract_features
from .fjspInstance import OpKey, Solution
from .mlpModel import MlpModel
from .rhoState import RhoState
from .seededStreams import Purpose, stream

logger = logging.getLogger(__name__)

# solves the unrestricted window once for replica q and returns its solution
SubsolveFn = Callable[[int], Solution]


def _check_sigma(sigma: float) -> None:
    if not 0.0 <= sigma <= 1.0:
        raise ConfigurationError(f"sigma must lie in [0, 1], got {sigma}")


class FixStrategy:
    """Chooses which overlapping operations keep their previous machine."""

    warm_start = False

    @property
    def name(self) -> str:
        raise NotImplementedError

    def select(self, state: RhoState, subsolve: SubsolveFn) -> FrozenSet[OpKey]:
        return frozenset()


@dataclass(frozen=True)
class Default(FixStrategy):
    @property
    def name(self) -> str:
        return "default"


@dataclass(frozen=True)
class WarmStart(FixStrategy):
    warm_start = True

    @property
    def name(self) -> str:
        return "warm_start"


@dataclass(frozen=True)
class First(FixStrategy):
    sigma: float

    def __post_init__(self):
        _check_sigma(self.sigma)

    @property
    def name(self) -> str:
        return f"first:{self.sigma:g}"

    def select(self, state, subsolve):
        count = math.floor(self.sigma * len(state.overlap_ops))
        return frozenset(state.overlap_ops[:count])


@dataclass(frozen=True)
class Random(FixStrategy):
    sigma: float
    seed: int = 0

    def __post_init__(self):
        _check_sigma(self.sigma)

    @property
    def name(self) -> str:
        return f"random:{self.sigma:g}"

    def select(self, state, subsolve):
        rng = stream(self.seed, Purpose.RANDOM_FIX, state.iteration)
        mask = rng.random(len(state.overlap_ops)) < self.sigma
        return frozenset(k for k, chosen in zip(state.overlap_ops, mask) if chosen)


class LookAhead(NamedTuple):
    labels: Dict[OpKey, int]
    q_star: int
    agreement: List[int]


def look_ahead_labels(state: RhoState, subsolve: SubsolveFn, q_count: int) -> LookAhead:
    """
    Solve the unrestricted window `q_count` times and label each overlapping
    operation 1 when the replica agreeing most with the previous assignment
    keeps its machine. Ties go to the lowest replica index.
    """
    if q_count < 1:
        raise ConfigurationError(f"Q must be >= 1, got {q_count}")
    replicas = [subsolve(q) for q in range(q_count)]
    agreement = [
        sum(int(sol.assignment[k] == state.prev_machine(k)) for k in state.overlap_ops) for sol in replicas
    ]
    q_star = int(np.argmax(agreement))
    chosen = replicas[q_star]
    labels = {k: int(chosen.assignment[k] == state.prev_machine(k)) for k in state.overlap_ops}
    return LookAhead(labels, q_star, agreement)


@dataclass(frozen=True)
class Oracle(FixStrategy):
    q: int = 1

    def __post_init__(self):
        if self.q < 1:
            raise ConfigurationError(f"Q must be >= 1, got {self.q}")

    @property
    def name(self) -> str:
        return f"oracle:{self.q}"

    def select(self, state, subsolve):
        labels = look_ahead_labels(state, subsolve, self.q).labels
        return frozenset(k for k, y in labels.items() if y == 1)


@dataclass(frozen=True)
class Learned(FixStrategy):
    model: Optional[MlpModel] = None
    threshold: float = 0.5

    def __post_init__(self):
        if not 0.0 <= self.threshold <= 1.0:
            raise ConfigurationError(f"threshold must lie in [0, 1], got {self.threshold}")

    @property
    def name(self) -> str:
        return "learned" if self.threshold == 0.5 else f"learned:{self.threshold:g}"

    def probabilities(self, state: RhoState) -> Dict[OpKey, float]:
        if self.model is None:
            raise ConfigurationError("the learned strategy needs a trained model")
        record = extract_features(state, self.model.variant)
        probs = self.model.predict(record)
        return dict(zip(record.overlap_keys(), probs.tolist()))

    def select(self, state, subsolve):
        return frozenset(k for k, p in self.probabilities(state).items() if p >= self.threshold)


def select_fix_set(strategy: FixStrategy, state: RhoState, subsolve: SubsolveFn) -> FrozenSet[OpKey]:
    """Overlap operations to pin to their previous machine; empty on the first iteration."""
    if isinstance(strategy, Learned) and strategy.model is None:
        raise ConfigurationError("the learned strategy needs a trained model")
    if state.iteration < 2 or not state.overlap_ops:
        return frozenset()
    fix = strategy.select(state, subsolve)
    logger.debug("iteration %d: fixing %d of %d overlap ops", state.iteration, len(fix), len(state.overlap_ops))
    return fix


def parse_strategy(text: str, model=None, seed: int = 0) -> FixStrategy:
    """`default`, `warm_start`, `first:<s>`, `random:<s>`, `oracle:<Q>` or `learned[:<t>]`."""
    name, _, arg = text.strip().lower().partition(":")
    if name == "learned" and model is None:
        raise ConfigurationError("strategy 'learned' requires --model")
    try:
        if name == "default" and not arg:
            return Default()
        if name in ("warm_start", "warmstart") and not arg:
            return WarmStart()
        if name == "first":
            return First(float(arg))
        if name == "random":
            return Random(float(arg), seed)
        if name == "oracle":
            return Oracle(int(arg) if arg else 1)
        if name == "learned":
            return Learned(model, float(arg) if arg else 0.5)
    except ValueError as exc:
        raise ConfigurationError(f"cannot parse strategy {text!r}") from exc
    raise ConfigurationError(f"unknown strategy {text!r}")
