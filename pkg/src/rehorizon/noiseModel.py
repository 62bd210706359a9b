from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, Sequence, Tuple

import numpy as np

from .errors import ConfigurationError
from .fjspInstance import FjspInstance, OpKey
from .seededStreams import Purpose, stream


@dataclass(frozen=True)
class NoiseModel:
    epsilon: float = 0.2
    perturb_range: Tuple[int, int] = (-5, 5)
    clip: Tuple[int, int] = (3, 30)

    def __post_init__(self):
        if not 0.0 <= self.epsilon <= 1.0:
            raise ConfigurationError(f"epsilon must lie in [0, 1], got {self.epsilon}")
        if self.perturb_range[0] > self.perturb_range[1] or self.clip[0] > self.clip[1]:
            raise ConfigurationError("noise ranges must be ordered (low, high)")


def observe_durations(
    instance: FjspInstance,
    plan_ops: Sequence[OpKey],
    clean_count: int,
    seed: int,
    noise: NoiseModel,
    iteration: int = 0,
) -> Dict[OpKey, Dict[int, int]]:
    """
    Observed durations for one planning window.

    The first `clean_count` operations are seen exactly. Each later one is
    perturbed with probability epsilon and then draws one offset per machine.
    """
    if not 0 <= clean_count <= len(plan_ops):
        raise ConfigurationError(f"clean_count {clean_count} outside [0, {len(plan_ops)}]")
    rng = stream(seed, Purpose.NOISE, iteration)
    overlay: Dict[OpKey, Dict[int, int]] = {}
    for i, key in enumerate(plan_ops):
        true = instance.op(key).compatible
        if i < clean_count or rng.random() >= noise.epsilon:
            overlay[key] = dict(true)
            continue
        machines = sorted(true)
        offsets = rng.integers(*noise.perturb_range, size=len(machines), endpoint=True)
        noisy = np.clip(np.array([true[m] for m in machines]) + offsets, *noise.clip)
        overlay[key] = {m: int(d) for m, d in zip(machines, noisy)}
    return overlay
