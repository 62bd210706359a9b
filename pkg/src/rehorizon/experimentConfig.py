from __future__ import annotations

from dataclasses import dataclass, field, fields, replace
from pathlib import Path
from typing import Any, Dict, Optional, Tuple

import yaml

from .breakdowns import BreakdownIntensity, BreakdownLevel
from .errors import ConfigurationError
from .fjspInstance import ObjectiveKind
from .noiseModel import NoiseModel
from .rhoRunner import RhoParams
from .subproblem import parse_budget
from .trainer import TrainConfig

FAMILIES = {kind.value: kind for kind in ObjectiveKind}


@dataclass(frozen=True)
class ExperimentConfig:
    """Everything one CLI invocation needs; YAML fields and flags share these names."""

    family: str = "makespan"
    num_machines: int = 10
    num_jobs: int = 20
    ops_per_job: int = 30
    seeds: Tuple[int, ...] = tuple(range(10))
    H: int = 80
    S: int = 30
    budget: str = "wall:60,3"
    strategies: Tuple[str, ...] = ("default",)
    breakdown: Optional[str] = None
    noise: bool = False
    noise_epsilon: float = 0.2
    Q: int = 1
    diagnostics: bool = False
    seed: int = 0
    workers: Optional[int] = None
    model: Optional[str] = None
    dataset: Optional[str] = None
    instances: str = "instances"
    output: str = "results"
    train: Dict[str, Any] = field(default_factory=dict)
    grid: Optional[Tuple[Tuple[int, int, str], ...]] = None

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ConfigurationError(f"unknown family {self.family!r}; expected one of {sorted(FAMILIES)}")
        if self.breakdown is not None and self.breakdown.upper() not in BreakdownLevel.__members__:
            raise ConfigurationError(f"unknown breakdown level {self.breakdown!r}")
        if self.Q < 1:
            raise ConfigurationError(f"Q must be >= 1, got {self.Q}")
        unknown = set(self.train) - {f.name for f in fields(TrainConfig)}
        if unknown:
            raise ConfigurationError(f"unknown training options {sorted(unknown)}")
        self.rho_params()

    @classmethod
    def from_yaml(cls, path) -> "ExperimentConfig":
        data = yaml.safe_load(Path(path).read_text(encoding="utf-8")) or {}
        if not isinstance(data, dict):
            raise ConfigurationError(f"{path} must hold a mapping")
        return cls.from_dict(data)

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "ExperimentConfig":
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known - {"seed_range"}
        if unknown:
            raise ConfigurationError(f"unknown configuration keys {sorted(unknown)}")
        data = dict(data)
        if "seed_range" in data:
            start, stop = data.pop("seed_range")
            data["seeds"] = range(start, stop)
        for name in ("seeds", "strategies"):
            if name in data:
                data[name] = tuple(data[name])
        if data.get("grid") is not None:
            data["grid"] = tuple((int(h), int(s), str(b)) for h, s, b in data["grid"])
        return cls(**data)

    def with_overrides(self, **overrides) -> "ExperimentConfig":
        """Copy with every non-None override applied."""
        return replace(self, **{k: v for k, v in overrides.items() if v is not None})

    @property
    def objective(self) -> ObjectiveKind:
        return FAMILIES[self.family]

    def rho_params(self) -> RhoParams:
        return RhoParams(self.H, self.S, parse_budget(self.budget))

    def breakdown_intensity(self) -> Optional[BreakdownIntensity]:
        return None if self.breakdown is None else BreakdownLevel[self.breakdown.upper()].value

    def noise_model(self) -> Optional[NoiseModel]:
        return NoiseModel(self.noise_epsilon) if self.noise else None

    def train_config(self) -> TrainConfig:
        options = dict(self.train)
        options.setdefault("seed", self.seed)
        return TrainConfig(**options)

    def instance_path(self, seed: int) -> Path:
        return Path(self.instances) / f"{self.family}_{self.num_machines}x{self.num_jobs}x{self.ops_per_job}_s{seed}.yaml"
