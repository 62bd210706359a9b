from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

import numpy as np

from .errors import InsufficientDataError, ShapeError
from .features import StateRecord

STD_FLOOR = 1e-6


@dataclass
class Normalizer:
    """Per-column mean and standard deviation of op and machine features."""

    op_mean: np.ndarray
    op_std: np.ndarray
    machine_mean: np.ndarray
    machine_std: np.ndarray

    @classmethod
    def fit(cls, records: Iterable[StateRecord]) -> "Normalizer":
        records = list(records)
        if not records:
            raise InsufficientDataError("cannot fit a normalizer on zero records")
        ops = np.concatenate([r.op_features for r in records], axis=0)
        machines = np.concatenate([r.machine_features for r in records], axis=0)
        return cls(
            ops.mean(axis=0),
            np.maximum(ops.std(axis=0), STD_FLOOR),
            machines.mean(axis=0),
            np.maximum(machines.std(axis=0), STD_FLOOR),
        )

    def _check(self, record: StateRecord) -> None:
        if record.op_features.shape[1] != self.op_mean.shape[0]:
            raise ShapeError("op feature width does not match the normalizer")
        if record.machine_features.shape[1] != self.machine_mean.shape[0]:
            raise ShapeError("machine feature width does not match the normalizer")

    def normalize(self, record: StateRecord) -> StateRecord:
        self._check(record)
        return record.with_features(
            (record.op_features - self.op_mean) / self.op_std,
            (record.machine_features - self.machine_mean) / self.machine_std,
        )

    def denormalize(self, record: StateRecord) -> StateRecord:
        self._check(record)
        return record.with_features(
            record.op_features * self.op_std + self.op_mean,
            record.machine_features * self.machine_std + self.machine_mean,
        )

    def to_dict(self) -> dict:
        return {name: getattr(self, name).tolist() for name in ("op_mean", "op_std", "machine_mean", "machine_std")}

    @classmethod
    def from_dict(cls, data: dict) -> "Normalizer":
        return cls(*(np.asarray(data[name], dtype=np.float64) for name in ("op_mean", "op_std", "machine_mean", "machine_std")))
