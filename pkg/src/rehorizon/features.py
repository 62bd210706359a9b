from __future__ import annotations

from dataclasses import dataclass, replace
from enum import Enum
from functools import lru_cache
from importlib import resources
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
import yaml

from .errors import ConfigurationError, ShapeError
from .fjspInstance import ObjectiveKind, OpKey
from .rhoState import RhoState

MISSING = -1.0


class FeatureVariant(Enum):
    MAKESPAN = "makespan"
    MAKESPAN_BREAKDOWN = "makespan_breakdown"
    START_DELAY = "start_delay"
    START_END_DELAY = "start_end_delay"
    START_END_DELAY_NOISE = "start_end_delay_noise"

    @property
    def objective(self) -> ObjectiveKind:
        return {
            FeatureVariant.MAKESPAN: ObjectiveKind.MAKESPAN,
            FeatureVariant.MAKESPAN_BREAKDOWN: ObjectiveKind.MAKESPAN,
            FeatureVariant.START_DELAY: ObjectiveKind.TOTAL_START_DELAY,
            FeatureVariant.START_END_DELAY: ObjectiveKind.START_PLUS_END_DELAY,
            FeatureVariant.START_END_DELAY_NOISE: ObjectiveKind.START_PLUS_END_DELAY,
        }[self]

    @property
    def op_columns(self) -> Tuple[str, ...]:
        return tuple(load_schema()[self.value]["operations"])

    @property
    def machine_columns(self) -> Tuple[str, ...]:
        return tuple(load_schema()[self.value]["machines"])

    @property
    def dims(self) -> Tuple[int, int]:
        return len(self.op_columns), len(self.machine_columns)

    @classmethod
    def for_run(cls, objective: ObjectiveKind, breakdowns: bool = False, noise: bool = False) -> "FeatureVariant":
        if objective is ObjectiveKind.MAKESPAN and not noise:
            return cls.MAKESPAN_BREAKDOWN if breakdowns else cls.MAKESPAN
        if objective is ObjectiveKind.TOTAL_START_DELAY and not (breakdowns or noise):
            return cls.START_DELAY
        if objective is ObjectiveKind.START_PLUS_END_DELAY and not breakdowns:
            return cls.START_END_DELAY_NOISE if noise else cls.START_END_DELAY
        raise ConfigurationError(
            f"no feature variant for objective {objective.value} (breakdowns={breakdowns}, noise={noise})"
        )


@lru_cache(maxsize=None)
def load_schema() -> dict:
    text = resources.files(__package__).joinpath("featureSchema.yaml").read_text(encoding="utf-8")
    return yaml.safe_load(text)


@dataclass(frozen=True)
class StateRecord:
    """Feature matrices of one iteration; labels and prev_machine_index are -1 off the overlap."""

    variant: FeatureVariant
    op_features: np.ndarray
    machine_features: np.ndarray
    overlap_mask: np.ndarray
    prev_machine_index: np.ndarray
    labels: Optional[np.ndarray] = None
    plan_ops: Tuple[OpKey, ...] = ()
    instance_id: int = 0
    iteration: int = 0

    def __post_init__(self):
        d_o, d_m = self.variant.dims
        n = self.op_features.shape[0]
        if self.op_features.ndim != 2 or self.op_features.shape[1] != d_o:
            raise ShapeError(f"{self.variant.value} expects {d_o} op columns, got {self.op_features.shape}")
        if self.machine_features.ndim != 2 or self.machine_features.shape[1] != d_m:
            raise ShapeError(f"{self.variant.value} expects {d_m} machine columns, got {self.machine_features.shape}")
        if self.overlap_mask.shape != (n,) or self.prev_machine_index.shape != (n,):
            raise ShapeError("overlap_mask and prev_machine_index need one entry per op row")
        on = self.prev_machine_index[self.overlap_mask]
        if np.any(self.prev_machine_index[~self.overlap_mask] != -1):
            raise ShapeError("prev_machine_index must be -1 outside the overlap")
        if np.any((on < 0) | (on >= self.machine_features.shape[0])):
            raise ShapeError("prev_machine_index points outside the machine rows")
        if self.labels is not None:
            if self.labels.shape != (n,):
                raise ShapeError("labels need one entry per op row")
            if np.any(self.labels[~self.overlap_mask] != -1) or np.any(~np.isin(self.labels[self.overlap_mask], (0, 1))):
                raise ShapeError("labels must be 0/1 on the overlap and -1 elsewhere")

    @property
    def width(self) -> int:
        return int(self.overlap_mask.sum())

    def overlap_keys(self) -> List[OpKey]:
        return [k for k, on in zip(self.plan_ops, self.overlap_mask) if on]

    def overlap_labels(self) -> np.ndarray:
        if self.labels is None:
            raise ConfigurationError("record carries no labels")
        return self.labels[self.overlap_mask]

    def with_labels(self, labels: Dict[OpKey, int]) -> "StateRecord":
        array = np.full(len(self.plan_ops), -1, dtype=np.int64)
        for i, (key, on) in enumerate(zip(self.plan_ops, self.overlap_mask)):
            if on:
                array[i] = labels[key]
        return replace(self, labels=array)

    def with_features(self, op_features: np.ndarray, machine_features: np.ndarray) -> "StateRecord":
        return replace(self, op_features=op_features, machine_features=machine_features)


def _stats(values: Sequence[float]) -> Tuple[float, float, float, float]:
    """(avg, std, min, max) with population std, or all -1 for no values."""
    if len(values) == 0:
        return MISSING, MISSING, MISSING, MISSING
    array = np.asarray(values, dtype=np.float64)
    return float(array.mean()), float(array.std()), float(array.min()), float(array.max())


def extract_features(state: RhoState, variant: FeatureVariant, instance_id: int = 0) -> StateRecord:
    """Feature matrices for the current window, columns ordered per featureSchema.yaml."""
    instance = state.instance
    if instance.objective is not variant.objective:
        raise ConfigurationError(
            f"variant {variant.value} does not match objective {instance.objective.value}"
        )
    if state.iteration < 2:
        raise ConfigurationError("features need a previous iteration")

    observed = state.observed_durations()
    overlap = set(state.overlap_ops)
    noisy = variant is FeatureVariant.START_END_DELAY_NOISE
    with_end = variant in (FeatureVariant.START_END_DELAY, FeatureVariant.START_END_DELAY_NOISE)
    broken = 1.0 if state.down else 0.0

    def delay(key, start, end):
        op = instance.op(key)
        value = start - op.release_time
        if with_end:
            value += max(end - op.target_end_time, 0)
        return float(value)

    op_rows: List[Dict[str, float]] = []
    per_machine: Dict[int, List[Dict[str, float]]] = {m: [] for m in range(instance.num_machines)}
    prev_index = np.full(len(state.plan_ops), -1, dtype=np.int64)
    for i, key in enumerate(state.plan_ops):
        op = instance.op(key)
        durations = observed[key]
        avg, std, low, high = _stats(list(durations.values()))
        row = {
            "job_start_time": float(state.boundary.prev_job_end.get(key[0], 0)),
            "ops_release_time": float(op.release_time if op.release_time is not None else MISSING),
            "ops_target_due_time": float(op.target_end_time if op.target_end_time is not None else MISSING),
            "avg_dur": avg,
            "std_dur": std,
            "min_dur": low,
            "max_dur": high,
            "job_id": float(key[0] + 1),
            "ops_id": float(key[1]),
            "in_overlap": 1.0 if key in overlap else 0.0,
            "is_break_down": broken,
        }
        missing = (
            "prev_machine", "prev_duration", "prev_end_time", "prev_delay", "prev_start", "prev_end",
            "alt_avg_dur", "alt_std_dur", "alt_min_dur", "alt_max_dur", "is_ops_break_down",
            "is_ops_recovered", "prev_duration_reeval", "prev_end_reeval", "prev_delay_reeval",
        )
        row.update(dict.fromkeys(missing, MISSING))
        if key in overlap:
            machine = state.prev_machine(key)
            prev_index[i] = machine
            start = state.prev_solution.start[key]
            duration = state.prev_duration(key)
            end = start + duration
            alt = _stats([d for m, d in durations.items() if m != machine])
            row.update(
                prev_machine=float(machine),
                prev_duration=float(duration),
                prev_end_time=float(end),
                prev_start=float(start),
                prev_end=float(end),
                alt_avg_dur=alt[0],
                alt_std_dur=alt[1],
                alt_min_dur=alt[2],
                alt_max_dur=alt[3],
                is_ops_break_down=1.0 if machine in state.down else 0.0,
                is_ops_recovered=1.0
                if any(m in state.prev_down and m not in state.down for m in op.compatible)
                else 0.0,
            )
            if variant.objective is not ObjectiveKind.MAKESPAN:
                reeval = durations[machine]
                row.update(
                    prev_delay=delay(key, start, end),
                    prev_duration_reeval=float(reeval),
                    prev_end_reeval=float(start + reeval),
                    prev_delay_reeval=delay(key, start, start + reeval),
                )
            per_machine[machine].append(row)
        op_rows.append(row)

    machine_rows = []
    for m in range(instance.num_machines):
        assigned = per_machine[m]
        ends = [r["prev_end"] for r in assigned]
        avg_end, std_end, min_end, max_end = _stats(ends)
        avg_d, std_d, min_d, max_d = _stats([r["prev_duration"] for r in assigned])
        row = {
            "machine_id": float(m),
            "machine_start_time": float(state.boundary.prev_machine_end.get(m, 0)),
            "num_overlap": float(len(assigned)),
            "avg_end_time": avg_end,
            "std_end_time": std_end,
            "max_end_time": max_end,
            "min_end_time": min_end,
            "avg_duration": avg_d,
            "std_duration": std_d,
            "max_duration": max_d,
            "min_duration": min_d,
            "is_break_down": broken,
            "is_machine_break_down": 1.0 if m in state.down else 0.0,
            "machine_end_time": max_end,
        }
        if variant.objective is not ObjectiveKind.MAKESPAN:
            avg, std, low, high = _stats([r["prev_delay"] for r in assigned])
            row.update(avg_delay=avg, std_delay=std, max_delay=high, min_delay=low)
            avg, std, low, high = _stats([r["prev_delay_reeval"] for r in assigned])
            row.update(avg_delay_reeval=avg, std_delay_reeval=std, max_delay_reeval=high, min_delay_reeval=low)
            row["machine_end_time_reeval"] = _stats([r["prev_end_reeval"] for r in assigned])[3]
        machine_rows.append(row)

    op_features = np.array([[r[c] for c in variant.op_columns] for r in op_rows], dtype=np.float64)
    machine_features = np.array([[r[c] for c in variant.machine_columns] for r in machine_rows], dtype=np.float64)
    d_o, d_m = variant.dims
    return StateRecord(
        variant=variant,
        op_features=op_features.reshape(len(op_rows), d_o),
        machine_features=machine_features.reshape(len(machine_rows), d_m),
        overlap_mask=np.array([k in overlap for k in state.plan_ops], dtype=bool),
        prev_machine_index=prev_index,
        plan_ops=tuple(state.plan_ops),
        instance_id=instance_id,
        iteration=state.iteration,
    )
