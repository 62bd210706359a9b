from __future__ import annotations

import json
import logging
from pathlib import Path
from typing import Iterable, List, Optional, Sequence, Tuple, Union

import numpy as np
import pandas as pd
import yaml

from .errors import ConfigurationError, ShapeError
from .features import FeatureVariant, StateRecord
from .fjspInstance import FjspInstance, ObjectiveKind, Operation, Solution
from .mlpModel import MlpModel

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]

INSTANCE_FORMAT = "rehorizon-instance"
SOLUTION_FORMAT = "rehorizon-solution"
MODEL_FORMAT = "rehorizon-model"
DATASET_FORMAT = "rehorizon-dataset"
VERSION = 1


def _dump(path: PathLike, document: dict) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(yaml.safe_dump(document, sort_keys=False, default_flow_style=None), encoding="utf-8")
    logger.info("wrote %s", path)
    return path


def _load(path: PathLike, expected: str) -> dict:
    document = yaml.safe_load(Path(path).read_text(encoding="utf-8"))
    if not isinstance(document, dict) or document.get("format") != expected:
        raise ConfigurationError(f"{path} is not a {expected} file")
    if document.get("version") != VERSION:
        raise ConfigurationError(f"{path} has unsupported version {document.get('version')}")
    return document


def instance_to_dict(instance: FjspInstance) -> dict:
    jobs = []
    for job in instance.jobs:
        ops = []
        for op in job:
            entry = {"machines": {m: d for m, d in sorted(op.compatible.items())}}
            if op.release_time is not None:
                entry["release"] = op.release_time
            if op.target_end_time is not None:
                entry["target"] = op.target_end_time
            ops.append(entry)
        jobs.append(ops)
    return {
        "format": INSTANCE_FORMAT,
        "version": VERSION,
        "objective": instance.objective.value,
        "seed": instance.seed,
        "num_machines": instance.num_machines,
        "jobs": jobs,
    }


def instance_from_dict(data: dict) -> FjspInstance:
    jobs = tuple(
        tuple(
            Operation(
                j,
                k,
                {int(m): int(d) for m, d in entry["machines"].items()},
                entry.get("release"),
                entry.get("target"),
            )
            for k, entry in enumerate(ops, start=1)
        )
        for j, ops in enumerate(data["jobs"])
    )
    return FjspInstance(int(data["num_machines"]), jobs, ObjectiveKind(data["objective"]), data.get("seed"))


def write_instance(path: PathLike, instance: FjspInstance) -> Path:
    return _dump(path, instance_to_dict(instance))


def read_instance(path: PathLike) -> FjspInstance:
    return instance_from_dict(_load(path, INSTANCE_FORMAT))


def write_solution(path: PathLike, solution: Solution, objective: Optional[int] = None) -> Path:
    """One [job, op, machine, start] row per operation, sorted by key."""
    rows = [[j, k, solution.assignment[(j, k)], solution.start[(j, k)]] for j, k in sorted(solution.keys())]
    return _dump(path, {"format": SOLUTION_FORMAT, "version": VERSION, "objective": objective, "operations": rows})


def read_solution(path: PathLike) -> Tuple[Solution, Optional[int]]:
    document = _load(path, SOLUTION_FORMAT)
    assignment, start = {}, {}
    for j, k, machine, begin in document["operations"]:
        assignment[(j, k)] = machine
        start[(j, k)] = begin
    return Solution(assignment, start), document.get("objective")


def write_model(path: PathLike, model: MlpModel) -> Path:
    return _dump(path, {"format": MODEL_FORMAT, "version": VERSION, **model.to_dict()})


def read_model(path: PathLike) -> MlpModel:
    return MlpModel.from_dict(_load(path, MODEL_FORMAT))


def dataset_header(variant: FeatureVariant) -> dict:
    return {
        "format": DATASET_FORMAT,
        "version": VERSION,
        "variant": variant.value,
        "op_columns": list(variant.op_columns),
        "machine_columns": list(variant.machine_columns),
    }


def _record_to_dict(record: StateRecord) -> dict:
    return {
        "instance_id": record.instance_id,
        "iteration": record.iteration,
        "plan_ops": [list(key) for key in record.plan_ops],
        "overlap": record.overlap_mask.astype(int).tolist(),
        "prev_machine": record.prev_machine_index.tolist(),
        "labels": None if record.labels is None else record.labels.tolist(),
        "op_features": record.op_features.tolist(),
        "machine_features": record.machine_features.tolist(),
    }


def _record_from_dict(variant: FeatureVariant, data: dict) -> StateRecord:
    d_o, d_m = variant.dims
    return StateRecord(
        variant=variant,
        op_features=np.asarray(data["op_features"], dtype=np.float64).reshape(-1, d_o),
        machine_features=np.asarray(data["machine_features"], dtype=np.float64).reshape(-1, d_m),
        overlap_mask=np.asarray(data["overlap"], dtype=bool),
        prev_machine_index=np.asarray(data["prev_machine"], dtype=np.int64),
        labels=None if data["labels"] is None else np.asarray(data["labels"], dtype=np.int64),
        plan_ops=tuple(tuple(key) for key in data["plan_ops"]),
        instance_id=int(data["instance_id"]),
        iteration=int(data["iteration"]),
    )


def write_dataset(path: PathLike, records: Sequence[StateRecord], variant: Optional[FeatureVariant] = None) -> Path:
    """Schema header line, then one JSON record per line."""
    if variant is None:
        if not records:
            raise ConfigurationError("an empty dataset needs an explicit variant")
        variant = records[0].variant
    if any(r.variant is not variant for r in records):
        raise ConfigurationError("dataset records mix feature variants")
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", encoding="utf-8") as f:
        f.write(json.dumps(dataset_header(variant)) + "\n")
        for record in records:
            f.write(json.dumps(_record_to_dict(record)) + "\n")
    logger.info("wrote %d records to %s", len(records), path)
    return path


def read_dataset(path: PathLike, variant: Optional[FeatureVariant] = None) -> List[StateRecord]:
    """Records of a dataset file; a requested variant must match the header's columns."""
    with Path(path).open(encoding="utf-8") as f:
        lines = [line for line in f if line.strip()]
    if not lines:
        raise ConfigurationError(f"{path} is empty")
    header = json.loads(lines[0])
    if header.get("format") != DATASET_FORMAT:
        raise ConfigurationError(f"{path} is not a {DATASET_FORMAT} file")
    stored = FeatureVariant(header["variant"])
    if variant is not None and variant is not stored:
        raise ShapeError(f"dataset holds {stored.value} records, {variant.value} requested")
    if header["op_columns"] != list(stored.op_columns) or header["machine_columns"] != list(stored.machine_columns):
        raise ShapeError(f"{path} column schema differs from the {stored.value} schema")
    return [_record_from_dict(stored, json.loads(line)) for line in lines[1:]]


def write_table(path: PathLike, rows: Union[pd.DataFrame, Iterable[dict]], append: bool = False) -> Path:
    """CSV via pandas; in append mode the header is written only for a new file."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    frame = rows if isinstance(rows, pd.DataFrame) else pd.DataFrame(list(rows))
    exists = append and path.exists() and path.stat().st_size > 0
    frame.to_csv(path, mode="a" if exists else "w", header=not exists, index=False)
    logger.info("wrote %d rows to %s", len(frame), path)
    return path


def read_table(path: PathLike) -> pd.DataFrame:
    return pd.read_csv(path)
