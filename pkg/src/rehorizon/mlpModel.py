from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, List, NamedTuple, Optional, Sequence, Tuple, Union

import numpy as np

from .errors import ConfigurationError, ShapeError
from .features import FeatureVariant, StateRecord
from .normalizer import Normalizer
from .seededStreams import Purpose, stream

D_HIDDEN = 64
PROB_CLAMP = 1e-7

Params = Dict[str, np.ndarray]

LAYERS = ("op1", "op2", "mach1", "mach2", "fuse", "out")


def _layer_shapes(d_o: int, d_m: int) -> Dict[str, Tuple[int, int]]:
    """Weight shape per layer; each bias has the weight's column count."""
    return {
        "op1": (d_o, D_HIDDEN),
        "op2": (D_HIDDEN, D_HIDDEN),
        "mach1": (d_m, D_HIDDEN),
        "mach2": (D_HIDDEN, D_HIDDEN),
        "fuse": (3 * D_HIDDEN, D_HIDDEN),
        "out": (D_HIDDEN, 1),
    }


def relu(x):
    return np.maximum(x, 0.0)


def sigmoid(x):
    return 0.5 * (1.0 + np.tanh(0.5 * x))


class Batch(NamedTuple):
    """Records stacked row-wise, with segment ids mapping rows back to records."""

    op_x: np.ndarray
    op_seg: np.ndarray
    mach_x: np.ndarray
    mach_seg: np.ndarray
    sel_op: np.ndarray
    sel_mach: np.ndarray
    sel_seg: np.ndarray
    size: int


def stack(records: Sequence[StateRecord]) -> Batch:
    op_x, mach_x, op_seg, mach_seg = [], [], [], []
    sel_op, sel_mach, sel_seg = [], [], []
    op_base = mach_base = 0
    for b, record in enumerate(records):
        n, m = record.op_features.shape[0], record.machine_features.shape[0]
        op_x.append(record.op_features)
        mach_x.append(record.machine_features)
        op_seg.append(np.full(n, b))
        mach_seg.append(np.full(m, b))
        rows = np.flatnonzero(record.overlap_mask)
        sel_op.append(op_base + rows)
        sel_mach.append(mach_base + record.prev_machine_index[rows])
        sel_seg.append(np.full(len(rows), b))
        op_base += n
        mach_base += m
    return Batch(
        np.concatenate(op_x, axis=0),
        np.concatenate(op_seg).astype(np.int64),
        np.concatenate(mach_x, axis=0),
        np.concatenate(mach_seg).astype(np.int64),
        np.concatenate(sel_op).astype(np.int64),
        np.concatenate(sel_mach).astype(np.int64),
        np.concatenate(sel_seg).astype(np.int64),
        len(records),
    )


@dataclass
class MlpModel:
    """
    Operation/machine embedding MLPs, mean-pooled global context and a fusion
    head scoring each overlapping operation against its previous machine.
    """

    variant: FeatureVariant
    params: Params
    normalizer: Optional[Normalizer] = None
    meta: dict = field(default_factory=dict)

    @classmethod
    def init(cls, variant: FeatureVariant, seed: int = 0) -> "MlpModel":
        """He-uniform weights, zero biases."""
        rng = stream(seed, Purpose.INIT)
        params: Params = {}
        for name, (rows, cols) in _layer_shapes(*variant.dims).items():
            limit = np.sqrt(6.0 / rows)
            params[f"{name}.W"] = rng.uniform(-limit, limit, size=(rows, cols))
            params[f"{name}.b"] = np.zeros(cols)
        return cls(variant, params)

    @classmethod
    def zeros(cls, variant: FeatureVariant) -> "MlpModel":
        model = cls.init(variant)
        model.params = {k: np.zeros_like(v) for k, v in model.params.items()}
        return model

    def copy(self) -> "MlpModel":
        return MlpModel(self.variant, {k: v.copy() for k, v in self.params.items()}, self.normalizer, dict(self.meta))

    def check(self, record: StateRecord) -> None:
        if record.variant is not self.variant:
            raise ShapeError(f"model is {self.variant.value}, record is {record.variant.value}")
        d_o, d_m = self.variant.dims
        if record.op_features.shape[1] != d_o or record.machine_features.shape[1] != d_m:
            raise ShapeError(f"expected ({d_o}, {d_m}) feature columns")

    def _embed(self, x, prefix):
        a1 = x @ self.params[f"{prefix}1.W"] + self.params[f"{prefix}1.b"]
        h1 = relu(a1)
        a2 = h1 @ self.params[f"{prefix}2.W"] + self.params[f"{prefix}2.b"]
        return a1, h1, a2, relu(a2)

    def forward_batch(self, batch: Batch):
        """Probabilities for every overlap row of the batch, plus the cache used by backward."""
        op = self._embed(batch.op_x, "op")
        mach = self._embed(batch.mach_x, "mach")
        counts = np.bincount(batch.op_seg, minlength=batch.size) + np.bincount(batch.mach_seg, minlength=batch.size)
        pooled = np.zeros((batch.size, D_HIDDEN))
        np.add.at(pooled, batch.op_seg, op[3])
        np.add.at(pooled, batch.mach_seg, mach[3])
        pooled /= np.maximum(counts, 1)[:, None]
        z = np.concatenate([op[3][batch.sel_op], mach[3][batch.sel_mach], pooled[batch.sel_seg]], axis=1)
        a_f = z @ self.params["fuse.W"] + self.params["fuse.b"]
        u = relu(a_f)
        logit = (u @ self.params["out.W"] + self.params["out.b"])[:, 0]
        cache = (op, mach, counts, z, a_f, u)
        return sigmoid(logit), cache

    def forward(self, record: StateRecord) -> np.ndarray:
        """Probabilities of the overlap ops of an already normalized record, in row order."""
        self.check(record)
        return self.forward_batch(stack([record]))[0]

    def predict(self, record: StateRecord) -> np.ndarray:
        """Normalize with the bundled normalizer, then forward."""
        if self.normalizer is not None:
            record = self.normalizer.normalize(record)
        return self.forward(record)

    def loss_and_grad(
        self,
        records: Union[StateRecord, Sequence[StateRecord]],
        labels: Optional[np.ndarray] = None,
        w_pos: float = 0.5,
        bracket_weighting: bool = False,
    ) -> Tuple[float, Params]:
        """
        Weighted binary cross-entropy averaged over overlap ops, and its gradient.

        By default w_pos scales only the positive term; `bracket_weighting`
        scales the whole bracket instead.
        """
        if w_pos <= 0:
            raise ConfigurationError(f"w_pos must be positive, got {w_pos}")
        if isinstance(records, StateRecord):
            records = [records]
        for record in records:
            self.check(record)
        if labels is None:
            labels = np.concatenate([r.overlap_labels() for r in records])
        y = np.asarray(labels, dtype=np.float64)
        batch = stack(records)
        p_raw, (op, mach, counts, z, a_f, u) = self.forward_batch(batch)
        if y.shape != p_raw.shape:
            raise ShapeError(f"{y.shape[0]} labels for {p_raw.shape[0]} overlap ops")
        count = max(len(y), 1)
        p = np.clip(p_raw, PROB_CLAMP, 1.0 - PROB_CLAMP)
        if bracket_weighting:
            losses = -w_pos * (y * np.log(p) + (1.0 - y) * np.log(1.0 - p))
            d_logit = w_pos * (p - y)
        else:
            losses = -(w_pos * y * np.log(p) + (1.0 - y) * np.log(1.0 - p))
            d_logit = (1.0 - y) * p - w_pos * y * (1.0 - p)
        d_logit = d_logit * ((p_raw > PROB_CLAMP) & (p_raw < 1.0 - PROB_CLAMP)) / count
        loss = float(losses.sum() / count)

        grads: Params = {}
        d_logit = d_logit[:, None]
        grads["out.W"] = u.T @ d_logit
        grads["out.b"] = d_logit.sum(axis=0)
        d_af = (d_logit @ self.params["out.W"].T) * (a_f > 0)
        grads["fuse.W"] = z.T @ d_af
        grads["fuse.b"] = d_af.sum(axis=0)
        d_z = d_af @ self.params["fuse.W"].T
        d_op = np.zeros_like(op[3])
        d_mach = np.zeros_like(mach[3])
        np.add.at(d_op, batch.sel_op, d_z[:, :D_HIDDEN])
        np.add.at(d_mach, batch.sel_mach, d_z[:, D_HIDDEN : 2 * D_HIDDEN])
        d_pooled = np.zeros((batch.size, D_HIDDEN))
        np.add.at(d_pooled, batch.sel_seg, d_z[:, 2 * D_HIDDEN :])
        d_pooled /= np.maximum(counts, 1)[:, None]
        d_op += d_pooled[batch.op_seg]
        d_mach += d_pooled[batch.mach_seg]
        self._embed_backward(batch.op_x, op, d_op, "op", grads)
        self._embed_backward(batch.mach_x, mach, d_mach, "mach", grads)
        return loss, grads

    def _embed_backward(self, x, cache, d_h, prefix, grads):
        a1, h1, a2, _ = cache
        d_a2 = d_h * (a2 > 0)
        grads[f"{prefix}2.W"] = h1.T @ d_a2
        grads[f"{prefix}2.b"] = d_a2.sum(axis=0)
        d_a1 = (d_a2 @ self.params[f"{prefix}2.W"].T) * (a1 > 0)
        grads[f"{prefix}1.W"] = x.T @ d_a1
        grads[f"{prefix}1.b"] = d_a1.sum(axis=0)

    def to_dict(self) -> dict:
        return {
            "variant": self.variant.value,
            "d_hidden": D_HIDDEN,
            "params": {k: v.tolist() for k, v in sorted(self.params.items())},
            "normalizer": None if self.normalizer is None else self.normalizer.to_dict(),
            "meta": dict(self.meta),
        }

    @classmethod
    def from_dict(cls, data: dict) -> "MlpModel":
        variant = FeatureVariant(data["variant"])
        if data.get("d_hidden", D_HIDDEN) != D_HIDDEN:
            raise ShapeError(f"model hidden size {data['d_hidden']} != {D_HIDDEN}")
        params = {k: np.asarray(v, dtype=np.float64) for k, v in data["params"].items()}
        expected = _layer_shapes(*variant.dims)
        for name, shape in expected.items():
            if params[f"{name}.W"].shape != shape:
                raise ShapeError(f"{name}.W has shape {params[f'{name}.W'].shape}, expected {shape}")
            params[f"{name}.b"] = params[f"{name}.b"].reshape(shape[1])
        normalizer = None if data.get("normalizer") is None else Normalizer.from_dict(data["normalizer"])
        return cls(variant, params, normalizer, dict(data.get("meta") or {}))


def parameter_names() -> List[str]:
    return [f"{name}.{part}" for name in LAYERS for part in ("W", "b")]
