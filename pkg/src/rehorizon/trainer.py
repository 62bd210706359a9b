from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .confusion import classifier_metrics
from .errors import ConfigurationError, InsufficientDataError
from .features import StateRecord
from .mlpModel import MlpModel, Params
from .normalizer import Normalizer
from .seededStreams import Purpose, stream

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class TrainConfig:
    learning_rate: float = 1e-3
    batch_size: int = 64
    w_pos: float = 0.5
    steps: int = 500_000
    seed: int = 0
    bracket_weighting: bool = False
    validation_fraction: float = 0.05
    threshold: float = 0.5
    betas: Tuple[float, float] = (0.9, 0.999)
    eps: float = 1e-8

    def __post_init__(self):
        if self.w_pos <= 0:
            raise ConfigurationError(f"w_pos must be positive, got {self.w_pos}")
        if self.learning_rate <= 0 or self.batch_size < 1 or self.steps < 0:
            raise ConfigurationError("learning rate, batch size and steps must be positive")
        if not 0.0 <= self.validation_fraction < 1.0:
            raise ConfigurationError(f"validation_fraction must lie in [0, 1), got {self.validation_fraction}")


@dataclass
class EpochLog:
    epoch: int
    step: int
    train_loss: float
    val_loss: Optional[float]
    accuracy: Optional[float]
    tpr: Optional[float]
    tnr: Optional[float]
    precision: Optional[float]
    recall: Optional[float]


@dataclass
class Adam:
    learning_rate: float
    betas: Tuple[float, float] = (0.9, 0.999)
    eps: float = 1e-8
    t: int = 0
    m: Dict[str, np.ndarray] = field(default_factory=dict)
    v: Dict[str, np.ndarray] = field(default_factory=dict)

    def step(self, params: Params, grads: Params) -> None:
        """In-place update of `params`."""
        beta1, beta2 = self.betas
        self.t += 1
        for name, grad in grads.items():
            m = self.m.setdefault(name, np.zeros_like(grad))
            v = self.v.setdefault(name, np.zeros_like(grad))
            m *= beta1
            m += (1.0 - beta1) * grad
            v *= beta2
            v += (1.0 - beta2) * grad * grad
            m_hat = m / (1.0 - beta1**self.t)
            v_hat = v / (1.0 - beta2**self.t)
            params[name] -= self.learning_rate * m_hat / (np.sqrt(v_hat) + self.eps)


def split_by_instance(records: Sequence[StateRecord], fraction: float) -> Tuple[List[StateRecord], List[StateRecord]]:
    """Hold out the last `fraction` of instance ids (at least one when there are two or more)."""
    ids = sorted({r.instance_id for r in records})
    held = math.ceil(fraction * len(ids)) if len(ids) >= 2 and fraction > 0 else 0
    val_ids = set(ids[len(ids) - held :]) if held else set()
    return [r for r in records if r.instance_id not in val_ids], [r for r in records if r.instance_id in val_ids]


def evaluate(model: MlpModel, records: Sequence[StateRecord], config: TrainConfig):
    """(loss, classifier metrics) of normalized records."""
    records = [r for r in records if r.width > 0]
    if not records:
        return None, None
    loss, _ = model.loss_and_grad(records, w_pos=config.w_pos, bracket_weighting=config.bracket_weighting)
    probs = np.concatenate([model.forward(r) for r in records])
    labels = np.concatenate([r.overlap_labels() for r in records])
    return loss, classifier_metrics(probs, labels, config.threshold)


def _check_dataset(dataset: Sequence[StateRecord]) -> None:
    if not dataset:
        raise InsufficientDataError("cannot train on an empty dataset")
    variants = {r.variant for r in dataset}
    if len(variants) > 1:
        raise ConfigurationError(f"dataset mixes feature variants: {sorted(v.value for v in variants)}")
    if any(r.labels is None for r in dataset):
        raise ConfigurationError("every training record needs labels")


def train_with_log(dataset: Sequence[StateRecord], config: TrainConfig) -> Tuple[MlpModel, List[EpochLog]]:
    """
    Mini-batch Adam on the weighted cross-entropy.

    The normalizer is fitted on the training split only. When a validation
    split exists the returned weights are those with the best validation loss.
    """
    _check_dataset(dataset)
    variant = dataset[0].variant
    train_set, val_set = split_by_instance(dataset, config.validation_fraction)
    normalizer = Normalizer.fit(train_set or dataset)
    model = MlpModel.init(variant, config.seed)
    model.normalizer = normalizer
    model.meta = {"w_pos": config.w_pos, "seed": config.seed, "steps": config.steps}
    log: List[EpochLog] = []

    usable = [normalizer.normalize(r) for r in train_set if r.width > 0]
    val = [normalizer.normalize(r) for r in val_set if r.width > 0]
    if config.steps == 0 or not usable:
        return model, log

    rng = stream(config.seed, Purpose.SHUFFLE)
    adam = Adam(config.learning_rate, config.betas, config.eps)
    best_params, best_loss = None, math.inf
    step = epoch = 0
    while step < config.steps:
        epoch += 1
        order = rng.permutation(len(usable))
        losses = []
        for begin in range(0, len(usable), config.batch_size):
            if step >= config.steps:
                break
            batch = [usable[i] for i in order[begin : begin + config.batch_size]]
            loss, grads = model.loss_and_grad(batch, w_pos=config.w_pos, bracket_weighting=config.bracket_weighting)
            adam.step(model.params, grads)
            losses.append(loss)
            step += 1

        val_loss, metrics = evaluate(model, val, config)
        if metrics is None:
            _, metrics = evaluate(model, usable, config)
        entry = EpochLog(epoch, step, float(np.mean(losses)), val_loss, *metrics)
        log.append(entry)
        logger.info(
            "epoch %d step %d: loss %.4f val %s acc %s tpr %s tnr %s",
            epoch, step, entry.train_loss, _fmt(val_loss), _fmt(entry.accuracy), _fmt(entry.tpr), _fmt(entry.tnr),
        )
        if val_loss is not None and val_loss < best_loss:
            best_loss = val_loss
            best_params = {k: v.copy() for k, v in model.params.items()}

    if best_params is not None:
        model.params = best_params
    return model, log


def train(dataset: Sequence[StateRecord], config: TrainConfig) -> MlpModel:
    return train_with_log(dataset, config)[0]


def _fmt(value: Optional[float]) -> str:
    return "-" if value is None else f"{value:.4f}"
