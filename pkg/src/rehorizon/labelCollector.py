from __future__ import annotations

import logging
from functools import partial
from typing import List, Optional, Sequence, Tuple

from .breakdowns import BreakdownIntensity, events_for
from .errors import ConfigurationError
from .features import FeatureVariant, StateRecord
from .fixStrategy import Oracle
from .fjspInstance import FjspInstance
from .noiseModel import NoiseModel
from .rhoRunner import RhoParams, run_rho
from .workerPool import run_pool

logger = logging.getLogger(__name__)


def instance_ids(instances: Sequence[FjspInstance]) -> List[int]:
    """Instance seeds when every instance has a distinct one, positions otherwise."""
    seeds = [instance.seed for instance in instances]
    if None not in seeds and len(set(seeds)) == len(seeds):
        return list(seeds)
    if len(set(s for s in seeds if s is not None)) < sum(s is not None for s in seeds):
        logger.warning("instance seeds repeat, identifying instances by position")
    return list(range(len(instances)))


def _collect_one(
    item: Tuple[int, FjspInstance],
    params: RhoParams,
    q: int,
    seed: int,
    variant: Optional[FeatureVariant],
    breakdown: Optional[BreakdownIntensity],
    noise: Optional[NoiseModel],
) -> List[StateRecord]:
    instance_id, instance = item
    events = events_for(instance, breakdown, instance_id) if breakdown is not None else None
    variant = variant or FeatureVariant.for_run(instance.objective, events is not None, noise is not None)
    result = run_rho(
        instance,
        params,
        Oracle(q),
        events,
        noise,
        seed,
        count_oracle_time=True,
        record_variant=variant,
        instance_id=instance_id,
    )
    return [t.record for t in result.trace if t.record is not None]


def collect_labels(
    instances: Sequence[FjspInstance],
    params: RhoParams,
    Q: int,
    seed: int,
    *,
    variant: Optional[FeatureVariant] = None,
    breakdown: Optional[BreakdownIntensity] = None,
    noise: Optional[NoiseModel] = None,
    workers: int = 1,
) -> List[StateRecord]:
    """
    Look-ahead labelled records: one per iteration r >= 2 of an Oracle(Q)
    rollout over each instance, ordered by instance id then iteration.
    """
    if Q < 1:
        raise ConfigurationError(f"Q must be >= 1, got {Q}")
    items = sorted(
        zip(instance_ids(instances), instances),
        key=lambda item: item[0],
    )
    job = partial(_collect_one, params=params, q=Q, seed=seed, variant=variant, breakdown=breakdown, noise=noise)
    batches = run_pool(job, items, workers)
    records = [record for batch in batches for record in batch]
    logger.info("collected %d labelled records from %d instances", len(records), len(items))
    return records
