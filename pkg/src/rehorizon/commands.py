from __future__ import annotations

import logging
import math
from dataclasses import asdict
from functools import partial
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd

from .breakdowns import BreakdownIntensity, BreakdownSchedule, events_for
from .closedForm import FirstMethod, LRhoMethod, RandomMethod, closed_form_errors
from .confusion import confusion
from .empiricalDecay import empirical_pfix, fit_linear_decay
from .errors import ConfigurationError, UndefinedMetricError, VerificationError
from .experimentConfig import ExperimentConfig
from .features import FeatureVariant
from .fileFormats import (
    read_dataset,
    read_instance,
    read_model,
    read_table,
    write_dataset,
    write_instance,
    write_model,
    write_solution,
    write_table,
)
from .fixStrategy import Default, parse_strategy
from .fjspCheck import check_feasibility
from .fjspInstance import FjspInstance, ObjectiveKind, Solution
from .instanceGen import gen_delay_instance, gen_makespan_instance
from .labelCollector import collect_labels, instance_ids
from .mlpModel import MlpModel
from .monteCarlo import monte_carlo_errors
from .noiseModel import NoiseModel
from .rhoRunner import RhoParams, RhoResult, run_rho
from .runReport import improvement_metrics
from .subproblem import parse_budget
from .sweep import SweepPoint, default_grid, select_per_method
from .trainer import train_with_log
from .workerPool import run_pool

logger = logging.getLogger(__name__)

EVAL_COLUMNS = [
    "instance_id", "method", "objective", "effort", "effort_unit", "iterations",
    "oi_percent", "ti_percent", "fp_total", "fn_total", "tp", "fp", "fn", "tn",
]
SIGMA_GRID = tuple(np.round(np.linspace(0.0, 1.0, 21), 2))


def generate_instance(config: ExperimentConfig, seed: int) -> FjspInstance:
    if config.objective is ObjectiveKind.MAKESPAN:
        return gen_makespan_instance(seed, config.num_machines, config.num_jobs, config.ops_per_job)
    return gen_delay_instance(seed, config.num_machines, config.num_jobs, config.ops_per_job, config.objective)


def load_instances(config: ExperimentConfig) -> List[FjspInstance]:
    """Instance files of the configured seeds, generated in memory when a file is absent."""
    instances = []
    for seed in config.seeds:
        path = config.instance_path(seed)
        if path.exists():
            instances.append(read_instance(path))
        else:
            logger.debug("%s not found, generating seed %d", path, seed)
            instances.append(generate_instance(config, seed))
    return instances


def _load_model(path: Optional[str]) -> Optional[MlpModel]:
    return None if path is None else read_model(path)


def verify(instance: FjspInstance, solution: Solution, events: Optional[BreakdownSchedule] = None) -> None:
    """Raise VerificationError unless the schedule is feasible and avoids every down interval."""
    problems = [str(v) for v in check_feasibility(instance, solution)]
    if events is not None:
        durations = instance.durations()
        for key, machine in solution.assignment.items():
            if events.is_down(machine, solution.start[key], solution.end(key, durations)):
                problems.append(f"{key} runs on machine {machine} while it is down")
    if problems:
        raise VerificationError(f"{len(problems)} violations, first: {problems[0]}")


def cmd_gen(config: ExperimentConfig) -> List[Path]:
    return [write_instance(config.instance_path(seed), generate_instance(config, seed)) for seed in config.seeds]


def cmd_solve(
    instance_path,
    params: RhoParams,
    strategy: str,
    *,
    seed: int = 0,
    breakdown: Optional[BreakdownIntensity] = None,
    noise: Optional[NoiseModel] = None,
    model_path: Optional[str] = None,
    solution_path=None,
    report_path=None,
    check: bool = False,
) -> RhoResult:
    instance = read_instance(instance_path)
    fix = parse_strategy(strategy, _load_model(model_path), seed)
    instance_id = instance_ids([instance])[0]
    events = events_for(instance, breakdown, instance_id) if breakdown is not None else None
    result = run_rho(instance, params, fix, events, noise, seed, instance_id=instance_id)
    if solution_path is not None:
        write_solution(solution_path, result.solution, result.report.objective)
    if report_path is not None:
        write_table(report_path, [result.report.row()], append=True)
    if check:
        verify(instance, result.solution, events)
    return result


def cmd_collect(config: ExperimentConfig, dataset_path=None) -> Path:
    variant = FeatureVariant.for_run(config.objective, config.breakdown is not None, config.noise)
    records = collect_labels(
        load_instances(config),
        config.rho_params(),
        config.Q,
        config.seed,
        variant=variant,
        breakdown=config.breakdown_intensity(),
        noise=config.noise_model(),
        workers=config.workers,
    )
    return write_dataset(dataset_path or Path(config.output) / "dataset.jsonl", records, variant)


def cmd_train(config: ExperimentConfig, dataset_path, variant: Optional[FeatureVariant] = None) -> Tuple[Path, Path]:
    records = read_dataset(dataset_path, variant)
    model, log = train_with_log(records, config.train_config())
    out = Path(config.output)
    model_path = write_model(out / "model.yaml", model)
    columns = ["epoch", "step", "train_loss", "val_loss", "accuracy", "tpr", "tnr", "precision", "recall"]
    log_path = write_table(out / "train_log.csv", pd.DataFrame([asdict(e) for e in log], columns=columns))
    return model_path, log_path


def _eval_instance(
    item: Tuple[int, FjspInstance],
    params: RhoParams,
    strategies: Sequence[str],
    seed: int,
    breakdown: Optional[BreakdownIntensity],
    noise: Optional[NoiseModel],
    model: Optional[MlpModel],
    diagnostics_q: Optional[int],
) -> List[dict]:
    instance_id, instance = item
    events = events_for(instance, breakdown, instance_id) if breakdown is not None else None
    base = run_rho(instance, params, Default(), events, noise, seed, instance_id=instance_id).report
    rows = []
    for text in strategies:
        fix = parse_strategy(text, model, seed)
        result = run_rho(instance, params, fix, events, noise, seed, oracle_labels_q=diagnostics_q, instance_id=instance_id)
        try:
            oi, ti = improvement_metrics(base, result.report)
        except UndefinedMetricError as exc:
            logger.warning("instance %d, %s: no improvement metrics (%s)", instance_id, result.report.method, exc)
            oi, ti = math.nan, math.nan
        row = result.report.row()
        row.update(oi_percent=oi, ti_percent=ti)
        counts = np.zeros(4, dtype=np.int64)
        for trace in result.trace:
            if trace.labels is not None:
                oracle = {k for k, y in trace.labels.items() if y == 1}
                c = confusion(trace.fix_set, oracle, set(trace.state.overlap_ops))
                counts += (c.tp, c.fp, c.fn, c.tn)
        row.update(zip(("tp", "fp", "fn", "tn"), counts.tolist()))
        rows.append(row)
    return rows


def summarize(frame: pd.DataFrame) -> pd.DataFrame:
    """Mean and two standard errors per method."""
    metrics = ["objective", "effort", "oi_percent", "ti_percent"]
    grouped = frame.groupby("method", sort=True)[metrics]
    mean = grouped.mean()
    two_se = 2 * grouped.sem(ddof=1).fillna(0.0)
    summary = mean.join(two_se, rsuffix="_2se")
    summary["instances"] = grouped.size()
    return summary.reset_index()


def cmd_eval(config: ExperimentConfig) -> pd.DataFrame:
    """Every strategy on every instance with shared seeds; OI%/TI% against Default."""
    instances = load_instances(config)
    items = sorted(zip(instance_ids(instances), instances), key=lambda it: it[0])
    job = partial(
        _eval_instance,
        params=config.rho_params(),
        strategies=config.strategies,
        seed=config.seed,
        breakdown=config.breakdown_intensity(),
        noise=config.noise_model(),
        model=_load_model(config.model),
        diagnostics_q=config.Q if config.diagnostics else None,
    )
    rows = [row for batch in run_pool(job, items, config.workers) for row in batch]
    frame = pd.DataFrame(rows, columns=EVAL_COLUMNS).sort_values(["instance_id", "method"], kind="stable")
    out = Path(config.output)
    write_table(out / "eval.csv", frame)
    write_table(out / "eval_summary.csv", summarize(frame))
    return frame


def _sweep_point(
    item: Tuple[int, int, str],
    instances: Sequence[Tuple[int, FjspInstance]],
    strategies: Sequence[str],
    seed: int,
    breakdown: Optional[BreakdownIntensity],
    noise: Optional[NoiseModel],
    model: Optional[MlpModel],
) -> List[SweepPoint]:
    H, S, budget = item
    params = RhoParams(H, S, parse_budget(budget))
    points = []
    for text in strategies:
        reports = []
        for instance_id, instance in instances:
            events = events_for(instance, breakdown, instance_id) if breakdown is not None else None
            fix = parse_strategy(text, model, seed)
            reports.append(run_rho(instance, params, fix, events, noise, seed, instance_id=instance_id).report)
        points.append(
            SweepPoint(
                reports[0].method,
                H,
                S,
                budget,
                float(np.mean([r.objective for r in reports])),
                float(np.mean([r.effort for r in reports])),
            )
        )
    return points


def cmd_sweep(config: ExperimentConfig) -> Dict[str, SweepPoint]:
    grid = list(config.grid) if config.grid is not None else default_grid()
    if not grid:
        raise ConfigurationError("the sweep grid is empty")
    instances = load_instances(config)
    items = list(zip(instance_ids(instances), instances))
    job = partial(
        _sweep_point,
        instances=items,
        strategies=config.strategies,
        seed=config.seed,
        breakdown=config.breakdown_intensity(),
        noise=config.noise_model(),
        model=_load_model(config.model),
    )
    points = [p for batch in run_pool(job, grid, config.workers) for p in batch]
    best = select_per_method(points)
    out = Path(config.output)
    write_table(out / "sweep.csv", [asdict(p) for p in points])
    write_table(out / "sweep_best.csv", [asdict(p) for _, p in sorted(best.items())])
    return best


def _error_rows(decay, pfix: np.ndarray, trials: int, seed: int, workers) -> List[dict]:
    rows = []
    for sigma in SIGMA_GRID:
        for method in (RandomMethod(float(sigma)), FirstMethod(float(sigma))):
            exact = closed_form_errors(method, decay)
            sampled = monte_carlo_errors(method, pfix, trials, seed, workers=workers)
            rows.append(
                {
                    "method": type(method).__name__.replace("Method", "").lower(),
                    "sigma": float(sigma),
                    "fp": exact.expected_fp,
                    "fn": exact.expected_fn,
                    "fpr": exact.fpr,
                    "fnr": exact.fnr,
                    "fp_empirical": sampled.expected_fp,
                    "fn_empirical": sampled.expected_fn,
                    "fp_empirical_se": sampled.fp_stderr,
                    "fn_empirical_se": sampled.fn_stderr,
                }
            )
    return rows


def _confusion_rows(eval_frame: pd.DataFrame, decay) -> List[dict]:
    rows = []
    for method, group in eval_frame.groupby("method", sort=True):
        tp, fp, fn, tn = (int(group[c].sum()) for c in ("tp", "fp", "fn", "tn"))
        if tp + fp + fn + tn == 0:
            continue
        alpha = fp / (fp + tn) if fp + tn else None
        beta = fn / (fn + tp) if fn + tp else None
        row = {
            "method": method, "tp": tp, "fp": fp, "fn": fn, "tn": tn,
            "accuracy": (tp + tn) / (tp + fp + fn + tn),
            "precision": tp / (tp + fp) if tp + fp else None,
            "recall": tp / (tp + fn) if tp + fn else None,
            "alpha": alpha, "beta": beta, "fp_closed_form": None, "fn_closed_form": None,
        }
        if alpha is not None and beta is not None:
            pair = closed_form_errors(LRhoMethod(alpha, beta), decay)
            row.update(fp_closed_form=pair.expected_fp, fn_closed_form=pair.expected_fn)
        rows.append(row)
    return rows


def cmd_analyze(
    config: ExperimentConfig,
    dataset_path,
    eval_path=None,
    *,
    trials: int = 100_000,
) -> Dict[str, Path]:
    """Empirical fix probabilities, fitted decay, closed-form vs sampled errors and plot series."""
    records = read_dataset(dataset_path)
    empirical = empirical_pfix(records)
    fitted = fit_linear_decay(empirical.p_hat)
    decay = fitted.clamped()
    out = Path(config.output)
    paths = {}

    x = empirical.positions
    paths["pfix"] = write_table(
        out / "pfix.csv",
        pd.DataFrame({"i": np.arange(1, empirical.W + 1), "position": x, "p_hat": empirical.p_hat,
                      "stderr": empirical.stderr, "fitted": fitted.line()}),
    )
    paths["decay"] = write_table(
        out / "decay.csv",
        [{"W": fitted.W, "b": fitted.b, "m": fitted.m, "slope_pvalue": fitted.slope_pvalue,
          "b_clamped": decay.b, "m_clamped": decay.m, "iterations": empirical.iterations,
          "records": empirical.records}],
    )
    errors = _error_rows(decay, empirical.p_hat, trials, config.seed, config.workers)
    paths["errors"] = write_table(out / "errors.csv", errors)
    if eval_path is not None:
        paths["confusion"] = write_table(out / "confusion.csv", _confusion_rows(read_table(eval_path), decay))

    series = [("p_hat", x, empirical.p_hat), ("fitted", x, fitted.line())]
    for name in ("random", "first"):
        picked = [r for r in errors if r["method"] == name]
        series.append((f"{name}_fp", [r["sigma"] for r in picked], [r["fp"] for r in picked]))
        series.append((f"{name}_fn", [r["sigma"] for r in picked], [r["fn"] for r in picked]))
    paths["plot"] = write_table(
        out / "plot_series.csv",
        [{"series": name, "x": float(a), "y": float(b)} for name, xs, ys in series for a, b in zip(xs, ys)],
    )
    return paths
