from __future__ import annotations

import logging
import math
import time
from dataclasses import dataclass
from typing import Dict, FrozenSet, List, NamedTuple, Optional, Tuple

from .breakdowns import BreakdownSchedule
from .errors import ConfigurationError
from .features import FeatureVariant, StateRecord, extract_features
from .fixStrategy import FixStrategy, Oracle, look_ahead_labels, select_fix_set
from .fjspCheck import Boundary, evaluate_objective
from .fjspInstance import FjspInstance, OpKey, Solution
from .localSearch import SolveStats, solve
from .noiseModel import NoiseModel, observe_durations
from .rhoOrder import rho_order
from .rhoState import RhoState
from .rhoWindow import (
    build_boundary,
    commit,
    execute_with_noise,
    get_plan_operations,
    get_step_operations,
    window_split,
)
from .runReport import EFFORT_MOVES, EFFORT_SECONDS, RunReport
from .seededStreams import Purpose, derive_seed
from .subproblem import Budget, MoveCount, Subproblem, WallClock
from .workerPool import report_window

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class RhoParams:
    H: int = 80
    S: int = 30
    budget: Budget = WallClock(60.0, 3.0)

    def __post_init__(self):
        if not 1 <= self.S <= self.H:
            raise ConfigurationError(f"need 1 <= S <= H, got H={self.H} S={self.S}")

    @property
    def W(self) -> int:
        return self.H - self.S


@dataclass
class IterationTrace:
    state: RhoState
    fix_set: FrozenSet[OpKey]
    solve: SolveStats
    window_objective: int
    step_ops: Tuple[OpKey, ...]
    effort: float
    oracle_effort: float = 0.0
    labels: Optional[Dict[OpKey, int]] = None
    record: Optional[StateRecord] = None
    halted: bool = False

    @property
    def fp_fn(self) -> Optional[Tuple[int, int]]:
        if self.labels is None:
            return None
        oracle = {k for k, y in self.labels.items() if y == 1}
        return len(self.fix_set - oracle), len(oracle - self.fix_set)


class RhoResult(NamedTuple):
    solution: Solution
    report: RunReport
    trace: List[IterationTrace]


def solve_seed(seed: int, iteration: int) -> int:
    """Seed of the restricted solve in a given iteration."""
    return derive_seed(seed, Purpose.SOLVE, iteration)


def oracle_seed(seed: int, iteration: int, q: int) -> int:
    return derive_seed(seed, Purpose.ORACLE, iteration, q)


def _effort(stats: SolveStats, budget: Budget) -> float:
    return float(stats.moves) if isinstance(budget, MoveCount) else stats.elapsed


def _clocked(boundary: Boundary, clock: int, num_machines: int) -> Boundary:
    """Boundary with every machine unavailable before `clock`."""
    if clock <= 0:
        return boundary
    machine_end = {m: max(boundary.prev_machine_end.get(m, 0), clock) for m in range(num_machines)}
    return Boundary(boundary.prev_job_end, machine_end)


def run_rho(
    instance: FjspInstance,
    params: RhoParams,
    strategy: FixStrategy,
    events: Optional[BreakdownSchedule] = None,
    noise: Optional[NoiseModel] = None,
    seed: int = 0,
    *,
    oracle_labels_q: Optional[int] = None,
    count_oracle_time: bool = False,
    record_variant: Optional[FeatureVariant] = None,
    instance_id: Optional[int] = None,
) -> RhoResult:
    """
    Rolling-horizon optimization of a whole instance.

    Each iteration plans the next H operations, pins the strategy's fix set,
    solves the window and commits up to S operations. With breakdown events the
    window is re-optimized at every breakdown start or end; with noise the
    window is planned on observed durations and committed on true ones.
    """
    if oracle_labels_q is not None and oracle_labels_q < 1:
        raise ConfigurationError(f"Q must be >= 1, got {oracle_labels_q}")
    order = rho_order(instance)
    true = instance.durations()
    budget = params.budget
    events = events if events is not None and len(events) else None

    executed = Solution()
    prev_plan: Tuple[OpKey, ...] = ()
    prev_window = Solution()
    prev_durations: Dict[OpKey, Dict[int, int]] = {}
    prev_down: FrozenSet[int] = frozenset()
    clock = 0
    iteration = 0
    effort = 0.0
    trace: List[IterationTrace] = []
    started = time.perf_counter()

    while len(executed) < instance.num_operations:
        down = events.down_at(clock) if events else frozenset()
        next_event = events.next_boundary_after(clock) if events else math.inf
        plan = tuple(get_plan_operations(order, params.H, executed, instance=instance, down=down))
        if not plan:
            if math.isinf(next_event):
                raise ConfigurationError("operations remain but none can be scheduled")
            clock = int(next_event)
            continue

        iteration += 1
        overlap, new = window_split(plan, prev_plan)
        boundary = build_boundary(executed, true)
        overlay = None
        if noise is not None:
            overlay = observe_durations(instance, plan, min(params.S, len(plan)), seed, noise, iteration)
        durations = overlay if overlay is not None else {k: true[k] for k in plan}
        state = RhoState(
            instance=instance,
            iteration=iteration,
            plan_ops=plan,
            overlap_ops=tuple(overlap),
            new_ops=tuple(new),
            prev_solution=prev_window.restricted(overlap),
            prev_durations={k: prev_durations[k] for k in overlap if k in prev_durations},
            executed=executed,
            boundary=boundary,
            clock=clock,
            down=down,
            prev_down=prev_down,
            duration_overlay=overlay,
        )
        solve_boundary = _clocked(boundary, clock, instance.num_machines)

        def window(fixed=None, warm=None) -> Subproblem:
            return Subproblem.build(
                instance,
                plan,
                solve_boundary,
                fixed_assignment=fixed,
                unavailable_machines=down,
                duration_overlay=overlay,
                warm_start=warm,
            )

        oracle_effort = [0.0]

        def subsolve(q: int) -> Solution:
            solution, stats = solve(window(), budget, oracle_seed(seed, iteration, q))
            oracle_effort[0] += _effort(stats, budget)
            return solution

        fix_set = select_fix_set(strategy, state, subsolve)
        labels = None
        if isinstance(strategy, Oracle) and iteration >= 2 and overlap:
            labels = {k: int(k in fix_set) for k in overlap}
        elif oracle_labels_q and iteration >= 2 and overlap:
            labels = look_ahead_labels(state, subsolve, oracle_labels_q).labels

        record = None
        if record_variant is not None and iteration >= 2 and overlap:
            record = extract_features(state, record_variant, instance_id or 0)
            if labels is not None:
                record = record.with_labels(labels)

        fixed = {k: state.prev_machine(k) for k in fix_set}
        warm = state.prev_solution if strategy.warm_start and overlap else None
        subproblem = window(fixed, warm)
        solution, stats = solve(subproblem, budget, solve_seed(seed, iteration))
        step_effort = _effort(stats, budget)
        if count_oracle_time:
            step_effort += oracle_effort[0]
        effort += step_effort

        if noise is not None:
            step = get_step_operations(plan, params.S, solution, durations=durations, next_event=next_event)
            executed, committed = execute_with_noise(executed, step, solution, true, next_event=next_event)
        else:
            committed = get_step_operations(plan, params.S, solution, durations=true, next_event=next_event)
            executed = commit(executed, solution, committed)
        report_window(len(committed))
        halted = len(committed) < min(params.S, len(plan))
        if halted and not math.isinf(next_event):
            clock = int(next_event)

        window_objective = subproblem.evaluate(solution)
        logger.debug(
            "iteration %d: plan %d overlap %d fixed %d moves %d objective %d committed %d",
            iteration, len(plan), len(overlap), len(fix_set), stats.moves, window_objective, len(committed),
        )
        trace.append(
            IterationTrace(
                state=state,
                fix_set=fix_set,
                solve=stats,
                window_objective=window_objective,
                step_ops=tuple(committed),
                effort=step_effort,
                oracle_effort=oracle_effort[0],
                labels=labels,
                record=record,
                halted=halted,
            )
        )
        prev_plan = plan
        prev_window = solution
        prev_durations = durations
        prev_down = down

    objective = evaluate_objective(instance, executed)
    report = RunReport(
        method=strategy.name,
        objective=objective,
        effort=effort,
        effort_unit=EFFORT_MOVES if isinstance(budget, MoveCount) else EFFORT_SECONDS,
        instance_id=instance_id,
        iterations=iteration,
        fp_fn=[t.fp_fn for t in trace if t.fp_fn is not None],
    )
    logger.info(
        "%s: objective %d, effort %.6g %s, %d iterations (%.2fs)",
        strategy.name, objective, effort, report.effort_unit, iteration, time.perf_counter() - started,
    )
    return RhoResult(executed, report, trace)
