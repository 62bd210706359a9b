from __future__ import annotations

import math
from typing import AbstractSet, Container, Dict, List, Optional, Sequence, Tuple

from .fjspCheck import Boundary
from .fjspInstance import DurationTable, FjspInstance, OpKey, Solution


def get_plan_operations(
    ordered_ops: Sequence[OpKey],
    H: int,
    executed: Container[OpKey],
    *,
    instance: Optional[FjspInstance] = None,
    down: AbstractSet[int] = frozenset(),
) -> List[OpKey]:
    """
    First H non-executed operations in `ordered_ops`.

    With a non-empty `down` set, an operation whose compatible machines are all
    down is skipped together with every later operation of its job.
    """
    plan: List[OpKey] = []
    ignored_jobs = set()
    for key in ordered_ops:
        if len(plan) >= H:
            break
        if key in executed:
            continue
        if down:
            if key[0] in ignored_jobs:
                continue
            if all(m in down for m in instance.op(key).compatible):
                ignored_jobs.add(key[0])
                continue
        plan.append(key)
    return plan


def build_boundary(executed: Solution, durations: DurationTable) -> Boundary:
    """Latest executed end time per job and per machine."""
    job_end: Dict[int, int] = {}
    machine_end: Dict[int, int] = {}
    for key, machine in executed.assignment.items():
        end = executed.end(key, durations)
        job_end[key[0]] = max(job_end.get(key[0], end), end)
        machine_end[machine] = max(machine_end.get(machine, end), end)
    return Boundary(job_end, machine_end)


def get_step_operations(
    plan_ops: Sequence[OpKey],
    S: int,
    solution: Solution,
    *,
    durations: Optional[DurationTable] = None,
    next_event: float = math.inf,
) -> List[OpKey]:
    """
    Operations committed this iteration.

    Without events: the S earliest-starting operations, ties by window order.
    With a pending breakdown boundary: operations in end-time order, stopping at
    the first one that would still be running at `next_event`.
    """
    rank = {key: i for i, key in enumerate(plan_ops)}
    if math.isinf(next_event):
        ordered = sorted(plan_ops, key=lambda k: (solution.start[k], rank[k]))
        return ordered[:S]

    ordered = sorted(plan_ops, key=lambda k: (solution.end(k, durations), solution.start[k], rank[k]))
    step: List[OpKey] = []
    for key in ordered[:S]:
        if solution.end(key, durations) > next_event:
            break
        step.append(key)
    return step


def execute_with_noise(
    executed: Solution,
    step_ops: Sequence[OpKey],
    noisy_solution: Solution,
    true_durations: DurationTable,
    *,
    next_event: float = math.inf,
) -> Tuple[Solution, List[OpKey]]:
    """
    Commit `step_ops` under their true durations.

    Operations go in planned-start order; each start is lifted to the later of
    its planned start and the machine and job free times. Execution stops before
    an operation that would run past `next_event`.
    """
    boundary = build_boundary(executed, true_durations)
    machine_free: Dict[int, int] = dict(boundary.prev_machine_end)
    job_free: Dict[int, int] = dict(boundary.prev_job_end)
    assignment = dict(executed.assignment)
    start = dict(executed.start)
    committed: List[OpKey] = []
    rank = {key: i for i, key in enumerate(step_ops)}
    for key in sorted(step_ops, key=lambda k: (noisy_solution.start[k], rank[k])):
        machine = noisy_solution.assignment[key]
        begin = max(noisy_solution.start[key], machine_free.get(machine, 0), job_free.get(key[0], 0))
        end = begin + true_durations[key][machine]
        if end > next_event:
            break
        assignment[key] = machine
        start[key] = begin
        machine_free[machine] = max(machine_free.get(machine, 0), end)
        job_free[key[0]] = max(job_free.get(key[0], 0), end)
        committed.append(key)
    return Solution(assignment, start), committed


def commit(executed: Solution, solution: Solution, step_ops: Sequence[OpKey]) -> Solution:
    return executed.merged(solution.restricted(step_ops))


def window_split(plan_ops: Sequence[OpKey], previous_plan: Sequence[OpKey]) -> Tuple[List[OpKey], List[OpKey]]:
    """(overlap, new) operations of a window relative to the previous one, in window order."""
    previous = set(previous_plan)
    overlap = [k for k in plan_ops if k in previous]
    new = [k for k in plan_ops if k not in previous]
    return overlap, new
