from __future__ import annotations

import logging
from typing import Tuple

from .errors import OracleCapError
from .fjspInstance import ObjectiveKind, Solution
from .localSearch import build_initial
from .subproblem import CompiledSubproblem, Subproblem

logger = logging.getLogger(__name__)

DEFAULT_CAP = 10


class _BranchAndBound:
    """
    Depth-first enumeration of semi-active schedules.

    Operations are dispatched one at a time onto the end of a machine. A branch
    is kept only if (start, window position) strictly increases along the
    dispatch sequence, which visits every semi-active schedule exactly once.
    """

    def __init__(self, compiled: CompiledSubproblem, incumbent: Solution):
        self.c = compiled
        n = compiled.n
        self.assignment = [-1] * n
        self.start = [0] * n
        self.end = [0] * n
        self.machine_ready = dict(compiled.machine_floor)
        assignment = [incumbent.assignment[k] for k in compiled.keys]
        best_start = [incumbent.start[k] for k in compiled.keys]
        self.best_value = compiled.score(assignment, best_start)[0]
        self.best_assignment = assignment
        self.best_start = best_start
        self.nodes = 0

    def _lower_bound(self, partial: int, last_start: int) -> int:
        c = self.c
        bound = partial
        est = {}
        for i in range(c.n):
            if self.assignment[i] >= 0:
                continue
            pred = c.job_pred[i]
            s = c.floor[i]
            if pred >= 0 and self.assignment[pred] >= 0:
                s = max(s, self.end[pred])
            elif pred >= 0:
                s = max(s, est.get(pred, c.floor[pred]) + c.min_duration[pred])
            s = max(s, last_start)
            est[i] = s
            if c.objective is ObjectiveKind.MAKESPAN:
                bound = max(bound, s + c.min_duration[i])
            else:
                bound += s - c.release[i]
                if c.objective is ObjectiveKind.START_PLUS_END_DELAY:
                    bound += max(s + c.min_duration[i] - c.target[i], 0)
        return bound

    def _contribution(self, i: int, s: int, e: int) -> int:
        c = self.c
        if c.objective is ObjectiveKind.MAKESPAN:
            return e
        value = s - c.release[i]
        if c.objective is ObjectiveKind.START_PLUS_END_DELAY:
            value += max(e - c.target[i], 0)
        return value

    def search(self, placed: int, partial: int, last: Tuple[int, int]) -> None:
        c = self.c
        self.nodes += 1
        if placed == c.n:
            if partial < self.best_value:
                self.best_value = partial
                self.best_assignment = list(self.assignment)
                self.best_start = list(self.start)
            return
        if self._lower_bound(partial, last[0]) >= self.best_value:
            return

        branches = []
        for i in range(c.n):
            if self.assignment[i] >= 0:
                continue
            pred = c.job_pred[i]
            if pred >= 0 and self.assignment[pred] < 0:
                continue
            job_ready = c.floor[i] if pred < 0 else max(c.floor[i], self.end[pred])
            for m in c.options[i]:
                s = max(job_ready, self.machine_ready.get(m, 0))
                if (s, i) <= last:
                    continue
                branches.append((s + c.duration[i][m], s, i, m))
        branches.sort()

        for e, s, i, m in branches:
            if c.objective is ObjectiveKind.MAKESPAN:
                child = max(partial, e)
            else:
                child = partial + self._contribution(i, s, e)
            if child >= self.best_value:
                continue
            previous_ready = self.machine_ready.get(m)
            self.assignment[i], self.start[i], self.end[i] = m, s, e
            self.machine_ready[m] = e
            self.search(placed + 1, child, (s, i))
            self.assignment[i] = -1
            if previous_ready is None:
                del self.machine_ready[m]
            else:
                self.machine_ready[m] = previous_ready


def exact_solve(subproblem: Subproblem, cap: int = DEFAULT_CAP) -> Solution:
    """Provably optimal schedule for windows of at most `cap` operations."""
    if len(subproblem) > cap:
        raise OracleCapError(f"exact solver refuses {len(subproblem)} operations (cap {cap})")
    compiled = subproblem.compile()
    if compiled.n == 0:
        return Solution()
    search = _BranchAndBound(compiled, build_initial(subproblem))
    search.search(0, 0, (-1, -1))
    logger.debug("branch and bound: %d nodes, optimum %d", search.nodes, search.best_value)
    return compiled.to_solution(search.best_assignment, search.best_start)

