from __future__ import annotations

import logging
import time
from dataclasses import dataclass, field
from typing import Dict, List, Tuple

from .fjspInstance import Solution
from .seededStreams import Purpose, stream
from .subproblem import Budget, CompiledSubproblem, MoveCount, Subproblem

logger = logging.getLogger(__name__)

Sequences = Dict[int, List[int]]

REASSIGN = "reassign"
RELOCATE = "relocate"
SWAP = "swap"


@dataclass
class SolveStats:
    moves: int = 0
    accepted: int = 0
    improvements: int = 0
    initial_objective: int = 0
    best_objective: int = 0
    elapsed: float = 0.0
    stop_reason: str = ""
    # (move index, incumbent objective) after every strict improvement
    trajectory: List[Tuple[int, int]] = field(default_factory=list)


@dataclass
class _Candidate:
    assignment: List[int]
    sequences: Sequences
    start: List[int]
    key: Tuple[int, int]


def _dispatch(compiled: CompiledSubproblem) -> Tuple[List[int], Sequences]:
    """Greedy list scheduling: earliest completion first, ties by window position."""
    n = compiled.n
    assignment = [-1] * n
    end = [0] * n
    machine_ready = dict(compiled.machine_floor)
    sequences: Sequences = {}
    ready = {i for i in range(n) if compiled.job_pred[i] < 0}
    while ready:
        best = None
        for i in ready:
            job_ready = compiled.floor[i]
            pred = compiled.job_pred[i]
            if pred >= 0:
                job_ready = max(job_ready, end[pred])
            for m in compiled.options[i]:
                s = max(job_ready, machine_ready.get(m, 0))
                candidate = (s + compiled.duration[i][m], i, m)
                if best is None or candidate < best:
                    best = candidate
        completion, i, m = best
        assignment[i] = m
        end[i] = completion
        machine_ready[m] = completion
        sequences.setdefault(m, []).append(i)
        ready.remove(i)
        if compiled.job_succ[i] >= 0:
            ready.add(compiled.job_succ[i])
    return assignment, sequences


def _warm_sequences(compiled: CompiledSubproblem, warm: Solution) -> Tuple[List[int], Sequences]:
    """Machine orders taken from a previous solution, other operations appended greedily."""
    n = compiled.n
    assignment = [-1] * n
    est_start = [0] * n
    hinted = []
    for i, key in enumerate(compiled.keys):
        machine = warm.assignment.get(key)
        if machine is not None and machine in compiled.options[i] and key in warm.start:
            assignment[i] = machine
            est_start[i] = warm.start[key]
            hinted.append(i)

    sequences: Sequences = {}
    machine_ready = dict(compiled.machine_floor)
    for i in sorted(hinted, key=lambda i: (est_start[i], i)):
        m = assignment[i]
        sequences.setdefault(m, []).append(i)
        machine_ready[m] = max(machine_ready.get(m, 0), est_start[i] + compiled.duration[i][m])

    for i in range(n):
        if assignment[i] >= 0:
            continue
        job_ready = compiled.floor[i]
        pred = compiled.job_pred[i]
        if pred >= 0:
            job_ready = max(job_ready, est_start[pred] + compiled.duration[pred][assignment[pred]])
        best = None
        for m in compiled.options[i]:
            s = max(job_ready, machine_ready.get(m, 0))
            candidate = (s + compiled.duration[i][m], m, s)
            if best is None or candidate < best:
                best = candidate
        completion, m, s = best
        assignment[i] = m
        est_start[i] = s
        machine_ready[m] = completion
        sequences.setdefault(m, []).append(i)
    return assignment, sequences


def _initial(compiled: CompiledSubproblem) -> _Candidate:
    warm = compiled.subproblem.warm_start
    if warm is not None:
        assignment, sequences = _warm_sequences(compiled, warm)
        start = compiled.decode(assignment, sequences)
        if start is not None:
            return _Candidate(assignment, sequences, start, compiled.score(assignment, start))
        logger.debug("warm start orders are cyclic, falling back to dispatching")
    assignment, sequences = _dispatch(compiled)
    start = compiled.decode(assignment, sequences)
    return _Candidate(assignment, sequences, start, compiled.score(assignment, start))


def build_initial(subproblem: Subproblem) -> Solution:
    """Feasible starting schedule, seeded from `warm_start` when one is given."""
    compiled = subproblem.compile()
    if compiled.n == 0:
        return Solution()
    initial = _initial(compiled)
    return compiled.to_solution(initial.assignment, initial.start)


def _propose(compiled: CompiledSubproblem, rng, current: _Candidate, flexible: List[int]):
    long_machines = sorted(m for m, seq in current.sequences.items() if len(seq) >= 2)
    kinds = ([REASSIGN] if flexible else []) + ([RELOCATE, SWAP] if long_machines else [])
    if not kinds:
        return None
    kind = kinds[int(rng.integers(len(kinds)))]
    assignment = list(current.assignment)
    sequences = {m: list(seq) for m, seq in current.sequences.items()}

    if kind == REASSIGN:
        i = flexible[int(rng.integers(len(flexible)))]
        old = assignment[i]
        choices = [m for m in compiled.options[i] if m != old]
        new = choices[int(rng.integers(len(choices)))]
        sequences[old].remove(i)
        target = sequences.setdefault(new, [])
        if rng.random() < 0.5:
            position = int(rng.integers(len(target) + 1))
        else:
            position = sum(1 for j in target if (current.start[j], j) < (current.start[i], i))
        target.insert(position, i)
        assignment[i] = new
    else:
        seq = sequences[long_machines[int(rng.integers(len(long_machines)))]]
        if kind == RELOCATE:
            a = int(rng.integers(len(seq)))
            i = seq.pop(a)
            b = int(rng.integers(len(seq)))
            if b >= a:
                b += 1
            seq.insert(b, i)
        else:
            a = int(rng.integers(len(seq) - 1))
            seq[a], seq[a + 1] = seq[a + 1], seq[a]
    return assignment, sequences


def solve(subproblem: Subproblem, budget: Budget, seed: int) -> Tuple[Solution, SolveStats]:
    """
    Anytime local search over machine assignments and machine orders.

    The returned schedule is the best one visited; it is never worse than the
    initial one and is reproducible under a MoveCount budget.
    """
    started = time.perf_counter()
    compiled = subproblem.compile()
    stats = SolveStats()
    if compiled.n == 0:
        stats.stop_reason = "empty"
        return Solution(), stats

    rng = stream(seed, Purpose.SOLVE)
    current = _initial(compiled)
    best = current
    stats.initial_objective = stats.best_objective = best.key[0]
    flexible = [i for i in range(compiled.n) if len(compiled.options[i]) > 1]

    by_moves = isinstance(budget, MoveCount)
    restart_every = max(1, budget.stall_moves // 3) if by_moves else budget.stall_secs / 3.0
    stall = 0
    last_improvement = last_restart = started

    while True:
        now = time.perf_counter()
        if by_moves:
            if stats.moves >= budget.max_moves:
                stats.stop_reason = "budget"
                break
            if stall >= budget.stall_moves:
                stats.stop_reason = "stall"
                break
        else:
            if now - started >= budget.limit_secs:
                stats.stop_reason = "budget"
                break
            if now - last_improvement >= budget.stall_secs:
                stats.stop_reason = "stall"
                break

        proposal = _propose(compiled, rng, current, flexible)
        if proposal is None:
            stats.stop_reason = "no-moves"
            break
        stats.moves += 1
        stall += 1
        assignment, sequences = proposal
        start = compiled.decode(assignment, sequences)
        if start is not None:
            key = compiled.score(assignment, start)
            if key <= current.key:
                current = _Candidate(assignment, sequences, start, key)
                stats.accepted += 1
            if key < best.key:
                if key[0] < best.key[0]:
                    stall = 0
                    last_improvement = time.perf_counter()
                    stats.improvements += 1
                    stats.trajectory.append((stats.moves, key[0]))
                best = current

        if by_moves:
            if stall and stall % restart_every == 0:
                current = best
        elif time.perf_counter() - max(last_improvement, last_restart) >= restart_every:
            current = best
            last_restart = time.perf_counter()

    stats.best_objective = best.key[0]
    stats.elapsed = time.perf_counter() - started
    logger.debug(
        "local search stopped (%s) after %d moves: %d -> %d",
        stats.stop_reason,
        stats.moves,
        stats.initial_objective,
        stats.best_objective,
    )
    return compiled.to_solution(best.assignment, best.start), stats
