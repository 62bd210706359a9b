import itertools

import numpy as np
import pytest

from rehorizon import (
    Boundary,
    ConfigurationError,
    InfeasibleOrderError,
    MoveCount,
    ObjectiveKind,
    OracleCapError,
    Solution,
    Subproblem,
    WallClock,
    check_feasibility,
    exact_solve,
    parse_budget,
    rho_order,
    schedule_from_order,
    solve,
)
from rehorizon.localSearch import build_initial


def brute_force(subproblem):
    """Optimum over every assignment and every machine order."""
    keys = list(subproblem.plan_ops)
    options = [subproblem.allowed_machines(k) for k in keys]
    best = None
    for machines in itertools.product(*options):
        assignment = dict(zip(keys, machines))
        groups = {}
        for key, machine in assignment.items():
            groups.setdefault(machine, []).append(key)
        per_machine = [list(itertools.permutations(ops)) for ops in groups.values()]
        for orders in itertools.product(*per_machine):
            try:
                solution = schedule_from_order(subproblem, assignment, dict(zip(groups, orders)))
            except InfeasibleOrderError:
                continue
            value = subproblem.evaluate(solution)
            best = value if best is None else min(best, value)
    return best


def assert_feasible(subproblem, solution):
    violations = check_feasibility(
        subproblem.instance,
        solution,
        subproblem.boundary,
        durations=subproblem.durations,
        scope=subproblem.plan_ops,
        unavailable=subproblem.unavailable_machines,
    )
    assert violations == []
    for key, machine in subproblem.fixed_assignment.items():
        assert solution.assignment[key] == machine


def test_parse_budget():
    assert parse_budget("moves:500,100") == MoveCount(500, 100)
    assert parse_budget("moves:40") == MoveCount(40, 40)
    assert parse_budget("wall:15,2") == WallClock(15.0, 2.0)
    assert str(parse_budget("wall:60,3")) == "wall:60,3"
    for text in ("seconds:4", "moves:", "moves:5,9", "wall:0,0"):
        with pytest.raises(ConfigurationError):
            parse_budget(text)


def test_schedule_from_order_is_semi_active(t1):
    sub = Subproblem.build(t1, rho_order(t1))
    assignment = {(0, 1): 0, (0, 2): 1, (1, 1): 0, (1, 2): 1}
    solution = schedule_from_order(sub, assignment, {0: [(1, 1), (0, 1)], 1: [(1, 2), (0, 2)]})
    assert solution.start == {(1, 1): 0, (0, 1): 2, (1, 2): 2, (0, 2): 5}
    assert sub.evaluate(solution) == 7


def test_schedule_from_order_detects_cycles(build_instance):
    instance = build_instance([[{0: 1}, {1: 1}], [{1: 1}, {0: 1}]])
    sub = Subproblem.build(instance, rho_order(instance))
    assignment = {(0, 1): 0, (0, 2): 1, (1, 1): 1, (1, 2): 0}
    with pytest.raises(InfeasibleOrderError):
        schedule_from_order(sub, assignment, {0: [(1, 2), (0, 1)], 1: [(0, 2), (1, 1)]})


def test_schedule_from_order_checks_coverage(t1):
    sub = Subproblem.build(t1, rho_order(t1))
    with pytest.raises(ConfigurationError):
        schedule_from_order(sub, {(0, 1): 0}, {0: [(0, 1)]})


def test_schedule_from_order_rejects_assignments_outside_the_window(t1):
    sub = Subproblem.build(t1, [(1, 1), (0, 1)])
    assignment = {(1, 1): 0, (0, 1): 0, (0, 2): 1}
    with pytest.raises(ConfigurationError, match="not in the window"):
        schedule_from_order(sub, assignment, {0: [(1, 1), (0, 1)]})


def test_subproblem_rejects_bad_fixes(t1):
    order = rho_order(t1)
    with pytest.raises(ConfigurationError):
        Subproblem.build(t1, order, fixed_assignment={(1, 2): 0})
    with pytest.raises(ConfigurationError):
        Subproblem.build(t1, order[:2], fixed_assignment={order[3]: 1})
    with pytest.raises(ConfigurationError):
        Subproblem.build(t1, order, unavailable_machines={1})


def test_build_drops_fixes_on_down_machines(t1):
    sub = Subproblem.build(t1, [(0, 1)], fixed_assignment={(0, 1): 1}, unavailable_machines={1})
    assert dict(sub.fixed_assignment) == {}
    assert sub.allowed_machines((0, 1)) == (0,)


def test_zero_moves_returns_initial(small_makespan):
    sub = Subproblem.build(small_makespan, rho_order(small_makespan)[:8])
    solution, stats = solve(sub, MoveCount(0, 0), seed=1)
    assert solution == build_initial(sub)
    assert stats.moves == 0
    assert stats.best_objective == stats.initial_objective


def test_local_search_is_feasible_and_monotone(small_makespan, small_delay, small_start_end):
    for instance in (small_makespan, small_delay, small_start_end):
        order = rho_order(instance)
        fixed = {order[0]: min(instance.op(order[0]).compatible)}
        boundary = Boundary({0: 20}, {1: 15})
        sub = Subproblem.build(instance, order[:10], boundary, fixed_assignment=fixed)
        solution, stats = solve(sub, MoveCount(400, 150), seed=3)
        assert_feasible(sub, solution)
        assert sub.evaluate(solution) == stats.best_objective <= stats.initial_objective
        assert sub.evaluate(solution) <= sub.evaluate(build_initial(sub))


def test_local_search_is_reproducible(small_makespan):
    sub = Subproblem.build(small_makespan, rho_order(small_makespan)[:10])
    first, _ = solve(sub, MoveCount(300, 100), seed=9)
    second, _ = solve(sub, MoveCount(300, 100), seed=9)
    assert first == second


def test_warm_start_is_never_beaten_by_initial(small_makespan):
    order = rho_order(small_makespan)[:10]
    plain = Subproblem.build(small_makespan, order)
    good, _ = solve(plain, MoveCount(500, 200), seed=2)
    warm = Subproblem.build(small_makespan, order, warm_start=good)
    assert warm.evaluate(build_initial(warm)) == plain.evaluate(good)


def test_wall_clock_budget_terminates(small_delay):
    sub = Subproblem.build(small_delay, rho_order(small_delay)[:6])
    solution, stats = solve(sub, WallClock(0.05, 0.05), seed=0)
    assert_feasible(sub, solution)
    assert stats.stop_reason in {"budget", "stall", "no-moves"}


def test_empty_window():
    from rehorizon import FjspInstance

    sub = Subproblem.build(FjspInstance(1, ()), [])
    solution, stats = solve(sub, MoveCount(10, 10), seed=0)
    assert len(solution) == 0
    assert stats.stop_reason == "empty"
    assert len(exact_solve(sub)) == 0


@pytest.mark.parametrize(
    "objective",
    [ObjectiveKind.MAKESPAN, ObjectiveKind.TOTAL_START_DELAY, ObjectiveKind.START_PLUS_END_DELAY],
)
def test_exact_matches_brute_force(build_instance, objective):
    instance = build_instance(
        [
            [{0: 3, 1: 5}, {0: 4, 1: 2}],
            [{0: 2, 1: 6}, {1: 3}],
            [{0: 4}, {0: 1, 1: 2}],
        ],
        objective=objective,
        releases=[[0, 2], [1, 4], [0, 3]],
        targets=[[4, 8], [3, 9], [5, 6]],
    )
    sub = Subproblem.build(instance, rho_order(instance), Boundary({}, {0: 1}))
    solution = exact_solve(sub)
    assert_feasible(sub, solution)
    assert sub.evaluate(solution) == brute_force(sub)
    searched, _ = solve(sub, MoveCount(300, 100), seed=0)
    assert sub.evaluate(solution) <= sub.evaluate(searched)


def test_exact_respects_boundaries_and_fixes(t1):
    boundary = Boundary({1: 4}, {0: 2})
    sub = Subproblem.build(t1, rho_order(t1), boundary, fixed_assignment={(0, 1): 1})
    solution = exact_solve(sub)
    assert_feasible(sub, solution)
    assert sub.evaluate(solution) == brute_force(sub)


def test_exact_cap(small_makespan):
    sub = Subproblem.build(small_makespan, rho_order(small_makespan)[:11])
    with pytest.raises(OracleCapError):
        exact_solve(sub)
    with pytest.raises(OracleCapError):
        exact_solve(Subproblem.build(small_makespan, rho_order(small_makespan)[:4]), cap=3)


def random_window(build_instance, seed, num_ops, max_duration=9, release_step=4):
    """Whole small instance as one window; the objective cycles with the seed."""
    rng = np.random.default_rng(seed)
    machines = int(rng.integers(2, 4))
    jobs, releases, targets = [], [], []
    while num_ops:
        length = int(rng.integers(1, min(3, num_ops) + 1))
        ops, job_releases, job_targets = [], [], []
        release = 0
        for _ in range(length):
            chosen = rng.choice(machines, size=int(rng.integers(1, machines + 1)), replace=False)
            ops.append({int(m): int(rng.integers(1, max_duration + 1)) for m in chosen})
            release += int(rng.integers(0, release_step))
            job_releases.append(release)
            job_targets.append(release + int(rng.integers(0, 10)))
        jobs.append(ops)
        releases.append(job_releases)
        targets.append(job_targets)
        num_ops -= length
    objective = list(ObjectiveKind)[seed % len(ObjectiveKind)]
    return build_instance(jobs, machines, objective, releases, targets)


def time_indexed_optimum(subproblem, horizon):
    """Optimum over every assignment and every vector of integer start times in [0, horizon]."""
    keys = list(subproblem.plan_ops)
    best = None
    for machines in itertools.product(*[subproblem.allowed_machines(k) for k in keys]):
        assignment = dict(zip(keys, machines))
        for starts in itertools.product(range(horizon + 1), repeat=len(keys)):
            solution = Solution(assignment, dict(zip(keys, starts)))
            violations = check_feasibility(
                subproblem.instance,
                solution,
                subproblem.boundary,
                durations=subproblem.durations,
                scope=subproblem.plan_ops,
            )
            if not violations:
                value = subproblem.evaluate(solution)
                best = value if best is None else min(best, value)
    return best


@pytest.mark.slow
@pytest.mark.parametrize("seed", range(6))
def test_semi_active_schedules_match_integer_start_enumeration(build_instance, seed):
    instance = random_window(build_instance, seed, 3, max_duration=3, release_step=2)
    boundary = Boundary({}, {0: 2})
    sub = Subproblem.build(instance, rho_order(instance), boundary)
    latest_release = max(op.release_time for op in instance.operations())
    horizon = 2 + latest_release + sum(max(op.compatible.values()) for op in instance.operations())
    optimum = time_indexed_optimum(sub, horizon)
    assert brute_force(sub) == optimum
    assert sub.evaluate(exact_solve(sub)) == optimum


@pytest.mark.slow
def test_fixing_assignments_never_improves_the_optimum(build_instance):
    rng = np.random.default_rng(7)
    for seed in range(20):
        instance = random_window(build_instance, seed, 6)
        order = rho_order(instance)
        free = Subproblem.build(instance, order)
        best = exact_solve(free)
        optimum = free.evaluate(best)
        chosen = rng.choice(len(order), size=int(rng.integers(1, len(order) + 1)), replace=False)
        fixed = {order[i]: int(rng.choice(sorted(instance.op(order[i]).compatible))) for i in chosen}
        restricted = Subproblem.build(instance, order, fixed_assignment=fixed)
        solution = exact_solve(restricted)
        assert_feasible(restricted, solution)
        assert restricted.evaluate(solution) >= optimum
        pinned = Subproblem.build(instance, order, fixed_assignment=dict(best.assignment))
        assert pinned.evaluate(exact_solve(pinned)) == optimum


@pytest.mark.slow
def test_local_search_reaches_the_exact_optimum_on_small_windows(build_instance):
    matched = 0
    for seed in range(20):
        instance = random_window(build_instance, seed, 5 + seed % 4)
        sub = Subproblem.build(instance, rho_order(instance))
        optimum = sub.evaluate(exact_solve(sub))
        # best of three seeded runs
        runs = [solve(sub, MoveCount(20000, 3000), seed=10 * seed + r)[0] for r in range(3)]
        for solution in runs:
            assert_feasible(sub, solution)
        value = min(sub.evaluate(solution) for solution in runs)
        assert optimum <= value <= optimum * 1.1
        matched += value == optimum
    assert matched >= 18
