import pytest

from rehorizon import (
    Boundary,
    ConfigurationError,
    IncompleteSolutionError,
    ObjectiveKind,
    Operation,
    RunReport,
    Solution,
    UndefinedMetricError,
    ViolationKind,
    check_feasibility,
    evaluate_objective,
    improvement_metrics,
    rho_order,
)
from rehorizon.fjspInstance import FjspInstance


def kinds(violations):
    return [v.kind for v in violations]


def test_single_operation_makespan(build_instance):
    instance = build_instance([[{0: 5}]], num_machines=1)
    assert evaluate_objective(instance, Solution({(0, 1): 0}, {(0, 1): 0})) == 5


def test_chain_makespan(build_instance):
    instance = build_instance([[{0: 3}, {0: 4}]], num_machines=1)
    solution = Solution({(0, 1): 0, (0, 2): 0}, {(0, 1): 0, (0, 2): 3})
    assert evaluate_objective(instance, solution) == 7


def test_delay_objectives(build_instance):
    jobs = [[{0: 3}, {0: 4}]]
    releases = [[0, 2]]
    targets = [[3, 6]]
    solution = Solution({(0, 1): 0, (0, 2): 0}, {(0, 1): 1, (0, 2): 4})
    start_delay = build_instance(jobs, 1, ObjectiveKind.TOTAL_START_DELAY, releases, targets)
    assert evaluate_objective(start_delay, solution) == 1 + 2
    start_end = start_delay.with_objective(ObjectiveKind.START_PLUS_END_DELAY)
    # ends at 4 and 8 against targets 3 and 6
    assert evaluate_objective(start_end, solution) == 3 + 1 + 2


def test_missing_start_is_incomplete(t1):
    with pytest.raises(IncompleteSolutionError):
        evaluate_objective(t1, Solution({(0, 1): 0}, {(0, 1): 0}))


def test_delay_objective_needs_releases(t1):
    solution = Solution({k: min(t1.op(k).compatible) for k in t1.keys()}, {k: 0 for k in t1.keys()})
    with pytest.raises(ConfigurationError):
        evaluate_objective(t1, solution, objective=ObjectiveKind.TOTAL_START_DELAY)


def two_ops_on_machine(build_instance, second_start, releases=None):
    instance = build_instance([[{0: 3}], [{0: 4}]], 1, releases=releases)
    return instance, Solution({(0, 1): 0, (1, 1): 0}, {(0, 1): 0, (1, 1): second_start})


def test_touching_intervals_are_feasible(build_instance):
    instance, solution = two_ops_on_machine(build_instance, 3)
    assert check_feasibility(instance, solution) == []


def test_overlap_is_reported(build_instance):
    instance, solution = two_ops_on_machine(build_instance, 2)
    assert kinds(check_feasibility(instance, solution)) == [ViolationKind.MACHINE_OVERLAP]


def test_release_violation(build_instance):
    instance = build_instance([[{0: 2}]], 1, ObjectiveKind.TOTAL_START_DELAY, releases=[[10]])
    solution = Solution({(0, 1): 0}, {(0, 1): 8})
    assert kinds(check_feasibility(instance, solution)) == [ViolationKind.RELEASE]


def test_precedence_and_machine_violations(t1):
    solution = Solution(
        {(0, 1): 0, (0, 2): 0, (1, 1): 1, (1, 2): 0},
        {(0, 1): 0, (0, 2): 1, (1, 1): 0, (1, 2): 20},
    )
    found = kinds(check_feasibility(t1, solution))
    assert ViolationKind.PRECEDENCE in found
    assert ViolationKind.INCOMPATIBLE_MACHINE in found


def test_boundary_violations(build_instance):
    instance = build_instance([[{0: 2}]], 1)
    solution = Solution({(0, 1): 0}, {(0, 1): 4})
    assert check_feasibility(instance, solution, Boundary({0: 4}, {0: 4})) == []
    found = kinds(check_feasibility(instance, solution, Boundary({0: 5}, {0: 6})))
    assert found == [ViolationKind.JOB_BOUNDARY, ViolationKind.MACHINE_BOUNDARY]


def test_unavailable_machine(build_instance):
    instance = build_instance([[{0: 2, 1: 3}]])
    solution = Solution({(0, 1): 1}, {(0, 1): 0})
    assert kinds(check_feasibility(instance, solution, unavailable={1})) == [ViolationKind.UNAVAILABLE_MACHINE]


def test_unassigned_operation(t1):
    assert ViolationKind.UNASSIGNED in kinds(check_feasibility(t1, Solution()))


def test_makespan_order_ties_by_job(build_instance):
    instance = build_instance([[{0: 1}] * 2, [{0: 1}] * 4], 1)
    assert rho_order(instance) == [(1, 1), (0, 1), (1, 2), (1, 3), (0, 2), (1, 4)]


def test_delay_order_by_release(build_instance):
    instance = build_instance(
        [[{0: 1}, {0: 1}], [{0: 1}, {0: 1}]], 1, ObjectiveKind.TOTAL_START_DELAY, releases=[[0, 5], [2, 3]]
    )
    assert rho_order(instance) == [(0, 1), (1, 1), (1, 2), (0, 2)]


def test_single_job_order(build_instance):
    instance = build_instance([[{0: 1}] * 3], 1)
    assert rho_order(instance) == [(0, 1), (0, 2), (0, 3)]


def test_delay_order_needs_releases(t1):
    with pytest.raises(ConfigurationError):
        rho_order(t1, ObjectiveKind.TOTAL_START_DELAY)


def test_order_is_a_permutation(small_makespan, small_delay):
    for instance in (small_makespan, small_delay):
        order = rho_order(instance)
        assert sorted(order) == sorted(instance.keys())
        assert order == rho_order(instance)


def test_improvement_metrics():
    base = RunReport("default", 200, 100.0)
    oi, ti = improvement_metrics(base, RunReport("first:0.5", 160, 47.0))
    assert oi == pytest.approx(20.0)
    assert ti == pytest.approx(53.0)
    assert improvement_metrics(base, base) == (0.0, 0.0)
    oi, _ = improvement_metrics(RunReport("default", 100, 1.0), RunReport("x", 121, 1.0))
    assert oi == pytest.approx(-21.0)


@pytest.mark.parametrize("objective, effort", [(0, 1.0), (10, 0.0)])
def test_improvement_undefined_for_zero_base(objective, effort):
    with pytest.raises(UndefinedMetricError):
        improvement_metrics(RunReport("default", objective, effort), RunReport("x", 1, 1.0))


def test_improvement_rejects_mixed_units():
    with pytest.raises(UndefinedMetricError):
        improvement_metrics(RunReport("a", 10, 5.0, "moves"), RunReport("b", 10, 5.0, "seconds"))


def test_operation_validation():
    with pytest.raises(ConfigurationError):
        Operation(0, 1, {})
    with pytest.raises(ConfigurationError):
        Operation(0, 1, {0: 0})


def test_instance_validation():
    with pytest.raises(ConfigurationError):
        FjspInstance(1, ((Operation(0, 1, {3: 2}),),))
    with pytest.raises(ConfigurationError):
        FjspInstance(1, ((Operation(0, 1, {0: 2}, 5), Operation(0, 2, {0: 2}, 3)),))
