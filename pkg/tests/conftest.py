import pytest

from rehorizon import (
    FjspInstance,
    MoveCount,
    ObjectiveKind,
    Operation,
    RhoParams,
    gen_delay_instance,
    gen_makespan_instance,
)


def pytest_addoption(parser):
    parser.addoption("--runslow", action="store_true", default=False, help="run slow acceptance reproductions")


def pytest_configure(config):
    config.addinivalue_line("markers", "slow: long-running acceptance reproduction (needs --runslow)")


def pytest_collection_modifyitems(config, items):
    if config.getoption("--runslow"):
        return
    skip_slow = pytest.mark.skip(reason="needs --runslow")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip_slow)


def make_instance(jobs, num_machines=2, objective=ObjectiveKind.MAKESPAN, releases=None, targets=None, seed=None):
    """jobs: per job a list of {machine: duration}; releases/targets mirror that nesting."""
    built = []
    for j, ops in enumerate(jobs):
        built.append(
            tuple(
                Operation(
                    j,
                    k,
                    dict(durations),
                    None if releases is None else releases[j][k - 1],
                    None if targets is None else targets[j][k - 1],
                )
                for k, durations in enumerate(ops, start=1)
            )
        )
    return FjspInstance(num_machines, tuple(built), objective, seed)


@pytest.fixture
def build_instance():
    return make_instance


@pytest.fixture
def t1():
    """Two machines, two jobs of two operations."""
    return make_instance(
        [
            [{0: 3, 1: 5}, {0: 4, 1: 2}],
            [{0: 2, 1: 6}, {1: 3}],
        ]
    )


@pytest.fixture
def small_makespan():
    return gen_makespan_instance(3, 3, 4, 5)


@pytest.fixture
def small_delay():
    return gen_delay_instance(3, 3, 4, 5)


@pytest.fixture
def small_start_end():
    return gen_delay_instance(5, 3, 4, 5, ObjectiveKind.START_PLUS_END_DELAY)


@pytest.fixture
def fast_budget():
    return MoveCount(300, 100)


@pytest.fixture
def small_params(fast_budget):
    return RhoParams(8, 4, fast_budget)
