import logging
import sys
import uuid

import pytest

if sys.platform != "win32":
    pytest.importorskip("posix_ipc")

from rehorizon import (
    ConfigurationError,
    CounterTypes,
    Default,
    MoveCount,
    NamedLock,
    RhoParams,
    SharedCounter,
    SharedProgress,
    gen_makespan_instance,
    run_pool,
    run_rho,
)
from rehorizon.workerPool import WORKERS_ENV, default_workers, report_window


def unique(prefix):
    return f"{prefix}{uuid.uuid4().hex[:8]}"


def square(x):
    return x * x


def fail_on_three(x):
    if x == 3:
        raise ValueError("three")
    return x


def three_windows(x):
    for _ in range(3):
        report_window(2)
    return x


def rho_iterations(seed):
    instance = gen_makespan_instance(seed, 2, 3, 3)
    return run_rho(instance, RhoParams(4, 2, MoveCount(40, 20)), Default(), seed=seed).report.iterations


def test_named_lock_shares_a_name():
    name = unique("lk")
    first = NamedLock(name)
    second = NamedLock(name)
    try:
        with first as held:
            assert held is first
            assert held.name.endswith(name)
        with second:
            pass
    finally:
        first.close()
        second.close()
        first.unlink()


@pytest.mark.skipif(sys.platform == "win32", reason="a mutex is reentrant for its owning thread")
def test_named_lock_times_out_while_held():
    name = unique("lt")
    first = NamedLock(name)
    second = NamedLock(name)
    try:
        assert first.acquire(timeout=0)
        assert not second.acquire(timeout=0)
        first.release()
        assert second.acquire(timeout=0)
        second.release()
    finally:
        first.close()
        second.close()
        first.unlink()


def test_counter_slots_are_shared_between_handles():
    name = unique("ct")
    owner = SharedCounter(name, ("windows", "operations"))
    other = SharedCounter(name, ("windows", "operations"))
    try:
        assert owner.owner
        assert not other.owner
        assert owner.read() == {"windows": 0, "operations": 0}
        assert owner.add(windows=1, operations=4) == {"windows": 1, "operations": 4}
        assert other["operations"] == 4
        other.add(operations=3)
        assert owner.read() == {"windows": 1, "operations": 7}
        owner.reset()
        assert other["windows"] == 0
        with pytest.raises(KeyError):
            owner.add(moves=1)
    finally:
        other.close()
        owner.close()
        owner.unlink()


def test_counter_types_and_slot_names():
    name = unique("c32")
    counter = SharedCounter(name, kind=CounterTypes.INT32)
    try:
        assert counter.slots == ("value",)
        assert counter.add(value=-5) == {"value": -5}
        assert counter.add(value=2)["value"] == -3
    finally:
        counter.close()
        counter.unlink()
    with pytest.raises(ValueError):
        SharedCounter(unique("dup"), ("a", "a"))


def test_progress_counts_windows_and_operations():
    progress = SharedProgress(unique("pg"))
    try:
        progress.add_window(3)
        progress.add_window(0)
        assert progress.snapshot() == (2, 3)
        assert "2 windows" in repr(progress)
    finally:
        progress.close()
        progress.unlink()


def test_report_window_outside_a_pool_is_a_no_op():
    report_window(5)
    assert run_pool(three_windows, [1, 2], workers=1) == [1, 2]


def test_run_pool_inline_keeps_order():
    assert run_pool(square, [3, 1, 2], workers=1) == [9, 1, 4]
    assert run_pool(square, [], workers=4) == []


def test_run_pool_processes_keep_order():
    assert run_pool(square, list(range(8)), workers=2) == [x * x for x in range(8)]


def test_run_pool_logs_windows_reported_by_workers(caplog):
    with caplog.at_level(logging.INFO, logger="rehorizon.workerPool"):
        assert run_pool(three_windows, [1, 2, 3, 4], workers=2, poll_seconds=0.5) == [1, 2, 3, 4]
    last = [r.getMessage() for r in caplog.records if r.name == "rehorizon.workerPool"][-1]
    assert last.startswith("4/4 tasks finished (0 failed)")
    assert "12 windows solved, 24 operations committed" in last


def test_run_pool_counts_windows_of_rho_runs(caplog):
    seeds = [0, 1, 2]
    with caplog.at_level(logging.INFO, logger="rehorizon.workerPool"):
        iterations = run_pool(rho_iterations, seeds, workers=2)
    last = [r.getMessage() for r in caplog.records if r.name == "rehorizon.workerPool"][-1]
    # every operation of every instance is committed exactly once
    assert f"{sum(iterations)} windows solved, {3 * 9} operations committed" in last


def test_run_pool_propagates_errors():
    with pytest.raises(ValueError):
        run_pool(fail_on_three, [1, 2, 3, 4], workers=2)


def test_default_workers(monkeypatch):
    monkeypatch.delenv(WORKERS_ENV, raising=False)
    assert default_workers() == 1
    monkeypatch.setenv(WORKERS_ENV, "3")
    assert default_workers() == 3
    monkeypatch.setenv(WORKERS_ENV, "0")
    assert default_workers() == 1
    monkeypatch.setenv(WORKERS_ENV, "many")
    with pytest.raises(ConfigurationError):
        default_workers()
