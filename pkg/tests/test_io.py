import math

import numpy as np
import pytest

from rehorizon import ConfigurationError, ExperimentConfig, MoveCount, RhoParams, ShapeError, Solution, WallClock
from rehorizon.features import FeatureVariant, StateRecord
from rehorizon.fileFormats import (
    read_dataset,
    read_instance,
    read_solution,
    read_table,
    write_dataset,
    write_instance,
    write_solution,
    write_table,
)
from rehorizon.sweep import SweepPoint, default_grid, line_search_select, objective_bucket, select_per_method


def record(instance_id=0):
    d_o, d_m = FeatureVariant.START_DELAY.dims
    mask = np.array([True, True, False])
    return StateRecord(
        FeatureVariant.START_DELAY,
        np.arange(3 * d_o, dtype=float).reshape(3, d_o),
        np.ones((2, d_m)),
        mask,
        np.array([1, 0, -1]),
        np.array([1, 0, -1]),
        ((0, 2), (1, 1), (1, 2)),
        instance_id,
        3,
    )


def test_instance_file_round_trip(tmp_path, small_start_end):
    path = write_instance(tmp_path / "nested" / "inst.yaml", small_start_end)
    assert read_instance(path) == small_start_end


def test_wrong_file_kind_is_rejected(tmp_path):
    path = write_solution(tmp_path / "sol.yaml", Solution())
    with pytest.raises(ConfigurationError):
        read_instance(path)


def test_solution_file(tmp_path):
    solution = Solution({(1, 1): 0, (0, 1): 1}, {(1, 1): 4, (0, 1): 0})
    path = write_solution(tmp_path / "sol.yaml", solution, 9)
    assert read_solution(path) == (solution, 9)


def test_dataset_file(tmp_path):
    records = [record(0), record(1)]
    path = write_dataset(tmp_path / "data.jsonl", records)
    loaded = read_dataset(path)
    assert len(loaded) == 2
    for a, b in zip(records, loaded):
        assert np.array_equal(a.op_features, b.op_features)
        assert np.array_equal(a.labels, b.labels)
        assert a.plan_ops == b.plan_ops
        assert (a.instance_id, a.iteration) == (b.instance_id, b.iteration)
    with pytest.raises(ShapeError):
        read_dataset(path, FeatureVariant.MAKESPAN)
    empty = write_dataset(tmp_path / "empty.jsonl", [], FeatureVariant.MAKESPAN)
    assert read_dataset(empty) == []


def test_table_append_writes_one_header(tmp_path):
    path = tmp_path / "report.csv"
    write_table(path, [{"a": 1, "b": 2}], append=True)
    write_table(path, [{"a": 3, "b": 4}], append=True)
    assert read_table(path).to_dict("records") == [{"a": 1, "b": 2}, {"a": 3, "b": 4}]


def test_config_defaults_and_overrides():
    config = ExperimentConfig()
    assert config.rho_params() == RhoParams(80, 30, WallClock(60.0, 3.0))
    assert config.breakdown_intensity() is None
    assert config.noise_model() is None
    changed = config.with_overrides(H=40, S=None, budget="moves:20,5", breakdown="mid", noise=True)
    assert changed.rho_params() == RhoParams(40, 30, MoveCount(20, 5))
    assert changed.S == 30
    assert changed.breakdown_intensity().p_b == 0.35
    assert changed.noise_model().epsilon == 0.2


def test_config_from_yaml(tmp_path):
    path = tmp_path / "exp.yaml"
    path.write_text(
        "family: start_end_delay\n"
        "num_machines: 3\n"
        "seed_range: [2, 5]\n"
        "H: 20\n"
        "S: 10\n"
        "budget: moves:100,20\n"
        "strategies: [default, 'first:0.5']\n"
        "train: {steps: 10, w_pos: 0.8}\n"
        "grid: [[20, 10, 'moves:50,10']]\n",
        encoding="utf-8",
    )
    config = ExperimentConfig.from_yaml(path)
    assert config.seeds == (2, 3, 4)
    assert config.strategies == ("default", "first:0.5")
    assert config.rho_params() == RhoParams(20, 10, MoveCount(100, 20))
    assert config.grid == ((20, 10, "moves:50,10"),)
    train = config.train_config()
    assert (train.steps, train.w_pos, train.seed) == (10, 0.8, 0)
    assert config.instance_path(3).name == "start_end_delay_3x20x30_s3.yaml"


@pytest.mark.parametrize(
    "data",
    [{"family": "flowshop"}, {"colour": 1}, {"Q": 0}, {"H": 5, "S": 9}, {"train": {"epochs": 3}}, {"breakdown": "huge"}],
)
def test_config_rejects(data):
    with pytest.raises(ConfigurationError):
        ExperimentConfig.from_dict(data)


def test_default_grid():
    grid = default_grid()
    assert len(grid) == 39
    assert (80, 30, "wall:60,3") in grid
    assert all(s <= h for h, s, _ in grid)


def test_objective_buckets():
    assert objective_bucket(100, 100) == 0
    assert objective_bucket(109.9, 100) == 0
    assert objective_bucket(110, 100) == 1
    assert objective_bucket(1e9, 100, math.inf) == 0


def point(method, H, objective, effort, budget="wall:60,3"):
    return SweepPoint(method, H, 10, budget, objective, effort)


def test_line_search_prefers_lowest_bucket_then_speed():
    points = [point("a", 50, 100.0, 9.0), point("a", 80, 105.0, 3.0), point("a", 100, 130.0, 1.0)]
    assert line_search_select(points, 100.0).H == 80
    assert line_search_select(points, 100.0, step=math.inf).H == 100
    tied = [point("a", 80, 100.0, 3.0), point("a", 50, 100.0, 3.0)]
    assert line_search_select(tied, 100.0).H == 50
    with pytest.raises(ConfigurationError):
        line_search_select([], 100.0)


def test_select_per_method_uses_shared_reference():
    points = [
        point("default", 50, 100.0, 10.0),
        point("first:0.5", 50, 115.0, 2.0),
        point("first:0.5", 80, 108.0, 4.0),
    ]
    best = select_per_method(points)
    assert best["default"].H == 50
    assert best["first:0.5"].H == 80
