import numpy as np
import pytest

from rehorizon import (
    ConfigurationError,
    ErrorPair,
    FirstMethod,
    InsufficientDataError,
    LinearDecay,
    LRhoMethod,
    RandomMethod,
    StateRecord,
    UndefinedMetricError,
    classifier_metrics,
    closed_form_errors,
    confusion,
    empirical_pfix,
    first_random_rates,
    fit_linear_decay,
    monte_carlo_errors,
)
from rehorizon.features import FeatureVariant

DECAY = LinearDecay(0.7, 0.4, 10)


def test_expected_fix_count():
    assert DECAY.expected_fix == pytest.approx(4.8)
    assert DECAY.pfix().sum() == pytest.approx(4.8)


def test_decay_validation():
    with pytest.raises(ConfigurationError):
        LinearDecay(0.3, 0.5, 10)
    with pytest.raises(ConfigurationError):
        LinearDecay(1.2, 0.1, 10)
    with pytest.raises(ConfigurationError):
        LinearDecay(0.5, 0.1, 0)


@pytest.mark.parametrize(
    "method, fp, fn",
    [
        (RandomMethod(0.5), 2.6, 2.4),
        (FirstMethod(0.5), 2.1, 1.9),
        (LRhoMethod(0.1, 0.2), 0.52, 0.96),
    ],
)
def test_closed_forms(method, fp, fn):
    errors = closed_form_errors(method, DECAY)
    assert errors.expected_fp == pytest.approx(fp)
    assert errors.expected_fn == pytest.approx(fn)
    assert errors.fpr == pytest.approx(fp / 5.2)
    assert errors.fnr == pytest.approx(fn / 4.8)


def test_closed_form_endpoints():
    none = closed_form_errors(FirstMethod(0.0), DECAY)
    assert (none.expected_fp, none.expected_fn) == (0.0, pytest.approx(4.8))
    everything = closed_form_errors(RandomMethod(1.0), DECAY)
    assert everything.expected_fp == pytest.approx(5.2)
    assert everything.expected_fn == pytest.approx(0.0)


def test_approximate_forms_drop_tail():
    errors = closed_form_errors(RandomMethod(0.5), DECAY, approximate=True)
    assert errors.expected_fp == pytest.approx(0.5 * 5.0)
    assert errors.expected_fn == pytest.approx(0.5 * 5.0)


def test_rates_undefined_without_positives():
    errors = closed_form_errors(RandomMethod(0.5), LinearDecay(0.05, 0.0, 1))
    assert errors.fpr is not None
    assert ErrorPair.from_errors(0.0, 0.0, 4, 0.0).fnr is None
    assert ErrorPair.from_rates(0.1, 0.2, 10, 4.8).expected_fp == pytest.approx(0.52)


def test_methods_are_validated():
    with pytest.raises(ConfigurationError):
        closed_form_errors(RandomMethod(1.5), DECAY)
    with pytest.raises(ConfigurationError):
        closed_form_errors(LRhoMethod(0.1, -0.2), DECAY)


def test_first_random_rates():
    rates = first_random_rates(DECAY, 0.5)
    assert rates.random == (0.5, 0.5)
    assert rates.first == pytest.approx((0.4, 0.4))
    flat = first_random_rates(LinearDecay(0.6, 0.0, 10), 0.3)
    assert flat.first == pytest.approx(flat.random)
    with pytest.raises(UndefinedMetricError):
        first_random_rates(LinearDecay(1.0, 0.0, 10), 0.5)


@pytest.mark.parametrize("method", [RandomMethod(0.5), FirstMethod(0.5), FirstMethod(0.3), LRhoMethod(0.1, 0.2)])
def test_monte_carlo_agrees_with_closed_forms(method):
    exact = closed_form_errors(method, DECAY)
    estimate = monte_carlo_errors(method, DECAY.pfix(), 20_000, seed=1)
    assert estimate.trials == 20_000
    assert estimate.agrees(exact.expected_fp, exact.expected_fn, sigmas=4.0)


def test_monte_carlo_chunks_are_reproducible():
    a = monte_carlo_errors(RandomMethod(0.4), DECAY.pfix(), 5_000, seed=3, chunk=1_000)
    b = monte_carlo_errors(RandomMethod(0.4), DECAY.pfix(), 5_000, seed=3, chunk=1_000)
    assert a == b
    with pytest.raises(ConfigurationError):
        monte_carlo_errors(RandomMethod(0.4), DECAY.pfix(), 0)


def test_confusion_counts():
    result = confusion({1, 2}, {2, 3}, {1, 2, 3, 4})
    assert result[:4] == (1, 1, 1, 1)
    assert result.accuracy == 0.5
    assert result.alpha == 0.5
    assert result.beta == 0.5
    empty = confusion(set(), set(), {1, 2})
    assert empty.precision is None
    assert empty.beta is None
    assert empty.alpha == 0.0
    with pytest.raises(ConfigurationError):
        confusion({9}, set(), {1})


def test_classifier_metrics():
    metrics = classifier_metrics([0.9, 0.2, 0.6, 0.1], [1, 1, 0, 0])
    assert metrics.accuracy == 0.5
    assert metrics.tpr == 0.5
    assert metrics.tnr == 0.5
    assert metrics.precision == 0.5
    with pytest.raises(ConfigurationError):
        classifier_metrics([0.1], [1, 0])


def labelled(labels, iteration, instance_id=0):
    labels = np.asarray(labels, dtype=np.int64)
    n = len(labels)
    d_o, d_m = FeatureVariant.MAKESPAN.dims
    return StateRecord(
        FeatureVariant.MAKESPAN,
        np.zeros((n, d_o)),
        np.zeros((1, d_m)),
        np.ones(n, dtype=bool),
        np.zeros(n, dtype=np.int64),
        labels,
        tuple((j, 1) for j in range(n)),
        instance_id,
        iteration,
    )


def test_empirical_pfix_averages_per_iteration():
    records = [
        labelled([1, 1, 0], 2, 0),
        labelled([1, 0, 0], 2, 1),
        labelled([1, 1, 1], 3, 0),
        labelled([1, 0], 4, 0),
    ]
    result = empirical_pfix(records)
    assert result.records == 3
    assert result.iterations == 2
    assert result.p_hat == pytest.approx([1.0, 0.75, 0.5])
    assert result.stderr[0] == 0.0
    assert result.stderr[2] == pytest.approx(0.5)
    assert result.positions == pytest.approx([1 / 3, 2 / 3, 1.0])


def test_empirical_pfix_needs_labels():
    with pytest.raises(InsufficientDataError):
        empirical_pfix([])


def test_fit_recovers_a_line():
    fitted = fit_linear_decay([0.9, 0.7, 0.5, 0.3])
    assert fitted.b == pytest.approx(1.1)
    assert fitted.m == pytest.approx(0.8)
    assert fitted.slope_pvalue < 1e-6
    clamped = fitted.clamped()
    assert (clamped.b, clamped.m) == (1.0, pytest.approx(0.8))
    assert fitted.line() == pytest.approx([0.9, 0.7, 0.5, 0.3])


def test_fit_pvalue():
    rng = np.random.default_rng(0)
    decreasing = fit_linear_decay(0.8 - 0.5 * np.arange(1, 21) / 20 + rng.normal(0, 0.02, 20))
    assert decreasing.slope_pvalue < 0.01
    flat = fit_linear_decay(0.5 + rng.normal(0, 0.02, 20))
    assert flat.slope_pvalue > 0.001
    assert fit_linear_decay([0.6, 0.4]).slope_pvalue is None
    with pytest.raises(ConfigurationError):
        fit_linear_decay([0.5])
