import numpy as np
import pytest

from pprnet.utilities.metrics import (
    ConfusionCounts,
    MetricName,
    Metrics,
    metrics,
    undefined_to_nan,
)


def test_metrics_of_known_counts():
    result = metrics(ConfusionCounts(tp=8, fn=2, tn=85, fp=5))
    assert result.acc == pytest.approx(0.93)
    assert result.sens == pytest.approx(0.8)
    assert result.spec == pytest.approx(85 / 90)
    assert result.get(MetricName.SPEC) == pytest.approx(0.9444, abs=1e-4)


def test_accuracy_is_weighted_sensitivity_and_specificity(rng):
    for tp, tn, fp, fn in rng.integers(1, 1000, size=(100, 4)):
        c = ConfusionCounts(int(tp), int(tn), int(fp), int(fn))
        m = metrics(c)
        assert m.acc * c.total == pytest.approx(
            m.sens * c.positives + m.spec * c.negatives
        )


def test_undefined_metrics():
    no_anomalies = metrics(ConfusionCounts(tn=9, fp=1))
    assert no_anomalies == Metrics(acc=0.9, sens=None, spec=0.9)
    assert metrics(ConfusionCounts()) == Metrics(None, None, None)
    assert np.isnan(undefined_to_nan(None))
    assert undefined_to_nan(0.5) == 0.5


def test_negative_counts_are_rejected():
    with pytest.raises(ValueError, match="non-negative"):
        metrics(ConfusionCounts(tp=-1))


def test_counts_from_predictions():
    counts = ConfusionCounts.from_predictions([1, 1, 0, 0, 0], [1, 0, 1, 0, 0])
    assert counts == ConfusionCounts(tp=1, tn=2, fp=1, fn=1)
    # Labels absent from both arrays still give a 2x2 matrix.
    assert ConfusionCounts.from_predictions([0, 0], [0, 0]) == ConfusionCounts(tn=2)
    assert ConfusionCounts.from_predictions([], []) == ConfusionCounts()
    assert counts + counts == ConfusionCounts(2, 4, 2, 2)
