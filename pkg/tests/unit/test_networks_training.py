import logging

import numpy as np
import pytest

from pprnet.errors import InsufficientDataError, NumericalError, SingleClassError
from pprnet.logging.trace_logger import TraceLogger
from pprnet.networks import InceptionArchitecture, InceptionNetwork
from pprnet.networks.optimizer import Adam
from pprnet.networks.training import (
    SOURCE_DEFAULTS,
    TrainingHyperparameters,
    backward_and_step,
    check_labels,
    train_network,
)
from pprnet.signal.windowing import windows_to_arrays

TINY = InceptionArchitecture.from_profile("tiny")


def _overfit_hyperparameters(**changes):
    settings = dict(
        learning_rate=1e-2,
        batch_size=16,
        max_epochs=40,
        patience=40,
        validation_fraction=0.0,
    )
    settings.update(changes)
    return TrainingHyperparameters(**settings)


def test_hyperparameter_defaults_and_precedence():
    hp = TrainingHyperparameters()
    assert hp.hyperparameters == SOURCE_DEFAULTS
    assert str(hp) == "TrainingHyperparameters()"

    hp = TrainingHyperparameters(batch_size=8)
    assert hp.hyperparameters["batch_size"] == 8
    assert str(hp) == "TrainingHyperparameters(batch_size=8)"

    tuning = TrainingHyperparameters.for_tuning().hyperparameters
    assert (tuning["learning_rate"], tuning["batch_size"]) == (1e-4, 32)
    assert tuning["max_epochs"] == 50


@pytest.mark.parametrize(
    "settings, message",
    [
        (dict(batch_size=0), "batch_size"),
        (dict(max_epochs=-1), "max_epochs"),
        (dict(validation_fraction=1.0), "validation_fraction"),
    ],
)
def test_invalid_hyperparameters(settings, message):
    with pytest.raises(ValueError, match=message):
        TrainingHyperparameters(**settings)


def test_adam_rejects_non_positive_learning_rate():
    with pytest.raises(ValueError, match="learning_rate"):
        Adam(0.0)


def test_check_labels():
    np.testing.assert_array_equal(check_labels([0, 1, 1]), [0, 1, 1])
    with pytest.raises(InsufficientDataError):
        check_labels([])
    with pytest.raises(SingleClassError, match="only label 0"):
        check_labels([0, 0, 0])
    with pytest.raises(ValueError, match="Labels must be 0"):
        check_labels([0, 2])


def test_overfits_separable_windows(separable_windows, tmp_path):
    x, y = windows_to_arrays(separable_windows, normalize=False)
    trace_path = str(tmp_path / "trace.csv")

    net = train_network(
        x,
        y,
        _overfit_hyperparameters(),
        seed=0,
        architecture=TINY,
        trace=TraceLogger(trace_path),
    )

    assert np.mean(net.predict(x) == y) >= 0.9
    assert 1 <= len(net.history) <= 40
    assert all(np.isnan(record.validation_loss) for record in net.history)
    with open(trace_path) as fh:
        lines = fh.read().splitlines()
    assert lines[0].split(";")[:3] == ["network", "epoch", "train_loss"]
    assert len(lines) == 1 + len(net.history)


def test_training_is_reproducible(separable_windows):
    x, y = windows_to_arrays(separable_windows)
    hp = _overfit_hyperparameters(max_epochs=2, validation_fraction=0.25)
    a = train_network(x, y, hp, seed=7, architecture=TINY)
    b = train_network(x, y, hp, seed=7, architecture=TINY)
    np.testing.assert_array_equal(a.predict_proba(x), b.predict_proba(x))
    assert all(np.isfinite(record.validation_loss) for record in a.history)


def test_early_stopping_keeps_best_epoch(separable_windows):
    x, y = windows_to_arrays(separable_windows)
    hp = _overfit_hyperparameters(max_epochs=30, patience=2)
    net = train_network(x, y, hp, seed=0, architecture=TINY)
    losses = [record.train_loss for record in net.history]
    # Training stops `patience` epochs after the best one.
    assert len(losses) == 30 or np.argmin(losses) == len(losses) - 3


def test_single_class_training_data_is_rejected(separable_windows):
    normals = [w for w in separable_windows if not w.is_anomaly]
    x, y = windows_to_arrays(normals)
    with pytest.raises(SingleClassError):
        train_network(x, y, architecture=TINY)


def test_label_count_must_match(separable_windows):
    x, y = windows_to_arrays(separable_windows)
    with pytest.raises(ValueError, match="48 windows but 47 labels"):
        train_network(x, y[:-1], architecture=TINY)


def test_non_finite_loss_raises_before_the_update(separable_windows):
    x, y = windows_to_arrays(separable_windows, dtype=np.float64)
    x[0, 0, 0] = np.inf
    net = InceptionNetwork(x.shape[1:], TINY, dtype=np.float64)
    before = {name: value.copy() for name, value, _ in net.parameters()}

    with pytest.raises(NumericalError, match="Epoch 0, batch 0"):
        train_network(x, y, _overfit_hyperparameters(batch_size=48), network=net)

    for name, value, _ in net.parameters():
        np.testing.assert_array_equal(value, before[name])


def test_empty_batch_is_rejected():
    net = InceptionNetwork((2, 32), TINY)
    with pytest.raises(InsufficientDataError):
        backward_and_step(net, np.zeros((0, 2, 32)), np.zeros(0, int), Adam())


def test_time_budget_keeps_best_parameters(separable_windows, caplog):
    x, y = windows_to_arrays(separable_windows)
    hp = _overfit_hyperparameters(
        max_epochs=100_000, patience=100_000, max_train_time_s=1
    )
    with caplog.at_level(logging.WARNING, logger="pprnet"):
        net = train_network(x, y, hp, architecture=TINY)

    assert len(net.history) < 100_000
    assert "reached its time budget" in caplog.text
    assert np.all(np.isfinite(net.predict_proba(x)))
