import numpy as np
import pytest

from pprnet.networks.layers import (
    BatchNorm1D,
    Conv1D,
    Dense,
    GlobalAveragePooling1D,
    MaxPool1D,
    ReLU,
    same_padding,
)

EPSILON = 1e-4
TOLERANCE = 1e-4


def _distinct_values(rng, shape, offset=0.0):
    """Values at least 0.1 apart, so no max or ReLU kink lies within EPSILON."""
    n = int(np.prod(shape))
    return ((rng.permutation(n) - n / 2 + 0.5) * 0.1 + offset).reshape(shape)


def _relative_error(analytic, numeric):
    scale = max(np.linalg.norm(analytic) + np.linalg.norm(numeric), 1e-12)
    return np.linalg.norm(analytic - numeric) / scale


def _numeric_gradient(loss, array):
    gradient = np.zeros_like(array)
    for index in np.ndindex(array.shape):
        original = array[index]
        array[index] = original + EPSILON
        plus = loss()
        array[index] = original - EPSILON
        minus = loss()
        array[index] = original
        gradient[index] = (plus - minus) / (2 * EPSILON)
    return gradient


def check_gradients(layer, x, rng, training=True):
    """Compare backward against central differences of sum(forward(x) * r)."""
    r = rng.normal(size=layer.forward(x, training).shape)

    def loss():
        return float(np.sum(layer.forward(x, training) * r))

    layer.forward(x, training)
    dx = layer.backward(r, True)
    assert _relative_error(dx, _numeric_gradient(loss, x)) < TOLERANCE
    for name, param in layer.params.items():
        layer.forward(x, training)
        layer.backward(r, True)
        analytic = layer.grads[name].copy()
        assert _relative_error(analytic, _numeric_gradient(loss, param)) < TOLERANCE


@pytest.mark.parametrize("kernel_size", [1, 3, 4, 9])
def test_conv1d_gradients(rng, kernel_size):
    conv = Conv1D(3, 2, kernel_size, rng, bias=True, dtype=np.float64)
    check_gradients(conv, rng.normal(size=(2, 3, 12)), rng)


def test_conv1d_keeps_length_and_matches_correlation(rng):
    conv = Conv1D(1, 1, 3, rng, dtype=np.float64)
    conv.params["weight"][...] = np.array([1.0, 2.0, 3.0]).reshape(1, 1, 3)
    x = np.arange(1.0, 6.0).reshape(1, 1, 5)
    # zero padded: y[t] = x[t-1] + 2 x[t] + 3 x[t+1]
    expected = [0 + 2 + 6, 1 + 4 + 9, 2 + 6 + 12, 3 + 8 + 15, 4 + 10 + 0]
    np.testing.assert_allclose(conv.forward(x)[0, 0], expected)
    assert same_padding(3) == (1, 1)
    assert same_padding(40) == (19, 20)


def test_batchnorm_gradients_in_training_mode(rng):
    bn = BatchNorm1D(3, dtype=np.float64)
    bn.params["gamma"][...] = rng.uniform(0.5, 1.5, size=3)
    bn.params["beta"][...] = rng.normal(size=3)
    check_gradients(bn, rng.normal(size=(4, 3, 8)), rng, training=True)


def test_batchnorm_gradients_in_inference_mode(rng):
    bn = BatchNorm1D(3, dtype=np.float64)
    bn.running_mean[...] = rng.normal(size=3)
    bn.running_var[...] = rng.uniform(0.5, 2.0, size=3)
    check_gradients(bn, rng.normal(size=(4, 3, 8)), rng, training=False)


def test_batchnorm_training_normalizes_and_updates_running_statistics(rng):
    bn = BatchNorm1D(2, momentum=0.1, dtype=np.float64)
    x = rng.normal(loc=3.0, scale=2.0, size=(8, 2, 50))
    out = bn.forward(x, training=True)
    np.testing.assert_allclose(out.mean(axis=(0, 2)), 0, atol=1e-10)
    np.testing.assert_allclose(out.var(axis=(0, 2)), 1, atol=1e-3)
    np.testing.assert_allclose(bn.running_mean, 0.1 * x.mean(axis=(0, 2)))
    np.testing.assert_allclose(bn.running_var, 0.9 + 0.1 * x.var(axis=(0, 2)))


def test_frozen_batchnorm_uses_and_keeps_running_statistics(rng):
    bn = BatchNorm1D(2, dtype=np.float64)
    bn.running_mean[...] = [1.0, -1.0]
    bn.running_var[...] = [4.0, 1.0]
    bn.frozen = True
    x = rng.normal(size=(3, 2, 5))
    out = bn.forward(x, training=True)

    expected = (x - bn.running_mean[None, :, None]) / np.sqrt(
        bn.running_var[None, :, None] + bn.epsilon
    )
    np.testing.assert_allclose(out, expected)
    np.testing.assert_array_equal(bn.running_mean, [1.0, -1.0])
    np.testing.assert_array_equal(bn.running_var, [4.0, 1.0])
    bn.backward(np.ones_like(out))
    assert bn.grads == {}


def test_maxpool_gradients(rng):
    check_gradients(MaxPool1D(3), _distinct_values(rng, (2, 3, 10)), rng)


def test_maxpool_keeps_length():
    x = np.array([[[1.0, 5.0, 2.0, 0.0, 3.0]]])
    np.testing.assert_array_equal(MaxPool1D(3).forward(x)[0, 0], [5, 5, 5, 3, 3])


def test_relu_gradients(rng):
    check_gradients(ReLU(), _distinct_values(rng, (2, 3, 6)), rng)


def test_global_average_pooling_gradients(rng):
    check_gradients(GlobalAveragePooling1D(), rng.normal(size=(3, 4, 7)), rng)


def test_dense_gradients(rng):
    check_gradients(Dense(5, 2, rng, dtype=np.float64), rng.normal(size=(4, 5)), rng)


def test_frozen_layer_fills_no_gradients(rng):
    dense = Dense(3, 2, rng, dtype=np.float64)
    dense.frozen = True
    dense.forward(rng.normal(size=(4, 3)))
    dx = dense.backward(np.ones((4, 2)), need_input_grad=True)
    assert dense.grads == {}
    assert dx.shape == (4, 3)
    assert not dense.trainable


def test_backward_without_input_gradient_returns_none(rng):
    conv = Conv1D(2, 2, 3, rng, dtype=np.float64)
    out = conv.forward(rng.normal(size=(1, 2, 6)))
    assert conv.backward(np.ones_like(out), need_input_grad=False) is None
    assert "weight" in conv.grads


def test_load_state_checks_names_and_shapes(rng):
    bn = BatchNorm1D(2)
    bn.load_state({"gamma": np.full(2, 2.0), "running_var": np.full(2, 3.0)})
    np.testing.assert_array_equal(bn.params["gamma"], [2.0, 2.0])
    np.testing.assert_array_equal(bn.running_var, [3.0, 3.0])

    with pytest.raises(KeyError, match="no state 'alpha'"):
        bn.load_state({"alpha": np.zeros(2)})
    with pytest.raises(ValueError, match="has shape"):
        bn.load_state({"beta": np.zeros(3)})
