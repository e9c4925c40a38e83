""" Layers with hand-derived backward passes for [batch, channels, time] inputs.

Every layer caches what its backward pass needs during `forward` and fills
`grads` (same keys as `params`) during `backward`. Layers hold no optimizer
state; see `pprnet.networks.optimizer`.
"""
from typing import Dict, Optional

import numpy as np


class Layer:
    """Base class, a layer without parameters that passes its input through."""

    def __init__(self):
        self.params: Dict[str, np.ndarray] = {}
        self.grads: Dict[str, np.ndarray] = {}
        self.frozen = False

    @property
    def trainable(self) -> bool:
        return bool(self.params) and not self.frozen

    def state(self) -> Dict[str, np.ndarray]:
        """Arrays which determine the output: parameters and running statistics."""
        return dict(self.params)

    def load_state(self, state: Dict[str, np.ndarray]) -> None:
        for name, value in state.items():
            target = self.params if name in self.params else self._buffers()
            if name not in target:
                raise KeyError(f"{type(self).__name__} has no state '{name}'.")
            if target[name].shape != value.shape:
                raise ValueError(
                    f"State '{name}' has shape {value.shape}, "
                    f"expected {target[name].shape}."
                )
            target[name][...] = value

    def _buffers(self) -> Dict[str, np.ndarray]:
        return {}

    def forward(self, x: np.ndarray, training: bool = False) -> np.ndarray:
        return x

    def backward(self, dout: np.ndarray, need_input_grad: bool = True):
        return dout


def he_uniform(rng: np.random.Generator, shape, fan_in: int, dtype) -> np.ndarray:
    limit = np.sqrt(6.0 / fan_in)
    return rng.uniform(-limit, limit, size=shape).astype(dtype)


def same_padding(kernel_size: int):
    """(left, right) padding keeping the temporal length for stride 1."""
    left = (kernel_size - 1) // 2
    return left, kernel_size - 1 - left


class Conv1D(Layer):
    """Stride-1 convolution with same-length output, weight [out, in, kernel]."""

    def __init__(
        self,
        in_channels: int,
        out_channels: int,
        kernel_size: int,
        rng: np.random.Generator,
        bias: bool = False,
        dtype=np.float32,
    ):
        super().__init__()
        self.kernel_size = kernel_size
        shape = (out_channels, in_channels, kernel_size)
        self.params["weight"] = he_uniform(rng, shape, in_channels * kernel_size, dtype)
        if bias:
            self.params["bias"] = np.zeros(out_channels, dtype=dtype)
        self._x_padded: Optional[np.ndarray] = None

    def forward(self, x: np.ndarray, training: bool = False) -> np.ndarray:
        weight = self.params["weight"]
        left, right = same_padding(self.kernel_size)
        xp = np.pad(x, ((0, 0), (0, 0), (left, right)))
        n_time = x.shape[2]
        out = np.zeros((x.shape[0], weight.shape[0], n_time), dtype=x.dtype)
        for k in range(self.kernel_size):
            out += np.matmul(weight[:, :, k], xp[:, :, k : k + n_time])
        if "bias" in self.params:
            out += self.params["bias"][None, :, None]
        self._x_padded = xp
        return out

    def backward(self, dout: np.ndarray, need_input_grad: bool = True):
        weight, xp = self.params["weight"], self._x_padded
        n_time = dout.shape[2]
        if not self.frozen:
            dweight = np.empty_like(weight)
            for k in range(self.kernel_size):
                dweight[:, :, k] = np.tensordot(
                    dout, xp[:, :, k : k + n_time], axes=([0, 2], [0, 2])
                )
            self.grads["weight"] = dweight
            if "bias" in self.params:
                self.grads["bias"] = dout.sum(axis=(0, 2))
        if not need_input_grad:
            return None
        dxp = np.zeros_like(xp)
        for k in range(self.kernel_size):
            dxp[:, :, k : k + n_time] += np.matmul(weight[:, :, k].T, dout)
        left, _ = same_padding(self.kernel_size)
        return dxp[:, :, left : left + n_time]


class BatchNorm1D(Layer):
    """Per-channel normalization over batch and time.

    Training mode normalizes with batch statistics and updates the running
    statistics, inference mode (and a frozen layer) uses the running ones.
    """

    def __init__(
        self,
        channels: int,
        momentum: float = 0.1,
        epsilon: float = 1e-5,
        dtype=np.float32,
    ):
        super().__init__()
        self.momentum = momentum
        self.epsilon = epsilon
        self.params["gamma"] = np.ones(channels, dtype=dtype)
        self.params["beta"] = np.zeros(channels, dtype=dtype)
        self.running_mean = np.zeros(channels, dtype=dtype)
        self.running_var = np.ones(channels, dtype=dtype)
        self._cache = None

    def _buffers(self) -> Dict[str, np.ndarray]:
        return {"running_mean": self.running_mean, "running_var": self.running_var}

    def state(self) -> Dict[str, np.ndarray]:
        return {**self.params, **self._buffers()}

    def forward(self, x: np.ndarray, training: bool = False) -> np.ndarray:
        gamma, beta = self.params["gamma"], self.params["beta"]
        batch_mode = training and not self.frozen
        if batch_mode:
            mean = x.mean(axis=(0, 2))
            var = x.var(axis=(0, 2))
            self.running_mean *= 1 - self.momentum
            self.running_mean += self.momentum * mean
            self.running_var *= 1 - self.momentum
            self.running_var += self.momentum * var
        else:
            mean, var = self.running_mean, self.running_var
        inv_std = 1.0 / np.sqrt(var + self.epsilon)
        x_hat = (x - mean[None, :, None]) * inv_std[None, :, None]
        self._cache = (x_hat, inv_std, batch_mode)
        return gamma[None, :, None] * x_hat + beta[None, :, None]

    def backward(self, dout: np.ndarray, need_input_grad: bool = True):
        x_hat, inv_std, batch_mode = self._cache
        gamma = self.params["gamma"]
        if not self.frozen:
            self.grads["gamma"] = (dout * x_hat).sum(axis=(0, 2))
            self.grads["beta"] = dout.sum(axis=(0, 2))
        if not need_input_grad:
            return None
        dx_hat = dout * gamma[None, :, None]
        if not batch_mode:
            return dx_hat * inv_std[None, :, None]
        n = dout.shape[0] * dout.shape[2]
        return (
            inv_std[None, :, None]
            / n
            * (
                n * dx_hat
                - dx_hat.sum(axis=(0, 2))[None, :, None]
                - x_hat * (dx_hat * x_hat).sum(axis=(0, 2))[None, :, None]
            )
        )


class MaxPool1D(Layer):
    """Stride-1 max pooling, padded with -inf so the length is kept."""

    def __init__(self, width: int = 3):
        super().__init__()
        self.width = width
        self._argmax = None

    def forward(self, x: np.ndarray, training: bool = False) -> np.ndarray:
        left, right = same_padding(self.width)
        xp = np.pad(x, ((0, 0), (0, 0), (left, right)), constant_values=-np.inf)
        n_time = x.shape[2]
        shifted = np.stack([xp[:, :, s : s + n_time] for s in range(self.width)])
        self._argmax = shifted.argmax(axis=0)
        return shifted.max(axis=0)

    def backward(self, dout: np.ndarray, need_input_grad: bool = True):
        if not need_input_grad:
            return None
        left, right = same_padding(self.width)
        n_time = dout.shape[2]
        dxp = np.zeros(dout.shape[:2] + (n_time + left + right,), dtype=dout.dtype)
        for s in range(self.width):
            dxp[:, :, s : s + n_time] += np.where(self._argmax == s, dout, 0)
        return dxp[:, :, left : left + n_time]


class ReLU(Layer):
    def __init__(self):
        super().__init__()
        self._mask = None

    def forward(self, x: np.ndarray, training: bool = False) -> np.ndarray:
        self._mask = x > 0
        return np.where(self._mask, x, 0).astype(x.dtype, copy=False)

    def backward(self, dout: np.ndarray, need_input_grad: bool = True):
        return np.where(self._mask, dout, 0).astype(dout.dtype, copy=False)


class GlobalAveragePooling1D(Layer):
    """Mean over time: [batch, channels, time] -> [batch, channels]."""

    def __init__(self):
        super().__init__()
        self._n_time = 0

    def forward(self, x: np.ndarray, training: bool = False) -> np.ndarray:
        self._n_time = x.shape[2]
        return x.mean(axis=2)

    def backward(self, dout: np.ndarray, need_input_grad: bool = True):
        if not need_input_grad:
            return None
        return np.repeat(dout[:, :, None] / self._n_time, self._n_time, axis=2)


class Dense(Layer):
    """Fully connected layer, weight [in, out]."""

    def __init__(
        self, n_in: int, n_out: int, rng: np.random.Generator, dtype=np.float32
    ):
        super().__init__()
        self.params["weight"] = he_uniform(rng, (n_in, n_out), n_in, dtype)
        self.params["bias"] = np.zeros(n_out, dtype=dtype)
        self._x = None

    @property
    def n_out(self) -> int:
        return self.params["bias"].shape[0]

    def forward(self, x: np.ndarray, training: bool = False) -> np.ndarray:
        self._x = x
        return x @ self.params["weight"] + self.params["bias"]

    def backward(self, dout: np.ndarray, need_input_grad: bool = True):
        if not self.frozen:
            self.grads["weight"] = self._x.T @ dout
            self.grads["bias"] = dout.sum(axis=0)
        if not need_input_grad:
            return None
        return dout @ self.params["weight"].T
