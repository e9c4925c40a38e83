""" Inception modules, residual blocks and the Inception Network classifier. """
import logging
from typing import Dict, Iterator, List, NamedTuple, Optional, Sequence, Tuple

import numpy as np
from scipy.special import expit, softmax

from pprnet.errors import ConfigurationError, ShapeError
from pprnet.networks.layers import (
    BatchNorm1D,
    Conv1D,
    Dense,
    GlobalAveragePooling1D,
    Layer,
    MaxPool1D,
    ReLU,
)

log = logging.getLogger(__name__)

N_BLOCKS = 2
MODULES_PER_BLOCK = 3
LAYER_IDS: Tuple[str, ...] = tuple(
    [
        f"block{b}.{part}"
        for b in range(1, N_BLOCKS + 1)
        for part in [f"module{m}" for m in range(1, MODULES_PER_BLOCK + 1)]
        + ["shortcut"]
    ]
    + ["gap", "head"]
)
PREDICT_BATCH_SIZE = 256


class InceptionArchitecture(NamedTuple):
    n_filters: int = 32
    bottleneck_size: int = 32
    kernel_sizes: Tuple[int, int, int] = (40, 20, 10)
    pool_width: int = 3

    @classmethod
    def from_profile(cls, profile: str) -> "InceptionArchitecture":
        from pprnet.configuration.defaults import MODEL_PROFILES

        if profile not in MODEL_PROFILES:
            raise ConfigurationError(
                f"Unknown model profile '{profile}', "
                f"choose from {list(MODEL_PROFILES)}."
            )
        settings = dict(MODEL_PROFILES[profile])
        settings["kernel_sizes"] = tuple(settings["kernel_sizes"])
        return cls(**settings)

    @property
    def output_channels(self) -> int:
        return 4 * self.n_filters


class Composite(Layer):
    """A layer made of named child layers; state names are dotted paths."""

    def children(self) -> Dict[str, Layer]:
        raise NotImplementedError

    def walk(self, prefix: str = "") -> Iterator[Tuple[str, Layer]]:
        """(dotted name, layer) of every leaf layer."""
        for name, child in self.children().items():
            path = f"{prefix}{name}"
            if isinstance(child, Composite):
                yield from child.walk(f"{path}.")
            else:
                yield path, child

    @property
    def trainable(self) -> bool:
        return any(layer.trainable for _, layer in self.walk())

    def set_frozen(self, frozen: bool) -> None:
        self.frozen = frozen
        for _, layer in self.walk():
            layer.frozen = frozen

    def state(self) -> Dict[str, np.ndarray]:
        return {
            f"{path}.{name}": value
            for path, layer in self.walk()
            for name, value in layer.state().items()
        }

    def load_state(self, state: Dict[str, np.ndarray]) -> None:
        layers = dict(self.walk())
        per_layer: Dict[str, Dict[str, np.ndarray]] = {}
        for key, value in state.items():
            path, _, name = key.rpartition(".")
            if path not in layers:
                raise KeyError(f"No layer '{path}' for state '{key}'.")
            per_layer.setdefault(path, {})[name] = value
        for path, layer_state in per_layer.items():
            layers[path].load_state(layer_state)

    def parameters(self, trainable_only: bool = False):
        """(dotted name, parameter, gradient or None) of every parameter."""
        for path, layer in self.walk():
            if trainable_only and layer.frozen:
                continue
            for name, value in layer.params.items():
                yield f"{path}.{name}", value, layer.grads.get(name)


class InceptionModule(Composite):
    """Bottleneck, three parallel convolutions and a pooling branch, fused.

    in_channels x T -> 4F x T. The bottleneck output feeds the three
    convolutions, max pooling (followed by a kernel-1 convolution) reads the
    module input. The 4F concatenation passes a kernel-1 fusion convolution,
    batch normalization and ReLU.
    """

    def __init__(
        self,
        in_channels: int,
        architecture: InceptionArchitecture,
        rng: np.random.Generator,
        dtype=np.float32,
    ):
        super().__init__()
        f, fb = architecture.n_filters, architecture.bottleneck_size
        self.bottleneck = Conv1D(in_channels, fb, 1, rng, dtype=dtype)
        self.convs = [
            Conv1D(fb, f, k, rng, dtype=dtype) for k in architecture.kernel_sizes
        ]
        self.pool = MaxPool1D(architecture.pool_width)
        self.pool_conv = Conv1D(in_channels, f, 1, rng, dtype=dtype)
        self.fusion = Conv1D(4 * f, 4 * f, 1, rng, dtype=dtype)
        self.bn = BatchNorm1D(4 * f, dtype=dtype)
        self.relu = ReLU()
        self._n_filters = f

    def children(self) -> Dict[str, Layer]:
        children: Dict[str, Layer] = {"bottleneck": self.bottleneck}
        children.update({f"conv{i + 1}": conv for i, conv in enumerate(self.convs)})
        children.update(
            pool=self.pool,
            pool_conv=self.pool_conv,
            fusion=self.fusion,
            bn=self.bn,
            relu=self.relu,
        )
        return children

    def forward(self, x: np.ndarray, training: bool = False) -> np.ndarray:
        bottleneck = self.bottleneck.forward(x, training)
        branches = [conv.forward(bottleneck, training) for conv in self.convs]
        pooled = self.pool.forward(x, training)
        branches.append(self.pool_conv.forward(pooled, training))
        fused = self.fusion.forward(np.concatenate(branches, axis=1), training)
        return self.relu.forward(self.bn.forward(fused, training), training)

    def backward(self, dout: np.ndarray, need_input_grad: bool = True):
        d_concat = self.fusion.backward(
            self.bn.backward(self.relu.backward(dout), True), True
        )
        f = self._n_filters
        d_branches = [d_concat[:, i * f : (i + 1) * f] for i in range(4)]

        d_bottleneck = None
        for conv, d_branch in zip(self.convs, d_branches[:3]):
            d = conv.backward(d_branch, True)
            d_bottleneck = d if d_bottleneck is None else d_bottleneck + d
        dx = self.bottleneck.backward(d_bottleneck, need_input_grad)
        d_pooled = self.pool_conv.backward(d_branches[3], need_input_grad)
        if not need_input_grad:
            return None
        return dx + self.pool.backward(d_pooled, True)


class Shortcut(Composite):
    """Kernel-1 projection of a block input onto the block output channels."""

    def __init__(self, in_channels: int, out_channels: int, rng, dtype=np.float32):
        super().__init__()
        self.conv = Conv1D(in_channels, out_channels, 1, rng, dtype=dtype)
        self.bn = BatchNorm1D(out_channels, dtype=dtype)

    def children(self) -> Dict[str, Layer]:
        return {"conv": self.conv, "bn": self.bn}

    def forward(self, x: np.ndarray, training: bool = False) -> np.ndarray:
        return self.bn.forward(self.conv.forward(x, training), training)

    def backward(self, dout: np.ndarray, need_input_grad: bool = True):
        return self.conv.backward(self.bn.backward(dout, True), need_input_grad)


class ResidualBlock(Composite):
    """Three Inception modules; the projected block input joins the last output."""

    def __init__(
        self,
        in_channels: int,
        architecture: InceptionArchitecture,
        rng: np.random.Generator,
        dtype=np.float32,
    ):
        super().__init__()
        out_channels = architecture.output_channels
        self.modules = [
            InceptionModule(
                in_channels if i == 0 else out_channels, architecture, rng, dtype
            )
            for i in range(MODULES_PER_BLOCK)
        ]
        self.shortcut = Shortcut(in_channels, out_channels, rng, dtype)
        self.relu = ReLU()

    def children(self) -> Dict[str, Layer]:
        children: Dict[str, Layer] = {
            f"module{i + 1}": module for i, module in enumerate(self.modules)
        }
        children.update(shortcut=self.shortcut, relu=self.relu)
        return children

    def forward(self, x: np.ndarray, training: bool = False) -> np.ndarray:
        out = x
        for module in self.modules:
            out = module.forward(out, training)
        return self.relu.forward(out + self.shortcut.forward(x, training), training)

    def backward(self, dout: np.ndarray, need_input_grad: bool = True):
        d_sum = self.relu.backward(dout)
        # A module needs its input gradient only if something before it trains.
        upstream = [need_input_grad]
        for module in self.modules[:-1]:
            upstream.append(upstream[-1] or module.trainable)

        d = d_sum
        for module, need in zip(reversed(self.modules), reversed(upstream)):
            if d is None:
                break
            if not (need or module.trainable):
                d = None
                break
            d = module.backward(d, need)
        d_short = None
        if need_input_grad or self.shortcut.trainable:
            d_short = self.shortcut.backward(d_sum, need_input_grad)
        if not need_input_grad:
            return None
        return d + d_short


class InceptionNetwork(Composite):
    """Two residual blocks, global average pooling and a dense head.

    A two-unit head is read through softmax, a one-unit head (after transfer)
    through a sigmoid. `predict_proba` returns [P(normal), P(anomaly)] either way.

    Layer ids, in data-flow order, are listed in `LAYER_IDS`. Each can be frozen
    with `freeze`; frozen layers run batch normalization in inference mode and
    receive no updates.
    """

    def __init__(
        self,
        input_shape: Tuple[int, int],
        architecture: InceptionArchitecture = InceptionArchitecture(),
        n_outputs: int = 2,
        seed: int = 0,
        dtype=np.float32,
    ):
        super().__init__()
        if n_outputs not in (1, 2):
            raise ValueError(
                f"n_outputs must be 1 (sigmoid) or 2 (softmax): {n_outputs}"
            )
        self.input_shape = tuple(input_shape)
        self.architecture = architecture
        self.seed = seed
        self.dtype = np.dtype(dtype)
        n_channels, n_samples = self.input_shape
        if n_samples < max(architecture.kernel_sizes):
            raise ShapeError(
                f"Windows of {n_samples} samples are shorter than the largest "
                f"kernel ({max(architecture.kernel_sizes)})."
            )
        rng = np.random.default_rng(seed)
        width = architecture.output_channels
        self.blocks = [
            ResidualBlock(n_channels, architecture, rng, dtype),
            ResidualBlock(width, architecture, rng, dtype),
        ]
        self.gap = GlobalAveragePooling1D()
        self.head = Dense(width, n_outputs, rng, dtype)
        self.history: List = []
        self.checkpoint_extra: Dict = {}

    def children(self) -> Dict[str, Layer]:
        children: Dict[str, Layer] = {
            f"block{i + 1}": block for i, block in enumerate(self.blocks)
        }
        children.update(gap=self.gap, head=self.head)
        return children

    def layer(self, layer_id: str) -> Layer:
        """The layer with id `layer_id`, one of `LAYER_IDS`."""
        if layer_id not in LAYER_IDS:
            raise ConfigurationError(
                f"Unknown layer id '{layer_id}', valid ids are {list(LAYER_IDS)}."
            )
        if layer_id in ("gap", "head"):
            return getattr(self, layer_id)
        block_name, part = layer_id.split(".")
        block = self.blocks[int(block_name[-1]) - 1]
        if part == "shortcut":
            return block.shortcut
        return block.modules[int(part[-1]) - 1]

    @property
    def freeze_flags(self) -> Dict[str, bool]:
        return {layer_id: self.layer(layer_id).frozen for layer_id in LAYER_IDS}

    def freeze(self, layer_ids: Sequence[str], frozen: bool = True) -> None:
        for layer_id in layer_ids:
            layer = self.layer(layer_id)
            if isinstance(layer, Composite):
                layer.set_frozen(frozen)
            else:
                layer.frozen = frozen

    def replace_head(self, n_outputs: int, seed: Optional[int] = None) -> None:
        """Swap the head for a freshly initialized one with `n_outputs` units."""
        rng = np.random.default_rng(self.seed if seed is None else seed)
        n_in = self.head.params["weight"].shape[0]
        self.head = Dense(n_in, n_outputs, rng, self.dtype)

    @property
    def uses_sigmoid(self) -> bool:
        return self.head.n_out == 1

    def check_input(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x)
        if x.ndim == 2:
            x = x[None]
        if x.ndim != 3 or tuple(x.shape[1:]) != self.input_shape:
            raise ShapeError(
                f"Expected input of shape [batch, {self.input_shape[0]}, "
                f"{self.input_shape[1]}], got {list(x.shape)}."
            )
        return x.astype(self.dtype, copy=False)

    def forward(self, x: np.ndarray, training: bool = False) -> np.ndarray:
        """Logits of a batch [batch, channels, samples]."""
        out = self.check_input(x)
        for block in self.blocks:
            out = block.forward(out, training)
        return self.head.forward(self.gap.forward(out, training), training)

    def backward(self, dlogits: np.ndarray) -> None:
        """Fill the gradients of every unfrozen layer from d loss / d logits."""
        block_upstream = [False, self.blocks[0].trainable]
        before_gap = any(block.trainable for block in self.blocks)

        d = self.head.backward(dlogits, before_gap)
        if d is None:
            return
        d = self.gap.backward(d, True)
        for block, need in zip(reversed(self.blocks), reversed(block_upstream)):
            if not (need or block.trainable):
                break
            d = block.backward(d, need)
            if d is None:
                break

    def probabilities(self, logits: np.ndarray) -> np.ndarray:
        if self.uses_sigmoid:
            p = expit(logits[:, 0])
            return np.stack([1 - p, p], axis=1)
        return softmax(logits, axis=1)

    def predict_proba(self, x: np.ndarray) -> np.ndarray:
        """[P(normal), P(anomaly)] per window of `x`, inference mode."""
        x = self.check_input(x)
        chunks = [
            self.probabilities(self.forward(x[i : i + PREDICT_BATCH_SIZE]))
            for i in range(0, len(x), PREDICT_BATCH_SIZE)
        ]
        if not chunks:
            return np.zeros((0, 2), dtype=self.dtype)
        return np.concatenate(chunks)

    def predict(self, x: np.ndarray) -> np.ndarray:
        """Label index per window, ties resolve to anomaly."""
        proba = self.predict_proba(x)
        return (proba[:, 1] >= proba[:, 0]).astype(int)

    def __repr__(self) -> str:
        frozen = [k for k, v in self.freeze_flags.items() if v]
        return (
            f"InceptionNetwork(input={self.input_shape}, {self.architecture}, "
            f"head={self.head.n_out}, seed={self.seed}, frozen={frozen})"
        )


def forward(net: InceptionNetwork, window: np.ndarray) -> np.ndarray:
    """Probability vector [P(normal), P(anomaly)] of one [channels, samples] window."""
    if np.ndim(window) != 2:
        raise ShapeError(f"Expected one [channels, samples] window: {np.shape(window)}")
    return net.predict_proba(window)[0]
