""" One-hidden-layer neural network classifier on projected features. """
import logging
from typing import Dict, Iterator, Tuple

import numpy as np
from scipy.special import expit
from sklearn.base import BaseEstimator, ClassifierMixin
from sklearn.utils.validation import check_array, check_is_fitted, check_X_y

from pprnet.errors import SingleClassError
from pprnet.networks.layers import Dense, Layer, ReLU
from pprnet.networks.optimizer import Adam

log = logging.getLogger(__name__)


class DenseNetwork:
    """x -> ReLU(x W1 + b1) W2 + b2, one logit per row."""

    def __init__(self, n_in: int, hidden_size: int, seed: int = 0, dtype=np.float64):
        rng = np.random.default_rng(seed)
        self.hidden = Dense(n_in, hidden_size, rng, dtype)
        self.relu = ReLU()
        self.output = Dense(hidden_size, 1, rng, dtype)

    def layers(self) -> Dict[str, Layer]:
        return {"hidden": self.hidden, "relu": self.relu, "output": self.output}

    def forward(self, x: np.ndarray, training: bool = False) -> np.ndarray:
        for layer in self.layers().values():
            x = layer.forward(x, training)
        return x[:, 0]

    def backward(self, dlogits: np.ndarray) -> None:
        d = self.output.backward(dlogits[:, None], True)
        self.hidden.backward(self.relu.backward(d), False)

    def parameters(self, trainable_only: bool = False) -> Iterator[Tuple]:
        for name, layer in self.layers().items():
            for key, value in layer.params.items():
                yield f"{name}.{key}", value, layer.grads.get(key)


def binary_cross_entropy(logits: np.ndarray, y: np.ndarray) -> Tuple[float, np.ndarray]:
    """Mean loss and its gradient w.r.t. the logits."""
    loss = float(np.mean(np.logaddexp(0, logits) - y * logits))
    return loss, (expit(logits) - y) / len(y)


class DenseNetClassifier(BaseEstimator, ClassifierMixin):
    """Dense network with one ReLU hidden layer and a sigmoid output, trained with Adam.

    Parameters
    ----------
    hidden_size: int (default=10)
        Units in the hidden layer.
    learning_rate: float (default=1e-3)
    max_epochs: int (default=200)
    batch_size: int (default=32)
    seed: int (default=0)
        Determines initialization and batch order.
    """

    def __init__(
        self,
        hidden_size: int = 10,
        learning_rate: float = 1e-3,
        max_epochs: int = 200,
        batch_size: int = 32,
        seed: int = 0,
    ):
        self.hidden_size = hidden_size
        self.learning_rate = learning_rate
        self.max_epochs = max_epochs
        self.batch_size = batch_size
        self.seed = seed

    def fit(self, x, y):
        x, y = check_X_y(x, y, dtype=np.float64)
        self.classes_ = np.unique(y)
        if len(self.classes_) != 2:
            raise SingleClassError(
                f"Need exactly two classes to train, found {self.classes_.tolist()}."
            )
        target = (y == self.classes_[1]).astype(np.float64)
        self.network_ = DenseNetwork(x.shape[1], self.hidden_size, self.seed)
        optimizer = Adam(self.learning_rate)
        rng = np.random.default_rng(self.seed)
        self.loss_curve_ = []
        for _ in range(self.max_epochs):
            order = rng.permutation(len(x))
            total = 0.0
            for start in range(0, len(x), self.batch_size):
                index = order[start : start + self.batch_size]
                logits = self.network_.forward(x[index], training=True)
                loss, dlogits = binary_cross_entropy(logits, target[index])
                self.network_.backward(dlogits)
                optimizer.step(self.network_)
                total += loss * len(index)
            self.loss_curve_.append(total / len(x))
        log.debug(
            f"Dense network H={self.hidden_size} final loss "
            f"{self.loss_curve_[-1] if self.loss_curve_ else float('nan'):.4f}."
        )
        return self

    def predict_proba(self, x) -> np.ndarray:
        check_is_fitted(self, "network_")
        x = check_array(x, dtype=np.float64)
        p = expit(self.network_.forward(x))
        return np.stack([1 - p, p], axis=1)

    def predict(self, x) -> np.ndarray:
        p = self.predict_proba(x)
        return self.classes_[(p[:, 1] >= p[:, 0]).astype(int)]


def train_dense(
    x: np.ndarray, y: np.ndarray, hidden_size: int, seed: int = 0, max_epochs: int = 200
) -> DenseNetClassifier:
    return DenseNetClassifier(hidden_size, max_epochs=max_epochs, seed=seed).fit(x, y)
