from typing import Dict, Tuple

import numpy as np


class Adam:
    """Adam with bias correction; moment buffers are keyed by parameter name."""

    def __init__(
        self,
        learning_rate: float = 1e-3,
        betas: Tuple[float, float] = (0.9, 0.999),
        epsilon: float = 1e-8,
    ):
        if not learning_rate > 0:
            raise ValueError(f"learning_rate must be positive, is {learning_rate}.")
        self.learning_rate = learning_rate
        self.beta1, self.beta2 = betas
        self.epsilon = epsilon
        self.step_count = 0
        self._first: Dict[str, np.ndarray] = {}
        self._second: Dict[str, np.ndarray] = {}

    def step(self, network) -> None:
        """Update the unfrozen parameters of `network` in place from their gradients."""
        self.step_count += 1
        t = self.step_count
        correction = np.sqrt(1 - self.beta2 ** t) / (1 - self.beta1 ** t)
        scale = self.learning_rate * correction
        for name, param, grad in network.parameters(trainable_only=True):
            if grad is None:
                continue
            m = self._first.setdefault(name, np.zeros_like(param))
            v = self._second.setdefault(name, np.zeros_like(param))
            m *= self.beta1
            m += (1 - self.beta1) * grad
            v *= self.beta2
            v += (1 - self.beta2) * grad * grad
            param -= (scale * m / (np.sqrt(v) + self.epsilon)).astype(param.dtype)
