from enum import Enum
from typing import NamedTuple, Optional

import numpy as np
from sklearn.metrics import confusion_matrix


class MetricName(Enum):
    """Metrics reported per subject; the positive class is anomaly."""

    ACC = "ACC"  #: (tp + tn) / all windows
    SENS = "SENS"  #: tp / (tp + fn)
    SPEC = "SPEC"  #: tn / (tn + fp)


class ConfusionCounts(NamedTuple):
    tp: int = 0
    tn: int = 0
    fp: int = 0
    fn: int = 0

    @property
    def total(self) -> int:
        return self.tp + self.tn + self.fp + self.fn

    @property
    def positives(self) -> int:
        return self.tp + self.fn

    @property
    def negatives(self) -> int:
        return self.tn + self.fp

    @classmethod
    def from_predictions(cls, y_true, y_pred) -> "ConfusionCounts":
        """Counts of label indices, 1 being anomaly."""
        if len(y_true) == 0:
            return cls()
        tn, fp, fn, tp = confusion_matrix(y_true, y_pred, labels=[0, 1]).ravel()
        return cls(tp=int(tp), tn=int(tn), fp=int(fp), fn=int(fn))

    def __add__(self, other):  # type: ignore[override]
        return ConfusionCounts(*(a + b for a, b in zip(self, other)))


class Metrics(NamedTuple):
    """ACC, SENS and SPEC; None where the denominator is zero."""

    acc: Optional[float]
    sens: Optional[float]
    spec: Optional[float]

    def get(self, name: MetricName) -> Optional[float]:
        return getattr(self, name.value.lower())


def _ratio(numerator: int, denominator: int) -> Optional[float]:
    return numerator / denominator if denominator > 0 else None


def metrics(c: ConfusionCounts) -> Metrics:
    if min(c) < 0:
        raise ValueError(f"Confusion counts must be non-negative: {c}.")
    return Metrics(
        acc=_ratio(c.tp + c.tn, c.total),
        sens=_ratio(c.tp, c.positives),
        spec=_ratio(c.tn, c.negatives),
    )


def undefined_to_nan(value: Optional[float]) -> float:
    return np.nan if value is None else value
