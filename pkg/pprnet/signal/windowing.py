""" Sliding windows, their labels and model-input formatting. """
import logging
import math
from typing import List, NamedTuple, Optional, Sequence, Tuple

import numpy as np

from pprnet.signal.recording import (
    AnnotationKind,
    AnnotationSpan,
    Label,
    PprType,
    Recording,
    Window,
    WindowingConfig,
)

log = logging.getLogger(__name__)

NORMALIZATION_EPSILON = 1e-8
# Guards the sample-index computation against float noise in times like 0.1 * 3.
_TIME_TOLERANCE = 1e-9


def window_count(n_samples: int, window_samples: int, stride_samples: int) -> int:
    """Number of complete windows, the trailing partial window is discarded."""
    if n_samples < window_samples:
        return 0
    return (n_samples - window_samples) // stride_samples + 1


def segment_windows(
    rec: Recording, cfg: WindowingConfig = WindowingConfig(), dtype=np.float32
) -> List[Window]:
    """Cut `rec` into labeled sliding windows.

    Parameters
    ----------
    rec: Recording
        The (preprocessed) recording.
    cfg: WindowingConfig
        Window length and overlap.
    dtype: numpy dtype (default=np.float32)
        Data type of the window samples.

    Returns
    -------
    List[Window]
        floor((S - W) / stride) + 1 windows, labeled by `label_window`.
        Empty if the recording is shorter than one window.
    """
    rate = rec.sampling_rate_hz
    width = cfg.window_samples(rate)
    stride = cfg.stride_samples(rate)
    n_windows = window_count(rec.n_samples, width, stride)
    if n_windows == 0:
        log.warning(
            f"{rec.recording_id} ({rec.duration_s}s) is shorter than one window "
            f"({cfg.window_length_s}s), no windows produced."
        )
        return []

    windows = []
    for k in range(n_windows):
        start = k * stride
        window = Window(
            data=np.array(rec.data[:, start : start + width], dtype=dtype),
            label=Label.NORMAL,
            subject_id=rec.subject_id,
            start_s=start / rate,
            sampling_rate_hz=rate,
            window_id=f"{rec.recording_id}@{start}",
        )
        window.label, window.ppr_type = label_window(window, rec.annotations)
        windows.append(window)
    return windows


def overlap_samples(window: Window, span: AnnotationSpan) -> int:
    """Number of window samples whose timestamp lies in [start_s, end_s)."""
    rate = window.sampling_rate_hz
    n = window.data.shape[1]
    first = math.ceil((span.start_s - window.start_s) * rate - _TIME_TOLERANCE)
    last = math.ceil((span.end_s - window.start_s) * rate - _TIME_TOLERANCE)
    return max(0, min(last, n) - max(first, 0))


def window_type(window: Window, span: AnnotationSpan) -> PprType:
    """Classify how `window` cuts `span`, given that they overlap."""
    ws, we = window.start_s, window.end_s
    if span.start_s <= ws + _TIME_TOLERANCE and span.end_s >= we - _TIME_TOLERANCE:
        return PprType.INTERIOR_C
    if span.start_s >= ws - _TIME_TOLERANCE and span.end_s <= we + _TIME_TOLERANCE:
        return PprType.WHOLE_D
    if span.start_s > ws:
        return PprType.ONSET_A
    return PprType.OFFSET_B


def label_window(
    window: Window, annotations: Sequence[AnnotationSpan]
) -> Tuple[Label, Optional[PprType]]:
    """Label a window from the annotation spans of its recording.

    A window is an anomaly iff at least one sample falls inside a span.
    PPR spans also determine the window type; when several spans overlap the
    window, the span with the largest overlap decides (earliest start on ties).
    Seizure spans never produce a window type.
    """
    best: Optional[Tuple[int, float, AnnotationSpan]] = None
    for span in annotations:
        n = overlap_samples(window, span)
        if n < 1:
            continue
        if best is None or (n, -span.start_s) > (best[0], -best[1]):
            best = (n, span.start_s, span)
    if best is None:
        return Label.NORMAL, None
    span = best[2]
    if span.kind != AnnotationKind.PPR:
        return Label.ANOMALY, None
    return Label.ANOMALY, window_type(window, span)


def normalize_window(data: np.ndarray, epsilon: float = NORMALIZATION_EPSILON):
    """Z-normalize every channel (last axis) to mean 0 and unit variance."""
    mean = data.mean(axis=-1, keepdims=True)
    std = data.std(axis=-1, keepdims=True)
    return (data - mean) / (std + epsilon)


def windows_to_arrays(
    windows: Sequence[Window], normalize: bool = True, dtype=np.float32
) -> Tuple[np.ndarray, np.ndarray]:
    """Stack windows into x of shape [N, C, T] and integer labels y of shape [N]."""
    if len(windows) == 0:
        raise ValueError("Can not stack an empty list of windows.")
    x = np.stack([w.data for w in windows]).astype(dtype, copy=False)
    if normalize:
        x = normalize_window(x).astype(dtype, copy=False)
    y = np.array([int(w.label) for w in windows], dtype=np.int64)
    return x, y


class CorpusBalance(NamedTuple):
    total: int
    anomalies: int

    @property
    def anomaly_percentage(self) -> float:
        return anomaly_fraction(self.anomalies, self.total) * 100

    def __str__(self) -> str:
        return (
            f"{self.total:,} windows, {self.anomalies:,} anomalies "
            f"({self.anomaly_percentage:.2f}%)"
        )


def anomaly_fraction(anomalies: int, total: int) -> float:
    if total <= 0:
        raise ValueError(f"Total window count must be positive, got {total}.")
    return anomalies / total


def corpus_balance(windows: Sequence[Window]) -> CorpusBalance:
    return CorpusBalance(len(windows), sum(w.is_anomaly for w in windows))
