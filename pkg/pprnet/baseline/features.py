""" Handcrafted statistical and spectral features of EEG windows. """
import logging
from typing import List, Sequence

import numpy as np
import pandas as pd
from scipy.signal import welch
from scipy.stats import kurtosis, skew
from sklearn.base import BaseEstimator, TransformerMixin

log = logging.getLogger(__name__)

FEATURE_NAMES = (
    "kurtosis",
    "skewness",
    "variance",
    "sum_abs",
    "line_length",
    "max_power",
    "spectral_centroid",
    "total_power",
)
WELCH_SEGMENT = 256


def channel_features(x: np.ndarray, sampling_rate_hz: float) -> np.ndarray:
    """Features along the last axis of `x`, stacked on a new last axis.

    Kurtosis is excess kurtosis (0 for a normal distribution). Kurtosis and
    skewness of a constant signal are defined as 0. The spectral features use a
    Welch periodogram with Hann segments of 256 samples (or the whole signal if
    shorter) and 50% overlap.
    """
    x = np.asarray(x, dtype=np.float64)
    variance = x.var(axis=-1)
    constant = variance <= np.finfo(np.float64).tiny
    with np.errstate(all="ignore"):
        excess_kurtosis = np.where(constant, 0.0, kurtosis(x, axis=-1, fisher=True))
        skewness = np.where(constant, 0.0, skew(x, axis=-1))

    segment = min(WELCH_SEGMENT, x.shape[-1])
    frequencies, density = welch(
        x,
        fs=sampling_rate_hz,
        window="hann",
        nperseg=segment,
        noverlap=segment // 2,
        axis=-1,
    )
    power = density.sum(axis=-1)
    safe_power = np.where(power > 0, power, 1.0)
    centroid = np.where(power > 0, (density * frequencies).sum(axis=-1) / safe_power, 0)
    resolution = frequencies[1] - frequencies[0] if len(frequencies) > 1 else 1.0

    return np.stack(
        [
            excess_kurtosis,
            skewness,
            variance,
            np.abs(x).sum(axis=-1),
            np.abs(np.diff(x, axis=-1)).sum(axis=-1),
            density.max(axis=-1),
            centroid,
            power * resolution,
        ],
        axis=-1,
    )


def extract_features(window: np.ndarray, sampling_rate_hz: float = 500) -> np.ndarray:
    """Feature vector of one [channels, samples] window, channel-major."""
    return channel_features(window, sampling_rate_hz).reshape(-1)


def feature_names(n_channels: int) -> List[str]:
    return [f"ch{c + 1}_{name}" for c in range(n_channels) for name in FEATURE_NAMES]


class FeatureExtractor(BaseEstimator, TransformerMixin):
    """Maps windows [N, channels, samples] to feature rows [N, 8 * channels]."""

    def __init__(self, sampling_rate_hz: float = 500):
        self.sampling_rate_hz = sampling_rate_hz

    def fit(self, x, y=None):
        return self

    def transform(self, x) -> np.ndarray:
        x = np.asarray(x)
        if x.ndim != 3:
            raise ValueError(f"Expected windows [N, channels, samples], got {x.shape}.")
        features = channel_features(x, self.sampling_rate_hz).reshape(len(x), -1)
        if not np.isfinite(features).all():
            raise ValueError("Feature extraction produced non-finite values.")
        return features


def write_feature_csv(
    path: str, features: np.ndarray, n_channels: int, window_ids: Sequence[str]
) -> None:
    frame = pd.DataFrame(features, columns=feature_names(n_channels))
    frame.insert(0, "window_id", list(window_ids))
    frame.to_csv(path, index=False)
