import logging

import numpy as np
from scipy.interpolate import CubicSpline

from pprnet.errors import InsufficientDataError
from pprnet.signal.recording import Recording, round_half_away

log = logging.getLogger(__name__)

MIN_SPLINE_SAMPLES = 4


def sample_times(n_samples: int, sampling_rate_hz: float) -> np.ndarray:
    return np.arange(n_samples) / sampling_rate_hz


def fit_spline(rec: Recording) -> CubicSpline:
    """Natural cubic spline through every channel of `rec`, over time in seconds."""
    if rec.n_samples < MIN_SPLINE_SAMPLES:
        raise InsufficientDataError(
            f"Cubic spline resampling needs at least {MIN_SPLINE_SAMPLES} samples "
            f"per channel, {rec.recording_id} has {rec.n_samples}."
        )
    times = sample_times(rec.n_samples, rec.sampling_rate_hz)
    return CubicSpline(times, rec.data, axis=1, bc_type="natural")


def resample_cubic_spline(rec: Recording, target_rate_hz: int) -> Recording:
    """Resample every channel to `target_rate_hz` with a natural cubic spline.

    The new grid covers the same duration and holds
    round(duration * target_rate_hz) samples.
    """
    if target_rate_hz <= 0:
        raise ValueError(f"target_rate_hz must be positive, got {target_rate_hz}.")
    spline = fit_spline(rec)
    if target_rate_hz == rec.sampling_rate_hz:
        return rec.replace(data=rec.data.copy())

    n_target = round_half_away(rec.duration_s * target_rate_hz)
    data = spline(sample_times(n_target, target_rate_hz))
    log.debug(
        f"{rec.recording_id}: resampled {rec.sampling_rate_hz}Hz -> {target_rate_hz}Hz"
        f" ({rec.n_samples} -> {n_target} samples)."
    )
    return rec.replace(data=data, sampling_rate_hz=target_rate_hz)
