""" Chains the unification steps that bring both domains to 18 x 500 windows. """
import logging
from functools import partial
from typing import List, NamedTuple, Optional, Sequence, Tuple

from pprnet.signal.montage import (
    DEFAULT_BIPOLAR_PAIRS,
    SOURCE_EXTRA_CHANNELS,
    unify_channels,
)
from pprnet.signal.recording import Domain, Recording, Window, WindowingConfig
from pprnet.signal.resampling import resample_cubic_spline
from pprnet.signal.windowing import segment_windows
from pprnet.utilities.parallel import parallel_map

log = logging.getLogger(__name__)


class PreprocessingConfig(NamedTuple):
    target_rate_hz: int = 500
    window_length_s: float = 1.0
    source_overlap: float = 0.0
    target_overlap: float = 0.9
    drop_channels: Tuple[str, ...] = SOURCE_EXTRA_CHANNELS
    bipolar_pairs: Tuple[Tuple[str, str], ...] = DEFAULT_BIPOLAR_PAIRS

    def windowing(self, domain: Domain) -> WindowingConfig:
        overlap = (
            self.source_overlap if domain == Domain.SOURCE else self.target_overlap
        )
        return WindowingConfig(self.window_length_s, overlap)


def preprocess_recording(
    rec: Recording, cfg: PreprocessingConfig = PreprocessingConfig()
) -> Recording:
    """Unify channels and montage, then resample to the common rate."""
    rec = unify_channels(rec, cfg.bipolar_pairs, cfg.drop_channels)
    if rec.sampling_rate_hz != cfg.target_rate_hz:
        rec = resample_cubic_spline(rec, cfg.target_rate_hz)
    return rec


def recording_to_windows(
    rec: Recording, cfg: PreprocessingConfig = PreprocessingConfig()
) -> List[Window]:
    """Preprocess `rec` and cut it into labeled windows for its domain."""
    rec = preprocess_recording(rec, cfg)
    windows = segment_windows(rec, cfg.windowing(rec.domain))
    log.debug(f"{rec.recording_id}: {len(windows)} windows.")
    return windows


def corpus_to_windows(
    recordings: Sequence[Recording],
    cfg: PreprocessingConfig = PreprocessingConfig(),
    n_jobs: Optional[int] = 1,
) -> List[Window]:
    """Windows of all recordings, preprocessed on up to `n_jobs` threads."""
    per_recording = parallel_map(
        partial(recording_to_windows, cfg=cfg), recordings, n_jobs
    )
    return [window for windows in per_recording for window in windows]
