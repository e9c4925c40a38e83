""" Deterministic synthetic EEG corpora with injected spike-wave bursts.

Background activity is 1/f noise plus a 10 Hz alpha rhythm on every channel.
Bursts are 3 Hz spike-wave trains shared by all channels (scaled per channel),
annotated exactly with their sample span.
"""
import logging
import os
from typing import List, NamedTuple, Optional, Sequence, Tuple

import numpy as np

from pprnet.data_loading.annotations import write_ppr_csv
from pprnet.data_loading.edf import write_edf
from pprnet.errors import ConfigurationError
from pprnet.signal.montage import COMMON_10_20_ELECTRODES, SOURCE_EXTRA_CHANNELS
from pprnet.signal.recording import AnnotationKind, AnnotationSpan, Domain, Recording
from pprnet.utilities.parallel import parallel_map

log = logging.getLogger(__name__)

# Minimum distance between a burst and the recording edges or the next burst.
BURST_MARGIN_S = 1.0
SPIKE_FRACTION = 0.2


class SynthConfig(NamedTuple):
    domain: Domain = Domain.TARGET
    n_subjects: int = 6
    duration_s: float = 300.0
    sampling_rate_hz: int = 500
    channel_names: Tuple[str, ...] = COMMON_10_20_ELECTRODES
    background_uv: float = 5.0
    alpha_uv: float = 10.0
    alpha_hz: float = 10.0
    burst_hz: float = 3.0
    amplitude_ratio: float = 5.0
    burst_duration_s: Tuple[float, float] = (2.0, 6.0)
    bursts_per_recording: int = 6
    seed: int = 0

    @classmethod
    def source(cls, **changes) -> "SynthConfig":
        """Seizure-domain preset: 21 channels at 256 Hz, 10 minutes per subject."""
        settings = dict(
            domain=Domain.SOURCE,
            duration_s=600.0,
            sampling_rate_hz=256,
            channel_names=COMMON_10_20_ELECTRODES + SOURCE_EXTRA_CHANNELS,
            burst_duration_s=(5.0, 15.0),
            bursts_per_recording=4,
        )
        settings.update(changes)
        return cls(**settings)

    @classmethod
    def target(cls, **changes) -> "SynthConfig":
        """PPR-domain preset: 19 channels at 500 Hz, 5 minutes per subject."""
        return cls(**changes)

    @property
    def subject_prefix(self) -> str:
        return "S" if self.domain == Domain.SOURCE else "P"

    @property
    def annotation_kind(self) -> AnnotationKind:
        if self.domain == Domain.SOURCE:
            return AnnotationKind.SEIZURE
        return AnnotationKind.PPR

    @property
    def background_rms(self) -> float:
        return float(np.sqrt(self.background_uv ** 2 + self.alpha_uv ** 2 / 2))

    def validate(self) -> None:
        if self.amplitude_ratio <= 1:
            raise ConfigurationError(
                f"amplitude_ratio must exceed 1, is {self.amplitude_ratio}."
            )
        shortest, longest = self.burst_duration_s
        if not 0 < shortest <= longest:
            raise ConfigurationError(
                f"Invalid burst_duration_s {self.burst_duration_s}."
            )
        if self.bursts_per_recording < 0 or self.n_subjects < 1:
            raise ConfigurationError(
                "Need at least one subject and no negative bursts."
            )
        if self.bursts_per_recording:
            slot = self.duration_s / self.bursts_per_recording
            if slot < longest + 2 * BURST_MARGIN_S:
                raise ConfigurationError(
                    f"{self.bursts_per_recording} bursts of up to {longest}s do not "
                    f"fit in a recording of {self.duration_s}s."
                )


def pink_noise(
    rng: np.random.Generator, shape: Tuple[int, int], rate: float
) -> np.ndarray:
    """Unit-variance noise with a 1/f power spectrum above 1 Hz, per row."""
    n_rows, n_samples = shape
    n_bins = n_samples // 2 + 1
    spectrum = rng.standard_normal((n_rows, n_bins)) + 1j * rng.standard_normal(
        (n_rows, n_bins)
    )
    frequencies = np.fft.rfftfreq(n_samples, d=1.0 / rate)
    scale = np.zeros_like(frequencies)
    above = frequencies >= 1.0
    scale[above] = 1.0 / np.sqrt(frequencies[above])
    noise = np.fft.irfft(spectrum * scale, n=n_samples, axis=1)
    return noise / noise.std(axis=1, keepdims=True)


def spike_wave(n_samples: int, rate: float, frequency: float) -> np.ndarray:
    """Spike-wave train: a sharp half-sine spike, then a slower opposite wave."""
    phase = (np.arange(n_samples) * frequency / rate) % 1.0
    spike = np.sin(np.pi * phase / SPIKE_FRACTION)
    wave = -0.6 * np.sin(np.pi * (phase - SPIKE_FRACTION) / (1 - SPIKE_FRACTION))
    return np.where(phase < SPIKE_FRACTION, spike, wave)


def _burst_spans(cfg: SynthConfig, rng: np.random.Generator) -> List[Tuple[int, int]]:
    """Non-overlapping (start, end) sample spans, one per equal slot."""
    rate = cfg.sampling_rate_hz
    spans = []
    slot = cfg.duration_s / max(cfg.bursts_per_recording, 1)
    for i in range(cfg.bursts_per_recording):
        duration = rng.uniform(*cfg.burst_duration_s)
        earliest = i * slot + BURST_MARGIN_S
        latest = (i + 1) * slot - BURST_MARGIN_S - duration
        start = rng.uniform(earliest, max(earliest, latest))
        spans.append((int(round(start * rate)), int(round((start + duration) * rate))))
    return spans


def generate_recording(cfg: SynthConfig, subject: int) -> Recording:
    rng = np.random.default_rng(np.random.SeedSequence([cfg.seed, subject]))
    rate = cfg.sampling_rate_hz
    n_channels = len(cfg.channel_names)
    n_samples = int(round(cfg.duration_s * rate))
    t = np.arange(n_samples) / rate

    data = cfg.background_uv * pink_noise(rng, (n_channels, n_samples), rate)
    alpha_phase = rng.uniform(0, 2 * np.pi, size=(n_channels, 1))
    data += cfg.alpha_uv * np.sin(2 * np.pi * cfg.alpha_hz * t + alpha_phase)

    gains = rng.uniform(0.5, 1.0, size=(n_channels, 1))
    amplitude = cfg.amplitude_ratio * cfg.background_rms
    annotations = []
    for start, end in _burst_spans(cfg, rng):
        template = spike_wave(end - start, rate, cfg.burst_hz)
        data[:, start:end] += amplitude * gains * template
        annotations.append(
            AnnotationSpan(start / rate, end / rate, cfg.annotation_kind)
        )

    subject_id = f"{cfg.subject_prefix}{subject + 1:02d}"
    return Recording(
        subject_id=subject_id,
        channel_names=cfg.channel_names,
        data=data,
        sampling_rate_hz=rate,
        annotations=annotations,
        domain=cfg.domain,
        recording_id=subject_id,
    )


def generate(
    cfg: SynthConfig = SynthConfig(), n_jobs: Optional[int] = 1
) -> List[Recording]:
    """One recording per subject with its burst annotations, deterministic per seed.

    Raises
    ------
    ConfigurationError
        If the amplitude ratio is not above 1 or the bursts do not fit.
    """
    cfg.validate()
    recordings = parallel_map(
        lambda subject: generate_recording(cfg, subject), range(cfg.n_subjects), n_jobs
    )
    log.info(
        f"Generated {len(recordings)} {cfg.domain.value} recordings with "
        f"{sum(len(r.annotations) for r in recordings)} bursts (seed {cfg.seed})."
    )
    return recordings


def write_corpus(recordings: Sequence[Recording], directory: str) -> List[str]:
    """Write each recording as EDF with an annotation CSV next to it."""
    os.makedirs(directory, exist_ok=True)
    paths = []
    for rec in recordings:
        path = os.path.join(directory, f"{rec.recording_id}.edf")
        write_edf(path, rec)
        csv_path = os.path.join(directory, f"{rec.recording_id}.csv")
        write_ppr_csv(csv_path, rec.annotations)
        paths.append(path)
    return paths
