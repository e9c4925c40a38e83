""" Domain types for EEG recordings and the windows cut from them. """
import math
from enum import Enum, IntEnum
from typing import List, NamedTuple, Optional, Sequence

import numpy as np


class Montage(Enum):
    REFERENTIAL = "referential"
    AVERAGE = "average"
    BIPOLAR = "bipolar"


class Domain(Enum):
    """Source: seizure corpus used for pretraining. Target: photosensitivity."""

    SOURCE = "source"
    TARGET = "target"


class AnnotationKind(Enum):
    SEIZURE = "seizure"
    PPR = "ppr"


class Label(IntEnum):
    """Window label, the integer value doubles as class index of the networks."""

    NORMAL = 0
    ANOMALY = 1


class PprType(Enum):
    """How a sliding window cuts a PPR span."""

    ONSET_A = "a"  #: the span starts inside the window and ends after it
    OFFSET_B = "b"  #: the span starts before the window and ends inside it
    INTERIOR_C = "c"  #: the window lies entirely inside the span
    WHOLE_D = "d"  #: the span lies entirely inside the window


class AnnotationSpan(NamedTuple):
    start_s: float
    end_s: float
    kind: AnnotationKind = AnnotationKind.PPR

    def validate(self, duration_s: Optional[float] = None) -> None:
        if not self.start_s < self.end_s:
            raise ValueError(
                f"Annotation must have start < end, got [{self.start_s}, {self.end_s}]."
            )
        if self.start_s < 0:
            raise ValueError(f"Annotation starts before 0 s: {self.start_s}.")
        if duration_s is not None and self.end_s > duration_s + 1e-9:
            raise ValueError(
                f"Annotation [{self.start_s}, {self.end_s}] ends after the "
                f"recording ({duration_s} s)."
            )


class Recording:
    """A multichannel EEG signal in microvolts."""

    def __init__(
        self,
        subject_id: str,
        channel_names: Sequence[str],
        data: np.ndarray,
        sampling_rate_hz: int,
        montage: Montage = Montage.REFERENTIAL,
        annotations: Optional[List[AnnotationSpan]] = None,
        domain: Domain = Domain.TARGET,
        recording_id: Optional[str] = None,
    ):
        """

        Parameters
        ----------
        subject_id: str
            Opaque id of the subject, the unit of leave-one-subject-out splits.
        channel_names: Sequence[str]
            Electrode (or derivation) label of each row in `data`.
        data: np.ndarray
            Matrix of shape [channels, samples] in microvolts.
        sampling_rate_hz: int
            Samples per second, must be positive.
        montage: Montage (default=Montage.REFERENTIAL)
        annotations: List[AnnotationSpan], optional (default=None)
            Seizure or PPR spans, in seconds from the start of the recording.
        domain: Domain (default=Domain.TARGET)
        recording_id: str, optional (default=None)
            Distinguishes several recordings of one subject. Defaults to `subject_id`.
        """
        data = np.asarray(data)
        if data.ndim != 2:
            raise ValueError(f"`data` must be [channels, samples], got {data.shape}.")
        if data.shape[0] != len(channel_names):
            raise ValueError(
                f"{len(channel_names)} channel names for {data.shape[0]} channels."
            )
        if sampling_rate_hz <= 0:
            raise ValueError(f"sampling_rate_hz must be positive: {sampling_rate_hz}.")

        self.subject_id = subject_id
        self.recording_id = recording_id if recording_id is not None else subject_id
        self.channel_names = list(channel_names)
        self.data = data
        self.sampling_rate_hz = sampling_rate_hz
        self.montage = montage
        self.domain = domain
        self.annotations = list(annotations) if annotations else []
        for span in self.annotations:
            span.validate(self.duration_s)

    @property
    def n_channels(self) -> int:
        return self.data.shape[0]

    @property
    def n_samples(self) -> int:
        return self.data.shape[1]

    @property
    def duration_s(self) -> float:
        return self.n_samples / self.sampling_rate_hz

    def channel_index(self, name: str) -> Optional[int]:
        """Index of channel `name`, matched case-insensitively, or None."""
        wanted = name.strip().upper()
        for i, channel in enumerate(self.channel_names):
            if channel.strip().upper() == wanted:
                return i
        return None

    def replace(self, **changes) -> "Recording":
        """Copy of this recording with the given constructor arguments replaced."""
        arguments = dict(
            subject_id=self.subject_id,
            channel_names=self.channel_names,
            data=self.data,
            sampling_rate_hz=self.sampling_rate_hz,
            montage=self.montage,
            annotations=self.annotations,
            domain=self.domain,
            recording_id=self.recording_id,
        )
        arguments.update(changes)
        return Recording(**arguments)

    def __repr__(self) -> str:
        return (
            f"Recording({self.recording_id}, {self.n_channels}ch x {self.n_samples}, "
            f"{self.sampling_rate_hz}Hz, {self.montage.value})"
        )


class Window:
    """Fixed-size [channels, samples] block cut from a recording."""

    def __init__(
        self,
        data: np.ndarray,
        label: Label,
        subject_id: str,
        start_s: float,
        sampling_rate_hz: int = 500,
        ppr_type: Optional[PprType] = None,
        window_id: Optional[str] = None,
    ):
        if np.ndim(data) != 2:
            raise ValueError(
                f"Window data must be [channels, samples]: {np.shape(data)}"
            )
        if ppr_type is not None and label != Label.ANOMALY:
            raise ValueError("Only anomaly windows carry a PPR window type.")
        self.data = data
        self.label = Label(label)
        self.subject_id = subject_id
        self.start_s = start_s
        self.sampling_rate_hz = sampling_rate_hz
        self.ppr_type = ppr_type
        if window_id is None:
            window_id = f"{subject_id}@{round(start_s * sampling_rate_hz)}"
        self.window_id = window_id

    @property
    def shape(self):
        return self.data.shape

    @property
    def end_s(self) -> float:
        """End of the window in seconds, exclusive."""
        return self.start_s + self.data.shape[1] / self.sampling_rate_hz

    @property
    def is_anomaly(self) -> bool:
        return self.label == Label.ANOMALY

    def __repr__(self) -> str:
        kind = f", type {self.ppr_type.value}" if self.ppr_type else ""
        return f"Window({self.window_id}, {self.label.name}{kind})"


def round_half_away(value: float) -> int:
    """Round to the nearest integer, halves away from zero."""
    return int(math.copysign(math.floor(abs(value) + 0.5), value))


class WindowingConfig(NamedTuple):
    window_length_s: float = 1.0
    overlap_fraction: float = 0.0

    def window_samples(self, sampling_rate_hz: int) -> int:
        return round_half_away(self.window_length_s * sampling_rate_hz)

    def stride_samples(self, sampling_rate_hz: int) -> int:
        if not 0.0 <= self.overlap_fraction < 1.0:
            raise ValueError(
                f"overlap_fraction must be in [0, 1), got {self.overlap_fraction}."
            )
        stride = self.window_length_s * sampling_rate_hz * (1 - self.overlap_fraction)
        return max(1, round_half_away(stride))
