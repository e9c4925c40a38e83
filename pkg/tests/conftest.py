from typing import Optional

import numpy as np
import pytest

from pprnet.signal.montage import COMMON_10_20_ELECTRODES
from pprnet.signal.recording import Label, PprType, Recording, Window


@pytest.fixture
def rng():
    return np.random.default_rng(0)


@pytest.fixture
def referential_recording(rng):
    """Ten seconds of white noise on the 19 common electrodes at 256 Hz."""
    data = rng.normal(scale=10.0, size=(len(COMMON_10_20_ELECTRODES), 2560))
    return Recording("S01", COMMON_10_20_ELECTRODES, data, 256)


def make_window(
    value: float = 0.0,
    label: Label = Label.NORMAL,
    subject_id: str = "P01",
    start_s: float = 0.0,
    ppr_type: Optional[PprType] = None,
    shape=(2, 20),
    rng: Optional[np.random.Generator] = None,
) -> Window:
    if rng is not None:
        data = rng.normal(size=shape)
    else:
        data = np.full(shape, value, dtype=np.float64)
    if label == Label.ANOMALY and ppr_type is None:
        ppr_type = PprType.INTERIOR_C
    return Window(data, label, subject_id, start_s, ppr_type=ppr_type)


@pytest.fixture
def window_factory():
    return make_window


@pytest.fixture
def separable_windows():
    """Windows of four subjects; anomalies carry a 3 Hz burst, normals do not."""
    rng = np.random.default_rng(1)
    t = np.arange(64) / 64
    windows = []
    for subject in ["P01", "P02", "P03", "P04"]:
        for k in range(12):
            anomaly = k % 3 == 0
            data = rng.normal(scale=0.2, size=(2, 64))
            if anomaly:
                data += 3.0 * np.sin(2 * np.pi * 3 * t)
            windows.append(
                Window(
                    data,
                    Label.ANOMALY if anomaly else Label.NORMAL,
                    subject,
                    start_s=k * 0.5,
                    sampling_rate_hz=64,
                    ppr_type=PprType.INTERIOR_C if anomaly else None,
                )
            )
    return windows
