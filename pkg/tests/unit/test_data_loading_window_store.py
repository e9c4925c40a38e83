import os
import struct

import numpy as np
import pytest

from pprnet.data_loading.window_store import (
    HEADER_BYTES,
    read_window_store,
    write_window_store,
)
from pprnet.errors import WindowStoreError
from pprnet.signal.recording import Label, PprType, Window


def _windows(rng):
    def window(label, subject, start_s, ppr_type=None, window_id=None):
        data = rng.normal(size=(3, 10))
        return Window(data, label, subject, start_s, 10, ppr_type, window_id)

    return [
        window(Label.NORMAL, "P02", 0.0),
        window(Label.ANOMALY, "P01", 0.5, PprType.ONSET_A),
        window(Label.ANOMALY, "P01", 1.0, PprType.WHOLE_D),
        window(Label.NORMAL, "P03", 2.5, window_id="x+y"),
    ]


@pytest.fixture
def store(tmp_path, rng):
    path = str(tmp_path / "windows.pprw")
    windows = _windows(rng)
    write_window_store(path, windows)
    return path, windows


def test_round_trip(store):
    path, windows = store
    read = read_window_store(path)
    assert len(windows) == len(read)
    for original, restored in zip(windows, read):
        np.testing.assert_array_equal(original.data.astype(np.float32), restored.data)
        assert original.label == restored.label
        assert original.ppr_type == restored.ppr_type
        assert original.subject_id == restored.subject_id
        assert original.start_s == restored.start_s
        assert original.window_id == restored.window_id
        assert 10 == restored.sampling_rate_hz


def test_empty_store_is_only_the_header(tmp_path):
    path = str(tmp_path / "empty.pprw")
    write_window_store(path, [])
    assert 32 == HEADER_BYTES == os.path.getsize(path)
    assert [] == read_window_store(path)


def _corrupt(path: str, offset: int, value: bytes) -> None:
    with open(path, "r+b") as fh:
        fh.seek(offset)
        fh.write(value)


def test_wrong_magic(store):
    path, _ = store
    _corrupt(path, 0, b"XXXX")
    with pytest.raises(WindowStoreError) as error:
        read_window_store(path)
    assert 0 == error.value.offset


def test_wrong_version(store):
    path, _ = store
    _corrupt(path, 4, struct.pack("<H", 2))
    with pytest.raises(WindowStoreError) as error:
        read_window_store(path)
    assert 4 == error.value.offset


def test_invalid_label(store):
    path, _ = store
    # Subject table: three subjects of 3 bytes, each with a 2-byte length.
    labels_offset = HEADER_BYTES + 3 * (2 + 3)
    _corrupt(path, labels_offset + 2, b"\x07")
    with pytest.raises(WindowStoreError) as error:
        read_window_store(path)
    assert labels_offset + 2 == error.value.offset


def test_truncated_store(store):
    path, _ = store
    with open(path, "rb") as fh:
        raw = fh.read()
    with open(path, "wb") as fh:
        fh.write(raw[:-3])
    with pytest.raises(WindowStoreError) as error:
        read_window_store(path)
    assert "truncated" in str(error.value)
    assert str(error.value).startswith(f"{path}: Store truncated")


def test_trailing_bytes(store):
    path, _ = store
    with open(path, "ab") as fh:
        fh.write(b"\x00")
    with pytest.raises(WindowStoreError):
        read_window_store(path)


def test_write_rejects_mixed_shapes_and_nan(tmp_path, rng):
    path = str(tmp_path / "windows.pprw")
    mixed = [
        Window(rng.normal(size=(3, 10)), Label.NORMAL, "P01", 0.0, 10),
        Window(rng.normal(size=(3, 12)), Label.NORMAL, "P01", 1.0, 10),
    ]
    with pytest.raises(WindowStoreError):
        write_window_store(path, mixed)

    data = np.zeros((3, 10))
    data[1, 4] = np.nan
    with pytest.raises(WindowStoreError):
        write_window_store(path, [Window(data, Label.NORMAL, "P01", 0.0, 10)])
