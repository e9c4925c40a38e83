import numpy as np
import pytest

from pprnet.data_loading.edf import (
    FIXED_HEADER_BYTES,
    parse_edf,
    parse_edf_header,
    read_edf,
    write_edf,
)
from pprnet.errors import EdfParseError
from pprnet.signal.recording import Domain, Recording


def _random_recording(rng, n_samples: int = 256, rate: int = 128) -> Recording:
    scale = 10 ** rng.uniform(-1, 3)
    data = rng.normal(scale=scale, size=(4, n_samples)) + rng.uniform(-50, 50)
    return Recording("S01", ["Fp1", "F7", "T7", "P7"], data, rate)


def test_round_trip_within_one_quantum(tmp_path):
    rng = np.random.default_rng(0)
    path = str(tmp_path / "rec.edf")
    for i in range(100):
        n_samples = 256 if i % 2 else 300  # one record per second or a single record
        rec = _random_recording(rng, n_samples)
        header = write_edf(path, rec)

        read = read_edf(path)

        assert rec.channel_names == read.channel_names
        assert rec.sampling_rate_hz == read.sampling_rate_hz
        assert rec.data.shape == read.data.shape
        for signal, original, restored in zip(header.signals, rec.data, read.data):
            assert np.abs(original - restored).max() <= signal.quantum


def test_read_edf_metadata(tmp_path, rng):
    path = str(tmp_path / "p07_session.edf")
    rec = _random_recording(rng)
    write_edf(path, rec)
    read = read_edf(path, domain=Domain.SOURCE)
    assert "S01" == read.subject_id
    assert "p07_session" == read.recording_id
    assert Domain.SOURCE == read.domain

    write_edf(path, rec, patient_id="X X X X")
    assert "p07_session" == read_edf(path).subject_id
    assert "P07" == read_edf(path, subject_id="P07").subject_id


def test_wrong_version(tmp_path, rng):
    path = str(tmp_path / "rec.edf")
    write_edf(path, _random_recording(rng))
    with open(path, "rb") as fh:
        raw = bytearray(fh.read())
    raw[0:1] = b"1"
    with pytest.raises(EdfParseError) as error:
        parse_edf(bytes(raw))
    assert 0 == error.value.offset


def test_truncated_file_names_record(tmp_path, rng):
    path = str(tmp_path / "rec.edf")
    header = write_edf(path, _random_recording(rng, n_samples=3 * 128))
    with open(path, "rb") as fh:
        raw = fh.read()

    truncated = raw[: header.header_bytes + header.record_bytes + 10]
    with pytest.raises(EdfParseError) as error:
        parse_edf(truncated)
    assert 1 == error.value.record
    assert header.header_bytes + header.record_bytes == error.value.offset

    with open(path, "wb") as fh:
        fh.write(truncated)
    with pytest.raises(EdfParseError) as error:
        read_edf(path)
    assert path in str(error.value)
    assert 1 == error.value.record


def test_short_file():
    with pytest.raises(EdfParseError):
        parse_edf_header(b"0       ")


def test_unknown_record_count(tmp_path, rng):
    path = str(tmp_path / "rec.edf")
    write_edf(path, _random_recording(rng, n_samples=2 * 128))
    with open(path, "rb") as fh:
        raw = bytearray(fh.read())
    raw[236:244] = b"-1      "
    header, signals = parse_edf(bytes(raw))
    assert 2 == header.number_of_records
    assert 256 == len(signals[0])


def test_annotation_signal_is_skipped(tmp_path, rng):
    path = str(tmp_path / "rec.edf")
    rec = _random_recording(rng)
    rec = rec.replace(channel_names=["Fp1", "F7", "T7", "EDF Annotations"])
    write_edf(path, rec)
    assert ["Fp1", "F7", "T7"] == read_edf(path).channel_names


def test_fuzzed_headers_never_crash(tmp_path):
    """Random header corruption raises EdfParseError or parses, nothing else."""
    rng = np.random.default_rng(7)
    path = str(tmp_path / "rec.edf")
    header = write_edf(path, _random_recording(rng, n_samples=128))
    with open(path, "rb") as fh:
        original = fh.read()

    alphabet = np.frombuffer(b"0123456789 .-+eEnaifX", dtype=np.uint8)
    for _ in range(2000):
        raw = bytearray(original)
        for _ in range(rng.integers(1, 6)):
            position = int(rng.integers(0, header.header_bytes))
            if rng.random() < 0.5:
                raw[position] = int(rng.choice(alphabet))
            else:
                raw[position] = int(rng.integers(0, 256))
        if rng.random() < 0.2:
            raw = raw[: int(rng.integers(0, len(raw)))]
        try:
            parse_edf(bytes(raw))
        except EdfParseError:
            pass


def test_fixed_header_size():
    assert 256 == FIXED_HEADER_BYTES


@pytest.mark.parametrize("bad", [np.nan, np.inf, -np.inf])
def test_non_finite_samples_are_not_written(tmp_path, rng, bad):
    rec = _random_recording(rng)
    rec.data[2, 10] = bad
    with pytest.raises(ValueError, match="non-finite"):
        write_edf(str(tmp_path / "rec.edf"), rec)
