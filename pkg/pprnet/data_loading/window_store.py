""" Binary corpus of labeled windows.

Layout, all integers little-endian:

    header (32 bytes)
        magic b"PPRW" | version u16 | flags u16 | channels u32 | samples u32
        | count u32 | subjects u32 | sampling rate u32 | reserved u32
    subject table     subjects x (length u16, utf-8 bytes)
    labels            u8[count]
    ppr types         u8[count], 0 = none, 1..4 = a..d
    subject index     u32[count]
    window start      f64[count], seconds
    window id table   count x (length u16, utf-8 bytes)
    samples           f32[count x channels x samples], row-major

A store without windows is exactly the header.
"""
import logging
import struct
from typing import Dict, List, Sequence

import numpy as np

from pprnet.errors import WindowStoreError
from pprnet.signal.recording import Label, PprType, Window

log = logging.getLogger(__name__)

MAGIC = b"PPRW"
VERSION = 1
_HEADER = struct.Struct("<4sHHIIIIII")
HEADER_BYTES = _HEADER.size
PPR_TYPE_CODES: Dict[PprType, int] = {t: i + 1 for i, t in enumerate(PprType)}
_PPR_TYPES_BY_CODE = {code: t for t, code in PPR_TYPE_CODES.items()}


def _encode_strings(strings: Sequence[str]) -> bytes:
    blob = bytearray()
    for text in strings:
        encoded = text.encode("utf-8")
        if len(encoded) > 0xFFFF:
            raise WindowStoreError(f"String too long to store: '{text[:40]}...'")
        blob += struct.pack("<H", len(encoded)) + encoded
    return bytes(blob)


def write_window_store(path: str, windows: Sequence[Window]) -> None:
    """Write `windows` to `path`, samples are stored as float32.

    Raises
    ------
    WindowStoreError
        If windows differ in shape or sampling rate, or hold NaN samples.
    """
    shapes = {w.shape for w in windows}
    rates = {w.sampling_rate_hz for w in windows}
    if len(shapes) > 1:
        raise WindowStoreError(
            f"Windows of different shapes can not be stored: {shapes}"
        )
    if len(rates) > 1:
        raise WindowStoreError(f"Windows have different sampling rates: {rates}")
    n_channels, n_samples = shapes.pop() if shapes else (0, 0)
    rate = rates.pop() if rates else 0

    subjects = sorted({w.subject_id for w in windows})
    subject_index = {s: i for i, s in enumerate(subjects)}
    samples = np.asarray([w.data for w in windows], dtype="<f4").reshape(
        len(windows), n_channels, n_samples
    )
    if np.isnan(samples).any():
        bad = next(w for w in windows if np.isnan(w.data).any())
        raise WindowStoreError(f"Window {bad.window_id} holds NaN samples.")

    header = _HEADER.pack(
        MAGIC, VERSION, 0, n_channels, n_samples, len(windows), len(subjects), rate, 0
    )
    with open(path, "wb") as fh:
        fh.write(header)
        fh.write(_encode_strings(subjects))
        fh.write(np.asarray([int(w.label) for w in windows], dtype="u1").tobytes())
        fh.write(
            np.asarray(
                [PPR_TYPE_CODES[w.ppr_type] if w.ppr_type else 0 for w in windows],
                dtype="u1",
            ).tobytes()
        )
        fh.write(
            np.asarray([subject_index[w.subject_id] for w in windows], "<u4").tobytes()
        )
        fh.write(np.asarray([w.start_s for w in windows], dtype="<f8").tobytes())
        fh.write(_encode_strings([w.window_id for w in windows]))
        fh.write(samples.tobytes())
    log.debug(f"Wrote {len(windows)} windows to {path}.")


class _Cursor:
    def __init__(self, raw: bytes):
        self.raw = raw
        self.offset = 0
        self.last_offset = 0

    def take(self, n_bytes: int, what: str) -> bytes:
        if self.offset + n_bytes > len(self.raw):
            raise WindowStoreError(
                f"Store truncated while reading {what}: need {n_bytes} bytes, "
                f"{len(self.raw) - self.offset} left",
                self.offset,
            )
        chunk = self.raw[self.offset : self.offset + n_bytes]
        self.offset += n_bytes
        return chunk

    def array(self, dtype: str, count: int, what: str) -> np.ndarray:
        start = self.offset
        chunk = self.take(np.dtype(dtype).itemsize * count, what)
        values = np.frombuffer(chunk, dtype=dtype, count=count)
        self.last_offset = start
        return values

    def strings(self, count: int, what: str) -> List[str]:
        strings = []
        for _ in range(count):
            (length,) = struct.unpack("<H", self.take(2, what))
            start = self.offset
            try:
                strings.append(self.take(length, what).decode("utf-8"))
            except UnicodeDecodeError:
                raise WindowStoreError(f"Invalid utf-8 in {what}", start)
        return strings


def read_window_store(path: str) -> List[Window]:
    """Read the windows written by `write_window_store`.

    Raises
    ------
    WindowStoreError
        With the byte offset of the first inconsistency: wrong magic or version,
        truncation, trailing bytes, out-of-range codes or NaN samples.
    """
    with open(path, "rb") as fh:
        raw = fh.read()
    try:
        return _parse_window_store(raw)
    except WindowStoreError as e:
        error = WindowStoreError(f"{path}: {e}")
        error.offset = e.offset
        raise error from e


def _parse_window_store(raw: bytes) -> List[Window]:
    cursor = _Cursor(raw)
    magic, version, _, n_channels, n_samples, count, n_subjects, rate, _ = (
        _HEADER.unpack(cursor.take(HEADER_BYTES, "header"))
    )
    if magic != MAGIC:
        raise WindowStoreError(f"Not a window store, magic is {magic!r}", 0)
    if version != VERSION:
        raise WindowStoreError(f"Unsupported window store version {version}", 4)
    if count and (rate == 0 or n_channels == 0 or n_samples == 0):
        raise WindowStoreError("Store holds windows without shape or rate", 8)

    subjects = cursor.strings(n_subjects, "subject table")
    labels = cursor.array("u1", count, "labels")
    if (labels > 1).any():
        bad = int(np.argmax(labels > 1))
        raise WindowStoreError(f"Invalid label {labels[bad]}", cursor.last_offset + bad)
    ppr_codes = cursor.array("u1", count, "ppr types")
    invalid = (ppr_codes > len(PprType)) | ((ppr_codes > 0) & (labels == 0))
    if invalid.any():
        bad = int(np.argmax(invalid))
        raise WindowStoreError(
            f"Invalid ppr type code {ppr_codes[bad]} for label {labels[bad]}",
            cursor.last_offset + bad,
        )
    subject_indices = cursor.array("<u4", count, "subject index")
    if (subject_indices >= n_subjects).any():
        bad = int(np.argmax(subject_indices >= n_subjects))
        raise WindowStoreError(
            f"Subject index {subject_indices[bad]} out of range",
            cursor.last_offset + 4 * bad,
        )
    starts = cursor.array("<f8", count, "window starts")
    window_ids = cursor.strings(count, "window id table")

    values_per_window = n_channels * n_samples
    samples = cursor.array("<f4", count * values_per_window, "samples")
    if cursor.offset != len(raw):
        raise WindowStoreError(
            f"{len(raw) - cursor.offset} unexpected bytes after the samples",
            cursor.offset,
        )
    nan = np.isnan(samples)
    if nan.any():
        raise WindowStoreError(
            "Store holds NaN samples", cursor.last_offset + 4 * int(np.argmax(nan))
        )
    samples = samples.reshape(count, n_channels, n_samples)

    return [
        Window(
            data=samples[i],
            label=Label(int(labels[i])),
            subject_id=subjects[subject_indices[i]],
            start_s=float(starts[i]),
            sampling_rate_hz=rate,
            ppr_type=_PPR_TYPES_BY_CODE.get(int(ppr_codes[i])),
            window_id=window_ids[i],
        )
        for i in range(count)
    ]
