""" Reader and writer for EDF recordings with 16-bit samples. """
from datetime import datetime
import logging
import math
import os
from typing import List, NamedTuple, Optional, Tuple

import numpy as np

from pprnet.errors import EdfParseError
from pprnet.signal.montage import infer_montage
from pprnet.signal.recording import AnnotationSpan, Domain, Montage, Recording

log = logging.getLogger(__name__)

FIXED_HEADER_BYTES = 256
SIGNAL_HEADER_BYTES = 256
ANNOTATION_LABEL = "EDF Annotations"
DIGITAL_MIN, DIGITAL_MAX = -32768, 32767

# (name, width) of the fixed part of the header, in file order.
_FIXED_FIELDS: Tuple[Tuple[str, int], ...] = (
    ("version", 8),
    ("patient_id", 80),
    ("recording_id", 80),
    ("start_date", 8),
    ("start_time", 8),
    ("header_bytes", 8),
    ("reserved", 44),
    ("number_of_records", 8),
    ("record_duration_s", 8),
    ("number_of_signals", 4),
)
# (name, width) of the per-signal fields; each is stored for all signals in turn.
_SIGNAL_FIELDS: Tuple[Tuple[str, int], ...] = (
    ("label", 16),
    ("transducer", 80),
    ("physical_dimension", 8),
    ("physical_min", 8),
    ("physical_max", 8),
    ("digital_min", 8),
    ("digital_max", 8),
    ("prefilter", 80),
    ("samples_per_record", 8),
    ("reserved", 32),
)


class EdfSignalHeader(NamedTuple):
    label: str
    physical_min: float
    physical_max: float
    digital_min: int
    digital_max: int
    samples_per_record: int
    physical_dimension: str = "uV"
    transducer: str = ""
    prefilter: str = ""

    @property
    def quantum(self) -> float:
        """Physical value of one digital step."""
        return (self.physical_max - self.physical_min) / (
            self.digital_max - self.digital_min
        )

    def to_physical(self, digital: np.ndarray) -> np.ndarray:
        return (digital - self.digital_min) * self.quantum + self.physical_min

    def to_digital(self, physical: np.ndarray) -> np.ndarray:
        digital = np.round((physical - self.physical_min) / self.quantum)
        digital = digital + self.digital_min
        return np.clip(digital, self.digital_min, self.digital_max).astype("<i2")


class EdfHeader(NamedTuple):
    version: str
    patient_id: str
    recording_id: str
    start: Optional[datetime]
    number_of_records: int
    record_duration_s: float
    signals: List[EdfSignalHeader]

    @property
    def header_bytes(self) -> int:
        return FIXED_HEADER_BYTES + SIGNAL_HEADER_BYTES * len(self.signals)

    @property
    def record_bytes(self) -> int:
        return 2 * sum(s.samples_per_record for s in self.signals)


def _parse_number(raw: bytes, offset: int, field: str, kind=float):
    text = raw.decode("ascii", errors="replace").strip()
    try:
        value = kind(text)
    except ValueError:
        raise EdfParseError(f"Field '{field}' is not a number: '{text}'", offset)
    if not math.isfinite(value):
        raise EdfParseError(f"Field '{field}' is not finite: '{text}'", offset)
    return value


def _parse_start(date: str, time: str) -> Optional[datetime]:
    try:
        return datetime.strptime(f"{date.strip()} {time.strip()}", "%d.%m.%y %H.%M.%S")
    except ValueError:
        log.warning(f"Could not parse EDF start '{date} {time}', left empty.")
        return None


def parse_edf_header(raw: bytes) -> EdfHeader:
    """Parse the fixed and per-signal header of an EDF file held in `raw`.

    Raises
    ------
    EdfParseError
        With the byte offset of the field which could not be read.
    """
    if len(raw) < FIXED_HEADER_BYTES:
        raise EdfParseError(
            f"File holds {len(raw)} bytes, shorter than the fixed header.", len(raw)
        )
    fields = {}
    offset = 0
    for name, width in _FIXED_FIELDS:
        fields[name] = (raw[offset : offset + width], offset)
        offset += width

    version = fields["version"][0].decode("ascii", errors="replace")
    if version.strip() != "0":
        raise EdfParseError(f"Not an EDF file, version field is '{version}'", 0)

    ns = _parse_number(*fields["number_of_signals"], "number_of_signals", int)
    if ns <= 0:
        raise EdfParseError(
            f"Number of signals must be positive, got {ns}",
            fields["number_of_signals"][1],
        )
    header_bytes = _parse_number(*fields["header_bytes"], "header_bytes", int)
    expected_header_bytes = FIXED_HEADER_BYTES + SIGNAL_HEADER_BYTES * ns
    if header_bytes != expected_header_bytes:
        raise EdfParseError(
            f"Header size {header_bytes} does not match {ns} signals "
            f"({expected_header_bytes} bytes)",
            fields["header_bytes"][1],
        )
    if len(raw) < expected_header_bytes:
        raise EdfParseError(
            f"Header of {ns} signals is truncated at {len(raw)} bytes", len(raw)
        )

    per_signal = {}
    for name, width in _SIGNAL_FIELDS:
        per_signal[name] = [
            (raw[offset + i * width : offset + (i + 1) * width], offset + i * width)
            for i in range(ns)
        ]
        offset += ns * width

    signals = []
    for i in range(ns):
        def number(name, kind=float):
            return _parse_number(*per_signal[name][i], f"{name}[{i}]", kind)

        def text(name):
            return per_signal[name][i][0].decode("latin-1").strip()

        signal = EdfSignalHeader(
            label=text("label"),
            physical_min=number("physical_min"),
            physical_max=number("physical_max"),
            digital_min=number("digital_min", int),
            digital_max=number("digital_max", int),
            samples_per_record=number("samples_per_record", int),
            physical_dimension=text("physical_dimension"),
            transducer=text("transducer"),
            prefilter=text("prefilter"),
        )
        if signal.physical_max == signal.physical_min:
            raise EdfParseError(
                f"Signal {i} ({signal.label}) has physical_max == physical_min",
                per_signal["physical_max"][i][1],
            )
        if signal.digital_max == signal.digital_min:
            raise EdfParseError(
                f"Signal {i} ({signal.label}) has digital_max == digital_min",
                per_signal["digital_max"][i][1],
            )
        if signal.samples_per_record <= 0:
            raise EdfParseError(
                f"Signal {i} ({signal.label}) has no samples per record",
                per_signal["samples_per_record"][i][1],
            )
        signals.append(signal)

    number_of_records = _parse_number(
        *fields["number_of_records"], "number_of_records", int
    )
    record_duration_s = _parse_number(
        *fields["record_duration_s"], "record_duration_s", float
    )
    if not record_duration_s > 0:
        raise EdfParseError(
            f"Record duration must be positive, got {record_duration_s}",
            fields["record_duration_s"][1],
        )

    header = EdfHeader(
        version=version.strip(),
        patient_id=fields["patient_id"][0].decode("latin-1").strip(),
        recording_id=fields["recording_id"][0].decode("latin-1").strip(),
        start=_parse_start(
            fields["start_date"][0].decode("latin-1"),
            fields["start_time"][0].decode("latin-1"),
        ),
        number_of_records=number_of_records,
        record_duration_s=record_duration_s,
        signals=signals,
    )
    if number_of_records == -1:
        # Allowed while recording, the file size then determines the record count.
        data_bytes = len(raw) - header.header_bytes
        if data_bytes % header.record_bytes:
            raise EdfParseError(
                "Unknown record count and data is not a whole number of records",
                header.header_bytes,
            )
        header = header._replace(number_of_records=data_bytes // header.record_bytes)
    elif number_of_records < 0:
        raise EdfParseError(
            f"Invalid number of records {number_of_records}",
            fields["number_of_records"][1],
        )
    return header


def parse_edf(raw: bytes) -> Tuple[EdfHeader, List[np.ndarray]]:
    """Parse an EDF file held in memory into its header and physical signals."""
    header = parse_edf_header(raw)
    record_bytes = header.record_bytes
    available = len(raw) - header.header_bytes
    expected = header.number_of_records * record_bytes
    if available < expected:
        failing_record = available // record_bytes
        raise EdfParseError(
            f"File truncated: {header.number_of_records} records declared, "
            f"record {failing_record} is incomplete",
            offset=header.header_bytes + failing_record * record_bytes,
            record=failing_record,
        )
    if available > expected:
        log.warning(f"Ignoring {available - expected} trailing bytes after records.")

    samples_per_record = sum(s.samples_per_record for s in header.signals)
    n_values = header.number_of_records * samples_per_record
    if n_values:
        digital = np.frombuffer(
            raw, dtype="<i2", count=n_values, offset=header.header_bytes
        )
    else:
        digital = np.zeros(0, dtype="<i2")
    digital = digital.reshape(header.number_of_records, samples_per_record)

    signals = []
    start = 0
    for signal in header.signals:
        stop = start + signal.samples_per_record
        signals.append(signal.to_physical(digital[:, start:stop].reshape(-1)))
        start = stop
    return header, signals


def read_edf(
    path: str,
    subject_id: Optional[str] = None,
    domain: Domain = Domain.TARGET,
    montage: Optional[Montage] = None,
    annotations: Optional[List[AnnotationSpan]] = None,
) -> Recording:
    """Read an EDF file into a Recording of physical (microvolt) values.

    Parameters
    ----------
    path: str
        Path of the EDF file.
    subject_id: str, optional (default=None)
        Subject of the recording. If None, the first token of the patient field
        is used, or the file name when that field is empty.
    domain: Domain (default=Domain.TARGET)
    montage: Montage, optional (default=None)
        Montage of the stored signals. If None, it is inferred from the labels:
        bipolar for "Fp1-F7" style derivations, referential otherwise.
    annotations: List[AnnotationSpan], optional (default=None)

    Raises
    ------
    EdfParseError
        If the file is not EDF, its header is inconsistent or it is truncated.
    """
    with open(path, "rb") as fh:
        raw = fh.read()
    try:
        header, signals = parse_edf(raw)
    except EdfParseError as e:
        error = EdfParseError(f"{path}: {e}")
        error.offset, error.record = e.offset, e.record
        raise error from e

    kept = [
        (s, x) for s, x in zip(header.signals, signals) if s.label != ANNOTATION_LABEL
    ]
    if not kept:
        raise EdfParseError(f"{path}: no data signals in file")
    rates = {s.samples_per_record for s, _ in kept}
    if len(rates) > 1:
        raise EdfParseError(f"{path}: signals have different sampling rates {rates}")
    rate = round(rates.pop() / header.record_duration_s)
    if rate < 1:
        raise EdfParseError(f"{path}: sampling rate below 1 Hz")

    name = os.path.splitext(os.path.basename(path))[0]
    if subject_id is None:
        subject_id = header.patient_id.split(" ")[0] or name
        if subject_id == "X":  # EDF+ placeholder for an unknown patient code
            subject_id = name
    labels = [s.label for s, _ in kept]
    if montage is None:
        montage = infer_montage(labels)
        log.debug(f"{path}: inferred {montage.value} montage.")
    return Recording(
        subject_id=subject_id,
        channel_names=labels,
        data=np.stack([x for _, x in kept]),
        sampling_rate_hz=rate,
        montage=montage,
        annotations=annotations,
        domain=domain,
        recording_id=name,
    )


def _format_field(value: float, width: int = 8) -> str:
    for decimals in range(6, -1, -1):
        text = f"{value:.{decimals}f}"
        if len(text) <= width:
            return text
    raise ValueError(f"{value} can not be written in a {width}-character field.")


def _physical_range(channel: np.ndarray) -> Tuple[float, float]:
    """Header range enclosing `channel` after formatting to 8 characters."""
    if not np.isfinite(channel).all():
        raise ValueError("Can not write non-finite samples to EDF.")
    lo, hi = float(channel.min()), float(channel.max())
    margin = max(hi - lo, 1.0) * 0.001
    while True:
        lo_text, hi_text = _format_field(lo - margin), _format_field(hi + margin)
        if float(lo_text) <= lo and float(hi_text) >= hi:
            return float(lo_text), float(hi_text)
        margin *= 2


def _padded(text: str, width: int) -> bytes:
    return text.encode("latin-1", errors="replace")[:width].ljust(width)


def write_edf(
    path: str,
    rec: Recording,
    patient_id: Optional[str] = None,
    start: Optional[datetime] = None,
) -> EdfHeader:
    """Write `rec` as EDF with 16-bit samples, one record per second if possible."""
    rate = rec.sampling_rate_hz
    if rec.n_samples % rate == 0:
        samples_per_record, n_records = rate, rec.n_samples // rate
    else:
        samples_per_record, n_records = rec.n_samples, 1
    duration = samples_per_record / rate

    signals = []
    for name, channel in zip(rec.channel_names, rec.data):
        physical_min, physical_max = _physical_range(channel)
        signals.append(
            EdfSignalHeader(
                label=name,
                physical_min=physical_min,
                physical_max=physical_max,
                digital_min=DIGITAL_MIN,
                digital_max=DIGITAL_MAX,
                samples_per_record=samples_per_record,
            )
        )
    start = start or datetime(2000, 1, 1)
    header = EdfHeader(
        version="0",
        patient_id=patient_id if patient_id is not None else rec.subject_id,
        recording_id=rec.recording_id,
        start=start,
        number_of_records=n_records,
        record_duration_s=duration,
        signals=signals,
    )

    values = {
        "version": header.version,
        "patient_id": header.patient_id,
        "recording_id": header.recording_id,
        "start_date": start.strftime("%d.%m.%y"),
        "start_time": start.strftime("%H.%M.%S"),
        "header_bytes": str(header.header_bytes),
        "reserved": "",
        "number_of_records": str(n_records),
        "record_duration_s": _format_field(duration),
        "number_of_signals": str(len(signals)),
    }
    blob = b"".join(_padded(values[name], width) for name, width in _FIXED_FIELDS)
    for name, width in _SIGNAL_FIELDS:
        for signal in signals:
            value = getattr(signal, name, "")
            if isinstance(value, float):
                value = _format_field(value)
            blob += _padded(str(value), width)

    digital = np.stack(
        [
            signal.to_digital(channel).reshape(n_records, samples_per_record)
            for signal, channel in zip(signals, rec.data)
        ],
        axis=1,
    )
    with open(path, "wb") as fh:
        fh.write(blob)
        fh.write(digital.astype("<i2").tobytes())
    return header

