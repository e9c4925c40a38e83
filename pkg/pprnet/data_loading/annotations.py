""" Seizure summaries of the source corpus and PPR annotation tables. """
from contextlib import contextmanager
import logging
import re
from typing import Dict, Iterator, List, Optional

import pandas as pd

from pprnet.errors import AnnotationParseError
from pprnet.signal.recording import AnnotationKind, AnnotationSpan

log = logging.getLogger(__name__)

PPR_COLUMNS = ["start_s", "end_s", "kind"]

_FILE_NAME = re.compile(r"^File Name:\s*(\S+)\s*$")
_SEIZURE_COUNT = re.compile(r"^Number of Seizures in File:\s*(\d+)\s*$")
_SEIZURE_TIME = re.compile(
    r"^Seizure(?:\s+\d+)?\s+(Start|End) Time:\s*(\d+(?:\.\d+)?)\s*seconds\s*$"
)


@contextmanager
def _located(path: str) -> Iterator[None]:
    """Prefix parse errors raised in the block with `path`, keeping the line."""
    try:
        yield
    except AnnotationParseError as e:
        error = AnnotationParseError(f"{path}: {e}")
        error.line = e.line
        raise error from e


def _close_block(
    name: Optional[str],
    declared: Optional[int],
    spans: List[AnnotationSpan],
    pending_start: Optional[float],
    block_line: int,
) -> None:
    if name is None:
        return
    if pending_start is not None:
        raise AnnotationParseError(f"{name}: seizure start without end", block_line)
    if declared is None:
        raise AnnotationParseError(f"{name}: number of seizures missing", block_line)
    if declared != len(spans):
        raise AnnotationParseError(
            f"{name}: {declared} seizures declared, {len(spans)} listed", block_line
        )


def read_seizure_summary(path: str) -> Dict[str, List[AnnotationSpan]]:
    """Parse a seizure summary file into seizure spans per EDF file name.

    The summary lists, per file, a "File Name:" line, a "Number of Seizures in
    File:" line and that many pairs of "Seizure [n] Start Time: X seconds" /
    "Seizure [n] End Time: Y seconds" lines. Other lines are ignored.

    Raises
    ------
    AnnotationParseError
        With the line number of the offending line or file block.
    """
    with open(path, "r", encoding="utf-8", errors="replace") as fh:
        lines = fh.read().splitlines()
    with _located(path):
        summary = _parse_seizure_summary(lines)

    n_seizures = sum(len(s) for s in summary.values())
    log.debug(f"Read {n_seizures} seizures in {len(summary)} files from {path}.")
    return summary


def _parse_seizure_summary(lines: List[str]) -> Dict[str, List[AnnotationSpan]]:
    summary: Dict[str, List[AnnotationSpan]] = {}
    name: Optional[str] = None
    declared: Optional[int] = None
    spans: List[AnnotationSpan] = []
    pending_start: Optional[float] = None
    block_line = 0

    for number, line in enumerate(lines, start=1):
        line = line.strip()
        if match := _FILE_NAME.match(line):
            _close_block(name, declared, spans, pending_start, block_line)
            name, declared, spans, pending_start = match.group(1), None, [], None
            block_line = number
            summary[name] = spans
        elif match := _SEIZURE_COUNT.match(line):
            if name is None:
                raise AnnotationParseError("seizure count before any file name", number)
            declared = int(match.group(1))
        elif match := _SEIZURE_TIME.match(line):
            if name is None:
                raise AnnotationParseError("seizure time before any file name", number)
            boundary, seconds = match.group(1), float(match.group(2))
            if boundary == "Start":
                if pending_start is not None:
                    raise AnnotationParseError("two seizure starts in a row", number)
                pending_start = seconds
            else:
                if pending_start is None:
                    raise AnnotationParseError("seizure end without start", number)
                if seconds <= pending_start:
                    raise AnnotationParseError(
                        f"seizure ends at {seconds}s, not after its start "
                        f"{pending_start}s",
                        number,
                    )
                spans.append(
                    AnnotationSpan(pending_start, seconds, AnnotationKind.SEIZURE)
                )
                pending_start = None
        elif line.startswith("Seizure"):
            raise AnnotationParseError(f"malformed seizure line '{line}'", number)
    _close_block(name, declared, spans, pending_start, block_line)
    return summary


def read_ppr_csv(path: str) -> List[AnnotationSpan]:
    """Read PPR spans from a CSV file with columns start_s, end_s and kind.

    The kind column holds 'ppr' or 'seizure' and may be left empty for 'ppr'.
    """
    with _located(path):
        return _parse_ppr_csv(path)


def _parse_ppr_csv(path: str) -> List[AnnotationSpan]:
    try:
        frame = pd.read_csv(path, dtype={"kind": str}, keep_default_na=False)
    except pd.errors.EmptyDataError:
        raise AnnotationParseError("file is empty, expected a header", 1)
    except pd.errors.ParserError as e:
        raise AnnotationParseError(f"not valid CSV: {e}")

    columns = [str(c).strip() for c in frame.columns]
    if columns[:2] != PPR_COLUMNS[:2] or not set(columns) <= set(PPR_COLUMNS):
        raise AnnotationParseError(
            f"columns must be {PPR_COLUMNS}, found {columns}", 1
        )
    frame.columns = columns

    spans = []
    for index, row in frame.iterrows():
        line = int(index) + 2  # the header is line 1
        try:
            start, end = float(row["start_s"]), float(row["end_s"])
        except ValueError:
            raise AnnotationParseError(f"non-numeric span bounds {row.tolist()}", line)
        kind_text = str(row.get("kind", "")).strip().lower() or "ppr"
        try:
            kind = AnnotationKind(kind_text)
        except ValueError:
            raise AnnotationParseError(f"unknown annotation kind '{kind_text}'", line)
        span = AnnotationSpan(start, end, kind)
        try:
            span.validate()
        except ValueError as e:
            raise AnnotationParseError(str(e), line)
        spans.append(span)
    return spans


def write_ppr_csv(path: str, spans: List[AnnotationSpan]) -> None:
    frame = pd.DataFrame(
        [(s.start_s, s.end_s, s.kind.value) for s in spans], columns=PPR_COLUMNS
    )
    frame.to_csv(path, index=False)
