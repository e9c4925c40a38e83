import operator
from typing import Optional, Dict, Callable, Iterable, NamedTuple


class EpochRecord(NamedTuple):
    """Summary of one training epoch of one network."""

    network: str
    epoch: int
    train_loss: float
    validation_loss: float
    train_accuracy: float
    duration: float


def _format_value(v) -> str:
    if isinstance(v, float):
        return f"{v:.8g}"
    return str(v)


class TraceLogger:
    def __init__(
        self,
        file_path: str,
        separator: str = ";",
        fields: Optional[Dict[str, Callable[[EpochRecord], object]]] = None,
        extra_fields: Optional[Dict[str, Callable[[EpochRecord], object]]] = None,
    ):
        """Formats epoch records for output to a csv file.

        Parameters
        ----------
        file_path: str
            The trace file to write to. The header is written on construction.
        separator: str (default=';')
            The delimiter for the csv file.
        fields: Dict[str, Callable[[EpochRecord], object]], optional (default=None)
            Mapping of column names to a function which extracts the corresponding
            value from a record. If None, every field of `EpochRecord` is logged.
        extra_fields: Dict[str, Callable[[EpochRecord], object]], optional
            Additional fields to log next to `fields`.
        """
        self._file_path = file_path
        self._sep = separator

        if fields is None:
            self.fields: Dict[str, Callable[[EpochRecord], object]] = {
                name: operator.attrgetter(name) for name in EpochRecord._fields
            }
        else:
            self.fields = fields

        if extra_fields is not None:
            self.fields.update(extra_fields)

        self.log_line(list(self.fields))

    def log_line(self, values: Iterable[str]) -> None:
        """Appends `values` as a row of separated values to the file."""
        with open(self._file_path, "a") as trace:
            trace.write(self._sep.join(values) + "\n")

    def log_epoch(self, record: EpochRecord) -> None:
        values = [getter(record) for getter in self.fields.values()]
        self.log_line(map(_format_value, values))
