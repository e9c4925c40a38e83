""" Reading and writing recordings, annotations and window corpora. """
from .annotations import read_ppr_csv, read_seizure_summary, write_ppr_csv
from .corpus import read_corpus
from .edf import read_edf, write_edf
from .window_store import read_window_store, write_window_store

__all__ = [
    "read_corpus",
    "read_edf",
    "write_edf",
    "read_seizure_summary",
    "read_ppr_csv",
    "write_ppr_csv",
    "read_window_store",
    "write_window_store",
]
