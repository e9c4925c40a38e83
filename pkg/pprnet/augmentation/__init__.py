from .balancing import AugmentedFold, augment_fold, balance_training_fold
from .merging import MergePlan, merge_windows
from .provenance import ProvenanceRecord, read_provenance, write_provenance

__all__ = [
    "AugmentedFold",
    "augment_fold",
    "balance_training_fold",
    "MergePlan",
    "merge_windows",
    "ProvenanceRecord",
    "read_provenance",
    "write_provenance",
]
