""" Lineage records of synthetic windows, persisted as JSON lines. """
import json
import logging
from typing import Iterable, List, NamedTuple, Optional, Set, Tuple

log = logging.getLogger(__name__)


class ProvenanceRecord(NamedTuple):
    window_id: str
    parent_ids: Tuple[str, str]
    parent_subjects: Tuple[str, str]
    cut_points: Tuple[int, ...]
    seed: int
    ppr_type: Optional[str] = None

    def to_json(self) -> str:
        return json.dumps(
            dict(
                window_id=self.window_id,
                parent_ids=list(self.parent_ids),
                parent_subjects=list(self.parent_subjects),
                cut_points=list(self.cut_points),
                seed=self.seed,
                ppr_type=self.ppr_type,
            )
        )

    @classmethod
    def from_json(cls, line: str) -> "ProvenanceRecord":
        fields = json.loads(line)
        return cls(
            window_id=fields["window_id"],
            parent_ids=tuple(fields["parent_ids"]),
            parent_subjects=tuple(fields["parent_subjects"]),
            cut_points=tuple(fields["cut_points"]),
            seed=int(fields["seed"]),
            ppr_type=fields.get("ppr_type"),
        )


def provenance_path(store_path: str) -> str:
    """Path of the sidecar file belonging to the window store at `store_path`."""
    return f"{store_path}.provenance.jsonl"


def write_provenance(path: str, records: Iterable[ProvenanceRecord]) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for record in records:
            fh.write(record.to_json() + "\n")


def read_provenance(path: str) -> List[ProvenanceRecord]:
    with open(path, "r", encoding="utf-8") as fh:
        return [ProvenanceRecord.from_json(line) for line in fh if line.strip()]


def audit_lineage(
    records: Iterable[ProvenanceRecord], excluded_subjects: Set[str]
) -> List[ProvenanceRecord]:
    """Records with a parent from one of `excluded_subjects`, e.g. the test subject."""
    leaks = [
        r for r in records if excluded_subjects.intersection(r.parent_subjects)
    ]
    for record in leaks:
        log.error(
            f"Synthetic window {record.window_id} derives from held-out subjects "
            f"{sorted(excluded_subjects.intersection(record.parent_subjects))}."
        )
    return leaks
