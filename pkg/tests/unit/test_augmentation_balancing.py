import numpy as np
import pytest

from pprnet.augmentation.balancing import (
    allocate_demand,
    augment_fold,
    balance_training_fold,
)
from pprnet.augmentation.merging import MergePlan, junction_residual
from pprnet.augmentation.provenance import (
    ProvenanceRecord,
    audit_lineage,
    provenance_path,
    read_provenance,
    write_provenance,
)
from pprnet.errors import AugmentationError
from pprnet.signal.recording import Label, PprType, Window
from pprnet.signal.windowing import corpus_balance

TYPES = list(PprType)


def _fold(n_normal: int, n_ppr: int, subjects=("P01", "P02", "P03")):
    rng = np.random.default_rng(3)
    windows = []
    for i in range(n_normal):
        data = rng.normal(size=(2, 20))
        subject = subjects[i % len(subjects)]
        windows.append(Window(data, Label.NORMAL, subject, i, window_id=f"n{i}"))
    for i in range(n_ppr):
        data = rng.normal(size=(2, 20)) + 5
        subject, ppr_type = subjects[i % len(subjects)], TYPES[i % len(TYPES)]
        window = Window(data, Label.ANOMALY, subject, i, ppr_type=ppr_type)
        window.window_id = f"a{i}"
        windows.append(window)
    return windows


def test_balance_arithmetic():
    fold = _fold(25_200, 900)
    assert (26_100, 900) == corpus_balance(fold)

    augmented = augment_fold(fold, target_ppr=3_000, target_total=7_500, seed=0)

    balance = corpus_balance(augmented.windows)
    assert (7_500, 3_000) == balance
    assert "40.00" == f"{balance.anomaly_percentage:.2f}"
    assert 900 == augmented.n_real_anomalies
    assert 2_100 == augmented.n_synthetic == len(augmented.provenance)
    assert 4_500 == augmented.n_normals


def test_synthetics_pair_within_type_and_fold():
    fold = _fold(100, 20)
    by_id = {w.window_id: w for w in fold}
    augmented = augment_fold(fold, target_ppr=60, target_total=150, seed=1)

    synthetics = augmented.windows[20:60]
    for window, record in zip(synthetics, augmented.provenance):
        assert window.window_id == record.window_id
        parent_a, parent_b = (by_id[i] for i in record.parent_ids)
        assert parent_a.window_id != parent_b.window_id
        assert parent_a.ppr_type == parent_b.ppr_type == window.ppr_type
        assert record.ppr_type == window.ppr_type.value
        plan = MergePlan(parent_a, parent_b, cut_points=record.cut_points)
        assert junction_residual(plan, window) < 1e-12


def test_per_type_quota_is_proportional():
    # Exact shares 2.5 and 7.5, the tie on the remainder goes to the first type.
    quota = allocate_demand({PprType.ONSET_A: 2, PprType.INTERIOR_C: 6}, 10)
    assert {PprType.ONSET_A: 3, PprType.INTERIOR_C: 7} == quota


def test_singleton_types_get_no_demand():
    quota = allocate_demand({PprType.ONSET_A: 1, PprType.INTERIOR_C: 4}, 9)
    assert {PprType.INTERIOR_C: 9} == quota


def test_same_seed_same_fold():
    fold = _fold(200, 12)
    first = balance_training_fold(fold, 40, 100, seed=5)
    second = balance_training_fold(fold, 40, 100, seed=5)
    assert [w.window_id for w in first] == [w.window_id for w in second]
    for a, b in zip(first, second):
        np.testing.assert_array_equal(a.data, b.data)
    other = balance_training_fold(fold, 40, 100, seed=6)
    assert [w.window_id for w in first] != [w.window_id for w in other]


def test_parallel_merging_matches_serial():
    fold = _fold(200, 12)
    serial = balance_training_fold(fold, 40, 100, seed=5, n_jobs=1)
    threaded = balance_training_fold(fold, 40, 100, seed=5, n_jobs=3)
    for a, b in zip(serial, threaded):
        np.testing.assert_array_equal(a.data, b.data)


def test_no_synthetics_needed():
    fold = _fold(50, 40)
    augmented = augment_fold(fold, target_ppr=30, target_total=60)
    assert 0 == augmented.n_synthetic
    assert (60, 30) == corpus_balance(augmented.windows)


def test_single_ppr_window_fails():
    with pytest.raises(AugmentationError):
        augment_fold(_fold(50, 1), target_ppr=10, target_total=40)


def test_too_few_normals_keeps_all():
    augmented = augment_fold(_fold(20, 8), target_ppr=10, target_total=40)
    assert (30, 10) == corpus_balance(augmented.windows)


def test_invalid_targets():
    with pytest.raises(ValueError):
        augment_fold(_fold(20, 8), target_ppr=50, target_total=40)


def test_provenance_round_trip_and_audit(tmp_path):
    fold = _fold(30, 12)
    augmented = augment_fold(fold, target_ppr=20, target_total=30, seed=2)
    path = provenance_path(str(tmp_path / "fold.pprw"))
    assert path.endswith("fold.pprw.provenance.jsonl")
    write_provenance(path, augmented.provenance)

    records = read_provenance(path)
    assert augmented.provenance == records
    assert [] == audit_lineage(records, {"P09"})
    leaks = audit_lineage(records, {"P01"})
    assert leaks and all("P01" in r.parent_subjects for r in leaks)


def test_audit_flags_test_subject_parent():
    record = ProvenanceRecord("syn-0-0", ("a", "b"), ("P01", "P02"), (4, 8), 0, "c")
    assert [record] == audit_lineage([record], {"P02"})
