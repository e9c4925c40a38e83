""" Balance a training fold: oversample anomalies by merging, undersample normals. """
from collections import defaultdict
import logging
from typing import Dict, List, NamedTuple, Optional, Sequence

import numpy as np

from pprnet.augmentation.merging import MergePlan, merge_windows
from pprnet.augmentation.provenance import ProvenanceRecord
from pprnet.errors import AugmentationError
from pprnet.signal.recording import PprType, Window
from pprnet.utilities.parallel import parallel_map

log = logging.getLogger(__name__)

# Independent random streams derived from one seed.
_MERGE_STREAM, _NORMAL_STREAM, _ANOMALY_STREAM = 0, 1, 2


def sub_seed(seed: int, stream: int, index: int = 0) -> int:
    """Deterministic 32-bit seed for call `index` of `stream`."""
    sequence = np.random.SeedSequence([seed, stream, index])
    return int(sequence.generate_state(1)[0])


class AugmentedFold(NamedTuple):
    windows: List[Window]
    provenance: List[ProvenanceRecord]
    n_real_anomalies: int
    n_synthetic: int
    n_normals: int


def _type_order(ppr_type: Optional[PprType]) -> int:
    return -1 if ppr_type is None else list(PprType).index(ppr_type)


def allocate_demand(group_sizes: Dict, demand: int) -> Dict:
    """Split `demand` over groups proportional to their size, largest remainder first.

    Groups with fewer than two members can not be merged and receive nothing,
    their share goes to the remaining groups.
    """
    eligible = {key: n for key, n in group_sizes.items() if n >= 2}
    if not eligible:
        raise AugmentationError(
            f"Augmentation needs at least two anomaly windows of one type, "
            f"found {dict(group_sizes)}."
        )
    total = sum(eligible.values())
    keys = sorted(eligible, key=_type_order)
    exact = {key: demand * eligible[key] / total for key in keys}
    quota = {key: int(np.floor(exact[key])) for key in keys}
    remainder = demand - sum(quota.values())
    by_fraction = sorted(keys, key=lambda key: -(exact[key] - quota[key]))
    for key in by_fraction[:remainder]:
        quota[key] += 1
    return quota


def augment_fold(
    fold: Sequence[Window],
    target_ppr: int = 3000,
    target_total: int = 7500,
    seed: int = 0,
    num_segments: int = 5,
    n_jobs: Optional[int] = 1,
) -> AugmentedFold:
    """Balance `fold` and keep the lineage of every synthetic window.

    Parameters
    ----------
    fold: Sequence[Window]
        Training windows of one fold. Synthetics derive only from these.
    target_ppr: int (default=3000)
        Anomaly windows in the output, real ones first and synthetic ones after.
    target_total: int (default=7500)
        Windows in the output, the remainder are normal windows sampled
        uniformly without replacement.
    seed: int (default=0)
        Master seed. Merge call i draws its pair from sub-seed (seed, i).
    num_segments: int (default=5)
        Equal-length sections per synthetic window.
    n_jobs: int, optional (default=1)
        Threads used for merging.

    Raises
    ------
    AugmentationError
        If synthetics are needed but no PPR type has two windows to pair.
    """
    if not 0 < target_ppr <= target_total:
        raise ValueError(
            f"Require 0 < target_ppr <= target_total, got {target_ppr}/{target_total}."
        )
    anomalies = [w for w in fold if w.is_anomaly]
    normals = [w for w in fold if not w.is_anomaly]

    if len(anomalies) > target_ppr:
        rng = np.random.default_rng(sub_seed(seed, _ANOMALY_STREAM))
        keep = np.sort(rng.choice(len(anomalies), size=target_ppr, replace=False))
        log.info(f"Undersampling {len(anomalies)} anomaly windows to {target_ppr}.")
        anomalies = [anomalies[i] for i in keep]

    n_synthetic = target_ppr - len(anomalies)
    plans: List[MergePlan] = []
    if n_synthetic > 0:
        groups: Dict[Optional[PprType], List[Window]] = defaultdict(list)
        for window in anomalies:
            groups[window.ppr_type].append(window)
        quota = allocate_demand({k: len(v) for k, v in groups.items()}, n_synthetic)
        for ppr_type in sorted(quota, key=_type_order):
            members = groups[ppr_type]
            for _ in range(quota[ppr_type]):
                call = len(plans)
                call_seed = sub_seed(seed, _MERGE_STREAM, call)
                rng = np.random.default_rng(call_seed)
                i, j = rng.choice(len(members), size=2, replace=False)
                plans.append(
                    MergePlan(
                        members[i],
                        members[j],
                        num_segments=num_segments,
                        rng_seed=call_seed,
                        window_id=f"syn-{seed}-{call}",
                    )
                )
        per_type = ", ".join(
            f"{_type_name(k)}={quota[k]}" for k in sorted(quota, key=_type_order)
        )
        log.info(
            f"Generating {n_synthetic} synthetic windows from {len(anomalies)} "
            f"anomalies (seed {seed}), per type: {per_type}."
        )
    synthetics = parallel_map(merge_windows, plans, n_jobs)
    provenance = [
        ProvenanceRecord(
            window_id=window.window_id,
            parent_ids=(plan.source_a.window_id, plan.source_b.window_id),
            parent_subjects=(plan.source_a.subject_id, plan.source_b.subject_id),
            cut_points=plan.cuts,
            seed=plan.rng_seed,
            ppr_type=_type_name(window.ppr_type),
        )
        for plan, window in zip(plans, synthetics)
    ]

    n_normals = target_total - target_ppr
    if len(normals) < n_normals:
        log.warning(
            f"Fold holds {len(normals)} normal windows, fewer than the {n_normals} "
            "requested. Keeping all of them."
        )
    else:
        rng = np.random.default_rng(sub_seed(seed, _NORMAL_STREAM))
        keep = np.sort(rng.choice(len(normals), size=n_normals, replace=False))
        normals = [normals[i] for i in keep]

    return AugmentedFold(
        windows=anomalies + list(synthetics) + normals,
        provenance=provenance,
        n_real_anomalies=len(anomalies),
        n_synthetic=len(synthetics),
        n_normals=len(normals),
    )


def _type_name(ppr_type: Optional[PprType]) -> Optional[str]:
    return None if ppr_type is None else ppr_type.value


def balance_training_fold(
    fold: Sequence[Window],
    target_ppr: int = 3000,
    target_total: int = 7500,
    seed: int = 0,
    num_segments: int = 5,
    n_jobs: Optional[int] = 1,
) -> List[Window]:
    """Windows of `augment_fold`, see there for the parameters."""
    return augment_fold(
        fold, target_ppr, target_total, seed, num_segments, n_jobs
    ).windows
