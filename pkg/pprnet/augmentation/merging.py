""" Synthetic anomaly windows from alternating segments of two parent windows. """
import logging
from typing import NamedTuple, Optional, Tuple

import numpy as np

from pprnet.errors import MergeError
from pprnet.signal.recording import Window

log = logging.getLogger(__name__)

PARENT_A, PARENT_B = 0, 1
# Weight of the segment that ends at a cut x, for samples x-2 .. x+2.
JUNCTION_WEIGHTS = np.array([1.0, 0.75, 0.5, 0.25, 0.0])
JUNCTION_HALF_WIDTH = 2


def equal_cut_points(n_samples: int, num_segments: int) -> Tuple[int, ...]:
    """Cut points splitting `n_samples` into `num_segments` equal-length sections."""
    return tuple(
        int(round(k * n_samples / num_segments)) for k in range(1, num_segments)
    )


class MergePlan(NamedTuple):
    source_a: Window
    source_b: Window
    num_segments: int = 5
    cut_points: Optional[Tuple[int, ...]] = None
    rng_seed: Optional[int] = None
    window_id: Optional[str] = None

    @property
    def cuts(self) -> Tuple[int, ...]:
        if self.cut_points is not None:
            return tuple(self.cut_points)
        return equal_cut_points(self.source_a.shape[1], self.num_segments)

    def validate(self) -> None:
        """Raise MergeError unless both parents and the cut points fit together."""
        a, b = self.source_a, self.source_b
        if a.shape != b.shape:
            raise MergeError(f"Parents differ in shape: {a.shape} vs {b.shape}.")
        if a.label != b.label or a.ppr_type != b.ppr_type:
            raise MergeError(
                f"Parents differ in type: {a.window_id} is {a.label.name}/{a.ppr_type}"
                f", {b.window_id} is {b.label.name}/{b.ppr_type}."
            )
        if a.sampling_rate_hz != b.sampling_rate_hz:
            raise MergeError("Parents differ in sampling rate.")
        if self.num_segments < 2:
            raise MergeError(f"num_segments must be at least 2: {self.num_segments}.")
        cuts = self.cuts
        if len(cuts) != self.num_segments - 1:
            raise MergeError(
                f"{self.num_segments} segments need {self.num_segments - 1} cut "
                f"points, got {len(cuts)}."
            )
        n_samples = a.shape[1]
        lowest, highest = JUNCTION_HALF_WIDTH, n_samples - 1 - JUNCTION_HALF_WIDTH
        if cuts and (cuts[0] < lowest or cuts[-1] > highest):
            raise MergeError(
                f"Cut points {cuts} must lie within [{lowest}, {highest}] for "
                f"windows of {n_samples} samples."
            )
        if any(y - x < 2 * JUNCTION_HALF_WIDTH for x, y in zip(cuts, cuts[1:])):
            raise MergeError(
                f"Cut points {cuts} are too close to smooth each junction."
            )

    def segment_sources(self) -> np.ndarray:
        """Parent (PARENT_A or PARENT_B) of each sample index before smoothing.

        A cut point belongs to the segment starting at it.
        """
        n_samples = self.source_a.shape[1]
        segment = np.searchsorted(np.asarray(self.cuts), np.arange(n_samples), "right")
        return (segment % 2).astype(np.int8)


def merge_windows(plan: MergePlan) -> Window:
    """Join alternating segments of the parents, A first, smoothing every junction.

    Around each cut x the samples x-2 .. x+2 are the weighted sum
    w * end + (1 - w) * start with w = 1, 0.75, 0.5, 0.25, 0, where `end` is the
    parent of the segment finishing at x and `start` the one beginning there.
    All channels share the cut points. Arithmetic stays in the parents' dtype.

    Raises
    ------
    MergeError
        If the parents differ in shape, label, PPR type or rate, or the cut
        points do not leave room for the junctions.
    """
    plan.validate()
    a, b = plan.source_a.data, plan.source_b.data
    dtype = np.result_type(a, b)
    parents = np.stack([a, b]).astype(dtype, copy=False)
    sources = plan.segment_sources()
    merged = np.where(sources == PARENT_A, parents[PARENT_A], parents[PARENT_B])

    weights = JUNCTION_WEIGHTS.astype(dtype)
    for cut in plan.cuts:
        ending, starting = sources[cut - 1], sources[cut]
        span = slice(cut - JUNCTION_HALF_WIDTH, cut + JUNCTION_HALF_WIDTH + 1)
        ending_part = parents[ending][:, span]
        starting_part = parents[starting][:, span]
        merged[:, span] = weights * ending_part + (1 - weights) * starting_part

    first = plan.source_a
    subjects = sorted({first.subject_id, plan.source_b.subject_id})
    window_id = plan.window_id
    if window_id is None:
        window_id = f"{first.window_id}*{plan.source_b.window_id}"
    return Window(
        data=merged,
        label=first.label,
        subject_id="+".join(subjects),
        start_s=first.start_s,
        sampling_rate_hz=first.sampling_rate_hz,
        ppr_type=first.ppr_type,
        window_id=window_id,
    )


def junction_residual(plan: MergePlan, merged: Window) -> float:
    """Largest deviation of `merged` from the junction rule of `plan`.

    Zero (up to rounding) for any window produced by `merge_windows(plan)`.
    """
    sources = plan.segment_sources()
    parents = (plan.source_a.data, plan.source_b.data)
    worst = 0.0
    for cut in plan.cuts:
        ending, starting = parents[sources[cut - 1]], parents[sources[cut]]
        for offset, weight in zip(range(-2, 3), JUNCTION_WEIGHTS):
            t = cut + offset
            expected = weight * ending[:, t] + (1 - weight) * starting[:, t]
            worst = max(worst, float(np.max(np.abs(merged.data[:, t] - expected))))
    return worst

