""" Montage transforms and channel unification. """
import logging
from typing import Iterable, List, Sequence, Tuple

import numpy as np

from pprnet.errors import ChannelResolutionError, MontageError
from pprnet.signal.recording import Montage, Recording

log = logging.getLogger(__name__)

# Longitudinal bipolar chain ("double banana") over the 19 common 10-20 electrodes.
DEFAULT_BIPOLAR_PAIRS: Tuple[Tuple[str, str], ...] = (
    ("Fp1", "F7"),
    ("F7", "T7"),
    ("T7", "P7"),
    ("P7", "O1"),
    ("Fp1", "F3"),
    ("F3", "C3"),
    ("C3", "P3"),
    ("P3", "O1"),
    ("Fp2", "F8"),
    ("F8", "T8"),
    ("T8", "P8"),
    ("P8", "O2"),
    ("Fp2", "F4"),
    ("F4", "C4"),
    ("C4", "P4"),
    ("P4", "O2"),
    ("Fz", "Cz"),
    ("Cz", "Pz"),
)

COMMON_10_20_ELECTRODES: Tuple[str, ...] = (
    "Fp1", "Fp2", "F7", "F3", "Fz", "F4", "F8", "T7", "C3", "Cz",
    "C4", "T8", "P7", "P3", "Pz", "P4", "P8", "O1", "O2",
)  # fmt: skip

# Old 10-20 nomenclature still found in clinical exports.
ELECTRODE_ALIASES = {"T3": "T7", "T4": "T8", "T5": "P7", "T6": "P8"}

SOURCE_EXTRA_CHANNELS: Tuple[str, ...] = ("FT9", "FT10")

# Second half of a referential label such as "EEG FP1-REF".
REFERENCE_ELECTRODES = frozenset({"REF", "LE", "AR", "AVG", "A1", "A2", "M1", "M2"})


def canonical_electrode(name: str) -> str:
    """Upper-case electrode name with old 10-20 names mapped to the new ones."""
    name = name.strip().upper()
    aliases = {old.upper(): new.upper() for old, new in ELECTRODE_ALIASES.items()}
    return aliases.get(name, name)


def derivation_name(anterior: str, posterior: str) -> str:
    return f"{anterior}-{posterior}"


def is_derivation(label: str) -> bool:
    """True for an anterior-posterior label like "Fp1-F7", False for "Fp1-REF"."""
    electrodes = [e.strip() for e in label.split("-")]
    return (
        len(electrodes) == 2
        and all(electrodes)
        and canonical_electrode(electrodes[1]) not in REFERENCE_ELECTRODES
    )


def infer_montage(channel_names: Sequence[str]) -> Montage:
    """Montage suggested by the channel labels of a stored recording.

    Bipolar when derivations make up the majority of the named channels, so
    that files with a few auxiliary channels (ECG, VNS) still qualify.
    Unnamed placeholder channels ("", "-", ".") are ignored.
    """
    named = [c for c in channel_names if c.strip() not in ("", "-", ".")]
    derivations = sum(is_derivation(c) for c in named)
    if named and 2 * derivations > len(named):
        return Montage.BIPOLAR
    return Montage.REFERENTIAL


def average_reference(data: np.ndarray) -> np.ndarray:
    """Subtract the mean over channels at every timestamp."""
    return data - data.mean(axis=0, keepdims=True)


def to_average(rec: Recording) -> Recording:
    """Re-reference a referential recording to the common average.

    An average-referenced recording is returned re-referenced again,
    which leaves it unchanged up to rounding.

    Raises
    ------
    MontageError
        If `rec` is in bipolar montage.
    """
    if rec.montage == Montage.BIPOLAR:
        raise MontageError(
            f"Average reference requires a referential recording, {rec} is bipolar."
        )
    return rec.replace(data=average_reference(rec.data), montage=Montage.AVERAGE)


def _resolve(rec: Recording, name: str) -> int:
    index = rec.channel_index(name)
    if index is None:
        canonical = canonical_electrode(name)
        for i, channel in enumerate(rec.channel_names):
            if canonical_electrode(channel) == canonical:
                return i
        raise ChannelResolutionError(
            f"Channel '{name}' not found in {rec.recording_id}: {rec.channel_names}."
        )
    return index


def to_bipolar(
    rec: Recording, pairs: Sequence[Tuple[str, str]] = DEFAULT_BIPOLAR_PAIRS
) -> Recording:
    """Derive one channel per (anterior, posterior) pair as anterior - posterior.

    Raises
    ------
    MontageError
        If `rec` is already bipolar.
    ChannelResolutionError
        If a pair names a channel which is not in `rec`.
    """
    if rec.montage == Montage.BIPOLAR:
        raise MontageError(f"{rec} is already in bipolar montage.")
    if len(pairs) == 0:
        raise ValueError("At least one bipolar pair is required.")
    anterior = [_resolve(rec, a) for a, _ in pairs]
    posterior = [_resolve(rec, p) for _, p in pairs]
    data = rec.data[anterior] - rec.data[posterior]
    names = [derivation_name(a, p) for a, p in pairs]
    return rec.replace(data=data, channel_names=names, montage=Montage.BIPOLAR)


def select_derivations(
    rec: Recording, pairs: Sequence[Tuple[str, str]] = DEFAULT_BIPOLAR_PAIRS
) -> Recording:
    """Keep only the derivations in `pairs`, in that order, from a bipolar recording.

    Recordings distributed in bipolar montage carry extra, ad-hoc derivations
    (e.g. around FT9/FT10) which are dropped here.
    """
    if rec.montage != Montage.BIPOLAR:
        raise MontageError(f"Selecting derivations requires bipolar montage: {rec}.")
    available = {}
    for i, channel in enumerate(rec.channel_names):
        electrodes = channel.split("-")
        if len(electrodes) == 2:
            key = tuple(canonical_electrode(e) for e in electrodes)
            available.setdefault(key, i)  # first occurrence wins on duplicates

    indices = []
    for anterior, posterior in pairs:
        key = (canonical_electrode(anterior), canonical_electrode(posterior))
        if key not in available:
            raise ChannelResolutionError(
                f"Derivation {derivation_name(anterior, posterior)} not found in "
                f"{rec.recording_id}: {rec.channel_names}."
            )
        indices.append(available[key])
    dropped = len(rec.channel_names) - len(indices)
    if dropped:
        log.debug(f"{rec.recording_id}: dropped {dropped} derivations not in pairs.")
    names = [derivation_name(a, p) for a, p in pairs]
    return rec.replace(data=rec.data[indices], channel_names=names)


def drop_channels(rec: Recording, names: Iterable[str]) -> Recording:
    """Remove the named channels, preserving the order of the remaining ones.

    Names which are not present are ignored with a warning.
    """
    to_drop: List[int] = []
    for name in names:
        index = rec.channel_index(name)
        if index is None:
            log.warning(f"Can not drop channel '{name}' from {rec.recording_id}.")
        else:
            to_drop.append(index)
    if not to_drop:
        return rec
    keep = [i for i in range(rec.n_channels) if i not in to_drop]
    return rec.replace(
        data=rec.data[keep], channel_names=[rec.channel_names[i] for i in keep]
    )


def unify_channels(
    rec: Recording,
    pairs: Sequence[Tuple[str, str]] = DEFAULT_BIPOLAR_PAIRS,
    drop: Iterable[str] = SOURCE_EXTRA_CHANNELS,
) -> Recording:
    """Bring a recording of either domain to the bipolar derivations in `pairs`."""
    if rec.montage == Montage.BIPOLAR:
        return select_derivations(rec, pairs)
    present = [name for name in drop if rec.channel_index(name) is not None]
    rec = drop_channels(rec, present)
    if rec.montage == Montage.REFERENTIAL:
        rec = to_average(rec)
    return to_bipolar(rec, pairs)
