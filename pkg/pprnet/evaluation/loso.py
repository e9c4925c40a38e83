""" Leave-one-subject-out folds. """
from typing import Iterable, List, NamedTuple, Sequence, Tuple

import numpy as np
from sklearn.model_selection import LeaveOneGroupOut

from pprnet.errors import InsufficientDataError
from pprnet.signal.recording import Window


class Fold(NamedTuple):
    index: int
    test_subject: str
    train_subjects: Tuple[str, ...]


def loso_split(subjects: Iterable[str]) -> List[Fold]:
    """One fold per distinct subject, ordered by subject id.

    The order of `subjects` (and repetitions in it) does not affect the folds.

    Raises
    ------
    InsufficientDataError
        If fewer than two distinct subjects are given.
    """
    groups = np.array(sorted(set(subjects)), dtype=object)
    if len(groups) < 2:
        raise InsufficientDataError(
            f"Leave-one-subject-out needs at least 2 subjects, got {list(groups)}."
        )
    folds = []
    splitter = LeaveOneGroupOut()
    for index, (train, test) in enumerate(splitter.split(groups, groups=groups)):
        folds.append(
            Fold(
                index=index,
                test_subject=str(groups[test[0]]),
                train_subjects=tuple(str(s) for s in groups[train]),
            )
        )
    return folds


def split_windows(
    windows: Sequence[Window], fold: Fold
) -> Tuple[List[Window], List[Window]]:
    """(train, test) windows of `fold`."""
    train_subjects = set(fold.train_subjects)
    train = [w for w in windows if w.subject_id in train_subjects]
    test = [w for w in windows if w.subject_id == fold.test_subject]
    return train, test
