""" InceptionTime: independently seeded Inception Networks averaged into one model. """
import logging
from typing import List, Optional, Sequence

import numpy as np

from pprnet.logging.trace_logger import TraceLogger
from pprnet.networks.inception import InceptionArchitecture, InceptionNetwork
from pprnet.networks.training import TrainingHyperparameters, train_network
from pprnet.networks.transfer import TransferPlan, apply_transfer, tune
from pprnet.utilities.parallel import parallel_map

log = logging.getLogger(__name__)


class EnsembleModel:
    """Members share input shape and labels; probabilities are averaged uniformly."""

    def __init__(self, members: Sequence[InceptionNetwork]):
        if len(members) == 0:
            raise ValueError("An ensemble requires at least one member.")
        shapes = {member.input_shape for member in members}
        if len(shapes) > 1:
            raise ValueError(f"Members differ in input shape: {shapes}.")
        self.members: List[InceptionNetwork] = list(members)

    @property
    def input_shape(self):
        return self.members[0].input_shape

    def member_probabilities(self, x: np.ndarray) -> np.ndarray:
        """[members, windows, 2] probabilities of every member."""
        return np.stack([member.predict_proba(x) for member in self.members])

    def predict_proba(self, x: np.ndarray) -> np.ndarray:
        return average_probabilities(self.member_probabilities(x))

    def predict(self, x: np.ndarray) -> np.ndarray:
        return decide(self.predict_proba(x))

    def __str__(self):
        seeds = ",".join(str(member.seed) for member in self.members)
        return f"Ensemble of {len(self.members)} Inception Networks (seeds {seeds})."


def average_probabilities(member_probabilities: np.ndarray) -> np.ndarray:
    """Mean over the first axis; the members' probability vectors."""
    member_probabilities = np.asarray(member_probabilities, dtype=np.float64)
    if member_probabilities.shape[0] == 0:
        raise ValueError("Can not average the predictions of an empty ensemble.")
    return member_probabilities.sum(axis=0) / member_probabilities.shape[0]


def decide(probabilities: np.ndarray) -> np.ndarray:
    """Argmax label index per row, ties resolve to anomaly (index 1)."""
    probabilities = np.atleast_2d(probabilities)
    return (probabilities[:, 1] >= probabilities[:, 0]).astype(int)


def ensemble_predict(model: EnsembleModel, window: np.ndarray) -> np.ndarray:
    """Averaged probability vector [P(normal), P(anomaly)] of one window."""
    return model.predict_proba(np.asarray(window)[None])[0]


def train_ensemble(
    x: np.ndarray,
    y: np.ndarray,
    seeds: Sequence[int],
    hyperparameters: Optional[TrainingHyperparameters] = None,
    architecture: InceptionArchitecture = InceptionArchitecture(),
    trace: Optional[TraceLogger] = None,
    n_jobs: Optional[int] = 1,
) -> EnsembleModel:
    """Train one network per seed; members train concurrently on `n_jobs` threads."""

    def train_member(member: int) -> InceptionNetwork:
        return train_network(
            x,
            y,
            hyperparameters,
            seed=seeds[member],
            architecture=architecture,
            name=f"IN-{member + 1}",
            trace=trace,
        )

    return EnsembleModel(parallel_map(train_member, range(len(seeds)), n_jobs))


def transfer_ensemble(
    source: EnsembleModel,
    x: np.ndarray,
    y: np.ndarray,
    plan: TransferPlan,
    seeds: Sequence[int],
    trace: Optional[TraceLogger] = None,
    n_jobs: Optional[int] = 1,
) -> EnsembleModel:
    """Apply `plan` to every member of `source` and tune it on target windows."""
    if len(seeds) != len(source.members):
        raise ValueError(f"{len(seeds)} seeds for {len(source.members)} members.")

    def tune_member(member: int) -> InceptionNetwork:
        net = apply_transfer(
            source.members[member], plan, seed=seeds[member], target_shape=x.shape[1:]
        )
        return tune(net, x, y, plan, seeds[member], f"IN-{member + 1}", trace)

    return EnsembleModel(parallel_map(tune_member, range(len(seeds)), n_jobs))
