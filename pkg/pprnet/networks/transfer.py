""" Freeze the early layers of a source-trained network and tune the rest. """
import copy
import hashlib
import json
import logging
from typing import Dict, FrozenSet, NamedTuple, Optional

import numpy as np

from pprnet.errors import ConfigurationError, ShapeError
from pprnet.logging.trace_logger import TraceLogger
from pprnet.networks.inception import LAYER_IDS, InceptionNetwork
from pprnet.networks.training import TrainingHyperparameters, train_network

log = logging.getLogger(__name__)

DEFAULT_TUNABLE_SCOPE: FrozenSet[str] = frozenset(
    {"block2.module2", "block2.module3", "gap", "head"}
)


class TransferPlan(NamedTuple):
    tunable_scope: FrozenSet[str] = DEFAULT_TUNABLE_SCOPE
    head_rebuild: bool = True
    learning_rate: float = 1e-4
    max_epochs: int = 50
    batch_size: int = 32
    patience: int = 10
    max_train_time_s: Optional[float] = None

    @property
    def frozen_scope(self):
        return [layer for layer in LAYER_IDS if layer not in self.tunable_scope]

    def validate(self) -> None:
        if not self.tunable_scope:
            raise ConfigurationError("The tunable scope of a transfer plan is empty.")
        unknown = set(self.tunable_scope) - set(LAYER_IDS)
        if unknown:
            raise ConfigurationError(
                f"Unknown layer ids {sorted(unknown)} in tunable scope, "
                f"valid ids are {list(LAYER_IDS)}."
            )

    def hyperparameters(self) -> TrainingHyperparameters:
        return TrainingHyperparameters.for_tuning(
            learning_rate=self.learning_rate,
            batch_size=self.batch_size,
            max_epochs=self.max_epochs,
            patience=self.patience,
            max_train_time_s=self.max_train_time_s,
        )


def apply_transfer(
    source_net: InceptionNetwork,
    plan: TransferPlan = TransferPlan(),
    seed: Optional[int] = None,
    target_shape=None,
) -> InceptionNetwork:
    """Copy of `source_net` with layers outside the tunable scope frozen.

    With `plan.head_rebuild` the head is replaced by a new one-unit sigmoid head
    initialized from `seed` (default: the network seed).

    Raises
    ------
    ConfigurationError
        If the tunable scope is empty or names unknown layers.
    ShapeError
        If `target_shape` differs from the input shape of `source_net`.
    """
    plan.validate()
    if target_shape is not None and tuple(target_shape) != source_net.input_shape:
        raise ShapeError(
            f"Target windows {tuple(target_shape)} do not fit a network trained "
            f"on {source_net.input_shape}."
        )
    net = copy.deepcopy(source_net)
    net.freeze(LAYER_IDS, False)
    net.freeze(plan.frozen_scope, True)
    if plan.head_rebuild:
        net.replace_head(1, seed)
        net.freeze(["head"], "head" not in plan.tunable_scope)
    net.history = []
    tunable = sorted(plan.tunable_scope)
    log.info(f"Transfer: frozen {plan.frozen_scope}, tunable {tunable}.")
    return net


def frozen_state(net: InceptionNetwork) -> Dict[str, np.ndarray]:
    """Parameters and running statistics of every frozen layer."""
    state = {}
    for layer_id, frozen in net.freeze_flags.items():
        if frozen:
            for name, value in net.layer(layer_id).state().items():
                state[f"{layer_id}.{name}"] = value
    return state


def frozen_checksums(net: InceptionNetwork) -> Dict[str, str]:
    """sha256 of the bytes of each frozen parameter tensor."""
    return {
        name: hashlib.sha256(np.ascontiguousarray(value).tobytes()).hexdigest()
        for name, value in frozen_state(net).items()
    }


def tune(
    net: InceptionNetwork,
    x: np.ndarray,
    y: np.ndarray,
    plan: TransferPlan = TransferPlan(),
    seed: int = 0,
    name: str = "IN",
    trace: Optional[TraceLogger] = None,
) -> InceptionNetwork:
    """Tune the unfrozen layers of `net` (in place) on target windows.

    Raises
    ------
    SingleClassError
        If the tuning labels hold one class only.
    RuntimeError
        If a frozen tensor changed, which would break the transfer contract.
    """
    before = frozen_checksums(net)
    tuned = train_network(
        x, y, plan.hyperparameters(), seed=seed, network=net, name=name, trace=trace
    )
    after = frozen_checksums(tuned)
    changed = [k for k in before if before[k] != after.get(k)]
    if changed:
        raise RuntimeError(f"Frozen tensors changed during tuning: {changed}.")
    return tuned


def transfer_manifest(net: InceptionNetwork, plan: TransferPlan) -> dict:
    return dict(
        tunable_scope=sorted(plan.tunable_scope),
        frozen_scope=plan.frozen_scope,
        head_rebuild=plan.head_rebuild,
        hyperparameters=plan.hyperparameters().hyperparameters,
        freeze_flags=net.freeze_flags,
        frozen_checksums=frozen_checksums(net),
    )


def write_manifest(path: str, net: InceptionNetwork, plan: TransferPlan) -> None:
    with open(path, "w") as fh:
        json.dump(transfer_manifest(net, plan), fh, indent=2)
