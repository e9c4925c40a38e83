""" Save and load Inception Networks as versioned .npz archives. """
import json
import logging
import os
from typing import List

import numpy as np

from pprnet.errors import ConfigurationError
from pprnet.networks.inception import LAYER_IDS, InceptionArchitecture, InceptionNetwork

log = logging.getLogger(__name__)

CHECKPOINT_VERSION = 1
_META = "__meta__"
_FROZEN = "__frozen__"


def save_checkpoint(path: str, net: InceptionNetwork, **extra) -> None:
    """Store parameters, running statistics, freeze flags and hyperparameters.

    Keyword arguments are stored with the hyperparameters, e.g. the training
    settings or the seed of the run. Values must be JSON serializable.
    """
    meta = dict(
        version=CHECKPOINT_VERSION,
        input_shape=list(net.input_shape),
        architecture=net.architecture._asdict(),
        n_outputs=net.head.n_out,
        seed=net.seed,
        dtype=net.dtype.name,
        extra=extra,
    )
    arrays = dict(net.state())
    arrays[_META] = np.array(json.dumps(meta))
    arrays[_FROZEN] = np.array([net.freeze_flags[i] for i in LAYER_IDS])
    with open(path, "wb") as fh:
        np.savez(fh, **arrays)
    log.debug(f"Saved checkpoint of {net} to {path}.")


def load_checkpoint(path: str) -> InceptionNetwork:
    """Rebuild the network stored at `path`.

    Raises
    ------
    ConfigurationError
        If the file does not exist, is not a checkpoint or has another version.
    """
    if not os.path.exists(path):
        raise ConfigurationError(f"Checkpoint {path} does not exist.")
    with np.load(path, allow_pickle=False) as archive:
        if _META not in archive.files:
            raise ConfigurationError(f"{path} is not a pprnet checkpoint.")
        meta = json.loads(str(archive[_META]))
        if meta.get("version") != CHECKPOINT_VERSION:
            raise ConfigurationError(
                f"{path} has checkpoint version {meta.get('version')}, "
                f"expected {CHECKPOINT_VERSION}."
            )
        architecture = dict(meta["architecture"])
        architecture["kernel_sizes"] = tuple(architecture["kernel_sizes"])
        net = InceptionNetwork(
            tuple(meta["input_shape"]),
            InceptionArchitecture(**architecture),
            n_outputs=meta["n_outputs"],
            seed=meta["seed"],
            dtype=np.dtype(meta["dtype"]),
        )
        net.load_state(
            {k: archive[k] for k in archive.files if k not in (_META, _FROZEN)}
        )
        flags = archive[_FROZEN]
    for layer_id, frozen in zip(LAYER_IDS, flags):
        net.freeze([layer_id], bool(frozen))
    net.checkpoint_extra = meta.get("extra", {})
    return net


def member_paths(directory: str, n_members: int) -> List[str]:
    """Checkpoint path of each ensemble member in `directory`."""
    return [os.path.join(directory, f"member-{i + 1}.npz") for i in range(n_members)]
