from .__version__ import __version__
from .evaluation.experiments import Experiment, pretrain_source, run_experiment
from .networks.inception import InceptionArchitecture, InceptionNetwork
from .networks.transfer import TransferPlan, apply_transfer
from .postprocessing.ensemble import EnsembleModel

name = "pprnet"

__all__ = [
    "EnsembleModel",
    "Experiment",
    "InceptionArchitecture",
    "InceptionNetwork",
    "TransferPlan",
    "apply_transfer",
    "pretrain_source",
    "run_experiment",
]
