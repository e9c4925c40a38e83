""" From-scratch Inception Networks: layers, training, checkpoints and transfer. """
from .inception import LAYER_IDS, InceptionArchitecture, InceptionNetwork, forward
from .training import TrainingHyperparameters, backward_and_step, train_network
from .transfer import TransferPlan, apply_transfer, tune

__all__ = [
    "LAYER_IDS",
    "InceptionArchitecture",
    "InceptionNetwork",
    "forward",
    "TrainingHyperparameters",
    "backward_and_step",
    "train_network",
    "TransferPlan",
    "apply_transfer",
    "tune",
]
