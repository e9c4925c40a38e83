""" Typed settings objects built from a resolved configuration. """
from typing import Any, Dict

from pprnet.configuration.parser import parse_pairs
from pprnet.networks.inception import InceptionArchitecture
from pprnet.networks.training import TrainingHyperparameters
from pprnet.networks.transfer import TransferPlan
from pprnet.signal.pipeline import PreprocessingConfig


def preprocessing_from_config(config: Dict[str, Any]) -> PreprocessingConfig:
    return PreprocessingConfig(
        target_rate_hz=config["target_rate_hz"],
        window_length_s=config["window_length_s"],
        source_overlap=config["source_overlap"],
        target_overlap=config["target_overlap"],
        drop_channels=tuple(config["drop_channels"]),
        bipolar_pairs=parse_pairs(config["bipolar_pairs"]),
    )


def architecture_from_config(config: Dict[str, Any]) -> InceptionArchitecture:
    return InceptionArchitecture.from_profile(config["model_profile"])


def training_from_config(config: Dict[str, Any]) -> TrainingHyperparameters:
    return TrainingHyperparameters(
        learning_rate=config["learning_rate"],
        batch_size=config["batch_size"],
        max_epochs=config["max_epochs"],
        patience=config["patience"],
        validation_fraction=config["validation_fraction"],
        max_train_time_s=config["max_train_time_s"],
    )


def transfer_plan_from_config(config: Dict[str, Any]) -> TransferPlan:
    plan = TransferPlan(
        tunable_scope=frozenset(config["tunable_scope"]),
        head_rebuild=config["head_rebuild"],
        learning_rate=config["tune_learning_rate"],
        max_epochs=config["tune_max_epochs"],
        batch_size=config["tune_batch_size"],
        patience=config["patience"],
        max_train_time_s=config["max_train_time_s"],
    )
    plan.validate()
    return plan
