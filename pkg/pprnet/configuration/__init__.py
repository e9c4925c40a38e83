from .defaults import DEFAULT_CONFIG, MODEL_PROFILES
from .parser import load_config, merge_configurations, resolve_config
from .settings import (
    architecture_from_config,
    preprocessing_from_config,
    training_from_config,
    transfer_plan_from_config,
)

__all__ = [
    "DEFAULT_CONFIG",
    "MODEL_PROFILES",
    "load_config",
    "merge_configurations",
    "resolve_config",
    "architecture_from_config",
    "preprocessing_from_config",
    "training_from_config",
    "transfer_plan_from_config",
]
