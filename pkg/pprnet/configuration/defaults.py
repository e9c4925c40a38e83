""" Default values of every configuration key and the model profiles. """
from pprnet.signal.montage import DEFAULT_BIPOLAR_PAIRS, SOURCE_EXTRA_CHANNELS

MODEL_PROFILES = {
    "default": dict(n_filters=32, bottleneck_size=32, kernel_sizes=[40, 20, 10]),
    "tiny": dict(n_filters=4, bottleneck_size=4, kernel_sizes=[9, 5, 3]),
}

# Keys without a default must be set in the config file or on the command line.
REQUIRED_KEYS = ("seed",)

DEFAULT_CONFIG = dict(
    jobs=1,
    # preprocessing
    window_length_s=1.0,
    source_overlap=0.0,
    target_overlap=0.9,
    target_rate_hz=500,
    drop_channels=list(SOURCE_EXTRA_CHANNELS),
    bipolar_pairs=[f"{a}-{p}" for a, p in DEFAULT_BIPOLAR_PAIRS],
    normalize_windows=True,
    # augmentation
    augment_target_ppr=3000,
    augment_target_total=7500,
    augment_num_segments=5,
    # source training
    model_profile="default",
    n_members=5,
    learning_rate=1e-3,
    batch_size=64,
    max_epochs=100,
    patience=10,
    validation_fraction=0.1,
    max_train_time_s=None,
    # transfer
    tune_learning_rate=1e-4,
    tune_batch_size=32,
    tune_max_epochs=50,
    tunable_scope=["block2.module2", "block2.module3", "gap", "head"],
    head_rebuild=True,
    # feature baseline
    baseline_hidden_sizes=[10, 20, 30, 40, 50],
    baseline_components=12,
    baseline_max_epochs=200,
)

# Expected type per key, where the default value does not show it.
KEY_TYPES = {"max_train_time_s": (int, float, type(None)), "seed": (int,)}
