from .experiments import Experiment, SeedPlan, pretrain_source, run_experiment
from .loso import Fold, loso_split
from .report import MetricsReport, combine_reports, emit_plot_data

__all__ = [
    "Experiment",
    "SeedPlan",
    "pretrain_source",
    "run_experiment",
    "Fold",
    "loso_split",
    "MetricsReport",
    "combine_reports",
    "emit_plot_data",
]
