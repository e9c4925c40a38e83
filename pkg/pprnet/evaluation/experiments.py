""" Source pretraining and the three LOSO experiments.

EXP1 tunes the transferred ensemble on each training fold as is, EXP2 first
balances the training fold with synthetic windows, EXP3 evaluates the feature
baseline on the balanced folds. Test folds always keep all original windows.
"""
from enum import Enum
import logging
import os
from typing import Any, Dict, List, NamedTuple, Optional, Sequence, Tuple

import numpy as np
from sklearn.model_selection import train_test_split

from pprnet.augmentation.balancing import augment_fold
from pprnet.augmentation.provenance import (
    ProvenanceRecord,
    audit_lineage,
    write_provenance,
)
from pprnet.baseline.dense import DenseNetClassifier
from pprnet.baseline.features import FeatureExtractor, write_feature_csv
from pprnet.baseline.projection import fit_pca
from pprnet.configuration.settings import (
    architecture_from_config,
    training_from_config,
    transfer_plan_from_config,
)
from pprnet.errors import ConfigurationError
from pprnet.evaluation.loso import Fold, loso_split, split_windows
from pprnet.evaluation.report import MetricsReport, emit_plot_data
from pprnet.logging.trace_logger import TraceLogger
from pprnet.postprocessing.ensemble import (
    EnsembleModel,
    average_probabilities,
    decide,
    train_ensemble,
    transfer_ensemble,
)
from pprnet.signal.recording import Window
from pprnet.signal.windowing import windows_to_arrays
from pprnet.utilities.generic.stopwatch import Stopwatch
from pprnet.utilities.generic.timekeeper import TimeKeeper
from pprnet.utilities.metrics import ConfusionCounts, MetricName
from pprnet.utilities.parallel import parallel_map

log = logging.getLogger(__name__)

ENSEMBLE_MODEL = "IT"
BASELINE_MODEL = "DL-NN"
HOLDOUT_FRACTION = 0.1


class Experiment(Enum):
    EXP1 = "exp1"  #: transfer and tune, no augmentation
    EXP2 = "exp2"  #: transfer and tune on augmented training folds
    EXP3 = "exp3"  #: feature baseline on augmented training folds

    @property
    def augments(self) -> bool:
        return self in (Experiment.EXP2, Experiment.EXP3)


class SeedPlan:
    """Expands one master seed into the sub-seeds of every randomized stage.

    Each sub-seed depends only on the master seed and the stage path, so
    reruns and parallel folds are reproducible. Derived seeds are recorded.
    """

    # Stage ids, part of the derivation path.
    _MEMBER, _TUNING, _AUGMENT, _BASELINE, _HOLDOUT = range(5)

    def __init__(self, master_seed: int):
        if master_seed < 0:
            raise ValueError(f"The master seed must be non-negative: {master_seed}.")
        self.master_seed = master_seed
        self.derived: Dict[str, int] = {}

    def _derive(self, name: str, *path: int) -> int:
        sequence = np.random.SeedSequence([self.master_seed, *path])
        seed = int(sequence.generate_state(1)[0])
        if name not in self.derived:
            self.derived[name] = seed
            log.info(f"Sub-seed {name}: {seed}")
        return seed

    def member(self, member: int) -> int:
        return self._derive(f"member/{member}", self._MEMBER, member)

    def tuning(self, fold: int, member: int) -> int:
        return self._derive(f"tune/{fold}/{member}", self._TUNING, fold, member)

    def augmentation(self, fold: int) -> int:
        return self._derive(f"augment/{fold}", self._AUGMENT, fold)

    def baseline(self, fold: int, hidden_size: int) -> int:
        return self._derive(
            f"baseline/{fold}/{hidden_size}", self._BASELINE, fold, hidden_size
        )

    def holdout(self) -> int:
        return self._derive("holdout", self._HOLDOUT)


def member_names(n_members: int) -> List[str]:
    return [f"IN-{i + 1}" for i in range(n_members)]


def type_detections(
    windows: Sequence[Window], predicted: np.ndarray
) -> Dict[str, Tuple[int, int]]:
    """Per PPR window type: (windows predicted anomaly, anomaly windows)."""
    counts: Dict[str, Tuple[int, int]] = {}
    for window, label in zip(windows, predicted):
        if window.ppr_type is None:
            continue
        detected, total = counts.get(window.ppr_type.value, (0, 0))
        counts[window.ppr_type.value] = (detected + int(label == 1), total + 1)
    return counts


class FoldOutcome(NamedTuple):
    fold: Fold
    # model -> (confusion counts, per-type detections)
    results: Dict[str, Tuple[ConfusionCounts, Dict[str, Tuple[int, int]]]]
    provenance: List[ProvenanceRecord]
    n_train: int
    duration: float


class ExperimentResult(NamedTuple):
    report: MetricsReport
    provenance: Dict[str, List[ProvenanceRecord]]


class PretrainResult(NamedTuple):
    ensemble: EnsembleModel
    report: MetricsReport


def _trace(output_directory: Optional[str], name: str) -> Optional[TraceLogger]:
    if output_directory is None:
        return None
    return TraceLogger(os.path.join(output_directory, f"{name}.trace.csv"))


def pretrain_source(
    windows: Sequence[Window],
    config: Dict[str, Any],
    seeds: Optional[SeedPlan] = None,
    output_directory: Optional[str] = None,
) -> PretrainResult:
    """Train the source ensemble on 90% of the source windows.

    The stratified 10% hold-out is evaluated per member and for the ensemble,
    reported as a single pseudo-subject 'holdout'.
    """
    seeds = seeds or SeedPlan(config["seed"])
    x, y = windows_to_arrays(windows, config["normalize_windows"])
    train, holdout = train_test_split(
        np.arange(len(y)),
        test_size=HOLDOUT_FRACTION,
        stratify=y,
        random_state=seeds.holdout(),
    )
    member_seeds = [seeds.member(m) for m in range(config["n_members"])]
    ensemble = train_ensemble(
        x[train],
        y[train],
        member_seeds,
        training_from_config(config),
        architecture_from_config(config),
        trace=_trace(output_directory, "pretrain"),
        n_jobs=config["jobs"],
    )

    names = member_names(len(ensemble.members))
    report = MetricsReport(
        "pretrain", names + [ENSEMBLE_MODEL], config, seeds.master_seed, seeds.derived
    )
    member_proba = ensemble.member_probabilities(x[holdout])
    predictions = [decide(p) for p in member_proba]
    predictions.append(decide(average_probabilities(member_proba)))
    for name, predicted in zip(report.models, predictions):
        counts = ConfusionCounts.from_predictions(y[holdout], predicted)
        report.add(name, "holdout", counts)
    report.summary_model = ENSEMBLE_MODEL
    return PretrainResult(ensemble, report)


def _check_corpus(windows: Sequence[Window]) -> None:
    if not windows:
        raise ConfigurationError("The target corpus holds no windows.")
    if not any(w.is_anomaly for w in windows):
        raise ConfigurationError(
            "The target corpus has no anomaly windows, check the annotation files."
        )


def run_experiment(
    experiment: Experiment,
    windows: Sequence[Window],
    config: Dict[str, Any],
    source: Optional[EnsembleModel] = None,
    output_directory: Optional[str] = None,
    seeds: Optional[SeedPlan] = None,
) -> ExperimentResult:
    """Run `experiment` over the LOSO folds of the target `windows`.

    Parameters
    ----------
    experiment: Experiment
    windows: Sequence[Window]
        Preprocessed and labeled target-domain windows.
    config: Dict[str, Any]
        Resolved configuration, see `pprnet.configuration`.
    source: EnsembleModel, optional (default=None)
        Source-trained ensemble, required for EXP1 and EXP2.
    output_directory: str, optional (default=None)
        If set, receives training traces, provenance sidecars, the report as
        JSON and text, and the plot data.
    seeds: SeedPlan, optional (default=None)
        Defaults to a plan of the configured master seed.

    Raises
    ------
    ConfigurationError
        If EXP1/EXP2 lack a source ensemble or the corpus lacks anomaly windows.
    RuntimeError
        If a synthetic training window descends from the test subject.
    """
    _check_corpus(windows)
    if experiment != Experiment.EXP3 and source is None:
        raise ConfigurationError(
            f"{experiment.value} requires source-trained checkpoints, none given."
        )
    seeds = seeds or SeedPlan(config["seed"])
    folds = loso_split(w.subject_id for w in windows)
    trace = _trace(output_directory, experiment.value)
    fold_jobs = config["jobs"]

    def run_fold(fold: Fold) -> FoldOutcome:
        with Stopwatch() as sw:
            train, test = split_windows(windows, fold)
            provenance: List[ProvenanceRecord] = []
            if experiment.augments:
                augmented = augment_fold(
                    train,
                    target_ppr=config["augment_target_ppr"],
                    target_total=config["augment_target_total"],
                    seed=seeds.augmentation(fold.index),
                    num_segments=config["augment_num_segments"],
                )
                leaks = audit_lineage(augmented.provenance, {fold.test_subject})
                if leaks:
                    raise RuntimeError(
                        f"{len(leaks)} synthetic windows of fold {fold.index} "
                        f"descend from test subject {fold.test_subject}."
                    )
                train, provenance = augmented.windows, augmented.provenance
            if experiment == Experiment.EXP3:
                results = _baseline_fold(
                    fold, train, test, config, seeds, output_directory
                )
            else:
                results = _transfer_fold(
                    fold, train, test, config, seeds, source, trace
                )
        log.info(
            f"{experiment.value} fold {fold.index} (test {fold.test_subject}) done "
            f"in {sw.elapsed_time:.1f}s."
        )
        return FoldOutcome(fold, results, provenance, len(train), sw.elapsed_time)

    timekeeper = TimeKeeper()
    with timekeeper.start_activity(experiment.value, activity_meta=[len(folds)]):
        outcomes = parallel_map(run_fold, folds, fold_jobs)

    report = MetricsReport(
        experiment.value, config=config, seed=seeds.master_seed, sub_seeds=seeds.derived
    )
    for outcome in outcomes:
        for model, (counts, type_counts) in outcome.results.items():
            report.add(model, outcome.fold.test_subject, counts, type_counts)
    if experiment == Experiment.EXP3:
        _add_best_baseline(report)
    else:
        report.summary_model = ENSEMBLE_MODEL

    provenance = {o.fold.test_subject: o.provenance for o in outcomes}
    if output_directory is not None:
        _write_outputs(report, provenance, output_directory)
    return ExperimentResult(report, provenance)


def _transfer_fold(
    fold: Fold,
    train: List[Window],
    test: List[Window],
    config: Dict[str, Any],
    seeds: SeedPlan,
    source: EnsembleModel,
    trace: Optional[TraceLogger],
) -> Dict[str, Tuple[ConfusionCounts, Dict[str, Tuple[int, int]]]]:
    x_train, y_train = windows_to_arrays(train, config["normalize_windows"])
    x_test, y_test = windows_to_arrays(test, config["normalize_windows"])
    member_seeds = [seeds.tuning(fold.index, m) for m in range(len(source.members))]
    tuned = transfer_ensemble(
        source, x_train, y_train, transfer_plan_from_config(config), member_seeds, trace
    )
    member_proba = tuned.member_probabilities(x_test)
    predictions = {
        name: decide(p)
        for name, p in zip(member_names(len(member_seeds)), member_proba)
    }
    predictions[ENSEMBLE_MODEL] = decide(average_probabilities(member_proba))
    return {
        name: (
            ConfusionCounts.from_predictions(y_test, predicted),
            type_detections(test, predicted),
        )
        for name, predicted in predictions.items()
    }


def _baseline_fold(
    fold: Fold,
    train: List[Window],
    test: List[Window],
    config: Dict[str, Any],
    seeds: SeedPlan,
    output_directory: Optional[str] = None,
) -> Dict[str, Tuple[ConfusionCounts, Dict[str, Tuple[int, int]]]]:
    # Amplitude features need the raw microvolt windows.
    x_train, y_train = windows_to_arrays(train, normalize=False)
    x_test, y_test = windows_to_arrays(test, normalize=False)
    extractor = FeatureExtractor(train[0].sampling_rate_hz)
    f_train, f_test = extractor.transform(x_train), extractor.transform(x_test)
    projector = fit_pca(f_train, config["baseline_components"])
    z_train, z_test = projector.transform(f_train), projector.transform(f_test)
    if output_directory is not None:
        prefix = f"{Experiment.EXP3.value}.fold-{fold.test_subject}"
        for part, features, part_windows in [
            ("train", f_train, train),
            ("test", f_test, test),
        ]:
            write_feature_csv(
                os.path.join(output_directory, f"{prefix}.{part}.features.csv"),
                features,
                x_train.shape[1],
                [w.window_id for w in part_windows],
            )

    results = {}
    for hidden_size in config["baseline_hidden_sizes"]:
        classifier = DenseNetClassifier(
            hidden_size,
            max_epochs=config["baseline_max_epochs"],
            seed=seeds.baseline(fold.index, hidden_size),
        ).fit(z_train, y_train)
        predicted = classifier.predict(z_test)
        results[f"{BASELINE_MODEL}-{hidden_size}"] = (
            ConfusionCounts.from_predictions(y_test, predicted),
            type_detections(test, predicted),
        )
    return results


def _add_best_baseline(report: MetricsReport) -> None:
    """Repeat the rows of the hidden width with the best mean ACC as 'DL-NN'."""
    best = report.best_model(f"{BASELINE_MODEL}-", MetricName.ACC)
    log.info(f"Best baseline width by mean ACC: {best}.")
    for subject in report.subjects:
        result = report.result(best, subject)
        report.add(BASELINE_MODEL, subject, result.counts, result.type_counts)
    report.summary_model = BASELINE_MODEL


def _write_outputs(
    report: MetricsReport,
    provenance: Dict[str, List[ProvenanceRecord]],
    output_directory: str,
) -> None:
    name = report.experiment
    report.write(
        os.path.join(output_directory, f"{name}.report.json"),
        os.path.join(output_directory, f"{name}.report.txt"),
    )
    emit_plot_data(report, os.path.join(output_directory, f"{name}.plot.csv"))
    for subject, records in provenance.items():
        if records:
            filename = f"{name}.fold-{subject}.provenance.jsonl"
            path = os.path.join(output_directory, filename)
            write_provenance(path, records)
