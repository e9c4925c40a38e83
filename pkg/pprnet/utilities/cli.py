import argparse
import logging
import os
import sys
from typing import Any, Dict, List, Union

from pprnet.augmentation.balancing import augment_fold
from pprnet.augmentation.provenance import provenance_path, write_provenance
from pprnet.configuration.parser import resolve_config
from pprnet.configuration.settings import (
    preprocessing_from_config,
    transfer_plan_from_config,
)
from pprnet.data_loading.corpus import read_corpus
from pprnet.data_loading.window_store import read_window_store, write_window_store
from pprnet.errors import ConfigurationError, NumericalError, PprDataError
from pprnet.evaluation.experiments import (
    Experiment,
    SeedPlan,
    pretrain_source,
    run_experiment,
)
from pprnet.evaluation.report import MetricsReport, combine_reports
from pprnet.logging.utility_functions import (
    pprnet_log,
    register_file_log,
    register_stream_log,
)
from pprnet.networks.checkpoint import load_checkpoint, member_paths, save_checkpoint
from pprnet.networks.transfer import write_manifest
from pprnet.postprocessing.ensemble import EnsembleModel, transfer_ensemble
from pprnet.signal.pipeline import corpus_to_windows
from pprnet.signal.recording import Domain, Montage
from pprnet.signal.windowing import corpus_balance, windows_to_arrays
from pprnet.synthetic import SynthConfig, generate, write_corpus
from pprnet.utilities.generic.timekeeper import TimeKeeper

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_NUMERICAL = 0, 1, 2, 3

log = logging.getLogger(__name__)


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def make_parser() -> argparse.ArgumentParser:
    desc = "Detect photoparoxysmal responses in EEG with transferred InceptionTime."
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument(
        "-c",
        "--config",
        dest="config",
        type=str,
        default=None,
        help="Flat YAML file with configuration keys; flags override its values.",
    )
    common.add_argument(
        "--seed", dest="seed", type=int, default=None, help="Master seed."
    )
    common.add_argument(
        "--jobs",
        dest="jobs",
        type=int,
        default=None,
        help="Maximum number of worker threads, -1 for all cores.",
    )
    common.add_argument(
        "-v", dest="verbose", action="store_true", help="Report progress to console."
    )

    parser = _Parser(description=desc)
    commands = parser.add_subparsers(dest="command", parser_class=_Parser)
    commands.required = True

    synth = commands.add_parser("synth", parents=[common], help="Generate a corpus.")
    synth.add_argument("--domain", choices=["source", "target"], default="target")
    synth.add_argument("-o", dest="output", required=True, help="Output directory.")
    synth.add_argument("--subjects", dest="subjects", type=int, default=None)
    synth.add_argument("--duration", dest="duration_s", type=float, default=None)
    synth.add_argument("--amplitude-ratio", dest="amplitude_ratio", type=float)
    synth.add_argument("--bursts", dest="bursts", type=int, default=None)

    preprocess = commands.add_parser(
        "preprocess", parents=[common], help="EDF files to a window store."
    )
    preprocess.add_argument("input", help="Directory of EDF and annotation files.")
    preprocess.add_argument("--domain", choices=["source", "target"], default="target")
    preprocess.add_argument("-o", dest="output", required=True, help="Window store.")
    preprocess.add_argument(
        "--overlap", dest="overlap", type=float, default=None, help="Window overlap."
    )
    preprocess.add_argument(
        "--summary",
        dest="summary",
        default=None,
        help="Seizure summary file, replaces annotation CSVs.",
    )
    preprocess.add_argument(
        "--montage",
        choices=[m.value for m in Montage],
        default=None,
        help="Montage of the EDF files, inferred from channel labels by default.",
    )

    augment = commands.add_parser(
        "augment", parents=[common], help="Balance a window store."
    )
    augment.add_argument("input", help="Window store.")
    augment.add_argument("-o", dest="output", required=True, help="Balanced store.")
    augment.add_argument("--target-ppr", dest="augment_target_ppr", type=int)
    augment.add_argument("--target-total", dest="augment_target_total", type=int)

    pretrain = commands.add_parser(
        "pretrain", parents=[common], help="Train the source ensemble."
    )
    pretrain.add_argument("input", help="Source window store.")
    pretrain.add_argument("-o", dest="output", required=True, help="Checkpoint dir.")
    pretrain.add_argument("--seeds", dest="n_members", type=int, default=None)
    pretrain.add_argument("--profile", dest="model_profile", default=None)
    pretrain.add_argument("--max-epochs", dest="max_epochs", type=int, default=None)

    transfer = commands.add_parser(
        "transfer", parents=[common], help="Tune the source ensemble on target data."
    )
    transfer.add_argument("input", help="Target window store.")
    transfer.add_argument("--checkpoints", required=True, help="Source checkpoint dir.")
    transfer.add_argument("-o", dest="output", required=True, help="Output directory.")
    transfer.add_argument("--tune-max-epochs", dest="tune_max_epochs", type=int)

    for experiment in Experiment:
        sub = commands.add_parser(
            experiment.value, parents=[common], help=f"Run {experiment.name} (LOSO)."
        )
        sub.add_argument("input", help="Target window store.")
        sub.add_argument("-o", dest="output", required=True, help="Output directory.")
        if experiment != Experiment.EXP3:
            sub.add_argument("--checkpoints", required=True, help="Source checkpoints.")
            sub.add_argument("--seeds", dest="n_members", type=int, default=None)
            sub.add_argument("--tune-max-epochs", dest="tune_max_epochs", type=int)

    report = commands.add_parser("report", parents=[common], help="Summarize reports.")
    report.add_argument("reports", nargs="+", help="Report JSON files.")
    report.add_argument("-o", dest="output", default=None, help="Summary CSV file.")
    return parser


_OVERRIDE_KEYS = (
    "seed",
    "jobs",
    "n_members",
    "model_profile",
    "max_epochs",
    "tune_max_epochs",
    "augment_target_ppr",
    "augment_target_total",
)


def _config(args: argparse.Namespace, require_seed: bool = True) -> Dict[str, Any]:
    overrides = {key: getattr(args, key, None) for key in _OVERRIDE_KEYS}
    if getattr(args, "overlap", None) is not None:
        overrides[f"{args.domain}_overlap"] = args.overlap
    if not require_seed and overrides["seed"] is None:
        overrides["seed"] = 0
    return resolve_config(args.config, overrides)


def _load_ensemble(directory: str, n_members: int) -> EnsembleModel:
    paths = member_paths(directory, n_members)
    missing = [path for path in paths if not os.path.exists(path)]
    if missing:
        raise ConfigurationError(f"Missing source checkpoints: {missing}.")
    return EnsembleModel([load_checkpoint(path) for path in paths])


def run_command(args: argparse.Namespace) -> None:
    timekeeper = TimeKeeper()
    output = getattr(args, "output", None)

    if args.command == "synth":
        domain = Domain(args.domain)
        config = _config(args)
        changes = dict(
            seed=config["seed"],
            n_subjects=args.subjects,
            duration_s=args.duration_s,
            amplitude_ratio=args.amplitude_ratio,
            bursts_per_recording=args.bursts,
        )
        changes = {k: v for k, v in changes.items() if v is not None}
        preset = SynthConfig.source if domain == Domain.SOURCE else SynthConfig.target
        with timekeeper.start_activity("synth", activity_meta=[domain.value]):
            paths = write_corpus(generate(preset(**changes), config["jobs"]), output)
        print(f"Wrote {len(paths)} recordings to {output}.")

    elif args.command == "preprocess":
        domain = Domain(args.domain)
        config = _config(args, require_seed=False)
        with timekeeper.start_activity("preprocess", activity_meta=[domain.value]):
            montage = Montage(args.montage) if args.montage else None
            recordings = read_corpus(args.input, domain, args.summary, montage)
            windows = corpus_to_windows(
                recordings, preprocessing_from_config(config), config["jobs"]
            )
            write_window_store(output, windows)
        print(f"{output}: {corpus_balance(windows)}")

    elif args.command == "augment":
        config = _config(args)
        windows = read_window_store(args.input)
        with timekeeper.start_activity("augment"):
            augmented = augment_fold(
                windows,
                config["augment_target_ppr"],
                config["augment_target_total"],
                config["seed"],
                config["augment_num_segments"],
                config["jobs"],
            )
            write_window_store(output, augmented.windows)
            write_provenance(provenance_path(output), augmented.provenance)
        print(f"{output}: {corpus_balance(augmented.windows)}")

    elif args.command == "pretrain":
        config = _config(args)
        os.makedirs(output, exist_ok=True)
        register_file_log(output)
        windows = read_window_store(args.input)
        with timekeeper.start_activity("pretrain", activity_meta=[len(windows)]):
            result = pretrain_source(windows, config, output_directory=output)
        for member, path in zip(
            result.ensemble.members, member_paths(output, len(result.ensemble.members))
        ):
            save_checkpoint(path, member, seed=config["seed"])
        result.report.write(
            os.path.join(output, "pretrain.report.json"),
            os.path.join(output, "pretrain.report.txt"),
        )
        print(result.report.to_text())

    elif args.command == "transfer":
        config = _config(args)
        os.makedirs(output, exist_ok=True)
        register_file_log(output)
        source = _load_ensemble(args.checkpoints, config["n_members"])
        windows = read_window_store(args.input)
        x, y = windows_to_arrays(windows, config["normalize_windows"])
        plan = transfer_plan_from_config(config)
        seeds = SeedPlan(config["seed"])
        member_seeds = [seeds.tuning(0, m) for m in range(len(source.members))]
        with timekeeper.start_activity("transfer", activity_meta=[len(windows)]):
            tuned = transfer_ensemble(
                source, x, y, plan, member_seeds, n_jobs=config["jobs"]
            )
        for i, (member, path) in enumerate(
            zip(tuned.members, member_paths(output, len(tuned.members)))
        ):
            save_checkpoint(path, member, seed=config["seed"])
            manifest = os.path.join(output, f"member-{i + 1}.manifest.json")
            write_manifest(manifest, member, plan)
        print(f"Wrote {len(tuned.members)} tuned networks to {output}.")

    elif args.command in [e.value for e in Experiment]:
        experiment = Experiment(args.command)
        config = _config(args)
        os.makedirs(output, exist_ok=True)
        register_file_log(output)
        source = None
        if experiment != Experiment.EXP3:
            source = _load_ensemble(args.checkpoints, config["n_members"])
        windows = read_window_store(args.input)
        result = run_experiment(experiment, windows, config, source, output)
        print(result.report.to_text())

    elif args.command == "report":
        reports = [MetricsReport.read(path) for path in args.reports]
        summary = combine_reports(reports)
        for report in reports:
            print(report.to_text())
        print(summary.to_string(index=False, float_format=lambda v: f"{v:.4f}"))
        if output is not None:
            summary.to_csv(output, index=False)


def main(command: Union[str, List[str]] = "") -> int:
    parser = make_parser()

    if isinstance(command, str):
        command = command.split()

    args = parser.parse_args(command) if command else parser.parse_args()
    register_stream_log(logging.INFO if args.verbose else logging.WARNING)
    handlers = list(pprnet_log.handlers)

    try:
        run_command(args)
    except ConfigurationError as e:
        print(f"configuration error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except PprDataError as e:
        print(f"data error: {e}", file=sys.stderr)
        return EXIT_DATA
    except NumericalError as e:
        print(f"numerical error: {e}", file=sys.stderr)
        return EXIT_NUMERICAL
    finally:
        for handler in list(pprnet_log.handlers):
            if handler not in handlers and isinstance(handler, logging.FileHandler):
                handler.close()
                pprnet_log.removeHandler(handler)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
