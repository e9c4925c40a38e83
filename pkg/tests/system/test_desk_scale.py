""" Desk-scale run of pretraining, EXP1 and EXP2 on the default synthetic corpora.

Takes tens of minutes on a desktop CPU, run with `pytest -m slow`.
"""
import pytest

from pprnet.evaluation import MetricsReport
from pprnet.utilities.cli import EXIT_OK, main
from pprnet.utilities.metrics import MetricName

DESK_SCALE_RUN = """\
seed: 5
jobs: -1
model_profile: tiny
n_members: 3
max_epochs: 10
tune_max_epochs: 10
"""

pytestmark = pytest.mark.slow


def _run(command: str):
    assert main(command) == EXIT_OK, command


@pytest.fixture(scope="module")
def reports(tmp_path_factory):
    root = tmp_path_factory.mktemp("desk")
    config = root / "config.yaml"
    config.write_text(DESK_SCALE_RUN)
    c = f"-c {config}"

    # 6 subjects x 10 min at 256 Hz and 6 subjects x 5 min at 500 Hz.
    _run(f"synth {c} --domain source -o {root / 'chb'}")
    _run(f"synth {c} -o {root / 'ppr'} --amplitude-ratio 5")
    _run(f"preprocess {c} {root / 'chb'} --domain source -o {root / 'source.store'}")
    _run(f"preprocess {c} {root / 'ppr'} -o {root / 'target.store'}")
    _run(f"pretrain {c} {root / 'source.store'} -o {root / 'source'}")

    results = {}
    for experiment in ["exp1", "exp2"]:
        output = root / experiment
        store, checkpoints = root / "target.store", root / "source"
        _run(f"{experiment} {c} {store} --checkpoints {checkpoints} -o {output}")
        results[experiment] = MetricsReport.read(
            str(output / f"{experiment}.report.json")
        )
    return results


def test_augmented_ensemble_detects_ppr_on_every_fold(reports):
    report = reports["exp2"]
    assert len(report.subjects) == 6
    for metric in [MetricName.SENS, MetricName.SPEC]:
        per_fold = report.metric_frame(metric)["IT"]
        assert (per_fold >= 0.90).all(), per_fold.to_dict()


def test_augmentation_raises_sensitivity(reports):
    exp1, exp2 = (
        reports[name].aggregate(MetricName.SENS).loc["Mn", "IT"]
        for name in ["exp1", "exp2"]
    )
    assert exp2 > exp1
