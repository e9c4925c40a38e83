""" Per-subject metrics of LOSO experiments, their aggregates and exports. """
import json
import logging
from typing import Any, Dict, List, NamedTuple, Optional, Sequence, Tuple

import numpy as np
import pandas as pd

from pprnet.utilities.metrics import (
    ConfusionCounts,
    MetricName,
    Metrics,
    metrics,
    undefined_to_nan,
)

log = logging.getLogger(__name__)

STATISTICS = ("Mn", "Md", "StD")
PLOT_COLUMNS = ["model", "metric", "subject", "value"]
UNDEFINED_FOOTNOTE = (
    "* undefined: zero denominator (e.g. no anomaly windows), excluded from Mn/Md/StD."
)


class SubjectResult(NamedTuple):
    model: str
    subject: str
    counts: ConfusionCounts
    # ppr type -> (detected anomaly windows, anomaly windows)
    type_counts: Dict[str, Tuple[int, int]]

    @property
    def metrics(self) -> Metrics:
        return metrics(self.counts)


class MetricsReport:
    """Confusion counts per (model, subject) and everything derived from them."""

    def __init__(
        self,
        experiment: str,
        models: Sequence[str] = (),
        config: Optional[Dict[str, Any]] = None,
        seed: Optional[int] = None,
        sub_seeds: Optional[Dict[str, int]] = None,
    ):
        self.experiment = experiment
        self.models: List[str] = list(models)
        self.config = config or {}
        self.seed = seed
        self.sub_seeds = sub_seeds or {}
        self.summary_model: Optional[str] = None
        self._results: Dict[Tuple[str, str], SubjectResult] = {}

    def add(
        self,
        model: str,
        subject: str,
        counts: ConfusionCounts,
        type_counts: Optional[Dict[str, Tuple[int, int]]] = None,
    ) -> None:
        if model not in self.models:
            self.models.append(model)
        self._results[(model, subject)] = SubjectResult(
            model, subject, counts, dict(type_counts or {})
        )

    @property
    def subjects(self) -> List[str]:
        return sorted({subject for _, subject in self._results})

    @property
    def results(self) -> List[SubjectResult]:
        return [self._results[key] for key in sorted(self._results)]

    def result(self, model: str, subject: str) -> SubjectResult:
        return self._results[(model, subject)]

    def metric_frame(self, metric: MetricName) -> pd.DataFrame:
        """Subjects x models; NaN marks an undefined metric."""
        frame = pd.DataFrame(index=self.subjects, columns=self.models, dtype=float)
        for (model, subject), result in self._results.items():
            frame.loc[subject, model] = undefined_to_nan(result.metrics.get(metric))
        return frame

    def aggregate(self, metric: MetricName) -> pd.DataFrame:
        """Mean, median and sample (N-1) standard deviation over subjects."""
        frame = self.metric_frame(metric)
        return pd.DataFrame(
            [frame.mean(), frame.median(), frame.std(ddof=1)], index=list(STATISTICS)
        )

    def has_undefined(self) -> bool:
        return any(
            result.metrics.get(metric) is None
            for result in self._results.values()
            for metric in MetricName
        )

    def type_frame(self, model: str) -> pd.DataFrame:
        """Per subject and PPR window type: detected/total anomaly windows."""
        rows = []
        for subject in self.subjects:
            result = self._results.get((model, subject))
            if result is None:
                continue
            for ppr_type, (detected, total) in sorted(result.type_counts.items()):
                rows.append(
                    dict(
                        subject=subject,
                        ppr_type=ppr_type,
                        detected=detected,
                        total=total,
                        sensitivity=detected / total if total else np.nan,
                    )
                )
        return pd.DataFrame(
            rows, columns=["subject", "ppr_type", "detected", "total", "sensitivity"]
        )

    def best_model(self, prefix: str, metric: MetricName = MetricName.ACC) -> str:
        """Model named `prefix`* with the highest mean `metric`, first on ties."""
        means = self.aggregate(metric).loc["Mn"]
        candidates = [m for m in self.models if m.startswith(prefix)]
        if not candidates:
            raise ValueError(f"No model with prefix '{prefix}' in {self.models}.")
        return max(candidates, key=lambda m: np.nan_to_num(means[m], nan=-np.inf))

    def to_text(self) -> str:
        lines = [f"Experiment {self.experiment} (master seed {self.seed})"]
        for metric in MetricName:
            table = pd.concat([self.metric_frame(metric), self.aggregate(metric)])
            lines.append("")
            lines.append(metric.value)
            lines.append(
                table.to_string(float_format=lambda v: f"{v:.4f}", na_rep="*")
            )
        model = self.summary_model or (self.models[-1] if self.models else None)
        types = self.type_frame(model) if model else pd.DataFrame()
        if len(types):
            lines += ["", f"Detections per PPR window type ({model})"]
            lines.append(
                types.to_string(
                    index=False, float_format=lambda v: f"{v:.4f}", na_rep="*"
                )
            )
        if self.has_undefined():
            lines += ["", UNDEFINED_FOOTNOTE]
        return "\n".join(lines) + "\n"

    def to_dict(self) -> Dict[str, Any]:
        return dict(
            experiment=self.experiment,
            models=self.models,
            summary_model=self.summary_model,
            seed=self.seed,
            sub_seeds=self.sub_seeds,
            config=self.config,
            results=[
                dict(
                    model=r.model,
                    subject=r.subject,
                    counts=r.counts._asdict(),
                    metrics=r.metrics._asdict(),
                    type_counts={k: list(v) for k, v in r.type_counts.items()},
                )
                for r in self.results
            ],
        )

    @classmethod
    def from_dict(cls, content: Dict[str, Any]) -> "MetricsReport":
        report = cls(
            content["experiment"],
            content["models"],
            content.get("config"),
            content.get("seed"),
            content.get("sub_seeds"),
        )
        report.summary_model = content.get("summary_model")
        for r in content["results"]:
            report.add(
                r["model"],
                r["subject"],
                ConfusionCounts(**r["counts"]),
                {k: tuple(v) for k, v in r.get("type_counts", {}).items()},
            )
        return report

    def write(self, json_path: str, text_path: Optional[str] = None) -> None:
        with open(json_path, "w") as fh:
            json.dump(self.to_dict(), fh, indent=2)
        if text_path is not None:
            with open(text_path, "w") as fh:
                fh.write(self.to_text())

    @classmethod
    def read(cls, json_path: str) -> "MetricsReport":
        with open(json_path, "r") as fh:
            return cls.from_dict(json.load(fh))


def emit_plot_data(report: MetricsReport, path: Optional[str] = None) -> pd.DataFrame:
    """One row per (model, metric, subject) with a defined value, for boxplots."""
    rows = [
        (result.model, metric.value, result.subject, value)
        for result in report.results
        for metric in MetricName
        for value in [result.metrics.get(metric)]
        if value is not None
    ]
    frame = pd.DataFrame(rows, columns=PLOT_COLUMNS)
    if path is not None:
        frame.to_csv(path, index=False)
    return frame


def combine_reports(reports: Sequence[MetricsReport]) -> pd.DataFrame:
    """Mn/Md/StD of the summary model of each report, one row per experiment."""
    rows = []
    for report in reports:
        model = report.summary_model or report.models[-1]
        row: Dict[str, Any] = dict(experiment=report.experiment, model=model)
        for metric in MetricName:
            statistics = report.aggregate(metric)[model]
            for statistic in STATISTICS:
                row[f"{metric.value} {statistic}"] = statistics[statistic]
        rows.append(row)
    return pd.DataFrame(rows)
