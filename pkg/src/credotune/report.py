"""Reading experiment directories back and comparing them."""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from credotune.errors import ConfigurationError
from credotune.harness import TIMESERIES_HEADER, final_quartile_reward
from credotune.metrics import confidence_interval

REPORT_HEADER = [
    "experiment", "trials", "reward_median", "reward_mean", "reward_ci95",
    "equality_median", "equality_mean", "equality_ci95",
]


@dataclass
class ExperimentResult:
    name: str
    final_rewards: list[float]
    final_equality: list[float]

    @property
    def reward_median(self) -> float:
        return float(np.median(self.final_rewards))

    @property
    def equality_median(self) -> float:
        return float(np.median(self.final_equality))

    def row(self) -> list:
        rm, rh = confidence_interval(self.final_rewards)
        em, eh = confidence_interval(self.final_equality)
        return [self.name, len(self.final_rewards), self.reward_median, rm, rh, self.equality_median, em, eh]


def read_timeseries(path: Path) -> dict[int, dict[str, list[float]]]:
    """Per-trial batch series ``{"reward": [...], "equality": [...]}`` from a timeseries.csv."""
    series: dict[int, dict[int, tuple[float, float]]] = {}
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header != TIMESERIES_HEADER:
            raise ValueError(f"unexpected header {header}")
        for row in reader:
            if len(row) != len(TIMESERIES_HEADER):
                raise ValueError(f"malformed row {row}")
            trial, batch = int(row[0]), int(row[1])
            series.setdefault(trial, {})[batch] = (float(row[2]), float(row[3]))
    if not series:
        raise ValueError("no rows")
    out = {}
    for trial, batches in sorted(series.items()):
        if sorted(batches) != list(range(len(batches))):
            raise ValueError(f"trial {trial} has missing batches")
        ordered = [batches[b] for b in range(len(batches))]
        out[trial] = {"reward": [r for r, _ in ordered], "equality": [e for _, e in ordered]}
    return out


def load_experiment(directory: Path) -> ExperimentResult:
    directory = Path(directory)
    try:
        trials = read_timeseries(directory / "timeseries.csv")
    except (OSError, ValueError) as err:
        raise ConfigurationError(f"{directory}: missing or corrupt timeseries.csv ({err})") from None
    return ExperimentResult(
        name=str(directory),
        final_rewards=[final_quartile_reward(t["reward"]) for t in trials.values()],
        final_equality=[final_quartile_reward(t["equality"]) for t in trials.values()],
    )


def ordering(a: ExperimentResult, b: ExperimentResult) -> str:
    if a.reward_median > b.reward_median:
        return "greater"
    if a.reward_median < b.reward_median:
        return "less"
    return "tied"


def write_report(path: Path, results: list[ExperimentResult]) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(REPORT_HEADER)
        for r in results:
            w.writerow([repr(v) if isinstance(v, float) else v for v in r.row()])
