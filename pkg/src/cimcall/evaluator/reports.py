from __future__ import annotations

import json
import logging
from pathlib import Path
from typing import TYPE_CHECKING, Any

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402
import pandas as pd  # noqa: E402

from cimcall.evaluator.models import METRIC_COLUMNS  # noqa: E402

if TYPE_CHECKING:
    from cimcall.evaluator.models import EvalReport

_log = logging.getLogger(__name__)

FIGURE_CSV: dict[str, str] = {
    "fig7": "fig7_sweep.csv",
    "fig8": "fig8_sweep.csv",
    "fig9": "fig9_sweep.csv",
    "fig10": "fig10_sweep.csv",
    "fig11": "fig11_sweep.csv",
    "fig12": "fig12_sweep.csv",
    "fig13": "fig13_sweep.csv",
    "fig14": "fig14_throughput.csv",
    "fig15": "fig15_tradeoff.csv",
    "table3": "table3_sweep.csv",
}

# Metric plotted for each output file; anything else plots accuracy.
_FIGURE_METRIC: dict[str, str] = {
    "fig14_throughput.csv": "speedup",
    "fig15_tradeoff.csv": "area_um2",
}

GROUPS = ("synaptic_wires", "sense_adc", "dac_driver")
GROUP_KEY = "profile.group"
SEED_KEY = "seeds.dataset"


def reports_frame(reports: list[EvalReport]) -> pd.DataFrame:
    """One row per report; label columns in first-seen order, then metrics."""
    rows = [report.to_row() for report in reports]
    labels: list[str] = []
    for row in rows:
        labels.extend(k for k in row if k not in METRIC_COLUMNS and k not in labels)
    return pd.DataFrame(rows, columns=[*labels, *METRIC_COLUMNS])


def write_csv(frame: pd.DataFrame, path: Path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    frame.to_csv(path, index=False, float_format="%.10g", lineterminator="\n")
    _log.info("Wrote %d rows to %s", len(frame), path)
    return path


def write_manifest(path: Path, payload: dict[str, Any]) -> Path:
    """Write a JSON manifest with sorted keys so reruns are byte-identical."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(payload, indent=2, sort_keys=True, default=str) + "\n")
    _log.info("Wrote manifest %s", path)
    return path


def read_manifest(path: Path) -> dict[str, Any]:
    return json.loads(Path(path).read_text())


def nonadditivity_table(reports: list[EvalReport]) -> pd.DataFrame:
    """Per dataset seed: each group's accuracy loss, their sum and the combined loss.

    Losses are measured against the exact-backend accuracy of the same
    quantised model. The table reports the gap; it never forces it to zero.
    """
    rows: list[dict[str, Any]] = []
    by_seed: dict[Any, dict[str, EvalReport]] = {}
    for report in reports:
        group = report.labels.get(GROUP_KEY)
        if group is None:
            continue
        seed = report.labels.get(SEED_KEY, report.seeds.get("dataset"))
        by_seed.setdefault(seed, {})[str(group)] = report

    for seed, groups in by_seed.items():
        if "combined" not in groups or not all(g in groups for g in GROUPS):
            _log.warning("Seed %s lacks groups for the non-additivity table", seed)
            continue
        exact = float(groups["combined"].extras.get("exact_accuracy", float("nan")))
        row: dict[str, Any] = {"seed": seed, "exact_accuracy": exact}
        total = 0.0
        for group in GROUPS:
            loss = exact - groups[group].accuracy.mean
            row[f"loss_{group}"] = loss
            total += loss
        combined = exact - groups["combined"].accuracy.mean
        row.update(
            {
                "sum_individual_losses": total,
                "loss_combined": combined,
                "combined_minus_sum": combined - total,
            }
        )
        rows.append(row)

    columns = [
        "seed",
        "exact_accuracy",
        *(f"loss_{g}" for g in GROUPS),
        "sum_individual_losses",
        "loss_combined",
        "combined_minus_sum",
    ]
    return pd.DataFrame(rows, columns=columns)


def _label_columns(frame: pd.DataFrame) -> list[str]:
    return [c for c in frame.columns if c not in METRIC_COLUMNS]


def render_csv(path: Path, out_dir: Path | None = None) -> Path | None:
    """Plot one sweep CSV to PNG.

    The first varying label is the x axis; the remaining varying labels
    (seeds excluded, which are averaged) split the lines.
    """
    path = Path(path)
    frame = pd.read_csv(path)
    metric = _FIGURE_METRIC.get(path.name, "accuracy_mean")
    varying = [
        c
        for c in _label_columns(frame)
        if frame[c].nunique() > 1 and not c.startswith("seeds.")
    ]
    if frame.empty or metric not in frame or not varying:
        _log.warning("Nothing to plot in %s", path)
        return None

    x, series = varying[0], varying[1:]
    fig, ax = plt.subplots(figsize=(6, 4))
    try:
        grouped = frame.groupby(series, sort=False) if series else [((), frame)]
        for key, part in grouped:
            curve = part.groupby(x, sort=False)[metric].median()
            parts = key if isinstance(key, tuple) else (key,)
            label = ", ".join(map(str, parts)) or metric
            ax.plot(
                list(map(str, curve.index)),
                curve.to_numpy(),
                marker="o",
                label=label,
            )

        ax.set_xlabel(x)
        ax.set_ylabel(metric)
        ax.set_title(path.stem)
        if series:
            ax.legend(fontsize="small")
        fig.tight_layout()

        target = Path(out_dir or path.parent) / f"{path.stem}.png"
        target.parent.mkdir(parents=True, exist_ok=True)
        fig.savefig(target, dpi=150)
    finally:
        plt.close(fig)

    _log.info("Rendered %s", target)
    return target


def render_figures(directory: Path, out_dir: Path | None = None) -> list[Path]:
    """Render every known figure CSV found in ``directory``."""
    directory = Path(directory)
    rendered: list[Path] = []
    for name in FIGURE_CSV.values():
        path = directory / name
        if path.exists():
            png = render_csv(path, out_dir)
            if png is not None:
                rendered.append(png)
    return rendered
