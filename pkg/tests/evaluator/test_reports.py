from __future__ import annotations

import pandas as pd
import pytest

from cimcall.evaluator import (
    FIGURE_CSV,
    METRIC_COLUMNS,
    AccuracyStats,
    AreaReport,
    EvalReport,
    ThroughputReport,
    nonadditivity_table,
    read_manifest,
    render_csv,
    render_figures,
    reports_frame,
    write_csv,
    write_manifest,
)


def make_report(labels, runs, **extras) -> EvalReport:
    return EvalReport(
        labels=labels,
        accuracy=AccuracyStats.from_runs(runs),
        throughput=ThroughputReport(
            frames_per_second=1e5, kbps=12.5, speedup=6.25, bottleneck="rec.wh"
        ),
        area=AreaReport(crossbar=10.0, sram=2.0, control=0.6),
        seeds={"dataset": 1},
        costs={"sram_weights": 4, "programming_pulses": 90},
        extras=extras,
    )


def test_accuracy_stats():
    stats = AccuracyStats.from_runs([80, 90, 100])
    assert stats.mean == pytest.approx(90.0)
    assert stats.median == 90.0
    assert (stats.min, stats.max) == (80.0, 100.0)
    assert stats.std == pytest.approx((200 / 3) ** 0.5)


def test_row_leads_with_labels():
    row = make_report({"plan.array_size": 64}, [90.0, 92.0]).to_row()
    assert list(row)[0] == "plan.array_size"
    assert list(row)[1:] == list(METRIC_COLUMNS)
    assert row["runs"] == 2
    assert row["area_um2"] == pytest.approx(12.6)
    assert row["sram_weights"] == 4
    assert row["retrain_epochs"] == 0


def test_manifest_reload(tmp_path):
    report = make_report({"profile.group": "combined"}, [88.0], exact_accuracy=95.0)
    path = write_manifest(tmp_path / "run" / "manifest.json", report.to_manifest())
    again = EvalReport.from_manifest(read_manifest(path))
    assert again == report


def test_manifest_bytes_are_stable(tmp_path):
    report = make_report({"a": 1}, [70.0])
    first = write_manifest(tmp_path / "one.json", report.to_manifest()).read_bytes()
    second = write_manifest(tmp_path / "two.json", report.to_manifest()).read_bytes()
    assert first == second


def test_frame_merges_label_columns():
    frame = reports_frame(
        [make_report({"a": 1}, [50.0]), make_report({"a": 2, "b": "x"}, [60.0])]
    )
    assert list(frame.columns) == ["a", "b", *METRIC_COLUMNS]
    assert frame["accuracy_mean"].tolist() == [50.0, 60.0]


def test_csv_round_trip(tmp_path):
    frame = reports_frame([make_report({"a": 1}, [50.0])])
    path = write_csv(frame, tmp_path / "out" / "sweep.csv")
    loaded = pd.read_csv(path)
    assert loaded["throughput_kbps"].tolist() == [12.5]


def group_reports(seed, exact, accuracies):
    return [
        make_report(
            {"profile.group": group, "seeds.dataset": seed},
            [accuracy],
            exact_accuracy=exact,
        )
        for group, accuracy in accuracies.items()
    ]


def test_nonadditivity_reports_the_gap():
    reports = group_reports(
        1,
        95.0,
        {
            "synaptic_wires": 90.0,
            "sense_adc": 93.0,
            "dac_driver": 94.0,
            "combined": 80.0,
        },
    )
    table = nonadditivity_table(reports)
    row = table.iloc[0]
    assert row["sum_individual_losses"] == pytest.approx(5.0 + 2.0 + 1.0)
    assert row["loss_combined"] == pytest.approx(15.0)
    assert row["combined_minus_sum"] == pytest.approx(7.0)


def test_nonadditivity_skips_incomplete_seeds():
    reports = group_reports(2, 95.0, {"sense_adc": 93.0, "combined": 80.0})
    assert nonadditivity_table(reports).empty


def test_render_csv(tmp_path):
    reports = [
        make_report({"plan.array_size": size, "seeds.dataset": seed}, [acc])
        for size, acc in ((16, 90.0), (64, 85.0))
        for seed in (1, 2)
    ]
    path = write_csv(reports_frame(reports), tmp_path / FIGURE_CSV["fig7"])
    png = render_csv(path)
    assert png == tmp_path / "fig7_sweep.png"
    assert png.stat().st_size > 0
    assert render_figures(tmp_path, tmp_path / "png") == [tmp_path / "png" / png.name]


def test_render_skips_flat_csv(tmp_path):
    path = write_csv(reports_frame([make_report({"a": 1}, [1.0])]), tmp_path / "x.csv")
    assert render_csv(path) is None
