from __future__ import annotations

from typing import Any

import pytest

from cimcall.evaluator import (
    CASE_AXIS,
    AccuracyStats,
    AreaReport,
    EmptyGridError,
    EvalReport,
    EvaluatorConfigurationError,
    SweepAxisError,
    SweepCellError,
    ThroughputReport,
    expand_grid,
    get_default_executor_factory,
    run_sweep,
)

TARGET = "tests.evaluator.test_sweep:fake_cell"


def fake_cell(payload: dict[str, Any]) -> dict[str, Any]:
    if payload["overrides"].get("fail"):
        raise ValueError("cell exploded")
    report = EvalReport(
        labels=payload["labels"],
        accuracy=AccuracyStats.from_runs([float(payload["index"])]),
        throughput=ThroughputReport(
            frames_per_second=1.0, kbps=1.0, speedup=1.0, bottleneck="out.w"
        ),
        area=AreaReport(),
        config=payload["base"],
    )
    return report.to_manifest()


def test_grid_is_cartesian_in_axis_order():
    cells = expand_grid({"a": [1, 2], "b": ["x", "y", "z"]})
    assert [c.index for c in cells] == list(range(6))
    assert [(c.labels["a"], c.labels["b"]) for c in cells[:3]] == [
        (1, "x"),
        (1, "y"),
        (1, "z"),
    ]
    assert cells[4].overrides == {"a": 2, "b": "y"}


def test_cases_are_outermost_and_merge_their_overrides():
    cases = [{"name": "plain"}, {"name": "rvw", "mitigation.recipe": "rvw"}]
    cells = expand_grid({"a": [1, 2]}, cases)
    assert [c.labels[CASE_AXIS] for c in cells] == ["plain", "plain", "rvw", "rvw"]
    assert cells[3].overrides == {"mitigation.recipe": "rvw", "a": 2}


@pytest.mark.parametrize(
    ("axes", "cases"),
    [
        ({"a": []}, None),
        ({"a": 3}, None),
        ({}, [{"mitigation.recipe": "rvw"}]),
    ],
)
def test_bad_axes_are_rejected(axes, cases):
    with pytest.raises(SweepAxisError):
        expand_grid(axes, cases)


def test_unknown_axis_key_is_rejected():
    with pytest.raises(SweepAxisError, match="bogus"):
        expand_grid({"bogus": [1]}, check_axis=lambda key: key != "bogus")


def test_empty_grid():
    with pytest.raises(EmptyGridError):
        expand_grid({})
    with pytest.raises(EmptyGridError):
        run_sweep([], {}, target=TARGET, executor=None)


def test_run_sweep_keeps_grid_order():
    cells = expand_grid({"a": [1, 2, 3]})
    executor = get_default_executor_factory().create("process", jobs=1)
    reports = run_sweep(cells, {"seed": 1}, target=TARGET, executor=executor)
    assert [r.labels["a"] for r in reports] == [1, 2, 3]
    assert [r.accuracy.runs for r in reports] == [(0.0,), (1.0,), (2.0,)]
    assert reports[0].config == {"seed": 1}


def test_failing_cell_surfaces_its_index():
    cells = expand_grid({"fail": [False, True]})
    executor = get_default_executor_factory().create("process", jobs=1)
    with pytest.raises(SweepCellError, match="cell exploded"):
        run_sweep(cells, {}, target=TARGET, executor=executor)


def test_process_executor_needs_a_job():
    with pytest.raises(EvaluatorConfigurationError):
        get_default_executor_factory().create("process", jobs=0)


def test_malformed_target():
    executor = get_default_executor_factory().create("process", jobs=1)
    cells = expand_grid({"a": [1]})
    with pytest.raises(SweepCellError):
        run_sweep(cells, {}, target="no_colon_here", executor=executor)
