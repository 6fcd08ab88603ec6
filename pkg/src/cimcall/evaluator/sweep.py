from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass, field
from typing import TYPE_CHECKING, Any

from cimcall.evaluator.exceptions import EmptyGridError, SweepAxisError
from cimcall.evaluator.models import EvalReport

if TYPE_CHECKING:
    from collections.abc import Callable

    from cimcall.evaluator.base import SweepExecutor

_log = logging.getLogger(__name__)

CASE_AXIS = "case"


@dataclass(frozen=True)
class SweepCell:
    """One point of the grid: its position, labels and config overrides."""

    index: int
    labels: dict[str, Any]
    overrides: dict[str, Any] = field(default_factory=dict)


def expand_grid(
    axes: dict[str, list[Any]],
    cases: list[dict[str, Any]] | None = None,
    *,
    check_axis: Callable[[str], bool] | None = None,
) -> list[SweepCell]:
    """Cartesian product of the swept values, named cases outermost.

    Each case is a dict with a ``name`` and dotted-key overrides applied
    before the axis values of the cell.

    Raises:
        SweepAxisError: If an axis has no values, a case has no name or
            ``check_axis`` rejects a key.
        EmptyGridError: If nothing is swept.
    """
    for key, values in axes.items():
        if not isinstance(values, list | tuple) or not values:
            raise SweepAxisError(key, "axis needs a non-empty list of values")
        if check_axis is not None and not check_axis(key):
            raise SweepAxisError(key, "no such configuration key")

    dimensions: list[tuple[str, list[Any]]] = []
    if cases:
        for case in cases:
            if not case.get("name"):
                raise SweepAxisError(CASE_AXIS, "every case needs a name")
            for key in case:
                if key == "name" or check_axis is None or check_axis(key):
                    continue
                raise SweepAxisError(
                    f"{CASE_AXIS}.{case['name']}", f"unknown key '{key}'"
                )
        dimensions.append((CASE_AXIS, list(cases)))
    dimensions.extend((key, list(values)) for key, values in axes.items())
    if not dimensions:
        raise EmptyGridError()

    cells: list[SweepCell] = []
    points = itertools.product(*(values for _, values in dimensions))
    for index, point in enumerate(points):
        labels: dict[str, Any] = {}
        overrides: dict[str, Any] = {}
        for (key, _), value in zip(dimensions, point, strict=True):
            if key == CASE_AXIS:
                labels[CASE_AXIS] = value["name"]
                overrides.update({k: v for k, v in value.items() if k != "name"})
            else:
                labels[key] = value
                overrides[key] = value
        cells.append(SweepCell(index=index, labels=labels, overrides=overrides))
    return cells


def run_sweep(
    cells: list[SweepCell],
    base: dict[str, Any],
    *,
    target: str,
    executor: SweepExecutor,
) -> list[EvalReport]:
    """Evaluate every cell and merge the reports in grid order.

    Cells are independent and derive their seeds from their own resolved
    configuration, so the merged result does not depend on the executor or
    on how many jobs ran.

    Args:
        cells: Grid from ``expand_grid``.
        base: Resolved base configuration every cell overrides.
        target: ``"module:function"`` evaluating one cell payload into an
            ``EvalReport`` manifest.
        executor: Where cells run.

    Raises:
        EmptyGridError: If ``cells`` is empty.
        SweepCellError: If a cell fails.
    """
    if not cells:
        raise EmptyGridError()

    payloads = [
        {
            "index": cell.index,
            "labels": cell.labels,
            "overrides": cell.overrides,
            "base": base,
        }
        for cell in cells
    ]
    _log.info("Running sweep of %d cells on %s", len(cells), type(executor).__name__)
    results = executor.map(target, payloads)
    reports = [EvalReport.from_manifest(r) for r in results]
    _log.info("Sweep finished: %d reports", len(reports))
    return reports
