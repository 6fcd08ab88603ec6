from __future__ import annotations

import logging
from typing import TYPE_CHECKING

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.linalg import splu

from cimcall.xbar.exceptions import SingularNetworkError, XbarConfigurationError
from cimcall.xbar.vmm import pad_rows

if TYPE_CHECKING:
    from cimcall.xbar.models import TileState

_log = logging.getLogger(__name__)

DEFAULT_ORACLE_CAP = 32 * 32


class _Stamps:
    """Triplet accumulator for a conductance matrix in modified nodal form."""

    def __init__(self) -> None:
        self.rows: list[int] = []
        self.cols: list[int] = []
        self.vals: list[float] = []

    def between(self, a: int, b: int, g: float) -> None:
        self.rows += [a, b, a, b]
        self.cols += [a, b, b, a]
        self.vals += [g, g, -g, -g]

    def to_ground(self, a: int, g: float) -> None:
        self.rows.append(a)
        self.cols.append(a)
        self.vals.append(g)

    def matrix(self, size: int):
        entries = (self.vals, (self.rows, self.cols))
        return coo_matrix(entries, shape=(size, size)).tocsc()


def nodal_oracle_vmm(
    x: np.ndarray,
    tile: TileState,
    *,
    max_cells: int = DEFAULT_ORACLE_CAP,
) -> np.ndarray:
    """Exact column currents of the resistive crossbar network.

    Every cell ``(i, j)`` joins a row-wire node and a column-wire node. Row
    drivers are ideal sources one segment left of column 0; column outputs are
    virtual grounds one segment below the last row. With ``r = 0`` the network
    collapses to ``x @ G``.

    Args:
        x: Row voltages, shape ``(..., rows)`` or ``(..., active_rows)``.
        tile: Programmed tile; its enabled wire resistance is used.
        max_cells: Largest ``rows * cols`` the dense-factorised solve accepts.

    Returns:
        Column currents in amps with shape ``(..., cols)``.

    Raises:
        XbarConfigurationError: If the tile exceeds ``max_cells``.
        SingularNetworkError: If the nodal system has no unique solution.
    """
    rows, cols = tile.rows, tile.cols
    if rows * cols > max_cells:
        raise XbarConfigurationError(
            issue=f"tile {rows}x{cols} exceeds oracle cap of {max_cells} cells",
            stage="nodal_oracle",
        )

    volts = pad_rows(x, tile, "nodal_oracle_vmm")
    g = tile.programmed()
    r = tile.profile.effective().wire_resistance_per_segment
    if r == 0.0:
        if not np.any(g):
            raise SingularNetworkError(issue="all cells open with ideal wires")
        return volts @ g

    g_wire = 1.0 / r
    n_cells = rows * cols

    def row_node(i: int, j: int) -> int:
        return i * cols + j

    def col_node(i: int, j: int) -> int:
        return n_cells + i * cols + j

    stamps = _Stamps()
    for i in range(rows):
        for j in range(cols):
            if g[i, j] > 0.0:
                stamps.between(row_node(i, j), col_node(i, j), float(g[i, j]))
            if j + 1 < cols:
                stamps.between(row_node(i, j), row_node(i, j + 1), g_wire)
            if i + 1 < rows:
                stamps.between(col_node(i, j), col_node(i + 1, j), g_wire)
        stamps.to_ground(row_node(i, 0), g_wire)
    for j in range(cols):
        stamps.to_ground(col_node(rows - 1, j), g_wire)

    try:
        solver = splu(stamps.matrix(2 * n_cells))
    except RuntimeError as exc:
        raise SingularNetworkError(issue=str(exc)) from exc

    batch = volts.reshape(-1, rows)
    rhs = np.zeros((2 * n_cells, batch.shape[0]), dtype=np.float64)
    rhs[[row_node(i, 0) for i in range(rows)], :] = (batch * g_wire).T
    potentials = solver.solve(rhs)
    if not np.all(np.isfinite(potentials)):
        raise SingularNetworkError(issue="non-finite node potentials")

    bottom = [col_node(rows - 1, j) for j in range(cols)]
    currents = potentials[bottom, :].T * g_wire
    _log.debug("Solved %d-node crossbar network for %d inputs", 2 * n_cells, len(batch))
    return currents.reshape(*volts.shape[:-1], cols)
