from __future__ import annotations

import logging

import numpy as np

_log = logging.getLogger(__name__)


def wire_attenuation(g: np.ndarray, r: float) -> np.ndarray:
    """First-order IR-drop attenuation factor of every cell.

    Row drivers sit left of column 0 and column outputs are virtual grounds
    below the last row. Linearising the network around the ideal cell currents
    gives, for cell ``(i, j)``, a row load ``sum_j' g[i, j'] * (min(j, j') + 1)``
    and a column load ``sum_i' g[i', j] * (rows - max(i, i'))``. The effective
    conductance is ``g / (1 + r * (row_load + col_load))``; for a lone cell this
    reduces to ``1 / (1 + g * r * distance)``.

    Args:
        g: Cell conductances, shape ``(rows, cols)``.
        r: Wire resistance per segment in ohms.

    Returns:
        Factors in ``(0, 1]`` with the shape of ``g``.
    """
    if r == 0.0:
        return np.ones_like(g, dtype=np.float64)

    rows, cols = g.shape
    col_index = np.arange(cols)
    row_index = np.arange(rows)
    row_kernel = np.minimum.outer(col_index, col_index) + 1.0
    col_kernel = rows - np.maximum.outer(row_index, row_index).astype(np.float64)

    row_load = g @ row_kernel
    col_load = col_kernel @ g
    return 1.0 / (1.0 + r * (row_load + col_load))
