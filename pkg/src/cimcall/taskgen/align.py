from __future__ import annotations

import logging

from cimcall.taskgen.exceptions import EmptySequenceError
from cimcall.taskgen.models import GAP, Alignment

_log = logging.getLogger(__name__)

MATCH = 1
MISMATCH = -1
GAP_PENALTY = -1

_DIAG, _UP, _LEFT = 0, 1, 2


def global_align(a: str, b: str) -> Alignment:
    """Needleman-Wunsch alignment with unit scores.

    Among optimal-score alignments the one with most matches wins, which makes
    ``matches`` symmetric in its arguments. Remaining ties prefer the diagonal,
    then a gap in ``b`` (up), then a gap in ``a`` (left).

    Raises:
        EmptySequenceError: If either string is empty.
    """
    if not a or not b:
        raise EmptySequenceError(operation="global_align")

    n, m = len(a), len(b)
    # Cells hold (score, matches); tuples compare lexicographically.
    best = [[(0, 0)] * (m + 1) for _ in range(n + 1)]
    moves = [[_DIAG] * (m + 1) for _ in range(n + 1)]
    for i in range(1, n + 1):
        best[i][0] = (i * GAP_PENALTY, 0)
        moves[i][0] = _UP
    for j in range(1, m + 1):
        best[0][j] = (j * GAP_PENALTY, 0)
        moves[0][j] = _LEFT

    for i in range(1, n + 1):
        prev, cur, step, ai = best[i - 1], best[i], moves[i], a[i - 1]
        for j in range(1, m + 1):
            s, k = prev[j - 1]
            diag = (s + MATCH, k + 1) if ai == b[j - 1] else (s + MISMATCH, k)
            s, k = prev[j]
            up = (s + GAP_PENALTY, k)
            s, k = cur[j - 1]
            left = (s + GAP_PENALTY, k)
            if diag >= up and diag >= left:
                cur[j], step[j] = diag, _DIAG
            elif up >= left:
                cur[j], step[j] = up, _UP
            else:
                cur[j], step[j] = left, _LEFT

    out_a: list[str] = []
    out_b: list[str] = []
    i, j = n, m
    while i > 0 or j > 0:
        direction = moves[i][j]
        if direction == _DIAG:
            out_a.append(a[i - 1])
            out_b.append(b[j - 1])
            i, j = i - 1, j - 1
        elif direction == _UP:
            out_a.append(a[i - 1])
            out_b.append(GAP)
            i -= 1
        else:
            out_a.append(GAP)
            out_b.append(b[j - 1])
            j -= 1

    score, matches = best[n][m]
    return Alignment(
        aligned_a="".join(reversed(out_a)),
        aligned_b="".join(reversed(out_b)),
        matches=matches,
        score=score,
    )
