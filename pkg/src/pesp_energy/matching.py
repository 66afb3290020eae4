"""Maximum-weight bipartite matching between departures and arrivals."""

from __future__ import annotations

from typing import Iterable, Sequence

import numpy as np
from scipy.optimize import linear_sum_assignment


def max_weight_matching(edges: Iterable[tuple[str, str, str, int]]) -> tuple[list[str], int]:
    """Solve a maximum-weight (not necessarily perfect) bipartite matching.

    ``edges`` holds ``(edge_id, left, right, weight)`` tuples with integer
    weights. Returns the selected edge ids (sorted) and their total weight.
    Parallel edges keep the heaviest one, ties going to the smaller id.
    """
    best: dict[tuple[str, str], tuple[int, str]] = {}
    for eid, left, right, w in sorted(edges):
        key = (left, right)
        if key not in best or w > best[key][0]:
            best[key] = (w, eid)
    if not best:
        return [], 0
    lefts = sorted({k[0] for k in best})
    rights = sorted({k[1] for k in best})
    li = {v: i for i, v in enumerate(lefts)}
    ri = {v: i for i, v in enumerate(rights)}
    # absent pairs get weight 0 and are dropped afterwards; that is harmless
    # because a zero-weight pair never changes the total
    W = np.zeros((len(lefts), len(rights)), dtype=np.int64)
    for (l, r), (w, _) in best.items():
        W[li[l], ri[r]] = max(w, 0)
    rows, cols = linear_sum_assignment(W, maximize=True)
    chosen = []
    total = 0
    for r, c in zip(rows, cols):
        w = int(W[r, c])
        if w <= 0:
            continue
        chosen.append(best[(lefts[r], rights[c])][1])
        total += w
    return sorted(chosen), total


def max_weight_matrix_matching(W: Sequence[Sequence[int]]) -> tuple[list[tuple[int, int]], int]:
    """Same as :func:`max_weight_matching` on a dense nonnegative weight matrix."""
    W = np.asarray(W, dtype=np.int64)
    if W.size == 0:
        return [], 0
    rows, cols = linear_sum_assignment(W, maximize=True)
    pairs = [(int(r), int(c)) for r, c in zip(rows, cols) if W[r, c] > 0]
    return pairs, int(sum(W[r, c] for r, c in pairs))

