"""Bottleneck matching of computed roots against predicted roots.

The match quality between a computed root z and a predicted root w is the
relative error |z/w - 1|, evaluated in log-domain so that roots of any
magnitude compare meaningfully.  A prediction "holds" when some pairing of
computed to predicted roots keeps the worst relative error strictly below
eps/n.

The assignment that minimizes the worst pairwise error is a bottleneck
assignment.  A greedy pass (repeatedly taking the globally smallest distance
between an unused row and column) is optimal whenever its worst pick does not
exceed the trivial lower bound max(max of row minima, max of column minima);
in the well-separated instances this module is built for that shortcut almost
always applies.  Otherwise we binary-search the distance values and test
feasibility with augmenting paths.
"""

from __future__ import annotations

import math
import sys
from dataclasses import dataclass

import numpy as np

from .roots import PredictedRoots, RootSet
from .xnum import XComplex, XMINUS_ONE, _EXP_MAX, xadd, xdiv
from .xvec import as_arrays, relative_distance_matrix


@dataclass(frozen=True, slots=True)
class MatchResult:
    holds: bool
    permutation: tuple[int, ...] | None
    worst_relative_error: float
    degenerate: bool


def relative_distance(z: XComplex, w: XComplex) -> float:
    """|z/w - 1| as a float; inf when the ratio overflows the float range."""
    d = xadd(xdiv(z, w), XMINUS_ONE)
    if d.zero:
        return 0.0
    if d.logmag > _EXP_MAX:
        return math.inf
    return math.exp(d.logmag)


def greedy_assignment(dist: np.ndarray) -> tuple[np.ndarray, float]:
    """Assign rows to columns taking globally smallest distances first."""
    m = dist.shape[0]
    perm = np.full(m, -1, dtype=np.int64)
    row_free = np.ones(m, dtype=bool)
    col_free = np.ones(m, dtype=bool)
    order = np.argsort(dist, axis=None, kind="stable")
    worst = 0.0
    left = m
    for flat in order:
        i, j = divmod(int(flat), m)
        if row_free[i] and col_free[j]:
            perm[i] = j
            row_free[i] = False
            col_free[j] = False
            worst = max(worst, float(dist[i, j]))
            left -= 1
            if left == 0:
                break
    return perm, worst


def _perfect_matching_under(dist: np.ndarray, limit: float) -> np.ndarray | None:
    """Row->col perfect matching using only entries <= limit, else None."""
    m = dist.shape[0]
    adj = dist <= limit
    match_col = np.full(m, -1, dtype=np.int64)

    def try_row(i: int, visited: np.ndarray) -> bool:
        for j in np.flatnonzero(adj[i] & ~visited):
            visited[j] = True
            if match_col[j] < 0 or try_row(int(match_col[j]), visited):
                match_col[j] = i
                return True
        return False

    sys.setrecursionlimit(max(sys.getrecursionlimit(), 4 * m + 1000))
    for i in range(m):
        if not try_row(i, np.zeros(m, dtype=bool)):
            return None
    perm = np.full(m, -1, dtype=np.int64)
    for j in range(m):
        perm[int(match_col[j])] = j
    return perm


def bottleneck_assignment(dist: np.ndarray) -> tuple[np.ndarray, float]:
    """Assignment minimizing the largest used distance, by binary search."""
    values = np.unique(dist)
    lo, hi = 0, len(values) - 1
    best = _perfect_matching_under(dist, float(values[hi]))
    if best is None:
        raise RuntimeError("square distance matrix must admit a matching")
    best_val = float(values[hi])
    while lo < hi:
        mid = (lo + hi) // 2
        perm = _perfect_matching_under(dist, float(values[mid]))
        if perm is not None:
            best, best_val = perm, float(values[mid])
            hi = mid
        else:
            lo = mid + 1
    return best, best_val


def match_roots(
    computed: RootSet,
    predicted: PredictedRoots | None,
    eps: float,
    n: int,
) -> MatchResult:
    """Best bottleneck pairing of computed against predicted roots.

    A missing prediction (two-sided radii unavailable) is reported as a
    degenerate non-match rather than an error.
    """
    if not (0.0 < eps < 1.0):
        raise ValueError("eps must be in (0, 1)")
    if predicted is None:
        return MatchResult(False, None, math.inf, True)
    targets = predicted.all_roots()
    if len(computed.roots) != n or len(targets) != n:
        raise ValueError("root counts must both equal n")
    lm_w, ph_w = as_arrays(targets)
    lm_z, ph_z = as_arrays(computed.roots)
    dist = relative_distance_matrix(lm_w, ph_w, lm_z, ph_z)

    perm, worst = greedy_assignment(dist)
    bound = max(float(dist.min(axis=1).max()), float(dist.min(axis=0).max()))
    if worst > bound:
        perm, worst = bottleneck_assignment(dist)
    holds = bool(worst < eps / n)
    return MatchResult(holds, tuple(int(j) for j in perm), worst, False)
