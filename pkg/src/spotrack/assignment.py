"""2D assignment: single best solution and ranked M-best enumeration.

Cost matrices are (rows, cols) with rows <= cols; every row must be assigned
to a distinct column. np.inf marks a forbidden pairing. Ties are broken
lexicographically (row 0 takes its lowest usable column, then row 1, ...)
so results are reproducible across platforms.
"""
from __future__ import annotations

import heapq
import itertools

import numpy as np
from scipy.optimize import linear_sum_assignment

_REL_TOL = 1e-9


def _validate(cost: np.ndarray) -> np.ndarray:
    cost = np.asarray(cost, dtype=float)
    if cost.ndim != 2:
        raise ValueError("cost matrix must be 2-dimensional")
    if np.isnan(cost).any():
        raise ValueError("cost matrix contains NaN")
    if np.isneginf(cost).any():
        raise ValueError("cost matrix contains -inf; only +inf (forbidden) is allowed")
    if cost.shape[0] > cost.shape[1]:
        raise ValueError("cost matrix is infeasible: more rows than columns")
    return cost


def _lsa(cost: np.ndarray) -> tuple[np.ndarray, float] | None:
    """Optimal column per row, or None when no feasible assignment exists."""
    if cost.shape[0] == 0:
        return np.empty(0, dtype=int), 0.0
    try:
        rows, cols = linear_sum_assignment(cost)
    except ValueError:
        return None
    chosen = cost[rows, cols]
    if np.isinf(chosen).any():  # older scipy can return forbidden entries
        return None
    assignment = np.empty(cost.shape[0], dtype=int)
    assignment[rows] = cols
    return assignment, float(chosen.sum())


def _tol(value: float) -> float:
    return _REL_TOL * (1.0 + abs(value))


def _refine_lex(cost: np.ndarray, total: float) -> np.ndarray:
    """Among optimal assignments, pick the lexicographically smallest.

    Pins rows one at a time: row r takes its cheapest-index column whose pin
    still admits an optimal completion of the remaining rows.
    """
    n_rows, n_cols = cost.shape
    pinned = np.empty(n_rows, dtype=int)
    free_cols = list(range(n_cols))
    prefix = 0.0
    tol = _tol(total)
    for r in range(n_rows):
        sub = cost[np.ix_(range(r + 1, n_rows), free_cols)]
        for ci, c in enumerate(free_cols):
            edge = cost[r, c]
            if np.isinf(edge):
                continue
            rest = _lsa(np.delete(sub, ci, axis=1))
            if rest is not None and prefix + edge + rest[1] <= total + tol:
                pinned[r] = c
                prefix += edge
                free_cols.pop(ci)
                break
        else:  # pragma: no cover - total came from a feasible solution
            raise RuntimeError("lexicographic refinement lost feasibility")
    return pinned


def solve(cost) -> tuple[dict[int, int], float]:
    """Minimum-cost assignment of every row to a distinct column.

    Returns ({row: col}, total_cost). Raises ValueError when the matrix is
    infeasible (some row has no usable column arrangement).
    """
    cost = _validate(cost)
    base = _lsa(cost)
    if base is None:
        raise ValueError("cost matrix is infeasible")
    assignment, total = base
    if cost.shape[0] > 0:
        assignment = _refine_lex(cost, total)
    return {r: int(c) for r, c in enumerate(assignment)}, total


def murty_mbest(cost, m: int) -> list[tuple[dict[int, int], float]]:
    """Up to m cheapest assignments, ordered by (cost, column vector).

    Murty partitioning: each emitted solution splits its search space into
    disjoint children, one per free row, where that row's chosen column
    becomes forbidden and all earlier rows' choices become forced.
    """
    cost = _validate(cost)
    if m < 1:
        raise ValueError("m must be >= 1")
    solutions = _murty(cost, m)
    if not solutions:
        raise ValueError("cost matrix is infeasible")
    solutions.sort(key=lambda s: (s[1], s[0]))
    return [({r: int(c) for r, c in enumerate(vec)}, total) for vec, total in solutions]


def _murty(cost: np.ndarray, m: int, refine_root: bool = True) -> list[tuple[tuple, float]]:
    """Raw M-best enumeration in heap (cost) order: [(column vector, cost)]."""
    n_rows, n_cols = cost.shape
    if n_rows == 0:
        return [((), 0.0)]
    root = _lsa(cost)
    if root is None:
        return []
    if refine_root:
        root = (_refine_lex(cost, root[1]), root[1])
    counter = itertools.count()  # heap tie-break; never compares ndarrays
    # node = (total, tiebreak, assignment, #forced rows, matrix with exclusions)
    heap = [(root[1], next(counter), root[0], 0, cost)]
    out: list[tuple[tuple, float]] = []
    while heap and len(out) < m:
        total, _, assignment, n_forced, matrix = heapq.heappop(heap)
        out.append((tuple(int(c) for c in assignment), total))
        if len(out) == m:
            break
        for r in range(n_forced, n_rows):
            child = matrix.copy()
            child[r, assignment[r]] = np.inf
            keep_cols = np.ones(n_cols, dtype=bool)
            keep_cols[assignment[:r]] = False  # columns claimed by forced rows
            sol = _lsa(child[r:][:, keep_cols])
            if sol is None:
                continue
            col_map = np.flatnonzero(keep_cols)
            full = np.concatenate([assignment[:r], col_map[sol[0]]])
            prefix = float(cost[np.arange(r), assignment[:r]].sum())
            # row r stays free in the child (only its old column is barred),
            # so the child re-partitions from r, not r + 1
            heapq.heappush(heap, (prefix + sol[1], next(counter), full, r, child))
    return out
