"""Set-of-objects and set-of-trajectories evaluation metrics.

The single-frame metric matches two box sets under a cut-off cost; the
trajectory metric extends it over time with a per-frame assignment that pays
a penalty every time a track's assignment changes. All boxes are
bottom-center [x, y, w, h].
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import sparse
from scipy.optimize import linprog

from .assignment import _lsa
from .config import MetricParams
from .trajectories import TrajectorySet

_W_EPS = 1e-6  # assignment mass below this is LP solver noise


def iou_matrix(a, b) -> np.ndarray:
    """Pairwise intersection-over-union, (n, m) for (n, 4) x (m, 4) boxes."""
    a = np.asarray(a, dtype=float).reshape(-1, 4)
    b = np.asarray(b, dtype=float).reshape(-1, 4)
    # corners from bottom-center boxes
    ax1 = a[:, 0] - a[:, 2] / 2, a[:, 1] - a[:, 3]
    ax2 = a[:, 0] + a[:, 2] / 2, a[:, 1]
    bx1 = b[:, 0] - b[:, 2] / 2, b[:, 1] - b[:, 3]
    bx2 = b[:, 0] + b[:, 2] / 2, b[:, 1]
    ix = np.minimum(ax2[0][:, None], bx2[0]) - np.maximum(ax1[0][:, None], bx1[0])
    iy = np.minimum(ax2[1][:, None], bx2[1]) - np.maximum(ax1[1][:, None], bx1[1])
    inter = np.clip(ix, 0, None) * np.clip(iy, 0, None)
    # areas from the same corner coordinates as the intersection, so
    # identical boxes give inter == union bit for bit (IoU exactly 1)
    area_a = (ax2[0] - ax1[0]) * (ax2[1] - ax1[1])
    area_b = (bx2[0] - bx1[0]) * (bx2[1] - bx1[1])
    union = area_a[:, None] + area_b - inter
    with np.errstate(invalid="ignore", divide="ignore"):
        out = np.where(union > 0, inter / union, 0.0)
    # rounding can push inter/union a hair past 1, which would make the
    # base distance negative and poison fractional powers downstream
    return np.clip(out, 0.0, 1.0)


def iou(box_a, box_b) -> float:
    return float(iou_matrix(box_a, box_b)[0, 0])


def box_distance_matrix(a, b) -> np.ndarray:
    """1 - IoU, the base distance for both metrics."""
    return 1.0 - iou_matrix(a, b)


@dataclass(frozen=True)
class GospaResult:
    value: float
    localization: float  # sum of d^p over properly matched pairs
    missed: float        # penalty share of the second (reference) set
    false: float         # penalty share of the first (estimate) set

    def parts(self) -> tuple[float, float, float]:
        return self.localization, self.missed, self.false


def gospa(estimates, reference, params: MetricParams = MetricParams(), alpha: float = 2.0) -> GospaResult:
    """Single-frame metric between two box sets.

    value = (loc + (c^p / alpha) * (#missed + #false))^(1/p). The returned
    decomposition uses the alpha = 2 convention: a matched pair at distance
    >= c counts as one missed plus one false object.
    """
    if not 0 < alpha <= 2:
        raise ValueError("alpha must lie in (0, 2]")
    c, p = params.cutoff, params.exponent
    est = np.asarray(estimates, dtype=float).reshape(-1, 4)
    ref = np.asarray(reference, dtype=float).reshape(-1, 4)
    n, m = len(est), len(ref)
    dominant = c ** p / alpha
    if n == 0 or m == 0:
        penalty = dominant * (n + m)
        return GospaResult(penalty ** (1 / p), 0.0, dominant * m, dominant * n)
    d = box_distance_matrix(est, ref)
    cut = np.minimum(d, c) ** p
    sol = _lsa(cut if n <= m else cut.T)
    assert sol is not None  # finite matrix
    pairs = [(r, int(col)) if n <= m else (int(col), r) for r, col in enumerate(sol[0])]
    matched = [(i, j) for i, j in pairs if d[i, j] < c]
    loc = float(sum(d[i, j] ** p for i, j in matched))
    n_missed = m - len(matched)
    n_false = n - len(matched)
    # the optimal value keeps cut pairs matched at cost c^p; for alpha = 2
    # that equals splitting them into one missed and one false
    value_p = loc + float(sum(c ** p for i, j in pairs if d[i, j] >= c)) + dominant * abs(n - m)
    if alpha == 2:
        return GospaResult(value_p ** (1 / p), loc, dominant * n_missed, dominant * n_false)
    extra_missed = m - min(n, m)
    extra_false = n - min(n, m)
    cut_cost = float(sum(c ** p for i, j in pairs if d[i, j] >= c))
    return GospaResult(value_p ** (1 / p), loc + cut_cost,
                       dominant * extra_missed, dominant * extra_false)


@dataclass(frozen=True)
class TgospaResult:
    value: float
    localization: float
    n_matched: float       # properly matched box pairs over all frames
    n_missed: float        # reference boxes without a proper match
    n_false: float         # estimate boxes without a proper match
    n_switches: float      # assignment changes; half for track <-> unassigned
    switch_cost: float

    @property
    def decomposition(self) -> dict[str, float]:
        return {
            "localization": self.localization,
            "matched": self.n_matched,
            "missed": self.n_missed,
            "false": self.n_false,
            "switches": self.n_switches,
        }


def cardinality_mismatch(estimates: TrajectorySet, reference: TrajectorySet) -> int:
    """|sum_k |est_k| - sum_k |ref_k|| accumulated per frame."""
    if estimates.frame_range != reference.frame_range:
        raise ValueError("trajectory sets cover different frame ranges")
    total = 0
    for k in estimates.frames:
        total += abs(len(estimates.at_frame(k)[0]) - len(reference.at_frame(k)[0]))
    return total


def tgospa(estimates: TrajectorySet, reference: TrajectorySet,
           params: MetricParams = MetricParams()) -> TgospaResult:
    """Trajectory metric with switching penalties, solved exactly as an LP.

    Per frame, every estimate track is assigned to a reference track or left
    unassigned (and vice versa); base costs are min(d, c)^p when both exist,
    c^p / 2 when exactly one exists. Changing a real pairing between
    consecutive frames costs gamma^p / 2 per unit of assignment moved, so a
    full track change costs gamma^p and a change to/from unassigned costs
    half that. The LP relaxation is exact up to half-integral assignments.
    """
    if estimates.frame_range != reference.frame_range:
        raise ValueError("trajectory sets cover different frame ranges")
    c, p = params.cutoff, params.exponent
    half_cut = c ** p / 2
    half_switch = params.gamma ** p / 2

    a_tracks = list(estimates.tracks.values())
    b_tracks = list(reference.tracks.values())
    total_a = sum(len(tr) for tr in a_tracks)
    total_b = sum(len(tr) for tr in b_tracks)

    # candidate pairs: ever simultaneously present with distance below cut;
    # anything farther is dominated by leaving both unassigned
    candidates: dict[int, list[int]] = {i: [] for i in range(len(a_tracks))}
    pair_frames: dict[tuple[int, int], dict[int, float]] = {}
    for i, ta in enumerate(a_tracks):
        for j, tb in enumerate(b_tracks):
            common = ta.boxes.keys() & tb.boxes.keys()
            if not common:
                continue
            frames = sorted(common)
            d = 1.0 - iou_matrix(
                np.stack([ta.boxes[k] for k in frames]),
                np.stack([tb.boxes[k] for k in frames]))[np.arange(len(frames)), np.arange(len(frames))]
            if (d < c).any():
                candidates[i].append(j)
                pair_frames[(i, j)] = dict(zip(frames, np.minimum(d, c) ** p))

    # connected components over the candidate graph; everything outside is
    # pure missed/false mass with no interaction
    loc = 0.0
    n_matched = 0.0
    n_switch_units = 0.0
    value_p = 0.0

    comp_of: dict[tuple[str, int], int] = {}

    def _component(seed_i: int) -> tuple[list[int], list[int]]:
        stack = [("a", seed_i)]
        comp_a, comp_b = [], []
        while stack:
            side, idx = stack.pop()
            if (side, idx) in comp_of:
                continue
            comp_of[(side, idx)] = 1
            if side == "a":
                comp_a.append(idx)
                stack.extend(("b", j) for j in candidates[idx])
            else:
                comp_b.append(idx)
                stack.extend(("a", i) for i in range(len(a_tracks)) if idx in candidates[i])
        return comp_a, comp_b

    for seed in range(len(a_tracks)):
        if ("a", seed) in comp_of or not candidates[seed]:
            continue
        comp_a, comp_b = _component(seed)
        part = _solve_cluster(
            [a_tracks[i] for i in comp_a], [b_tracks[j] for j in comp_b],
            {(comp_a.index(i), comp_b.index(j)): f
             for (i, j), f in pair_frames.items() if i in comp_a and j in comp_b},
            c, p, half_switch)
        value_p += part[0]
        loc += part[1]
        n_matched += part[2]
        n_switch_units += part[3]

    # isolated tracks: every box is unmatched
    matched_a = {i for i in comp_of if i[0] == "a"}
    matched_b = {j for j in comp_of if j[0] == "b"}
    for i, ta in enumerate(a_tracks):
        if ("a", i) not in matched_a:
            value_p += half_cut * len(ta)
    for j, tb in enumerate(b_tracks):
        if ("b", j) not in matched_b:
            value_p += half_cut * len(tb)

    n_missed = total_b - n_matched
    n_false = total_a - n_matched
    return TgospaResult(
        value=value_p ** (1 / p),
        localization=loc,
        n_matched=n_matched,
        n_missed=n_missed,
        n_false=n_false,
        n_switches=n_switch_units / 2,
        switch_cost=n_switch_units * half_switch,
    )


def _solve_cluster(a_tracks, b_tracks, pair_frames, c, p, half_switch):
    """LP for one connected component.

    Returns (objective, localization, matched count, switch slack units).
    Variables: W[k, i, j] for candidate pairs, dummy occupancies for each
    track, and one slack per candidate pair per consecutive frame pair
    bounding |W_k - W_{k+1}|.
    """
    half_cut = c ** p / 2
    frames = sorted({k for tr in a_tracks for k in tr.boxes}
                    | {k for tr in b_tracks for k in tr.boxes})
    n_frames = len(frames)
    frame_pos = {k: t for t, k in enumerate(frames)}
    pairs = sorted(pair_frames)
    n_pairs = len(pairs)
    na, nb = len(a_tracks), len(b_tracks)

    exists_a = np.zeros((n_frames, na), dtype=bool)
    exists_b = np.zeros((n_frames, nb), dtype=bool)
    for i, tr in enumerate(a_tracks):
        exists_a[[frame_pos[k] for k in tr.boxes], i] = True
    for j, tr in enumerate(b_tracks):
        exists_b[[frame_pos[k] for k in tr.boxes], j] = True

    # variable layout: pair W, then a-dummies, then b-dummies, then slacks
    def w_var(t, q):
        return t * n_pairs + q

    ofs_da = n_frames * n_pairs
    ofs_db = ofs_da + n_frames * na
    ofs_e = ofs_db + n_frames * nb
    n_vars = ofs_e + (n_frames - 1) * n_pairs

    cost = np.zeros(n_vars)
    pair_i = np.array([i for i, _ in pairs], dtype=int)
    pair_j = np.array([j for _, j in pairs], dtype=int)
    w_cost = np.where(exists_a[:, pair_i] | exists_b[:, pair_j], half_cut, 0.0)
    for q, ij in enumerate(pairs):
        for k, base in pair_frames[ij].items():
            w_cost[frame_pos[k], q] = base
    cost[:ofs_da] = w_cost.reshape(-1)
    cost[ofs_da:ofs_db] = (exists_a * half_cut).reshape(-1)
    cost[ofs_db:ofs_e] = (exists_b * half_cut).reshape(-1)
    cost[ofs_e:] = half_switch

    # one-assignment-per-track equalities, vectorized over frames
    t_grid = np.arange(n_frames)
    eq_rows, eq_cols = [], []
    row_of_a = t_grid[:, None] * (na + nb) + pair_i[None, :]
    row_of_b = t_grid[:, None] * (na + nb) + na + pair_j[None, :]
    w_ids = t_grid[:, None] * n_pairs + np.arange(n_pairs)[None, :]
    eq_rows += [row_of_a.reshape(-1), row_of_b.reshape(-1)]
    eq_cols += [w_ids.reshape(-1), w_ids.reshape(-1)]
    dummy_a_rows = t_grid[:, None] * (na + nb) + np.arange(na)[None, :]
    dummy_b_rows = t_grid[:, None] * (na + nb) + na + np.arange(nb)[None, :]
    eq_rows += [dummy_a_rows.reshape(-1), dummy_b_rows.reshape(-1)]
    eq_cols += [ofs_da + np.arange(n_frames * na), ofs_db + np.arange(n_frames * nb)]
    eq_rows = np.concatenate(eq_rows)
    eq_cols = np.concatenate(eq_cols)
    n_eq = n_frames * (na + nb)
    a_eq = sparse.coo_matrix((np.ones(len(eq_rows)), (eq_rows, eq_cols)),
                             shape=(n_eq, n_vars))

    # |W_k - W_{k+1}| <= e as two inequalities per slack
    n_slack = (n_frames - 1) * n_pairs
    w_now = np.arange(n_slack)  # w_var(t, q) laid out contiguously
    w_next = w_now + n_pairs
    e_ids = ofs_e + np.arange(n_slack)
    urow = 2 * n_slack
    iu_rows = np.concatenate([np.repeat(np.arange(n_slack), 3),
                              np.repeat(n_slack + np.arange(n_slack), 3)])
    iu_cols = np.concatenate([np.stack([w_now, w_next, e_ids], axis=1).reshape(-1),
                              np.stack([w_now, w_next, e_ids], axis=1).reshape(-1)])
    iu_vals = np.concatenate([np.tile([1.0, -1.0, -1.0], n_slack),
                              np.tile([-1.0, 1.0, -1.0], n_slack)])
    a_ub = sparse.coo_matrix((iu_vals, (iu_rows, iu_cols)), shape=(urow, n_vars))

    res = linprog(cost,
                  A_ub=a_ub if urow else None, b_ub=np.zeros(urow) if urow else None,
                  A_eq=a_eq, b_eq=np.ones(n_eq), bounds=(0, None), method="highs")
    if not res.success:  # pragma: no cover - feasible by construction
        raise RuntimeError(f"trajectory metric LP failed: {res.message}")
    x = np.clip(res.x, 0.0, None)

    loc = 0.0
    matched = 0.0
    for q, (i, j) in enumerate(pairs):
        for k, base in pair_frames[(i, j)].items():
            w = x[w_var(frame_pos[k], q)]
            if w > _W_EPS and base < c ** p:  # proper match, below the cut
                matched += w
                loc += w * base
    slack_units = float(x[ofs_e:].sum())
    return float(res.fun), loc, matched, slack_units
