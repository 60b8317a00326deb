"""Model parameter identification from annotated data.

Matches detections to ground truth per frame, then extracts detection
probability, clutter rate, measurement noise, lifespan and birth statistics,
and the per-frame cardinality moments they predict.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .assignment import _lsa
from .metrics import iou_matrix
from .trajectories import TrajectorySet

_CARDINALITY_BONUS = 1e6  # dominates any sum of (1 - IoU) terms


@dataclass(frozen=True, eq=False)
class MatchResult:
    """Per-frame gt/detection correspondences for one sequence."""
    gamma: float                      # min(image width, height), the noise scale
    n_frames: int
    n_gt: int
    n_det: int
    residuals: np.ndarray             # (n_matched, 4), det - gt, bottom-center
    matched: dict = field(default_factory=dict)   # (frame, gt ident) -> bool
    pairs: dict = field(default_factory=dict)     # frame -> {gt ident: det index}

    @property
    def n_matched(self) -> int:
        return len(self.residuals)


def match_frames(gt: TrajectorySet, detections, gamma: float) -> MatchResult:
    """Optimal per-frame assignment: maximum matches first, then minimum
    Σ(1 - IoU), over pairs with strictly positive overlap.

    detections: per-frame (m, 4) arrays aligned with gt.frames.
    """
    detections = [np.asarray(d, dtype=float).reshape(-1, 4) for d in detections]
    frames = list(gt.frames)
    if len(detections) != len(frames):
        raise ValueError(f"{len(detections)} detection frames for "
                         f"{len(frames)} ground-truth frames")
    residuals = []
    matched = {}
    pairs = {}
    n_gt = n_det = 0
    for frame, dets in zip(frames, detections):
        idents, gt_boxes = gt.at_frame(frame)
        n_gt += len(idents)
        n_det += len(dets)
        for ident in idents:
            matched[(frame, ident)] = False
        if not len(idents) or not len(dets):
            continue
        overlap = iou_matrix(gt_boxes, dets)
        cost = np.where(overlap > 0, (1.0 - overlap) - _CARDINALITY_BONUS, np.inf)
        # pad with per-row dummy columns so rows with no overlap stay feasible
        n, m = cost.shape
        padded = np.full((n, m + n), np.inf)
        padded[:, :m] = cost
        padded[np.arange(n), m + np.arange(n)] = 0.0
        sol = _lsa(padded)
        assert sol is not None
        frame_pairs = {}
        for row, col in enumerate(sol[0]):
            if col >= m:
                continue
            ident = idents[row]
            frame_pairs[ident] = int(col)
            matched[(frame, ident)] = True
            residuals.append(dets[col] - gt_boxes[row])
        pairs[frame] = frame_pairs
    res = np.array(residuals).reshape(-1, 4)
    return MatchResult(gamma, len(frames), n_gt, n_det, res, matched, pairs)


@dataclass(frozen=True)
class DetectionStats:
    p_detect: float
    clutter_rate: float
    noise_scaled: np.ndarray  # R estimate divided by gamma^2, (4, 4)


def detection_stats(matches) -> DetectionStats:
    """Pooled estimates from one MatchResult or a list of them. Residuals are
    divided by each sequence's gamma before pooling so the normalized noise
    matrix is comparable across image sizes."""
    if isinstance(matches, MatchResult):
        matches = [matches]
    n_matched = sum(m.n_matched for m in matches)
    if n_matched < 2:
        raise ValueError("need at least 2 matched pairs to estimate the noise covariance")
    n_gt = sum(m.n_gt for m in matches)
    n_det = sum(m.n_det for m in matches)
    n_frames = sum(m.n_frames for m in matches)
    scaled = np.concatenate([m.residuals / m.gamma for m in matches])
    return DetectionStats(
        p_detect=n_matched / n_gt if n_gt else 0.0,
        clutter_rate=(n_det - n_matched) / n_frames,
        noise_scaled=np.cov(scaled, rowvar=False, ddof=1),
    )


def pd_vs_visibility(matches: MatchResult, visibility: dict, n_bins: int = 10):
    """Detection rate per visibility bin.

    visibility: {(frame, gt ident): v in [0, 1]}. Returns a list of
    (v_low, v_high, rate, count); bins nothing fell into are omitted.
    """
    edges = np.linspace(0.0, 1.0, n_bins + 1)
    hits = np.zeros(n_bins)
    totals = np.zeros(n_bins)
    for key, was_matched in matches.matched.items():
        v = visibility[key]
        b = min(int(v * n_bins), n_bins - 1)  # v = 1 belongs to the last bin
        totals[b] += 1
        hits[b] += was_matched
    return [(float(edges[b]), float(edges[b + 1]), float(hits[b] / totals[b]), int(totals[b]))
            for b in range(n_bins) if totals[b] > 0]


@dataclass(frozen=True)
class LifespanStats:
    mean_lifespan: float   # seconds
    birth_rate: float      # objects per second
    mean_count: float      # per-frame cardinality moments
    var_count: float

    @property
    def predicted_count(self) -> float:
        """Stationary mean (= variance) if arrivals/lifetimes were memoryless."""
        return self.mean_lifespan * self.birth_rate


def lifespan_birth_stats(gt: TrajectorySet, frame_rate: float) -> LifespanStats:
    """Lifespan = inclusive frame span / frame rate; every track counts as one
    birth, including those already present on the first frame."""
    if not gt.tracks:
        raise ValueError("empty ground truth")
    period = 1.0 / frame_rate
    spans = np.array([tr.last_frame - tr.first_frame + 1 for tr in gt.tracks.values()])
    counts = np.array([len(gt.at_frame(k)[0]) for k in gt.frames], dtype=float)
    duration = len(counts) * period
    return LifespanStats(
        mean_lifespan=float(spans.mean()) * period,
        birth_rate=len(gt.tracks) / duration,
        mean_count=float(counts.mean()),
        var_count=float(counts.var(ddof=1)) if len(counts) > 1 else 0.0,
    )


def pooled_lifespan_stats(per_sequence: list[tuple[TrajectorySet, float]]) -> LifespanStats:
    """Entire-dataset row: lifespans pooled over all tracks, births over total
    duration, cardinality moments over the concatenated frame series."""
    spans_s = []
    counts = []
    duration = 0.0
    n_tracks = 0
    for gt, frame_rate in per_sequence:
        period = 1.0 / frame_rate
        spans_s += [(tr.last_frame - tr.first_frame + 1) * period
                    for tr in gt.tracks.values()]
        counts += [len(gt.at_frame(k)[0]) for k in gt.frames]
        duration += len(list(gt.frames)) * period
        n_tracks += len(gt.tracks)
    if not n_tracks:
        raise ValueError("empty ground truth")
    counts = np.array(counts, dtype=float)
    return LifespanStats(
        mean_lifespan=float(np.mean(spans_s)),
        birth_rate=n_tracks / duration,
        mean_count=float(counts.mean()),
        var_count=float(counts.var(ddof=1)) if len(counts) > 1 else 0.0,
    )
