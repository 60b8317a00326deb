"""IoU-gated constant-velocity Kalman baseline tracker.

Works entirely in pixel units with a one-frame time step. State is
[x, vx, y, vy, w, vw, h, vh] on the bottom-center box. Tracks are confirmed
after min_hits consecutive hits and deleted after more than max_age
consecutive misses; only confirmed tracks updated in the current frame are
reported.
"""
from __future__ import annotations

import numpy as np

from .assignment import solve
from .config import SortSettings
from .metrics import iou_matrix
from .trajectories import TrajectorySet, trajectory_set_from_rows

_H = np.zeros((4, 8))
_H[np.arange(4), [0, 2, 4, 6]] = 1.0

_F = np.eye(8)
_F[np.arange(0, 8, 2), np.arange(1, 8, 2)] = 1.0

# discrete white-acceleration block for a unit time step
_Q_BLOCK = np.array([[1.0 / 3.0, 0.5], [0.5, 1.0]])


class _KalmanTrack:
    def __init__(self, ident: int, box: np.ndarray, settings: SortSettings):
        self.ident = ident
        self.x = np.zeros(8)
        self.x[[0, 2, 4, 6]] = box
        pos_var = settings.measurement_noise ** 2
        vel_var = settings.initial_velocity_std ** 2
        self.p = np.diag([pos_var, vel_var] * 4).astype(float)
        self.q = np.kron(np.eye(4), settings.process_noise ** 2 * _Q_BLOCK)
        self.r = settings.measurement_noise ** 2 * np.eye(4)
        self.hits = 1
        self.streak = 1
        self.misses = 0
        self.confirmed = False

    def predict(self) -> np.ndarray:
        self.x = _F @ self.x
        self.p = _F @ self.p @ _F.T + self.q
        return self.box

    @property
    def box(self) -> np.ndarray:
        return self.x[[0, 2, 4, 6]]

    def update(self, box: np.ndarray) -> None:
        s = _H @ self.p @ _H.T + self.r
        gain = self.p @ _H.T @ np.linalg.inv(s)
        self.x = self.x + gain @ (box - _H @ self.x)
        self.p = (np.eye(8) - gain @ _H) @ self.p
        self.hits += 1
        self.streak += 1
        self.misses = 0

    def mark_missed(self) -> None:
        self.streak = 0
        self.misses += 1


def _associate(predicted: np.ndarray, detections: np.ndarray,
               threshold: float) -> dict[int, int]:
    """{track row: detection index} maximizing total IoU over pairs at or
    above the threshold; leaving a track unmatched is always allowed."""
    n, m = len(predicted), len(detections)
    if n == 0 or m == 0:
        return {}
    overlap = iou_matrix(predicted, detections)
    cost = np.full((n, m + n), np.inf)
    cost[:, :m] = np.where(overlap >= threshold, -overlap, np.inf)
    cost[np.arange(n), m + np.arange(n)] = 0.0  # per-track unmatched column
    matches, _ = solve(cost)
    return {t: j for t, j in matches.items() if j < m}


def sort_track(detections, settings: SortSettings = SortSettings(),
               first_frame: int = 1) -> TrajectorySet:
    """Track a detection sequence; returns confirmed-track box trajectories."""
    tracks: list[_KalmanTrack] = []
    next_id = 1
    frames, idents, boxes = [], [], []
    n_frames = 0
    for k, dets in enumerate(detections):
        n_frames += 1
        frame = first_frame + k
        dets = np.asarray(dets, dtype=float).reshape(-1, 4)
        predicted = np.array([t.predict() for t in tracks]).reshape(-1, 4)
        matches = _associate(predicted, dets, settings.iou_threshold)
        taken = set(matches.values())
        for ti, t in enumerate(tracks):
            if ti in matches:
                t.update(dets[matches[ti]])
                if t.streak >= settings.min_hits:
                    t.confirmed = True
                if t.confirmed:
                    frames.append(frame)
                    idents.append(t.ident)
                    boxes.append(t.box.copy())
            else:
                t.mark_missed()
        tracks = [t for t in tracks if t.misses <= settings.max_age]
        for j in range(len(dets)):
            if j not in taken:
                t = _KalmanTrack(next_id, dets[j], settings)
                next_id += 1
                # spawning counts as the first hit, so min_hits=1 confirms
                # (and emits) on the spawn frame itself
                if t.streak >= settings.min_hits:
                    t.confirmed = True
                    frames.append(frame)
                    idents.append(t.ident)
                    boxes.append(t.box.copy())
                tracks.append(t)
    frame_range = (first_frame, first_frame + max(n_frames - 1, 0))
    if not frames:
        return TrajectorySet({}, frame_range)
    return trajectory_set_from_rows(frames, idents, boxes, frame_range)
