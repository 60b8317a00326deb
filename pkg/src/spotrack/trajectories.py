"""Labeled box trajectories over a frame range - the lingua franca between
the trackers, the metrics, the identification stage, and MOT text files.

Boxes are (4,) arrays [x, y, w, h] with (x, y) the bottom center, pixels.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


@dataclass(frozen=True, eq=False)
class Trajectory:
    ident: int | str
    boxes: dict[int, np.ndarray]  # frame -> (4,); at most one box per frame

    def __post_init__(self) -> None:
        clean = {}
        for frame, box in self.boxes.items():
            b = np.array(box, dtype=float).reshape(4)
            b.flags.writeable = False
            clean[int(frame)] = b
        object.__setattr__(self, "boxes", clean)

    @property
    def first_frame(self) -> int:
        return min(self.boxes)

    @property
    def last_frame(self) -> int:
        return max(self.boxes)

    def __len__(self) -> int:
        return len(self.boxes)


@dataclass(frozen=True, eq=False)
class TrajectorySet:
    tracks: dict[int | str, Trajectory] = field(default_factory=dict)
    frame_range: tuple[int, int] | None = None  # inclusive; None = hull of the data

    def __post_init__(self) -> None:
        tracks = dict(self.tracks)
        for ident, tr in tracks.items():
            if ident != tr.ident:
                raise ValueError(f"track key {ident!r} != trajectory ident {tr.ident!r}")
        rng = self.frame_range
        if rng is None:
            frames = [f for tr in tracks.values() for f in tr.boxes]
            rng = (min(frames), max(frames)) if frames else (1, 0)
        rng = (int(rng[0]), int(rng[1]))
        for tr in tracks.values():
            if tr.boxes and (tr.first_frame < rng[0] or tr.last_frame > rng[1]):
                raise ValueError(f"track {tr.ident!r} leaves the frame range {rng}")
        object.__setattr__(self, "tracks", tracks)
        object.__setattr__(self, "frame_range", rng)

    @property
    def frames(self) -> range:
        return range(self.frame_range[0], self.frame_range[1] + 1)

    def __len__(self) -> int:
        return len(self.tracks)

    @property
    def total_boxes(self) -> int:
        return sum(len(tr) for tr in self.tracks.values())

    def at_frame(self, frame: int) -> tuple[list, np.ndarray]:
        """(idents, (n, 4) boxes) present at one frame, in stable ident order."""
        idents = [i for i, tr in self.tracks.items() if frame in tr.boxes]
        if not idents:
            return [], np.empty((0, 4))
        return idents, np.stack([self.tracks[i].boxes[frame] for i in idents])


def trajectory_set_from_rows(frames, idents, boxes, frame_range=None) -> TrajectorySet:
    """Build from parallel arrays (MOT row order is irrelevant)."""
    frames = np.asarray(frames, dtype=int)
    boxes = np.asarray(boxes, dtype=float).reshape(-1, 4)
    per_track: dict[object, dict[int, np.ndarray]] = {}
    for frame, ident, box in zip(frames, idents, boxes):
        slot = per_track.setdefault(ident, {})
        if int(frame) in slot:
            raise ValueError(f"track {ident!r} has two boxes at frame {frame}")
        slot[int(frame)] = box
    tracks = {ident: Trajectory(ident, b) for ident, b in per_track.items()}
    return TrajectorySet(tracks, frame_range)
