"""Reading and writing the MOT-Challenge text layout.

Files use top-left box corners; everything downstream of parsing uses
bottom-center [x, y, w, h], so the conversion lives here and nowhere else.
"""
from __future__ import annotations

import configparser
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .trajectories import TrajectorySet, trajectory_set_from_rows


@dataclass(frozen=True)
class SequenceInfo:
    name: str
    frame_rate: float
    seq_length: int
    image_width: int
    image_height: int


def parse_seqinfo(path) -> SequenceInfo:
    path = Path(path)
    parser = configparser.ConfigParser()
    with open(path) as fh:
        parser.read_file(fh)
    if "Sequence" not in parser:
        raise ValueError(f"{path}: missing [Sequence] section")
    sec = parser["Sequence"]
    required = ("name", "framerate", "seqlength", "imwidth", "imheight")
    missing = [key for key in required if key not in sec]
    if missing:
        raise ValueError(f"{path}: missing keys {', '.join(sorted(missing))}")
    return SequenceInfo(
        name=sec["name"],
        frame_rate=float(sec["framerate"]),
        seq_length=int(sec["seqlength"]),
        image_width=int(sec["imwidth"]),
        image_height=int(sec["imheight"]),
    )


def to_bottom_center(boxes: np.ndarray) -> np.ndarray:
    """[left, top, w, h] -> [x_center, y_bottom, w, h]."""
    boxes = np.asarray(boxes, dtype=float)
    out = boxes.copy()
    out[..., 0] = boxes[..., 0] + boxes[..., 2] / 2
    out[..., 1] = boxes[..., 1] + boxes[..., 3]
    return out


def to_top_left(boxes: np.ndarray) -> np.ndarray:
    boxes = np.asarray(boxes, dtype=float)
    out = boxes.copy()
    out[..., 0] = boxes[..., 0] - boxes[..., 2] / 2
    out[..., 1] = boxes[..., 1] - boxes[..., 3]
    return out


def _parse_rows(path, n_min: int):
    rows = []
    with open(path) as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            parts = line.split(",")
            if len(parts) < n_min:
                raise ValueError(f"{path}:{lineno}: expected at least "
                                 f"{n_min} comma-separated fields, got {len(parts)}")
            try:
                rows.append([float(p) for p in parts])
            except ValueError as err:
                raise ValueError(f"{path}:{lineno}: {err}") from None
    return rows


def parse_ground_truth(path, frame_range=None) -> TrajectorySet:
    """gt.txt -> TrajectorySet, keeping pedestrian rows flagged as considered
    (class 1, consider flag 1)."""
    rows = _parse_rows(path, 8)
    frames, idents, boxes = [], [], []
    for row in rows:
        consider, cls = row[6], row[7]
        if int(consider) != 1 or int(cls) != 1:
            continue
        frames.append(int(row[0]))
        idents.append(int(row[1]))
        boxes.append(row[2:6])
    if not frames:
        return TrajectorySet({}, frame_range)
    return trajectory_set_from_rows(frames, idents,
                                    to_bottom_center(np.array(boxes)), frame_range)


def parse_detections(path, n_frames: int | None = None) -> list[np.ndarray]:
    """det.txt -> per-frame (m, 4) bottom-center box arrays, 1-based frames."""
    rows = _parse_rows(path, 7)
    last = n_frames if n_frames is not None else (max(int(r[0]) for r in rows) if rows else 0)
    per_frame: list[list] = [[] for _ in range(last)]
    for row in rows:
        frame = int(row[0])
        if frame < 1:
            raise ValueError(f"{path}: frame numbers are 1-based, got {frame}")
        if frame <= last:
            per_frame[frame - 1].append(row[2:6])
    return [to_bottom_center(np.array(b)) if b else np.empty((0, 4))
            for b in per_frame]


def write_tracks(path, tracks: TrajectorySet) -> None:
    """TrajectorySet -> MOT rows (frame, id, left, top, w, h, 1, -1, -1, -1),
    two decimals, sorted by (frame, id). Identities are written as integers
    in first-appearance order when they are not ints already."""
    idents = sorted(tracks.tracks, key=lambda i: (tracks.tracks[i].first_frame, str(i)))
    id_map = {}
    for ident in idents:
        id_map[ident] = ident if isinstance(ident, int) else len(id_map) + 1
    rows = []
    for ident, tr in tracks.tracks.items():
        for frame, box in tr.boxes.items():
            tl = to_top_left(box)
            rows.append((frame, id_map[ident], tl[0], tl[1], tl[2], tl[3]))
    rows.sort(key=lambda r: (r[0], r[1]))
    with open(path, "w") as fh:
        for frame, ident, left, top, w, h in rows:
            fh.write(f"{frame},{ident},{left:.2f},{top:.2f},{w:.2f},{h:.2f},1,-1,-1,-1\n")


def load_sequence(seq_dir):
    """(SequenceInfo, ground truth, detections) for one MOT sequence folder."""
    seq_dir = Path(seq_dir)
    info = parse_seqinfo(seq_dir / "seqinfo.ini")
    frame_range = (1, info.seq_length)
    gt_path = seq_dir / "gt" / "gt.txt"
    gt = parse_ground_truth(gt_path, frame_range) if gt_path.exists() else None
    det_path = seq_dir / "det" / "det.txt"
    dets = parse_detections(det_path, info.seq_length) if det_path.exists() else None
    return info, gt, dets


def ground_truth_visibility(path) -> dict:
    """{(frame, ident): visibility} for the considered pedestrian rows."""
    out = {}
    for row in _parse_rows(path, 9):
        if int(row[6]) != 1 or int(row[7]) != 1:
            continue
        out[(int(row[0]), int(row[1]))] = float(row[8])
    return out
