"""Pinhole camera: 3D box state -> 2D bounding box, measurement noise, clutter.

Conventions used throughout the package:
  state (8,): [x, vx, y, vy, z, vz, w, h]   meters and meters/second
  box   (4,): [x, y, w, h]                  pixels, (x, y) = bottom center
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

# Indices of the 8-dim state vector.
IX, IVX, IY, IVY, IZ, IVZ, IW, IH = range(8)

# Fixed shape of the measurement noise, scaled by min(image side)^2 * 1e-5.
_NOISE_SHAPE = np.array([
    [2.029, 0.223, 0.073, 0.248],
    [0.223, 3.051, 2.549, 0.285],
    [0.073, 2.549, 4.880, 0.179],
    [0.248, 0.285, 0.179, 2.032],
])
_NOISE_SHAPE.flags.writeable = False


@dataclass(frozen=True)
class CameraModel:
    image_width: float
    image_height: float
    frame_rate: float
    focal_length: float = 1e-3   # meters
    pixel_size: float = 1e-6     # meters per pixel
    principal_point: tuple[float, float] | None = None  # defaults to image center

    def __post_init__(self) -> None:
        for name in ("image_width", "image_height", "frame_rate", "focal_length", "pixel_size"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")

    @property
    def period(self) -> float:
        return 1.0 / self.frame_rate

    @property
    def center(self) -> np.ndarray:
        if self.principal_point is not None:
            return np.asarray(self.principal_point, dtype=float)
        return np.array([self.image_width / 2.0, self.image_height / 2.0])

    def pixels_per_meter(self, depth: float) -> float:
        """Projection scale f / (|px| * z) at a given depth."""
        return self.focal_length / (self.pixel_size * depth)


def project(state: np.ndarray, camera: CameraModel) -> np.ndarray:
    """Perspective projection of the box state onto the image plane."""
    state = np.asarray(state, dtype=float)
    single = state.ndim == 1
    pts = np.atleast_2d(state)
    z = pts[:, IZ]
    if np.any(z <= 0):
        raise ValueError("non-positive depth")
    scale = camera.focal_length / (camera.pixel_size * z)
    out = scale[:, None] * pts[:, [IX, IY, IW, IH]]
    out[:, 0] += camera.center[0]
    out[:, 1] += camera.center[1]
    return out[0] if single else out


def measurement_covariance(camera: CameraModel, scale: float = 1e-5) -> np.ndarray:
    """Detector noise covariance: gamma^2 * scale * fixed shape, gamma = min image side."""
    gamma = min(camera.image_width, camera.image_height)
    return gamma ** 2 * scale * _NOISE_SHAPE.copy()


@dataclass(frozen=True)
class ClutterModel:
    """Poisson clutter, uniform over a box-shaped support slightly larger than the image."""

    rate: float
    image_width: float
    image_height: float

    def __post_init__(self) -> None:
        if self.rate < 0:
            raise ValueError("clutter rate must be nonnegative")

    @property
    def support(self) -> np.ndarray:
        """(4, 2) low/high bounds for [x, y, w, h]."""
        w, h = self.image_width, self.image_height
        return np.array([
            [-w / 4.0, 5.0 * w / 4.0],
            [0.0, 1.5 * h],
            [0.0, w / 2.0],
            [0.0, 4.0 * h / 3.0],
        ])

    def log_density(self, box: np.ndarray) -> float:
        box = np.asarray(box, dtype=float)
        s = self.support
        if np.any(box < s[:, 0]) or np.any(box > s[:, 1]):
            return -np.inf
        return -float(np.log(s[:, 1] - s[:, 0]).sum())


def clutter_log_density(box: np.ndarray, camera: CameraModel) -> float:
    return ClutterModel(0.0, camera.image_width, camera.image_height).log_density(box)
