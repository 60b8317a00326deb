"""Birth density design: equal-weight Gaussians strung along the optical axis.

Depth means sit at the midpoints of equal subintervals in 1/z (projection
nonlinearity is a pure 1/z effect), positional spreads are sized so the
sqrt(8)-sigma points used by the unscented transform land on the image edges,
and neighboring components' sqrt(8)-sigma depth intervals just touch.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .camera import CameraModel
from .gaussians import GaussianDensity, GaussianMixture
from .motion import MotionParams
from .rfs import PoissonIntensity

_SIGMA_SCALE = math.sqrt(8.0)  # sigma-point radius for an 8-dim state


@dataclass(frozen=True)
class BirthModel:
    expected_count: float
    mixture: GaussianMixture

    def __post_init__(self) -> None:
        if self.expected_count < 0:
            raise ValueError("expected_count must be nonnegative")

    def intensity(self) -> PoissonIntensity:
        return PoissonIntensity(self.expected_count * self.mixture.weights,
                                self.mixture.components)


def birth_depths(z_min: float, z_max: float, n_components: int) -> np.ndarray:
    """Component depth means: midpoints of n equal subintervals of [1/z_max, 1/z_min]."""
    if not 0 < z_min < z_max:
        raise ValueError("need 0 < z_min < z_max")
    if n_components < 1:
        raise ValueError("need at least one component")
    lo, hi = 1.0 / z_max, 1.0 / z_min
    mids = lo + (np.arange(n_components) + 0.5) / n_components * (hi - lo)
    return np.sort(1.0 / mids)


def birth_mixture(camera: CameraModel, z_min: float = 2.0, z_max: float = 15.0,
                  n_components: int = 10, params: MotionParams = MotionParams(),
                  max_speed: float = 3.0) -> GaussianMixture:
    depths = birth_depths(z_min, z_max, n_components)
    if n_components == 1:
        half_gap = np.array([(z_max - z_min) / 2.0])
    else:
        gaps = np.diff(depths)
        half_gap = np.minimum(np.append(gaps, gaps[-1]), np.append(gaps[0], gaps)) / 2.0

    vel_var = (max_speed / 3.0) ** 2
    center = camera.center
    components = []
    for z, hg in zip(depths, half_gap):
        meters_per_px = 1.0 / camera.pixels_per_meter(z)
        mean = np.zeros(8)
        # Scene center: the metric point projecting to the image center.
        mean[0] = (camera.image_width / 2.0 - center[0]) * meters_per_px
        mean[2] = (camera.image_height / 2.0 - center[1]) * meters_per_px
        mean[4] = z
        mean[6] = params.mean_width
        mean[7] = params.mean_height
        sx = camera.image_width / 2.0 * meters_per_px / _SIGMA_SCALE
        sy = camera.image_height / 2.0 * meters_per_px / _SIGMA_SCALE
        sz = hg / _SIGMA_SCALE
        cov = np.diag([sx ** 2, vel_var, sy ** 2, vel_var, sz ** 2, vel_var,
                       params.sigma_width ** 2, params.sigma_height ** 2])
        components.append(GaussianDensity(mean, cov))
    weights = np.full(n_components, 1.0 / n_components)
    return GaussianMixture(weights, tuple(components))
