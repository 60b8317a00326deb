"""The complete generative model for one sequence: camera, motion, lifetime,
detection, clutter, and birth design, with every per-step quantity derived
from the sequence frame rate.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .birth import BirthModel, birth_mixture
from .camera import CameraModel, ClutterModel, measurement_covariance
from .gaussians import log_floor
from .motion import (LifetimeParams, MotionParams, birth_expected_count,
                     survival_probability, transition)


@dataclass(frozen=True)
class BirthDesign:
    z_min: float = 2.0
    z_max: float = 15.0
    components: int = 10
    max_speed: float = 3.0  # m/s; velocity prior std = max_speed / 3


@dataclass(frozen=True, eq=False)
class SpoModel:
    camera: CameraModel
    motion: MotionParams = MotionParams()
    lifetime: LifetimeParams = LifetimeParams()
    p_detect: float = 0.529
    clutter_rate: float = 1.552
    birth_design: BirthDesign = BirthDesign()

    # Derived per-step quantities, filled in at construction.
    F: np.ndarray = field(init=False, repr=False)
    m: np.ndarray = field(init=False, repr=False)
    Q: np.ndarray = field(init=False, repr=False)
    p_survive: float = field(init=False, repr=False)
    noise: np.ndarray = field(init=False, repr=False)
    birth: BirthModel = field(init=False, repr=False)
    clutter: ClutterModel = field(init=False, repr=False)

    def __post_init__(self) -> None:
        if not 0.0 <= self.p_detect <= 1.0:
            raise ValueError("p_detect must lie in [0, 1]")
        T = self.camera.period
        F, m, Q = transition(T, self.motion)
        setattr_ = object.__setattr__
        setattr_(self, "F", F)
        setattr_(self, "m", m)
        setattr_(self, "Q", Q)
        setattr_(self, "p_survive", survival_probability(T, self.lifetime.mean_lifespan))
        setattr_(self, "noise", measurement_covariance(self.camera))
        beta = birth_expected_count(T, self.lifetime.mean_lifespan, self.lifetime.birth_rate)
        mix = birth_mixture(self.camera, self.birth_design.z_min, self.birth_design.z_max,
                            self.birth_design.components, self.motion,
                            self.birth_design.max_speed)
        setattr_(self, "birth", BirthModel(beta, mix))
        setattr_(self, "clutter", ClutterModel(self.clutter_rate, self.camera.image_width,
                                               self.camera.image_height))

    def clutter_intensity_log(self, box: np.ndarray) -> float:
        """log(lambda * c(z)), floored so exact zeros stay finite."""
        if self.clutter_rate == 0.0:
            return log_floor(0.0)
        dens = self.clutter.log_density(box)
        if dens == -np.inf:
            return log_floor(0.0)
        return max(float(np.log(self.clutter_rate) + dens), log_floor(0.0))
