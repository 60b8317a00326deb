"""Discretized motion model: near-constant-velocity position, mean-reverting
width/height (Ornstein-Uhlenbeck), plus exponential survival and Poisson
birth counts from a birth-death population in equilibrium.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class MotionParams:
    q_x: float = 1.0            # m^2 s^-3 white-acceleration PSD per axis
    q_y: float = 1.0
    q_z: float = 1.0
    mean_width: float = 0.85    # m, OU stationary mean
    mean_height: float = 1.65
    tau_width: float = 0.4      # s, OU time constants
    tau_height: float = 4.0
    sigma_width: float = 0.45 / 3.0   # m, OU stationary standard deviations
    sigma_height: float = 0.3 / 3.0

    def __post_init__(self) -> None:
        for name in self.__dataclass_fields__:
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be strictly positive")


def transition(T: float, params: MotionParams) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Exact discretization over a step of T seconds.

    Returns (F, m, Q) with x_next = F x + m + noise, noise ~ N(0, Q).
    """
    if T < 0:
        raise ValueError("T must be nonnegative")
    aw = math.exp(-T / params.tau_width)
    ah = math.exp(-T / params.tau_height)

    F = np.zeros((8, 8))
    cv = np.array([[1.0, T], [0.0, 1.0]])
    for i in range(3):
        F[2 * i:2 * i + 2, 2 * i:2 * i + 2] = cv
    F[6, 6] = aw
    F[7, 7] = ah

    m = np.zeros(8)
    m[6] = (1.0 - aw) * params.mean_width
    m[7] = (1.0 - ah) * params.mean_height

    Q = np.zeros((8, 8))
    blk = np.array([[T ** 3 / 3.0, T ** 2 / 2.0], [T ** 2 / 2.0, T]])
    for i, q in enumerate((params.q_x, params.q_y, params.q_z)):
        Q[2 * i:2 * i + 2, 2 * i:2 * i + 2] = q * blk
    Q[6, 6] = params.sigma_width ** 2 * (1.0 - aw ** 2)
    Q[7, 7] = params.sigma_height ** 2 * (1.0 - ah ** 2)
    return F, m, Q


@dataclass(frozen=True)
class LifetimeParams:
    """Birth-death population: Poisson arrivals, exponential lifespans."""

    mean_lifespan: float = 7.481  # s
    birth_rate: float = 1.925     # objects per second

    def __post_init__(self) -> None:
        if self.mean_lifespan <= 0:
            raise ValueError("mean_lifespan must be positive")
        if self.birth_rate < 0:
            raise ValueError("birth_rate must be nonnegative")

    @property
    def steady_state_count(self) -> float:
        return self.mean_lifespan * self.birth_rate


def survival_probability(T: float, mean_lifespan: float) -> float:
    if T < 0 or mean_lifespan <= 0:
        raise ValueError("need T >= 0 and mean_lifespan > 0")
    return math.exp(-T / mean_lifespan)


def birth_expected_count(T: float, mean_lifespan: float, birth_rate: float) -> float:
    """Expected newborns per step so the population stays in equilibrium:
    beta = eta * L * (1 - P_S)."""
    if birth_rate < 0:
        raise ValueError("birth_rate must be nonnegative")
    return birth_rate * mean_lifespan * (1.0 - survival_probability(T, mean_lifespan))
