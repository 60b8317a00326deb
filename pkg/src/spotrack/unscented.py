"""Unscented transform, UKF prediction/update against the camera projection,
and ellipsoidal gating.

Sigma points are the classic symmetric 2n+1 set at radius sqrt(n + kappa);
kappa defaults to 0, so for the 8-dim state the points sit on the
sqrt(8)-sigma ellipsoid and the center point carries zero weight.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import cho_factor, cho_solve, solve_triangular

from .camera import CameraModel, project
from .gaussians import GaussianDensity, repair_psd

_LOG_2PI = float(np.log(2.0 * np.pi))


@dataclass(frozen=True)
class UtParams:
    kappa: float = 0.0


def _sqrt_cov(cov: np.ndarray) -> np.ndarray:
    """Lower-triangular-ish square root; falls back to an eigen square root
    for semidefinite matrices the Cholesky rejects."""
    try:
        return np.linalg.cholesky(cov)
    except np.linalg.LinAlgError:
        vals, vecs = np.linalg.eigh(0.5 * (cov + cov.T))
        floor = -1e-9 * max(float(np.trace(cov)), 1.0)
        if vals.min() < floor:
            raise ValueError("covariance factorization failure") from None
        return vecs * np.sqrt(np.maximum(vals, 0.0))


def sigma_points(g: GaussianDensity, params: UtParams = UtParams()) -> tuple[np.ndarray, np.ndarray]:
    """Returns (points (2n+1, n), weights (2n+1,)); the mean point comes first."""
    n = g.dim
    scale = n + params.kappa
    if scale <= 0:
        raise ValueError("need n + kappa > 0")
    root = _sqrt_cov(g.covariance) * np.sqrt(scale)
    pts = np.concatenate([g.mean[None, :], g.mean + root.T, g.mean - root.T])
    weights = np.full(2 * n + 1, 1.0 / (2.0 * scale))
    weights[0] = params.kappa / scale
    return pts, weights


def unscented_transform(g: GaussianDensity, fn, params: UtParams = UtParams()
                        ) -> tuple[GaussianDensity, np.ndarray]:
    """Propagate g through fn; returns the transformed density and the
    input-output cross-covariance."""
    pts, w = sigma_points(g, params)
    out = np.atleast_2d(np.asarray(fn(pts), dtype=float))
    if out.shape[0] != pts.shape[0]:
        out = np.stack([np.asarray(fn(p), dtype=float) for p in pts])
    mean = w @ out
    dev_out = out - mean
    dev_in = pts - g.mean
    cov = (w[:, None] * dev_out).T @ dev_out
    cross = (w[:, None] * dev_in).T @ dev_out
    return GaussianDensity(mean, repair_psd(cov)), cross


def ukf_predict(g: GaussianDensity, F: np.ndarray, m: np.ndarray, Q: np.ndarray) -> GaussianDensity:
    """Linear-dynamics prediction (exact; no sigma points needed)."""
    mean = F @ g.mean + m
    cov = F @ g.covariance @ F.T + Q
    return GaussianDensity(mean, repair_psd(cov))


@dataclass(frozen=True, eq=False)
class ProjectedPrediction:
    """The predicted measurement density of one state density, reused across
    gating, likelihood evaluation, and the Kalman update."""

    z_mean: np.ndarray        # (4,)
    innovation_cov: np.ndarray  # S = P_zz + R
    cross_cov: np.ndarray     # (n, 4)
    _chol: tuple = None       # cached cho_factor of S

    def __post_init__(self) -> None:
        try:
            chol = cho_factor(self.innovation_cov, lower=True)
        except np.linalg.LinAlgError:
            raise ValueError("S not invertible") from None
        object.__setattr__(self, "_chol", chol)

    @property
    def log_det_s(self) -> float:
        return 2.0 * float(np.log(np.diag(self._chol[0])).sum())

    def mahalanobis_sq(self, boxes: np.ndarray) -> np.ndarray:
        diff = np.atleast_2d(boxes) - self.z_mean
        white = solve_triangular(self._chol[0], diff.T, lower=True)
        return (white ** 2).sum(axis=0)

    def log_likelihood(self, boxes: np.ndarray):
        """log N(box; z_mean, S); scalar for one box, (m,) array for a batch."""
        d2 = self.mahalanobis_sq(boxes)
        vals = -0.5 * (d2 + self.log_det_s + 4.0 * _LOG_2PI)
        return vals if np.asarray(boxes).ndim == 2 else float(vals[0])

    def gain(self) -> np.ndarray:
        return cho_solve(self._chol, self.cross_cov.T).T


def project_prediction(g: GaussianDensity, camera: CameraModel, noise: np.ndarray,
                       params: UtParams = UtParams()) -> ProjectedPrediction:
    projected, cross = unscented_transform(g, lambda pts: project(pts, camera), params)
    return ProjectedPrediction(projected.mean, projected.covariance + noise, cross)


def updated_density(g: GaussianDensity, pred: ProjectedPrediction, box: np.ndarray) -> GaussianDensity:
    gain = pred.gain()
    mean = g.mean + gain @ (np.asarray(box, dtype=float) - pred.z_mean)
    cov = g.covariance - gain @ pred.innovation_cov @ gain.T
    return GaussianDensity(mean, repair_psd(cov))


def ukf_update(g: GaussianDensity, box: np.ndarray, camera: CameraModel, noise: np.ndarray,
               params: UtParams = UtParams()) -> tuple[GaussianDensity, float]:
    """One measurement update; returns (posterior, log N(box; predicted))."""
    pred = project_prediction(g, camera, noise, params)
    return updated_density(g, pred, box), pred.log_likelihood(box)


def gate(g: GaussianDensity, box: np.ndarray, camera: CameraModel, noise: np.ndarray,
         threshold: float, params: UtParams = UtParams()) -> tuple[bool, float]:
    """Ellipsoidal gate: pass iff Mahalanobis distance <= threshold (closed)."""
    if threshold <= 0:
        raise ValueError("threshold must be positive")
    pred = project_prediction(g, camera, noise, params)
    d2 = float(pred.mahalanobis_sq(box)[0])
    return d2 <= threshold ** 2, d2
