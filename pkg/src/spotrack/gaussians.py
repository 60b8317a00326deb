"""Gaussian densities, mixtures, and log-weight arithmetic.

Everything here is an immutable value: arrays are copied on construction and
marked read-only, so instances can be shared freely across threads and
hypothesis trees.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

# Relative eigenvalue tolerance accepted as "zero" for PSD checks.
PSD_CHECK_TOL = 1e-9
# Repair limit: eigenvalues below -tol*trace mean the algebra went wrong.
PSD_REPAIR_TOL = 1e-6

_LOG_TINY = float(np.log(1e-300))


def _frozen(a: np.ndarray) -> np.ndarray:
    out = np.array(a, dtype=float)
    out.flags.writeable = False
    return out


@dataclass(frozen=True, eq=False)
class GaussianDensity:
    """Multivariate normal with validated mean/covariance."""

    mean: np.ndarray
    covariance: np.ndarray

    def __post_init__(self) -> None:
        m = _frozen(np.atleast_1d(self.mean))
        c = _frozen(np.atleast_2d(self.covariance))
        if m.ndim != 1 or c.shape != (m.size, m.size):
            raise ValueError(f"dimension mismatch: mean {m.shape}, covariance {c.shape}")
        if not np.allclose(c, c.T, atol=1e-8 * (1.0 + np.abs(c).max())):
            raise ValueError("covariance is not symmetric")
        tr = float(np.trace(c))
        lo = np.linalg.eigvalsh(c).min() if m.size else 0.0
        if lo < -PSD_CHECK_TOL * max(tr, 1.0):
            raise ValueError(f"covariance is not PSD (min eigenvalue {lo:.3e})")
        object.__setattr__(self, "mean", m)
        object.__setattr__(self, "covariance", c)

    @property
    def dim(self) -> int:
        return self.mean.size

    def log_pdf(self, x: np.ndarray) -> float:
        diff = np.asarray(x, dtype=float) - self.mean
        chol = np.linalg.cholesky(self.covariance)
        white = np.linalg.solve(chol, diff)
        logdet = 2.0 * np.log(np.diag(chol)).sum()
        return float(-0.5 * (white @ white + logdet + self.dim * np.log(2.0 * np.pi)))


def symmetrize(c: np.ndarray) -> np.ndarray:
    return 0.5 * (c + c.T)


def repair_psd(c: np.ndarray) -> np.ndarray:
    """Symmetrize and clamp slightly-negative eigenvalues to zero.

    Negative eigenvalues beyond -PSD_REPAIR_TOL * trace are not round-off and
    raise instead of being hidden.
    """
    c = symmetrize(np.asarray(c, dtype=float))
    vals, vecs = np.linalg.eigh(c)
    floor = -PSD_REPAIR_TOL * max(float(np.trace(c)), 1.0)
    if vals.min() < floor:
        raise ValueError(f"covariance lost positive semidefiniteness (min eigenvalue {vals.min():.3e})")
    if vals.min() >= 0.0:
        return c
    return symmetrize((vecs * np.maximum(vals, 0.0)) @ vecs.T)


@dataclass(frozen=True, eq=False)
class GaussianMixture:
    """Weighted Gaussian components; weights sum to 1 for probability densities."""

    weights: np.ndarray
    components: tuple[GaussianDensity, ...] = field(default=())

    def __post_init__(self) -> None:
        w = _frozen(np.atleast_1d(self.weights)) if np.size(self.weights) else _frozen(np.empty(0))
        comps = tuple(self.components)
        if w.size != len(comps):
            raise ValueError("weight/component count mismatch")
        if w.size and w.min() < 0:
            raise ValueError("negative mixture weight")
        dims = {c.dim for c in comps}
        if len(dims) > 1:
            raise ValueError("component dimensions differ")
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "components", comps)

    def __len__(self) -> int:
        return len(self.components)

    @property
    def is_empty(self) -> bool:
        return len(self.components) == 0


def normalize_log_weights(log_weights) -> tuple[np.ndarray, float]:
    """Shift-stable normalization: returns (log weights summing to 1, log normalizer)."""
    lw = np.asarray(log_weights, dtype=float)
    if lw.size == 0:
        raise ValueError("nothing to normalize")
    shift = lw.max()
    if not np.isfinite(shift):
        raise ValueError("degenerate hypothesis set: all log-weights are -inf")
    log_norm = shift + np.log(np.exp(lw - shift).sum())
    return lw - log_norm, float(log_norm)


def moment_match(log_weights, components: tuple[GaussianDensity, ...]) -> GaussianDensity:
    """Collapse a normalized-log-weight mixture to a single moment-matched Gaussian."""
    lw, _ = normalize_log_weights(log_weights)
    w = np.exp(lw)
    means = np.stack([c.mean for c in components])
    mean = w @ means
    dim = mean.size
    cov = np.zeros((dim, dim))
    for wi, c in zip(w, components):
        d = c.mean - mean
        cov += wi * (c.covariance + np.outer(d, d))
    return GaussianDensity(mean, repair_psd(cov))


def log_floor(x: float) -> float:
    """log(x) floored at log(1e-300) so exact zeros stay finite in cost algebra."""
    return float(np.log(max(x, 1e-300)))
