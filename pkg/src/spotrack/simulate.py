"""Generative sampler of the full tracking model: birth/death population
dynamics, per-object motion, projected noisy detections, and clutter.

Uses numpy's default PCG64 generator; one seed fixes the whole scenario.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .camera import project
from .model import SpoModel
from .trajectories import TrajectorySet, trajectory_set_from_rows


@dataclass(frozen=True, eq=False)
class Scenario:
    gt: TrajectorySet                      # projected 2D boxes, 1-based frames
    states: dict[int, dict[int, np.ndarray]]  # ident -> frame -> 8-dim state
    detections: list[np.ndarray]           # per frame, (m, 4) incl. clutter
    cardinality: np.ndarray                # alive objects per frame

    @property
    def lifespans(self) -> dict[int, int]:
        """Frames alive per object. Objects alive on the last frame are
        right-censored; filter on is_censored for distribution tests."""
        return {i: len(fr) for i, fr in self.states.items()}

    def is_censored(self, ident: int) -> bool:
        return max(self.states[ident]) == self.n_frames

    @property
    def n_frames(self) -> int:
        return len(self.detections)


def _sqrt_psd(cov: np.ndarray) -> np.ndarray:
    if not cov.any():
        return np.zeros_like(cov)
    try:
        return np.linalg.cholesky(cov)
    except np.linalg.LinAlgError:
        vals, vecs = np.linalg.eigh(cov)
        return vecs * np.sqrt(np.clip(vals, 0, None))


class _BirthSampler:
    """Mixture sampling with the component factorizations done once."""

    def __init__(self, model: SpoModel):
        mixture = model.birth.mixture
        self.empty = mixture.is_empty
        if self.empty:
            return
        self.weights = mixture.weights / mixture.weights.sum()
        self.means = [c.mean for c in mixture.components]
        self.sqrts = [_sqrt_psd(c.covariance) for c in mixture.components]

    def draw(self, n: int, rng: np.random.Generator) -> np.ndarray:
        picks = rng.choice(len(self.weights), size=n, p=self.weights)
        out = np.empty((n, 8))
        for i, c in enumerate(picks):
            out[i] = self.means[c] + self.sqrts[c] @ rng.standard_normal(8)
        return out


def sample_scenario(model: SpoModel, n_frames: int, seed: int) -> Scenario:
    """Simulate n_frames steps. The initial population is Poisson with the
    stationary mean (lifespan x birth rate); newborns appear from frame 1 on
    with the per-step birth mass; survival and motion follow the model."""
    if n_frames < 1:
        raise ValueError("n_frames must be >= 1")
    rng = np.random.default_rng(seed)
    p_s = model.p_survive
    beta = model.birth.expected_count
    sqrt_noise = _sqrt_psd(model.noise)
    sqrt_q = _sqrt_psd(model.Q)
    births = _BirthSampler(model)

    states: dict[int, dict[int, np.ndarray]] = {}
    alive: dict[int, np.ndarray] = {}
    next_id = 1
    n0 = rng.poisson(model.lifetime.steady_state_count)
    if n0 and births.empty:
        raise ValueError("cannot draw an initial population from an empty birth density")
    if n0:
        for x in births.draw(n0, rng):
            alive[next_id] = x
            next_id += 1

    detections: list[np.ndarray] = []
    cardinality = np.zeros(n_frames, dtype=int)
    gt_frames, gt_idents, gt_boxes = [], [], []

    for k in range(1, n_frames + 1):
        if k > 1:
            # survival thinning, then motion, then births
            survivors = {}
            for ident, x in alive.items():
                if rng.random() < p_s:
                    survivors[ident] = model.F @ x + model.m + sqrt_q @ rng.standard_normal(8)
            alive = survivors
            n_birth = rng.poisson(beta) if beta > 0 else 0
            if n_birth:
                for x in births.draw(n_birth, rng):
                    alive[next_id] = x
                    next_id += 1
        cardinality[k - 1] = len(alive)

        frame_dets = []
        for ident in sorted(alive):
            x = alive[ident]
            states.setdefault(ident, {})[k] = x.copy()
            if x[4] <= 0:
                continue  # behind the camera: no box, no detection
            box = project(x, model.camera)
            gt_frames.append(k)
            gt_idents.append(ident)
            gt_boxes.append(box)
            if rng.random() < model.p_detect:
                frame_dets.append(box + sqrt_noise @ rng.standard_normal(4))
        n_clutter = rng.poisson(model.clutter.rate) if model.clutter.rate > 0 else 0
        if n_clutter:
            support = model.clutter.support
            frame_dets.extend(rng.uniform(support[:, 0], support[:, 1])
                              for _ in range(n_clutter))
        detections.append(np.array(frame_dets).reshape(-1, 4))

    if gt_frames:
        gt = trajectory_set_from_rows(gt_frames, gt_idents, gt_boxes, (1, n_frames))
    else:
        gt = TrajectorySet({}, (1, n_frames))
    return Scenario(gt, states, detections, cardinality)
