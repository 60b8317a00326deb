"""Multi-object tracking filter mixing a Poisson intensity for undetected
objects with a mixture of global data-association hypotheses over tracks.

Each update expands every global hypothesis into its M cheapest association
solutions (existing track detected / missed, measurement starts a new track
or is clutter), then prunes, caps, and garbage-collects the mixture.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .assignment import _murty
from .config import FilterSettings
from .gaussians import GaussianDensity, log_floor, moment_match, normalize_log_weights
from .model import SpoModel
from .rfs import (
    NOT_BORN,
    BernoulliComponent,
    GlobalHypothesis,
    PmbmPosterior,
    PoissonIntensity,
    Track,
    empty_intensity,
    reduce_posterior,
)
from .trajectories import TrajectorySet, trajectory_set_from_rows
from .unscented import (
    ProjectedPrediction,
    project_prediction,
    ukf_predict,
    unscented_transform,
    updated_density,
)


def initial_posterior(model: SpoModel, undetected: PoissonIntensity | None = None) -> PmbmPosterior:
    """Time-zero prior: the birth intensity (or an override), no tracks yet."""
    if undetected is None:
        undetected = model.birth.intensity()
    return PmbmPosterior(undetected=undetected, tracks=(),
                         globals_=(GlobalHypothesis(0.0, ()),))


def predict(posterior: PmbmPosterior, model: SpoModel) -> PmbmPosterior:
    """Propagate one frame period: survival thinning, motion diffusion, birth."""
    undetected = posterior.undetected
    masses = undetected.masses * model.p_survive
    comps = tuple(ukf_predict(g, model.F, model.m, model.Q) for g in undetected.components)
    birth = model.birth.intensity()
    if birth.total_mass > 0:
        masses = np.concatenate([masses, birth.masses])
        comps = comps + birth.components
    tracks = tuple(
        Track(t.label, tuple(
            BernoulliComponent(h.existence * model.p_survive,
                               ukf_predict(h.spatial, model.F, model.m, model.Q))
            for h in t.hypotheses))
        for t in posterior.tracks)
    return PmbmPosterior(PoissonIntensity(masses, comps), tracks, posterior.globals_)


@dataclass(frozen=True, eq=False)
class _NewTrackCandidate:
    log_weight: float  # lambda * clutter density + detected undetected mass
    component: BernoulliComponent | None  # None when nothing could be matched


def _project_safe(spatial: GaussianDensity, model: SpoModel) -> ProjectedPrediction | None:
    """Projection fails when sigma points reach non-positive depth; such a
    density cannot produce a measurement this frame."""
    try:
        return project_prediction(spatial, model.camera, model.noise)
    except ValueError:
        return None


def _new_track_candidates(undetected: PoissonIntensity, boxes: np.ndarray,
                          model: SpoModel, gate_sq: float) -> list[_NewTrackCandidate]:
    """Per measurement: weight and spatial density of a first-detection track.

    The weight sums the clutter intensity and the detected Poisson mass. When
    no component gates, the full intensity serves as the matching pool so the
    track still gets a usable (if weakly supported) density.
    """
    preds = [_project_safe(g, model) for g in undetected.components]
    usable = [i for i, pr in enumerate(preds) if pr is not None]
    m = len(boxes)
    dist_sq = np.full((len(preds), m), np.inf)
    log_lik = np.full((len(preds), m), -np.inf)
    for i in usable:
        dist_sq[i] = preds[i].mahalanobis_sq(boxes)
        log_lik[i] = preds[i].log_likelihood(boxes)
    log_pd = log_floor(model.p_detect)
    out = []
    for j in range(m):
        log_clutter = model.clutter_intensity_log(boxes[j])
        pool = [i for i in usable if dist_sq[i, j] <= gate_sq] or usable
        if not pool:
            out.append(_NewTrackCandidate(log_clutter, None))
            continue
        terms = np.array([log_pd + log_floor(undetected.masses[i]) + log_lik[i, j]
                          for i in pool])
        top = terms.max()
        log_detected = top + np.log(np.exp(terms - top).sum())
        log_total = np.logaddexp(log_detected, log_clutter)
        existence = float(np.exp(log_detected - log_total))
        posts = [updated_density(undetected.components[i], preds[i], boxes[j]) for i in pool]
        spatial = moment_match(terms, posts)
        out.append(_NewTrackCandidate(float(log_total),
                                      BernoulliComponent(existence, spatial)))
    return out


@dataclass(frozen=True, eq=False)
class _HypothesisExpansion:
    """Detection/miss children of one prior local hypothesis."""
    log_w_miss: float
    miss: BernoulliComponent
    log_w_det: np.ndarray   # (m,), -inf when outside the gate
    pred: ProjectedPrediction | None


def _expand_hypothesis(h: BernoulliComponent, boxes: np.ndarray,
                       model: SpoModel, gate_sq: float) -> _HypothesisExpansion:
    r, pd = h.existence, model.p_detect
    denom = 1.0 - r * pd
    r_miss = r * (1.0 - pd) / denom if denom > 0 else 0.0
    miss = BernoulliComponent(r_miss, h.spatial)
    log_w_miss = log_floor(denom)
    m = len(boxes)
    log_w_det = np.full(m, -np.inf)
    pred = _project_safe(h.spatial, model)
    if pred is not None and m:
        dist_sq = pred.mahalanobis_sq(boxes)
        inside = dist_sq <= gate_sq
        if inside.any():
            ll = pred.log_likelihood(boxes[inside])
            log_w_det[inside] = log_floor(r) + log_floor(pd) + ll
    return _HypothesisExpansion(log_w_miss, miss, log_w_det, pred)


def update(posterior: PmbmPosterior, boxes, model: SpoModel,
           settings: FilterSettings = FilterSettings(), frame: int = 0) -> PmbmPosterior:
    """Measurement update. Global weights are normalized; no reduction here."""
    boxes = np.asarray(boxes, dtype=float).reshape(-1, 4)
    m = len(boxes)
    gate_sq = settings.gate_threshold ** 2

    candidates = _new_track_candidates(posterior.undetected, boxes, model, gate_sq)
    log_w_new = np.array([cand.log_weight for cand in candidates])

    expansions: list[list[_HypothesisExpansion]] = [
        [_expand_hypothesis(h, boxes, model, gate_sq) for h in t.hypotheses]
        for t in posterior.tracks
    ]

    n_prior_tracks = len(posterior.tracks)
    new_hyps: list[list[BernoulliComponent]] = [[] for _ in range(n_prior_tracks)]
    hyp_index: dict[tuple[int, int, int], int] = {}  # (track, prior hyp, j or -1)

    def child_index(t: int, ell: int, j: int) -> int:
        key = (t, ell, j)
        if key not in hyp_index:
            exp = expansions[t][ell]
            if j < 0:
                comp = exp.miss
            else:
                spatial = updated_density(posterior.tracks[t].hypotheses[ell].spatial,
                                          exp.pred, boxes[j])
                comp = BernoulliComponent(1.0, spatial)
            new_hyps[t].append(comp)
            hyp_index[key] = len(new_hyps[t]) - 1
        return hyp_index[key]

    born_tracks: dict[int, int] = {}  # measurement -> new track slot
    born_order: list[int] = []

    def birth_slot(j: int) -> int:
        if j not in born_tracks:
            born_tracks[j] = n_prior_tracks + len(born_order)
            born_order.append(j)
        return born_tracks[j]

    # children as (log weight, prior-track choices, born measurement set);
    # born-track slots get padded once every global has been expanded
    children: list[tuple[float, list[int], set[int]]] = []
    for g in posterior.globals_:
        live = [t for t, ell in enumerate(g.choices) if ell != NOT_BORN]
        base = g.log_weight + sum(expansions[t][g.choices[t]].log_w_miss for t in live)
        if m == 0:
            choices = [NOT_BORN] * n_prior_tracks
            for t in live:
                choices[t] = child_index(t, g.choices[t], -1)
            children.append((base, choices, set()))
            continue
        n_live = len(live)
        cost = np.full((m, n_live + m), np.inf)
        for col, t in enumerate(live):
            exp = expansions[t][g.choices[t]]
            cost[:, col] = -(exp.log_w_det - exp.log_w_miss)
        cost[np.arange(m), n_live + np.arange(m)] = -log_w_new
        for vec, total in _murty(cost, settings.murty_m, refine_root=False):
            choices = [NOT_BORN] * n_prior_tracks
            assigned: dict[int, int] = {}
            births: set[int] = set()
            for j, col in enumerate(vec):
                if col < n_live:
                    assigned[live[col]] = j
                elif candidates[j].component is not None:
                    birth_slot(j)
                    births.add(j)
            for t in live:
                choices[t] = child_index(t, g.choices[t], assigned.get(t, -1))
            children.append((base - total, choices, births))
    if not children:
        raise ValueError("no feasible association for the measurement set")

    # materialize tracks; prior tracks that no surviving child references are
    # dropped and the choice vectors remapped
    kept = [t for t in range(n_prior_tracks) if new_hyps[t]]
    remap = {t: i for i, t in enumerate(kept)}
    tracks = [Track(posterior.tracks[t].label, tuple(new_hyps[t])) for t in kept]
    for j in born_order:
        tracks.append(Track((frame, int(j)), (candidates[j].component,)))

    log_weights = normalize_log_weights(np.array([c[0] for c in children]))[0]
    globals_ = []
    for lw, (_, choices, births) in zip(log_weights, children):
        full = [NOT_BORN] * len(tracks)
        for t in kept:
            full[remap[t]] = choices[t]
        for j in births:
            full[len(kept) + born_order.index(j)] = 0
        globals_.append(GlobalHypothesis(float(lw), tuple(full)))

    thinned = PoissonIntensity(posterior.undetected.masses * (1.0 - model.p_detect),
                               posterior.undetected.components)
    return PmbmPosterior(thinned, tuple(tracks), tuple(globals_))


@dataclass(frozen=True, eq=False)
class Estimate:
    label: tuple[int, int]
    existence: float
    state: GaussianDensity
    box: np.ndarray  # projected bounding box [x, y, w, h]


def estimate(posterior: PmbmPosterior, model: SpoModel,
             threshold: float = 0.5) -> list[Estimate]:
    """Report tracks from the single highest-weight global hypothesis whose
    existence probability reaches the threshold (boundary value included)."""
    best = posterior.best_global
    out = []
    for t, ell in enumerate(best.choices):
        if ell == NOT_BORN:
            continue
        hyp = posterior.tracks[t].hypotheses[ell]
        if hyp.existence < threshold:
            continue
        try:
            projected, _ = unscented_transform(
                hyp.spatial, lambda pts: _project_points(pts, model))
        except ValueError:  # behind the camera; nothing to draw this frame
            continue
        out.append(Estimate(posterior.tracks[t].label, hyp.existence,
                            hyp.spatial, projected.mean))
    return out


def _project_points(pts: np.ndarray, model: SpoModel) -> np.ndarray:
    from .camera import project
    return project(pts, model.camera)


def step(posterior: PmbmPosterior, boxes, model: SpoModel,
         settings: FilterSettings = FilterSettings(), frame: int = 0,
         first: bool = False) -> PmbmPosterior:
    """predict (skipped on the first frame) + update + reduce."""
    if not first:
        posterior = predict(posterior, model)
    posterior = update(posterior, boxes, model, settings, frame)
    return reduce_posterior(posterior, settings.prune_log_weight, settings.max_globals)


def run_sequence(detections, model: SpoModel,
                 settings: FilterSettings = FilterSettings(),
                 first_frame: int = 1) -> TrajectorySet:
    """Filter a whole detection sequence into box trajectories.

    detections: iterable of (m_k, 4) arrays, one per frame. Track identities
    are their integer birth order; frame numbering starts at first_frame.
    """
    posterior = initial_posterior(model)
    frames, idents, boxes = [], [], []
    label_ids: dict[tuple[int, int], int] = {}
    n_frames = 0
    for k, dets in enumerate(detections):
        n_frames += 1
        posterior = step(posterior, dets, model, settings, frame=k, first=(k == 0))
        for est in estimate(posterior, model, settings.estimate_threshold):
            ident = label_ids.setdefault(est.label, len(label_ids) + 1)
            frames.append(first_frame + k)
            idents.append(ident)
            boxes.append(est.box)
    frame_range = (first_frame, first_frame + max(n_frames - 1, 0))
    if not frames:
        return TrajectorySet({}, frame_range)
    return trajectory_set_from_rows(frames, idents, boxes, frame_range)
