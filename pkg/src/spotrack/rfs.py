"""Random-finite-set building blocks: Bernoulli tracks, Poisson intensity,
global hypotheses, and the housekeeping that keeps a PMBM posterior small.
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from .gaussians import GaussianDensity, GaussianMixture, normalize_log_weights

# Poisson mixture reduction: drop tiny-mass components, bound the count.
POISSON_PRUNE_MASS = 1e-5
POISSON_MAX_COMPONENTS = 50
# A track is dropped once every referenced hypothesis has existence below this.
TRACK_GC_EXISTENCE = 1e-4

NOT_BORN = -1


@dataclass(frozen=True, eq=False)
class BernoulliComponent:
    """Empty with probability 1-existence, else one object ~ spatial."""

    existence: float
    spatial: GaussianDensity

    def __post_init__(self) -> None:
        r = float(self.existence)
        if not -1e-12 <= r <= 1.0 + 1e-12:
            raise ValueError(f"existence probability {r} outside [0, 1]")
        object.__setattr__(self, "existence", min(max(r, 0.0), 1.0))


@dataclass(frozen=True, eq=False)
class PoissonIntensity:
    """Gaussian-mixture intensity; weights are expected counts, not probabilities."""

    masses: np.ndarray
    components: tuple[GaussianDensity, ...] = ()

    def __post_init__(self) -> None:
        m = np.array(self.masses, dtype=float).reshape(-1)
        if m.size != len(self.components):
            raise ValueError("mass/component count mismatch")
        if m.size and m.min() < 0:
            raise ValueError("negative intensity mass")
        m.flags.writeable = False
        object.__setattr__(self, "masses", m)
        object.__setattr__(self, "components", tuple(self.components))

    @property
    def total_mass(self) -> float:
        return float(self.masses.sum())

    def __len__(self) -> int:
        return len(self.components)

    def scaled(self, factor: float) -> "PoissonIntensity":
        return PoissonIntensity(self.masses * factor, self.components)

    def reduced(self, prune_mass: float = POISSON_PRUNE_MASS,
                max_components: int = POISSON_MAX_COMPONENTS) -> "PoissonIntensity":
        keep = np.flatnonzero(self.masses >= prune_mass)
        if keep.size > max_components:
            order = np.argsort(self.masses[keep])[::-1][:max_components]
            keep = np.sort(keep[order])
        return PoissonIntensity(self.masses[keep], tuple(self.components[i] for i in keep))


def empty_intensity() -> PoissonIntensity:
    return PoissonIntensity(np.empty(0), ())


@dataclass(frozen=True, eq=False)
class Track:
    """One potential object: a label plus alternative single-object hypotheses."""

    label: tuple[int, int]  # (birth frame, measurement index) - stable and unique
    hypotheses: tuple[BernoulliComponent, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "hypotheses", tuple(self.hypotheses))


@dataclass(frozen=True)
class GlobalHypothesis:
    """log weight + per-track choice of local hypothesis (NOT_BORN = absent)."""

    log_weight: float
    choices: tuple[int, ...] = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "choices", tuple(int(i) for i in self.choices))


@dataclass(frozen=True, eq=False)
class PmbmPosterior:
    undetected: PoissonIntensity = field(default_factory=empty_intensity)
    tracks: tuple[Track, ...] = ()
    globals_: tuple[GlobalHypothesis, ...] = (GlobalHypothesis(0.0, ()),)

    def __post_init__(self) -> None:
        object.__setattr__(self, "tracks", tuple(self.tracks))
        object.__setattr__(self, "globals_", tuple(self.globals_))
        labels = [t.label for t in self.tracks]
        if len(set(labels)) != len(labels):
            raise ValueError("duplicate track labels")
        for g in self.globals_:
            if len(g.choices) != len(self.tracks):
                raise ValueError("global hypothesis arity mismatch")
            for t, i in zip(self.tracks, g.choices):
                if i != NOT_BORN and not 0 <= i < len(t.hypotheses):
                    raise ValueError("global hypothesis references a missing local hypothesis")

    @property
    def best_global(self) -> GlobalHypothesis:
        return max(self.globals_, key=lambda g: g.log_weight)


def mb_to_poisson(components) -> tuple[float, GaussianMixture]:
    """Best-fit Poisson for a multi-Bernoulli: total mass = sum of existences,
    spatial mixture weighted by existence. Empty mixture when the mass is zero.
    """
    pairs = [(c.existence, c.spatial) if isinstance(c, BernoulliComponent)
             else (float(c[0]), c[1]) for c in components]
    for r, _ in pairs:
        if not 0.0 <= r <= 1.0:
            raise ValueError(f"existence probability {r} outside [0, 1]")
    beta = sum(r for r, _ in pairs)
    if beta == 0.0:
        return 0.0, GaussianMixture(np.empty(0), ())
    kept = [(r, g) for r, g in pairs if r > 0.0]
    weights = np.array([r for r, _ in kept]) / beta
    return beta, GaussianMixture(weights, tuple(g for _, g in kept))


def prune_and_cap(globals_, log_threshold: float, cap: int) -> tuple[GlobalHypothesis, ...]:
    """Drop normalized log-weights below threshold, keep at most `cap` best,
    renormalize. The single best hypothesis always survives.
    """
    if cap < 1:
        raise ValueError("cap must be at least 1")
    hyps = list(globals_)
    if not hyps:
        raise ValueError("no global hypotheses")
    lw, _ = normalize_log_weights([g.log_weight for g in hyps])
    order = sorted(range(len(hyps)), key=lambda i: (-lw[i], hyps[i].choices))
    keep = [i for i in order if lw[i] >= log_threshold][:cap] or [order[0]]
    new_lw, _ = normalize_log_weights([lw[i] for i in keep])
    return tuple(replace(hyps[i], log_weight=float(w)) for i, w in zip(keep, new_lw))


def garbage_collect(tracks, globals_) -> tuple[tuple[Track, ...], tuple[GlobalHypothesis, ...]]:
    """Drop local hypotheses nothing references, tracks that are everywhere
    absent or negligible (existence < TRACK_GC_EXISTENCE), and remap indices.
    """
    tracks = tuple(tracks)
    globals_ = tuple(globals_)
    n = len(tracks)
    used: list[set[int]] = [set() for _ in range(n)]
    for g in globals_:
        for t, i in enumerate(g.choices):
            if i != NOT_BORN:
                used[t].add(i)

    keep_tracks: list[int] = []
    remap: list[dict[int, int]] = []
    for t, track in enumerate(tracks):
        alive = {i for i in used[t] if track.hypotheses[i].existence >= TRACK_GC_EXISTENCE}
        if not alive:
            remap.append({})
            continue
        keep_tracks.append(t)
        kept = sorted(used[t])  # keep low-existence hypotheses too while referenced
        remap.append({old: new for new, old in enumerate(kept)})

    new_tracks = tuple(
        Track(tracks[t].label, tuple(tracks[t].hypotheses[i] for i in sorted(used[t])))
        for t in keep_tracks
    )
    new_globals = []
    for g in globals_:
        choices = tuple(
            remap[t].get(g.choices[t], NOT_BORN) if g.choices[t] != NOT_BORN else NOT_BORN
            for t in keep_tracks
        )
        new_globals.append(GlobalHypothesis(g.log_weight, choices))
    return new_tracks, _merge_duplicate_globals(new_globals)


def _merge_duplicate_globals(globals_) -> tuple[GlobalHypothesis, ...]:
    # Dropping negligible tracks can make formerly distinct hypotheses equal.
    by_choices: dict[tuple[int, ...], float] = {}
    order: list[tuple[int, ...]] = []
    for g in globals_:
        if g.choices in by_choices:
            a, b = by_choices[g.choices], g.log_weight
            hi = max(a, b)
            by_choices[g.choices] = hi + float(np.log1p(np.exp(min(a, b) - hi)))
        else:
            by_choices[g.choices] = g.log_weight
            order.append(g.choices)
    return tuple(GlobalHypothesis(by_choices[c], c) for c in order)


def reduce_posterior(posterior: PmbmPosterior, log_threshold: float, cap: int) -> PmbmPosterior:
    """Full housekeeping pass: prune/cap globals, GC tracks, reduce the Poisson part."""
    pruned = prune_and_cap(posterior.globals_, log_threshold, cap)
    tracks, globals_ = garbage_collect(posterior.tracks, pruned)
    lw, _ = normalize_log_weights([g.log_weight for g in globals_])
    globals_ = tuple(replace(g, log_weight=float(w)) for g, w in zip(globals_, lw))
    return PmbmPosterior(posterior.undetected.reduced(), tracks, globals_)
