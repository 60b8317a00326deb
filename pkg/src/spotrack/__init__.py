"""Monocular pedestrian tracking with a physically parameterized
single-camera model: PMBM filtering, parameter identification, simulation,
a SORT baseline, and trajectory-metric evaluation."""

from .birth import BirthModel, birth_depths, birth_mixture
from .camera import CameraModel, ClutterModel, clutter_log_density, measurement_covariance, project
from .config import (
    CameraDefaults,
    Config,
    FilterSettings,
    MetricParams,
    SimulateSettings,
    SortSettings,
    dump_config,
    load_config,
)
from .gaussians import GaussianDensity, GaussianMixture, moment_match, normalize_log_weights
from .identify import (
    DetectionStats,
    LifespanStats,
    MatchResult,
    detection_stats,
    lifespan_birth_stats,
    match_frames,
    pd_vs_visibility,
    pooled_lifespan_stats,
)
from .metrics import (
    GospaResult,
    TgospaResult,
    cardinality_mismatch,
    gospa,
    iou,
    iou_matrix,
    tgospa,
)
from .model import BirthDesign, SpoModel
from .motion import LifetimeParams, MotionParams, birth_expected_count, survival_probability, transition
from .pmbm import (
    Estimate,
    estimate,
    initial_posterior,
    predict,
    run_sequence,
    step,
    update,
)
from .rfs import (
    BernoulliComponent,
    GlobalHypothesis,
    PmbmPosterior,
    PoissonIntensity,
    Track,
    garbage_collect,
    mb_to_poisson,
    prune_and_cap,
    reduce_posterior,
)
from .simulate import Scenario, sample_scenario
from .sort import sort_track
from .trajectories import Trajectory, TrajectorySet, trajectory_set_from_rows
from .unscented import gate, sigma_points, ukf_predict, ukf_update, unscented_transform

from .assignment import murty_mbest, solve

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
