"""Plain-text configuration: one INI file, one section per module.

Every default below is also the default of the corresponding dataclass, so an
empty file (or no file) means the standard model. `dump_config` writes the
effective settings back in the same format (used by the CLI's --print-config).
"""
from __future__ import annotations

import configparser
import io
from dataclasses import dataclass, fields

from .camera import CameraModel
from .model import BirthDesign, SpoModel
from .motion import LifetimeParams, MotionParams


@dataclass(frozen=True)
class FilterSettings:
    gate_threshold: float = 6.0        # Mahalanobis distance bound (not squared)
    max_globals: int = 25
    prune_log_weight: float = -100.0   # on normalized log weights
    murty_m: int = 3                   # children per prior global hypothesis
    estimate_threshold: float = 0.5    # closed bound: r == threshold is reported

    def __post_init__(self) -> None:
        if self.gate_threshold <= 0 or self.max_globals < 1 or self.murty_m < 1:
            raise ValueError("invalid filter settings")


@dataclass(frozen=True)
class SortSettings:
    iou_threshold: float = 0.3
    min_hits: int = 3
    max_age: int = 1
    # Kalman plumbing in pixel/frame units; baseline defaults, not identified.
    measurement_noise: float = 1.0     # px std on each box coordinate
    process_noise: float = 1.0         # px/frame^1.5 white-acceleration scale
    initial_velocity_std: float = 10.0


@dataclass(frozen=True)
class MetricParams:
    cutoff: float = 0.5
    exponent: float = 1.8
    switch_penalty: float | None = None  # None: cutoff * 10^(1/exponent)

    def __post_init__(self) -> None:
        if self.cutoff <= 0 or self.exponent < 1:
            raise ValueError("need cutoff > 0 and exponent >= 1")
        if self.switch_penalty is not None and self.switch_penalty <= 0:
            raise ValueError("switch penalty must be positive")

    @property
    def gamma(self) -> float:
        if self.switch_penalty is not None:
            return self.switch_penalty
        return self.cutoff * 10.0 ** (1.0 / self.exponent)


@dataclass(frozen=True)
class CameraDefaults:
    """Camera settings not provided by sequence metadata (plus fallbacks for
    synthetic sequences that have no metadata at all)."""
    focal_length: float = 1e-3
    pixel_size: float = 1e-6
    image_width: float = 1920.0
    image_height: float = 1080.0
    frame_rate: float = 30.0


@dataclass(frozen=True)
class SimulateSettings:
    frames: int = 1000
    seed: int = 0


@dataclass(frozen=True)
class Config:
    camera: CameraDefaults = CameraDefaults()
    motion: MotionParams = MotionParams()
    lifetime: LifetimeParams = LifetimeParams()
    detection_p: float = 0.529
    clutter_rate: float = 1.552
    birth: BirthDesign = BirthDesign()
    filter: FilterSettings = FilterSettings()
    sort: SortSettings = SortSettings()
    metrics: MetricParams = MetricParams()
    simulate: SimulateSettings = SimulateSettings()

    def camera_model(self, image_width: float | None = None, image_height: float | None = None,
                     frame_rate: float | None = None) -> CameraModel:
        return CameraModel(
            image_width=image_width if image_width is not None else self.camera.image_width,
            image_height=image_height if image_height is not None else self.camera.image_height,
            frame_rate=frame_rate if frame_rate is not None else self.camera.frame_rate,
            focal_length=self.camera.focal_length,
            pixel_size=self.camera.pixel_size,
        )

    def model_for(self, image_width: float | None = None, image_height: float | None = None,
                  frame_rate: float | None = None) -> SpoModel:
        return SpoModel(
            camera=self.camera_model(image_width, image_height, frame_rate),
            motion=self.motion,
            lifetime=self.lifetime,
            p_detect=self.detection_p,
            clutter_rate=self.clutter_rate,
            birth_design=self.birth,
        )


_SECTIONS = {
    "camera": ("camera", CameraDefaults),
    "motion": ("motion", MotionParams),
    "lifetime": ("lifetime", LifetimeParams),
    "birth": ("birth", BirthDesign),
    "filter": ("filter", FilterSettings),
    "sort": ("sort", SortSettings),
    "metrics": ("metrics", MetricParams),
    "simulate": ("simulate", SimulateSettings),
}
_SCALARS = {"detection": {"p_detect": "detection_p"}, "clutter": {"rate": "clutter_rate"}}


def _parse_value(raw: str, kind: type):
    raw = raw.strip()
    if raw.lower() in ("", "none"):
        return None
    if kind is int or kind == "int":
        return int(raw)
    if kind is bool:
        return raw.lower() in ("1", "true", "yes")
    return float(raw)


def load_config(path: str | None = None, overrides: dict[str, str] | None = None) -> Config:
    """Read an INI config file; later `overrides` ("section.key" -> raw string)
    win over the file, which wins over defaults. Unknown keys are an error."""
    parser = configparser.ConfigParser()
    if path is not None:
        with open(path) as fh:
            parser.read_file(fh)
    flat: dict[str, str] = {}
    for section in parser.sections():
        for key, raw in parser.items(section):
            flat[f"{section}.{key}"] = raw
    flat.update(overrides or {})

    kwargs: dict[str, object] = {}
    section_kwargs: dict[str, dict[str, object]] = {name: {} for name in _SECTIONS}
    for dotted, raw in flat.items():
        section, _, key = dotted.partition(".")
        if section in _SCALARS and key in _SCALARS[section]:
            kwargs[_SCALARS[section][key]] = _parse_value(raw, float)
            continue
        if section not in _SECTIONS:
            raise ValueError(f"unknown config section [{section}]")
        attr, cls = _SECTIONS[section]
        field_types = {f.name: f.type for f in fields(cls)}
        if key not in field_types:
            raise ValueError(f"unknown config key {dotted}")
        kind = int if "int" in str(field_types[key]) else float
        value = _parse_value(raw, kind)
        if value is None and "None" not in str(field_types[key]):
            raise ValueError(f"config key {dotted} must have a value")
        section_kwargs[section][key] = value

    for section, (attr, cls) in _SECTIONS.items():
        if section_kwargs[section]:
            kwargs[attr] = cls(**section_kwargs[section])
    return Config(**kwargs)


def dump_config(config: Config) -> str:
    parser = configparser.ConfigParser()
    for section, (attr, _) in _SECTIONS.items():
        obj = getattr(config, attr)
        parser[section] = {
            f.name: ("" if getattr(obj, f.name) is None else repr(getattr(obj, f.name)))
            for f in fields(obj)
        }
    parser["detection"] = {"p_detect": repr(config.detection_p)}
    parser["clutter"] = {"rate": repr(config.clutter_rate)}
    buf = io.StringIO()
    parser.write(buf)
    return buf.getvalue()
