"""Flat key=value run configuration with a documented default for every key.

An empty file (or no file) is a valid configuration. Keys mirror the CLI
``--set key=value`` overrides. Angles are degrees and translations are
millimeters here, matching the reporting convention; they are converted to
radians/meters when module-level objects are built.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, fields
from pathlib import Path

from .features import DetectorConfig
from .loopclose import RansacConfig, ValidationThresholds
from .radar import RadarConfig, Waveform, default_pulse_half_duration, synthesize_pulse


@dataclass(frozen=True)
class RunConfig:
    # radar
    sample_rate_hz: float = 23.328e9
    center_freq_hz: float = 7.29e9
    bandwidth_hz: float = 2.0e9
    pulse_amplitude_v: float = 1.0
    beamwidth_deg: float = 60.0
    range_min_m: float = 0.4
    range_max_m: float = 3.0
    mounts_deg: tuple[float, ...] = (90.0, -90.0)
    pulse_half_duration_s: float = 0.0     # 0 = derive from the envelope decay
    # simulation
    scan_spacing_m: float = 0.025
    snr_db: float = 20.0
    # imaging
    grid_resolution_m: float = 0.005
    blur_sigma_px: float = 1.0
    occupancy_threshold: int = -1          # -1 = Otsu
    # detection & matching
    detectors: tuple[str, ...] = ("orb", "brisk")
    corner_threshold: int = 15
    n_octaves: int = 4
    target_keypoints: int = 200
    ratio: float = 0.75
    ransac_iters: int = 2000
    ransac_inlier_px: float = 3.0
    ransac_min_inliers: int = 3
    # loop validation
    min_good_matches: int = 20
    scale_tol: float = 0.05
    translation_tol_mm: float = 100.0
    rotation_tol_deg: float = 2.0
    seed: int = 0

    # ---- builders -------------------------------------------------------

    def radar_config(self, mount_angle_rad: float = 0.0) -> RadarConfig:
        return RadarConfig(
            sample_rate_hz=self.sample_rate_hz,
            center_freq_hz=self.center_freq_hz,
            bandwidth_hz=self.bandwidth_hz,
            pulse_amplitude_v=self.pulse_amplitude_v,
            beamwidth_rad=math.radians(self.beamwidth_deg),
            range_min_m=self.range_min_m,
            range_max_m=self.range_max_m,
            mount_angle_rad=mount_angle_rad,
        )

    def mounts_rad(self) -> tuple[float, ...]:
        return tuple(math.radians(m) for m in self.mounts_deg)

    def pulse(self) -> Waveform:
        cfg = self.radar_config()
        half = self.pulse_half_duration_s or default_pulse_half_duration(cfg)
        return synthesize_pulse(cfg, half)

    def detector_configs(self) -> list[DetectorConfig]:
        return [DetectorConfig(name, self.corner_threshold, self.n_octaves,
                               self.target_keypoints) for name in self.detectors]

    def ransac_config(self) -> RansacConfig:
        return RansacConfig(self.ransac_iters, self.ransac_inlier_px,
                            self.ransac_min_inliers)

    def thresholds(self) -> ValidationThresholds:
        return ValidationThresholds(
            min_good_matches=self.min_good_matches,
            scale_tol=self.scale_tol,
            translation_tol_m=self.translation_tol_mm / 1000.0,
            rotation_tol_rad=math.radians(self.rotation_tol_deg),
        )

    def validate(self) -> "RunConfig":
        """Force module-level invariant checks (radar, detectors, matcher)."""
        self.radar_config()
        self.pulse()
        self.detector_configs()
        self.ransac_config()
        self.thresholds()
        if self.grid_resolution_m <= 0:
            raise ValueError(f"grid_resolution_m must be positive, "
                             f"got {self.grid_resolution_m}")
        if self.scan_spacing_m <= 0:
            raise ValueError(f"scan_spacing_m must be positive, got {self.scan_spacing_m}")
        if not -1 <= self.occupancy_threshold <= 255:
            raise ValueError(f"occupancy_threshold must be -1 (Otsu) or in [0, 255], "
                             f"got {self.occupancy_threshold}")
        return self


_FIELD_TYPES = {f.name: f.type for f in fields(RunConfig)}


def _parse_value(key: str, raw: str):
    if key not in _FIELD_TYPES:
        known = ", ".join(sorted(_FIELD_TYPES))
        raise ValueError(f"unknown config key {key!r} (known keys: {known})")
    kind = _FIELD_TYPES[key]
    raw = raw.strip()
    if kind == "float":
        return float(raw)
    if kind == "int":
        return int(raw)
    if key == "detectors":
        return tuple(p.strip() for p in raw.split(",") if p.strip())
    if key == "mounts_deg":
        return tuple(float(p) for p in raw.split(",") if p.strip())
    raise AssertionError(f"unhandled config field type for {key}")


def parse_config_text(text: str, base: RunConfig | None = None) -> RunConfig:
    values = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        body = line.split("#", 1)[0].strip()
        if not body:
            continue
        if "=" not in body:
            raise ValueError(f"line {lineno}: expected key=value, got {line!r}")
        key, raw = body.split("=", 1)
        key = key.strip()
        values[key] = _parse_value(key, raw)
    merged = {**(vars(base) if base else {}), **values}
    return RunConfig(**merged).validate()


def load_config(path: str | Path | None,
                overrides: list[str] | None = None) -> RunConfig:
    """Config from an optional file plus ``key=value`` override strings."""
    cfg = RunConfig()
    if path is not None:
        cfg = parse_config_text(Path(path).read_text(), cfg)
    for item in overrides or []:
        if "=" not in item:
            raise ValueError(f"override must be key=value, got {item!r}")
        key, raw = item.split("=", 1)
        cfg = parse_config_text(f"{key}={raw}", cfg)
    return cfg.validate()
