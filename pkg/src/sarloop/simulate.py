"""Synthetic trajectories and radar echoes from point-scatterer scenes.

Stands in for a real acquisition run: a robot path is sampled at a fixed
scan spacing, and each (pose, radar) pair yields a raw echo built from
pulse replicas of the scatterers inside that radar's FOV.

Convention used throughout the package: a pose's ``theta_rad`` is the robot
heading and the radar boresight is ``theta_rad + config.mount_angle_rad``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Sequence

import numpy as np

from .backprojection import ImageGrid, in_fov
from .geometry import Pose2, wrap_angle
from .radar import RadarConfig, RawScan, SPEED_OF_LIGHT, pulse_value, range_bin_spacing

# Extra bins past range_max so pulse tails near the far edge are not clipped.
_EXTRA_TAIL_BINS = 64

DEFAULT_MOUNTS = (math.pi / 2.0, -math.pi / 2.0)


@dataclass(frozen=True)
class Scatterer:
    """Point reflector with a non-negative radar cross-section."""

    x_m: float
    y_m: float
    rcs: float = 1.0

    def __post_init__(self):
        if not (math.isfinite(self.x_m) and math.isfinite(self.y_m)):
            raise ValueError(f"scatterer position must be finite, got {self}")
        if not (math.isfinite(self.rcs) and self.rcs >= 0):
            raise ValueError(f"rcs must be >= 0, got {self.rcs}")


@dataclass(frozen=True)
class TrajectorySpec:
    """Piecewise-linear robot path sampled every ``scan_spacing_m``.

    Waypoint headings are ignored; the heading at each sample comes from the
    segment being traversed. ``lever_arm_m`` offsets the radar phase centers
    from the robot center, in the robot frame. The odometry noise fields add
    cumulative per-step Gaussian drift to the reported poses (off by default).
    """

    waypoints: tuple[Pose2, ...]
    scan_spacing_m: float
    radar_mounts: tuple[float, ...] = DEFAULT_MOUNTS
    lever_arm_m: tuple[float, float] = (0.0, 0.0)
    odo_step_std_m: float = 0.0
    odo_heading_std_rad: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "waypoints", tuple(self.waypoints))
        object.__setattr__(self, "radar_mounts", tuple(self.radar_mounts))
        if len(self.waypoints) < 2:
            raise ValueError("need at least 2 waypoints")
        if self.scan_spacing_m <= 0:
            raise ValueError(f"scan_spacing_m must be positive, got {self.scan_spacing_m}")
        if not self.radar_mounts:
            raise ValueError("need at least one radar mount angle")


def generate_trajectory(spec: TrajectorySpec,
                        rng: np.random.Generator | None = None
                        ) -> list[tuple[Pose2, list[Pose2]]]:
    """Sample (robot pose, per-radar pose) pairs along the path.

    Poses are taken at arc lengths 0, s, 2s, ... along the piecewise-linear
    path. A sample falling exactly on a corner takes the outgoing segment's
    heading. Each radar pose has the lever arm applied and its boresight
    baked into theta (heading + mount angle).
    """
    pts = np.array([[w.x_m, w.y_m] for w in spec.waypoints], dtype=np.float64)
    seg = np.diff(pts, axis=0)
    seg_len = np.hypot(seg[:, 0], seg[:, 1])
    total = float(seg_len.sum())
    if total == 0.0:
        raise ValueError("degenerate path: zero total length")
    cum = np.concatenate(([0.0], np.cumsum(seg_len)))
    headings = np.arctan2(seg[:, 1], seg[:, 0])

    n_steps = int(math.floor(total / spec.scan_spacing_m + 1e-9))
    s_values = np.minimum(np.arange(n_steps + 1) * spec.scan_spacing_m, total)

    drift_xy = np.zeros(2)
    drift_theta = 0.0
    out = []
    for s in s_values:
        idx = int(np.searchsorted(cum, s, side="right")) - 1
        idx = min(idx, len(seg_len) - 1)
        while seg_len[idx] == 0.0 and idx + 1 < len(seg_len):
            idx += 1
        frac = (s - cum[idx]) / seg_len[idx]
        pos = pts[idx] + frac * seg[idx]
        theta = float(headings[idx])
        if spec.odo_step_std_m > 0 or spec.odo_heading_std_rad > 0:
            if rng is None:
                raise ValueError("odometry noise requested but no rng supplied")
            drift_xy = drift_xy + rng.normal(0.0, spec.odo_step_std_m, size=2)
            drift_theta += rng.normal(0.0, spec.odo_heading_std_rad)
        robot = Pose2(float(pos[0] + drift_xy[0]), float(pos[1] + drift_xy[1]),
                      wrap_angle(theta + drift_theta))
        cos_t, sin_t = math.cos(robot.theta_rad), math.sin(robot.theta_rad)
        lx, ly = spec.lever_arm_m
        rx = robot.x_m + cos_t * lx - sin_t * ly
        ry = robot.y_m + sin_t * lx + cos_t * ly
        radars = [Pose2(rx, ry, wrap_angle(robot.theta_rad + mount))
                  for mount in spec.radar_mounts]
        out.append((robot, radars))
    return out


def default_bin_count(config: RadarConfig) -> int:
    """Bin count covering range_max plus headroom for pulse tails."""
    return int(math.ceil(config.range_max_m / range_bin_spacing(config))) + _EXTRA_TAIL_BINS


def simulate_echo(scene: Sequence[Scatterer], radar: Pose2, config: RadarConfig,
                  n_bins: int, noise_std: float = 0.0,
                  rng: np.random.Generator | None = None) -> RawScan:
    """Raw echo at one radar pose: FOV-visible scatterer replicas plus noise.

    Each visible scatterer contributes the transmitted pulse delayed by its
    two-way travel time, scaled by sqrt(rcs) / R^2 (two-way spreading on
    voltage). Scatterers outside the FOV cone contribute nothing.
    """
    if n_bins * range_bin_spacing(config) < config.range_max_m:
        raise ValueError(
            f"{n_bins} bins cover only {n_bins * range_bin_spacing(config):.3f} m, "
            f"less than range_max {config.range_max_m:g} m")
    if noise_std > 0 and rng is None:
        raise ValueError("noise requested but no rng supplied (pass a seeded Generator)")

    t = np.arange(n_bins, dtype=np.float64) / config.sample_rate_hz
    samples = np.zeros(n_bins, dtype=np.float64)
    for sc in scene:
        if not bool(in_fov(radar, config, sc.x_m, sc.y_m)):
            continue
        rng_m = math.hypot(sc.x_m - radar.x_m, sc.y_m - radar.y_m)
        delay = 2.0 * rng_m / SPEED_OF_LIGHT
        samples += (math.sqrt(sc.rcs) / rng_m ** 2) * pulse_value(config, t - delay)
    if noise_std > 0:
        samples = samples + rng.normal(0.0, noise_std, size=n_bins)
    return RawScan(samples, radar)


def render_scene(scene: Sequence[Scatterer], spec: TrajectorySpec, config: RadarConfig,
                 grid: ImageGrid, noise_std: float = 0.0,
                 rng: np.random.Generator | None = None,
                 n_bins: int | None = None) -> tuple[list[RawScan], np.ndarray]:
    """Full forward simulation over a trajectory plus the truth occupancy grid.

    Returns one RawScan per (pose, radar) in pose-major, radar-minor order;
    scan k belongs to radar ``k % len(spec.radar_mounts)``. Scan poses carry
    the robot heading (mounts are applied via the per-radar config, matching
    the back-projection convention). The truth grid marks the cell nearest
    each scatterer.
    """
    if n_bins is None:
        n_bins = default_bin_count(config)
    configs = [replace(config, mount_angle_rad=m) for m in spec.radar_mounts]
    scans = []
    for robot, radar_poses in generate_trajectory(spec, rng=rng):
        for cfg, rp in zip(configs, radar_poses):
            echo_pose = Pose2(rp.x_m, rp.y_m, robot.theta_rad)
            scans.append(simulate_echo(scene, echo_pose, cfg, n_bins, noise_std, rng))

    truth = np.zeros((grid.height_px, grid.width_px), dtype=bool)
    ox, oy = grid.origin_m
    for sc in scene:
        col = int(math.floor((sc.x_m - ox) / grid.resolution_m + 0.5))
        row = int(math.floor((sc.y_m - oy) / grid.resolution_m + 0.5))
        if 0 <= row < grid.height_px and 0 <= col < grid.width_px:
            truth[row, col] = True
    return scans, truth


def noise_std_for_snr(scans: Sequence[RawScan], snr_db: float) -> float:
    """Noise sigma putting the strongest clean echo sample at snr_db above it.

    SNR here is peak signal amplitude over noise standard deviation in dB.
    An infinite snr_db (or silent scans) gives 0, i.e. a noiseless rerun.
    """
    if not scans:
        raise ValueError("no scans to measure")
    if math.isinf(snr_db):
        return 0.0
    peak = max(float(np.max(np.abs(s.samples))) for s in scans)
    return peak / 10.0 ** (snr_db / 20.0)


def load_scene(path: str | Path) -> list[Scatterer]:
    """Read a scene file: one ``x_m y_m rcs`` line per scatterer."""
    scene = []
    for lineno, line in enumerate(Path(path).read_text().splitlines(), start=1):
        body = line.split("#", 1)[0].strip()
        if not body:
            continue
        parts = body.split()
        if len(parts) != 3:
            raise ValueError(f"{path}:{lineno}: expected 'x_m y_m rcs', got {line!r}")
        x, y, rcs = (float(p) for p in parts)
        scene.append(Scatterer(x, y, rcs))
    return scene


def save_scene(scene: Sequence[Scatterer], path: str | Path) -> None:
    lines = [f"{sc.x_m!r} {sc.y_m!r} {sc.rcs!r}" for sc in scene]
    Path(path).write_text("\n".join(lines) + "\n")


def load_trajectory(path: str | Path) -> list[Pose2]:
    """Read a waypoint file: one ``x_m y_m theta_rad`` line per waypoint."""
    poses = []
    for lineno, line in enumerate(Path(path).read_text().splitlines(), start=1):
        body = line.split("#", 1)[0].strip()
        if not body:
            continue
        parts = body.split()
        if len(parts) != 3:
            raise ValueError(f"{path}:{lineno}: expected 'x_m y_m theta_rad', got {line!r}")
        x, y, theta = (float(p) for p in parts)
        poses.append(Pose2(x, y, theta))
    return poses


def save_trajectory(poses: Sequence[Pose2], path: str | Path) -> None:
    lines = [f"{p.x_m!r} {p.y_m!r} {p.theta_rad!r}" for p in poses]
    Path(path).write_text("\n".join(lines) + "\n")
