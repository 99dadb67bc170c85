"""Keypoint/descriptor types and the detector plug-in registry."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Protocol

import numpy as np

from ..imgpost import GrayImage

MIN_IMAGE_SIDE_PX = 32


@dataclass(frozen=True)
class Keypoint:
    """Detected image feature, positioned in base-image pixel coordinates."""

    x_px: float
    y_px: float
    response: float
    angle_rad: float = 0.0
    octave: int = 0

    def __post_init__(self):
        if not (math.isfinite(self.x_px) and math.isfinite(self.y_px)):
            raise ValueError(f"keypoint position must be finite, got {self}")
        if self.octave < 0:
            raise ValueError(f"octave must be >= 0, got {self.octave}")


@dataclass(frozen=True)
class DetectorConfig:
    """Tuning knobs shared by the native detectors.

    corner_threshold is the segment-test intensity delta; target_keypoints
    caps how many responses are kept after ranking.
    """

    detector_id: str
    corner_threshold: int = 15
    n_octaves: int = 4
    target_keypoints: int = 200

    def __post_init__(self):
        if self.corner_threshold <= 0:
            raise ValueError(f"corner_threshold must be > 0, got {self.corner_threshold}")
        if self.target_keypoints < 1:
            raise ValueError(f"target_keypoints must be >= 1, got {self.target_keypoints}")
        if self.n_octaves < 1:
            raise ValueError(f"n_octaves must be >= 1, got {self.n_octaves}")


@dataclass(frozen=True)
class FeatureSet:
    """Keypoints plus their packed binary descriptors.

    descriptors is a (len(keypoints), bits/8) uint8 array; bit k of a
    descriptor is bit (7 - k % 8) of byte k // 8 (numpy packbits order).
    Descriptors from different detector_ids are never comparable.
    """

    detector_id: str
    keypoints: tuple[Keypoint, ...]
    descriptors: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "keypoints", tuple(self.keypoints))
        desc = np.ascontiguousarray(np.asarray(self.descriptors, dtype=np.uint8))
        if desc.ndim != 2:
            raise ValueError(f"descriptors must be 2-D, got shape {desc.shape}")
        if desc.shape[0] != len(self.keypoints):
            raise ValueError(
                f"{len(self.keypoints)} keypoints but {desc.shape[0]} descriptors")
        object.__setattr__(self, "descriptors", desc)

    def __len__(self) -> int:
        return len(self.keypoints)

    @property
    def descriptor_bits(self) -> int:
        return self.descriptors.shape[1] * 8


class Detector(Protocol):
    """Anything that can turn an 8-bit image into a FeatureSet."""

    def detect_and_describe(self, img: GrayImage, cfg: DetectorConfig) -> FeatureSet:
        ...


_REGISTRY: dict[str, Callable[[], Detector]] = {}


def register_detector(name: str):
    """Class decorator adding a detector factory under ``name``."""

    def wrap(factory):
        if name in _REGISTRY:
            raise ValueError(f"detector {name!r} already registered")
        _REGISTRY[name] = factory
        return factory

    return wrap


def get_detector(name: str) -> Detector:
    try:
        factory = _REGISTRY[name]
    except KeyError:
        known = ", ".join(sorted(_REGISTRY)) or "none"
        raise KeyError(f"unknown detector {name!r} (registered: {known})") from None
    return factory()


def available_detectors() -> list[str]:
    return sorted(_REGISTRY)


def require_min_size(pixels: np.ndarray) -> None:
    h, w = pixels.shape
    if h < MIN_IMAGE_SIDE_PX or w < MIN_IMAGE_SIDE_PX:
        raise ValueError(
            f"image {w}x{h} too small for detection (need >= "
            f"{MIN_IMAGE_SIDE_PX}x{MIN_IMAGE_SIDE_PX})")
