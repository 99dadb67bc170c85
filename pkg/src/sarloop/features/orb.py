"""Oriented binary descriptor from pairwise intensity comparisons.

256 bits per keypoint: the frozen point-pair pattern is steered by the
keypoint's orientation, both points of each pair are read from a 5x5
box-smoothed image, and the bit is set when the first point is darker
than the second. Comparisons make the bits invariant to any uniform
brightness offset.
"""

from __future__ import annotations

import math

import numpy as np
from scipy import ndimage

from ..imgpost import GrayImage
from .base import DetectorConfig, FeatureSet, Keypoint, register_detector
from .corners import (build_pyramid, detect_on_levels, level_coords,
                      orientation_centroid, with_angle)
from .patterns import PAIR_PATTERN

DESCRIPTOR_BITS = 256
# Pattern offsets reach 13px, times sqrt(2) under rotation, plus the box
# smoothing radius: keypoints closer than this to an edge are dropped.
BORDER_MARGIN_PX = 21
ORIENTATION_RADIUS_PX = 15

_PATTERN = np.asarray(PAIR_PATTERN, dtype=np.float64)  # (256, 4): x1 y1 x2 y2


def _smoothed(pixels: np.ndarray) -> np.ndarray:
    """5x5 box response (sum, not mean) with reflected edges.

    Comparisons only care about order, so the unnormalized sum is
    equivalent to the mean — and on integer images it is exact, which
    keeps descriptor bits bit-stable under uniform brightness offsets.
    """
    arr = np.asarray(pixels)
    if np.issubdtype(arr.dtype, np.integer):
        work = arr.astype(np.int64)
    else:
        work = arr.astype(np.float64)
    ones = np.ones(5, dtype=np.int64)
    rows = ndimage.convolve1d(work, ones, axis=0, mode="reflect")
    return ndimage.convolve1d(rows, ones, axis=1, mode="reflect")


def _describe_at(smoothed: np.ndarray, x: float, y: float, angle: float) -> np.ndarray:
    c, s = math.cos(angle), math.sin(angle)
    px = _PATTERN[:, (0, 2)]
    py = _PATTERN[:, (1, 3)]
    sx = np.floor(c * px - s * py + x + 0.5).astype(np.intp)
    sy = np.floor(s * px + c * py + y + 0.5).astype(np.intp)
    vals = smoothed[sy, sx]
    return np.packbits(vals[:, 0] < vals[:, 1])


def _in_margin(x: float, y: float, shape: tuple[int, int]) -> bool:
    h, w = shape
    return (BORDER_MARGIN_PX <= x <= w - 1 - BORDER_MARGIN_PX
            and BORDER_MARGIN_PX <= y <= h - 1 - BORDER_MARGIN_PX)


def describe_orb(img: GrayImage, kps: list[Keypoint]
                 ) -> tuple[list[Keypoint], np.ndarray]:
    """Describe keypoints in this image's own pixel frame.

    Keypoint octaves are ignored here: coordinates and pattern offsets are
    taken directly in ``img`` pixels. Returns the keypoints that survived
    the border check, in input order, with their (256/8)-byte descriptors;
    dropped ones are exactly the input minus the returned list.
    """
    smoothed = _smoothed(img.pixels)
    kept, rows = [], []
    for kp in kps:
        if not _in_margin(kp.x_px, kp.y_px, smoothed.shape):
            continue
        kept.append(kp)
        rows.append(_describe_at(smoothed, kp.x_px, kp.y_px, kp.angle_rad))
    desc = np.vstack(rows) if rows else np.empty((0, DESCRIPTOR_BITS // 8), np.uint8)
    return kept, desc


@register_detector("orb")
class OrbDetector:
    """Segment-test corners + centroid orientation + steered pair pattern."""

    detector_id = "orb"

    def detect_and_describe(self, img: GrayImage, cfg: DetectorConfig) -> FeatureSet:
        from .base import require_min_size
        require_min_size(img.pixels)
        levels = build_pyramid(img.pixels, cfg.n_octaves)
        smoothed = [_smoothed(lv) for lv in levels]
        kept, rows = [], []
        for kp in detect_on_levels(levels, cfg):
            lx, ly = level_coords(kp)
            level = levels[kp.octave]
            if not _in_margin(lx, ly, level.shape):
                continue
            angle = orientation_centroid(level, Keypoint(lx, ly, kp.response),
                                         ORIENTATION_RADIUS_PX)
            kept.append(with_angle(kp, angle))
            rows.append(_describe_at(smoothed[kp.octave], lx, ly, angle))
        desc = np.vstack(rows) if rows else np.empty((0, DESCRIPTOR_BITS // 8), np.uint8)
        return FeatureSet("orb", tuple(kept), desc)
