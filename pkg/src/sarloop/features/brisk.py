"""Concentric-ring binary descriptor with per-ring smoothing.

60 sampling points (center + 4 rings) are read from Gaussian-smoothed
copies of the image, with smoothing proportional to ring radius so outer
points average over wider support. Long-distance point pairs vote for the
keypoint's orientation via their intensity gradients; the 512 shortest
pairs, rotated by that orientation, produce the descriptor bits.
"""

from __future__ import annotations

import math

import numpy as np
from scipy import ndimage

from ..imgpost import GrayImage
from .base import DetectorConfig, FeatureSet, Keypoint, register_detector, require_min_size
from .corners import build_pyramid, detect_on_levels, level_coords, with_angle
from .patterns import ring_pairs, ring_points

DESCRIPTOR_BITS = 512
# Outermost ring radius 10.8 px, invariant under rotation, plus rounding.
BORDER_MARGIN_PX = 12

_POINTS, _SIGMAS = ring_points()
_SHORT_PAIRS, _LONG_PAIRS = ring_pairs()
_UNIQUE_SIGMAS, _SIGMA_INDEX = np.unique(_SIGMAS, return_inverse=True)
_LONG_VEC = _POINTS[_LONG_PAIRS[:, 1]] - _POINTS[_LONG_PAIRS[:, 0]]
_LONG_NORM_SQ = np.sum(_LONG_VEC ** 2, axis=1)


_KERNEL_SCALE = 1 << 16


def _gauss_kernel_fp(sigma: float) -> np.ndarray:
    """Fixed-point separable Gaussian weights (radius 3*sigma).

    The center weight absorbs the rounding residue so every kernel sums to
    exactly _KERNEL_SCALE; all smoothed copies then share one gain and a
    uniform brightness offset shifts them all by the same exact amount.
    """
    r = int(math.ceil(3.0 * sigma))
    x = np.arange(-r, r + 1, dtype=np.float64)
    k = np.exp(-(x * x) / (2.0 * sigma * sigma))
    ki = np.rint(k / k.sum() * _KERNEL_SCALE).astype(np.int64)
    ki[r] += _KERNEL_SCALE - ki.sum()
    return ki


def _smoothed_stack(pixels: np.ndarray) -> list[np.ndarray]:
    """One smoothed copy of the image per distinct point sigma.

    Kernels use integer fixed-point weights so that on integer images the
    responses are exact sums: a uniform brightness offset shifts every
    response by the same amount and no comparison bit can flip.
    """
    arr = np.asarray(pixels)
    if np.issubdtype(arr.dtype, np.integer):
        work = arr.astype(np.int64)
    else:
        work = arr.astype(np.float64)
    out = []
    for s in _UNIQUE_SIGMAS:
        k = _gauss_kernel_fp(float(s))
        rows = ndimage.convolve1d(work, k, axis=0, mode="reflect")
        out.append(ndimage.convolve1d(rows, k, axis=1, mode="reflect"))
    return out


def _sample(stack: list[np.ndarray], x: float, y: float,
            angle: float) -> np.ndarray:
    """All 60 point responses around (x, y), pattern rotated by angle."""
    c, s = math.cos(angle), math.sin(angle)
    sx = np.floor(c * _POINTS[:, 0] - s * _POINTS[:, 1] + x + 0.5).astype(np.intp)
    sy = np.floor(s * _POINTS[:, 0] + c * _POINTS[:, 1] + y + 0.5).astype(np.intp)
    vals = np.empty(len(_POINTS), dtype=np.float64)
    for idx in range(len(stack)):
        sel = _SIGMA_INDEX == idx
        vals[sel] = stack[idx][sy[sel], sx[sel]]
    return vals


def _orientation(values: np.ndarray) -> float:
    """Gradient direction accumulated over the long-distance pairs."""
    dv = values[_LONG_PAIRS[:, 1]] - values[_LONG_PAIRS[:, 0]]
    g = (dv / _LONG_NORM_SQ) @ _LONG_VEC
    if g[0] == 0.0 and g[1] == 0.0:
        return 0.0
    return math.atan2(g[1], g[0])


def _in_margin(x: float, y: float, shape: tuple[int, int]) -> bool:
    h, w = shape
    return (BORDER_MARGIN_PX <= x <= w - 1 - BORDER_MARGIN_PX
            and BORDER_MARGIN_PX <= y <= h - 1 - BORDER_MARGIN_PX)


def describe_brisk(img: GrayImage, kps: list[Keypoint]
                   ) -> tuple[list[Keypoint], np.ndarray]:
    """Describe keypoints in this image's own pixel frame.

    Orientation is computed here from the long pairs (input angles are
    ignored) and written onto the returned keypoints, which are the border
    survivors in input order, aligned with the descriptor rows.
    """
    stack = _smoothed_stack(img.pixels)
    kept, rows = [], []
    for kp in kps:
        if not _in_margin(kp.x_px, kp.y_px, stack[0].shape):
            continue
        angle = _orientation(_sample(stack, kp.x_px, kp.y_px, 0.0))
        vals = _sample(stack, kp.x_px, kp.y_px, angle)
        bits = vals[_SHORT_PAIRS[:, 1]] > vals[_SHORT_PAIRS[:, 0]]
        kept.append(with_angle(kp, angle))
        rows.append(np.packbits(bits))
    desc = np.vstack(rows) if rows else np.empty((0, DESCRIPTOR_BITS // 8), np.uint8)
    return kept, desc


@register_detector("brisk")
class BriskDetector:
    """Segment-test corners + long-pair orientation + ring comparisons."""

    detector_id = "brisk"

    def detect_and_describe(self, img: GrayImage, cfg: DetectorConfig) -> FeatureSet:
        require_min_size(img.pixels)
        levels = build_pyramid(img.pixels, cfg.n_octaves)
        stacks = [_smoothed_stack(lv) for lv in levels]
        kept, rows = [], []
        for kp in detect_on_levels(levels, cfg):
            lx, ly = level_coords(kp)
            stack = stacks[kp.octave]
            if not _in_margin(lx, ly, stack[0].shape):
                continue
            angle = _orientation(_sample(stack, lx, ly, 0.0))
            vals = _sample(stack, lx, ly, angle)
            bits = vals[_SHORT_PAIRS[:, 1]] > vals[_SHORT_PAIRS[:, 0]]
            kept.append(with_angle(kp, angle))
            rows.append(np.packbits(bits))
        desc = np.vstack(rows) if rows else np.empty((0, DESCRIPTOR_BITS // 8), np.uint8)
        return FeatureSet("brisk", tuple(kept), desc)
