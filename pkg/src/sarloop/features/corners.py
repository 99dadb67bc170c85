"""Segment-test corner detection on a bilinear image pyramid.

Detection front end shared by both descriptors: a pixel is a corner when
an arc of at least 9 contiguous pixels on its radius-3 Bresenham circle is
uniformly brighter (or darker) than the center by more than the threshold.
The corner score is the largest threshold that still passes, which makes
``score > threshold`` and the segment test the same predicate.
"""

from __future__ import annotations

import math
from dataclasses import replace

import numpy as np
from scipy import ndimage

from ..imgpost import GrayImage
from .base import DetectorConfig, Keypoint, require_min_size

# Radius-3 circle, 16 pixels, starting at the top and walking clockwise so
# list adjacency equals geometric adjacency (rows grow downward).
CIRCLE_OFFSETS = (
    (-3, 0), (-3, 1), (-2, 2), (-1, 3), (0, 3), (1, 3), (2, 2), (3, 1),
    (3, 0), (3, -1), (2, -2), (1, -3), (0, -3), (-1, -3), (-2, -2), (-3, -1),
)
ARC_LENGTH = 9
SCALE_STEP = 1.2


def bilinear_resize(img: np.ndarray, out_h: int, out_w: int) -> np.ndarray:
    """Resample with pixel-center alignment; output is float32."""
    src = np.asarray(img, dtype=np.float32)
    in_h, in_w = src.shape
    rows = np.clip((np.arange(out_h) + 0.5) * (in_h / out_h) - 0.5, 0, in_h - 1)
    cols = np.clip((np.arange(out_w) + 0.5) * (in_w / out_w) - 0.5, 0, in_w - 1)
    r0 = np.floor(rows).astype(np.intp)
    c0 = np.floor(cols).astype(np.intp)
    r1 = np.minimum(r0 + 1, in_h - 1)
    c1 = np.minimum(c0 + 1, in_w - 1)
    fr = (rows - r0).astype(np.float32)[:, None]
    fc = (cols - c0).astype(np.float32)[None, :]
    top = src[np.ix_(r0, c0)] * (1 - fc) + src[np.ix_(r0, c1)] * fc
    bot = src[np.ix_(r1, c0)] * (1 - fc) + src[np.ix_(r1, c1)] * fc
    return top * (1 - fr) + bot * fr


def build_pyramid(pixels: np.ndarray, n_octaves: int) -> list[np.ndarray]:
    """Octave images at scales 1.2**-k, each resampled from the base."""
    base = np.asarray(pixels, dtype=np.float32)
    levels = [base]
    h, w = base.shape
    for k in range(1, n_octaves):
        s = SCALE_STEP ** k
        oh, ow = max(1, round(h / s)), max(1, round(w / s))
        levels.append(bilinear_resize(base, oh, ow))
    return levels


def segment_test_scores(pixels: np.ndarray, threshold: float) -> np.ndarray:
    """Corner score per pixel (0 where the segment test fails).

    The score is max over the 16 candidate 9-long arcs of the arc's weakest
    contrast against the center, evaluated for the brighter and darker cases
    separately; a pixel is a corner exactly when the score exceeds the
    threshold.
    """
    img = np.asarray(pixels, dtype=np.float32)
    h, w = img.shape
    scores = np.zeros((h, w), dtype=np.float32)
    if h < 7 or w < 7:
        return scores
    center = img[3:h - 3, 3:w - 3]
    diffs = [img[3 + dr:h - 3 + dr, 3 + dc:w - 3 + dc] - center
             for dr, dc in CIRCLE_OFFSETS]

    def best_arc(deltas):
        best = np.full(center.shape, -np.inf, dtype=np.float32)
        for start in range(16):
            arc_min = deltas[start].copy()
            for step in range(1, ARC_LENGTH):
                np.minimum(arc_min, deltas[(start + step) % 16], out=arc_min)
            np.maximum(best, arc_min, out=best)
        return best

    score = np.maximum(best_arc(diffs), best_arc([-d for d in diffs]))
    score[score <= threshold] = 0.0
    scores[3:h - 3, 3:w - 3] = score
    return scores


def _nms_peaks(scores: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Row/col indices of 3x3 local maxima among positive scores."""
    local_max = ndimage.maximum_filter(scores, size=3, mode="constant", cval=0.0)
    keep = (scores > 0) & (scores == local_max)
    return np.nonzero(keep)


def detect_on_levels(levels: list[np.ndarray], cfg: DetectorConfig) -> list[Keypoint]:
    """Run the segment test per octave, suppress, rank, and cap."""
    found = []
    for octave, img in enumerate(levels):
        if min(img.shape) < 7:
            continue
        scores = segment_test_scores(img, cfg.corner_threshold)
        rows, cols = _nms_peaks(scores)
        scale = SCALE_STEP ** octave
        for r, c in zip(rows.tolist(), cols.tolist()):
            found.append(Keypoint(c * scale, r * scale, float(scores[r, c]),
                                  0.0, octave))
    found.sort(key=lambda kp: (-kp.response, kp.octave, kp.y_px, kp.x_px))
    return found[:cfg.target_keypoints]


def detect_corners(img: GrayImage, cfg: DetectorConfig) -> list[Keypoint]:
    """Segment-test keypoints over the full pyramid, strongest first.

    Keypoint coordinates are scaled back to the base image; ``octave``
    records the level that fired.
    """
    require_min_size(img.pixels)
    return detect_on_levels(build_pyramid(img.pixels, cfg.n_octaves), cfg)


def orientation_centroid(img, kp: Keypoint, radius_px: int = 15) -> float:
    """Dominant direction from intensity moments on a circular patch.

    Returns atan2(m01, m10); a patch with zero first moments (radially
    symmetric or empty) reports angle 0. The radius is clamped so the disc
    stays inside the image.
    """
    pixels = img.pixels if isinstance(img, GrayImage) else np.asarray(img)
    h, w = pixels.shape
    cx = int(math.floor(kp.x_px + 0.5))
    cy = int(math.floor(kp.y_px + 0.5))
    r = min(radius_px, cx, cy, w - 1 - cx, h - 1 - cy)
    if r < 1:
        return 0.0
    dy, dx = np.mgrid[-r:r + 1, -r:r + 1]
    disc = (dx * dx + dy * dy) <= r * r
    patch = pixels[cy - r:cy + r + 1, cx - r:cx + r + 1].astype(np.float64)
    m10 = float((patch * dx)[disc].sum())
    m01 = float((patch * dy)[disc].sum())
    if m10 == 0.0 and m01 == 0.0:
        return 0.0
    return math.atan2(m01, m10)


def level_coords(kp: Keypoint) -> tuple[float, float]:
    """Keypoint position in its own octave's pixel frame."""
    s = SCALE_STEP ** kp.octave
    return kp.x_px / s, kp.y_px / s


def with_angle(kp: Keypoint, angle_rad: float) -> Keypoint:
    return replace(kp, angle_rad=angle_rad)
