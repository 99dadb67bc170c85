"""Frozen sampling geometry for the binary descriptors.

The 256 point pairs below were drawn once from a seeded clipped-normal
distribution over a 31x31 patch (offsets in [-13, 13]) and are committed
as literals so descriptors stay bit-identical across builds and platforms.
The concentric pattern is generated deterministically from the ring
constants at import time; no randomness is involved there.
"""

from __future__ import annotations

import math

import numpy as np

# (x1, y1, x2, y2) offsets relative to the keypoint, x right / y down.
PAIR_PATTERN = (
    (13, 4, -12, -7), (6, -1, 1, 2), (7, -1, 3, -6), (-3, -6, 4, 7),
    (5, 6, 0, -7), (9, 7, 10, -1), (-6, -8, -7, 1), (10, -12, -1, 0),
    (5, -9, 10, 1), (6, -2, -4, 13), (-1, -7, 6, 2), (7, -3, -9, -1),
    (-4, 12, 12, 0), (7, -4, -10, -3), (-1, 3, 6, -12), (-9, -7, 13, 13),
    (5, 11, -2, 3), (11, 3, -2, -9), (5, -1, 8, 6), (-9, 0, -12, -7),
    (0, -7, 0, 7), (-6, 1, -3, -9), (-3, 3, 4, 13), (6, 0, 12, -2),
    (1, -10, 4, -1), (0, -1, -1, 2), (-3, -2, -1, -3), (-7, 6, -1, 2),
    (-7, 2, 7, -8), (-1, 5, 6, -2), (0, 10, -1, 12), (-7, 3, -1, 2),
    (-4, -3, 7, 8), (-3, 2, 5, -2), (-2, 4, -9, -1), (-1, 4, -13, -7),
    (1, 3, 3, 0), (5, 5, -11, -2), (-8, -12, -13, 8), (-13, -4, 3, 0),
    (4, -13, 2, 0), (1, 2, 2, -13), (-4, -5, 2, 1), (-2, -4, 4, -5),
    (7, 4, 2, -4), (9, -2, 3, -1), (6, 11, -4, -7), (10, 8, -11, -13),
    (0, 11, -5, 2), (-4, 2, 3, -2), (-5, -10, -13, -2), (9, 1, 2, -4),
    (13, -5, 5, -4), (13, -8, 9, 3), (-6, 13, 3, -1), (1, -2, -11, 1),
    (-6, 13, -3, -7), (-8, -2, -10, -4), (5, 7, 10, 11), (5, 13, -1, -3),
    (-3, -3, 4, -7), (4, -2, -4, 3), (-3, 3, 9, -9), (8, 8, 1, 0),
    (-3, 2, 3, 3), (-1, 1, -13, 0), (11, -3, -6, -3), (12, -1, 5, 1),
    (2, -9, -7, 6), (-1, -6, -12, 1), (11, 13, -8, -3), (11, 6, 12, 1),
    (0, -2, 4, 13), (-1, -9, -5, 1), (5, -12, -1, 5), (8, 10, -3, 0),
    (7, 0, -6, 4), (5, -6, -1, 13), (-6, -13, 1, -2), (0, -3, 0, -13),
    (10, 12, 2, 9), (-7, -8, -1, -8), (-1, -8, -3, -6), (2, -10, -2, 7),
    (-4, 9, -5, -9), (13, 5, 12, 2), (0, 3, -8, -5), (-8, -3, 4, 0),
    (-1, -2, 1, 1), (2, -3, -3, 3), (5, -1, -13, -7), (-7, -5, -2, 4),
    (4, -5, -2, 0), (6, -3, 9, 2), (4, 1, 11, 6), (10, 6, -2, -4),
    (-4, 6, -3, -10), (6, -7, -4, -6), (6, 0, -5, -2), (10, 2, 3, 10),
    (3, -1, -1, 0), (-11, -2, 2, 9), (2, 13, -3, -1), (-7, 0, -1, 3),
    (-3, -5, -3, -8), (1, 0, 0, -8), (2, -2, 6, 7), (-3, -3, 6, -5),
    (-11, 7, 10, 1), (13, 2, 3, -2), (10, 8, 5, -5), (-3, -6, -9, -6),
    (-1, -10, -7, -13), (1, -10, -4, 6), (-6, 4, -6, -1), (-2, -1, -4, 1),
    (0, -2, 4, 2), (6, 0, 2, 6), (6, -11, -5, -13), (-3, -3, -10, 6),
    (-1, -1, 6, -4), (3, 13, 1, -7), (3, -1, -9, -5), (-7, 6, 3, 13),
    (6, -3, -13, 9), (0, -6, -10, -5), (0, 8, -8, 2), (3, 9, -5, 3),
    (-13, 3, 13, 4), (3, -3, -2, 0), (-6, 13, 10, 0), (2, -9, -1, -3),
    (6, 7, -7, 8), (5, -3, 13, -2), (1, 3, -1, 0), (5, 0, -9, -8),
    (-1, 3, -5, 6), (-7, -2, -2, -6), (-6, -3, 4, -2), (3, 13, 2, 4),
    (11, -3, -6, 0), (-2, 10, -1, -4), (5, -2, 9, -6), (8, -4, -6, 2),
    (-7, 13, 2, 11), (-7, -4, 8, 1), (0, 1, 3, -7), (11, 8, 10, 0),
    (-2, 4, -9, -10), (2, -3, 6, -6), (-11, 4, 13, 12), (9, 4, 6, -4),
    (1, -5, -7, 0), (1, 12, 6, -12), (5, 1, 8, 12), (1, 5, 6, -6),
    (0, 4, -1, 3), (2, 13, -8, 8), (2, -12, -2, 7), (-6, -13, -1, 1),
    (-9, -1, 2, 0), (8, -3, -10, 12), (-3, 2, -8, -9), (2, 4, -6, 13),
    (2, -1, 0, 2), (4, 1, 9, -10), (6, 8, 2, -3), (10, 0, 4, -7),
    (8, 1, 3, -1), (-4, -5, -5, 11), (0, -2, 3, 1), (-3, -10, 0, 13),
    (-4, -7, 2, -9), (5, -1, 6, 0), (2, -10, 5, 7), (2, 8, 5, -3),
    (-5, -8, -13, 2), (6, -7, -6, 4), (3, 6, 1, -7), (-2, -2, -5, 3),
    (6, 4, 7, 2), (7, 0, 8, -6), (-3, -1, -5, -6), (13, 13, 8, -4),
    (5, -10, 13, 11), (-7, 0, -7, 4), (0, 0, 7, -11), (-6, 6, -12, 12),
    (0, -4, -3, -1), (-1, 0, 2, -5), (-13, 11, 8, -2), (5, -5, -1, -13),
    (5, -5, 5, -2), (4, -5, 6, 2), (8, -2, 9, -6), (-4, 3, 10, -8),
    (-13, 4, 5, 3), (-13, 12, 2, 13), (4, -2, 1, 1), (1, 8, 0, 0),
    (5, -4, 5, 4), (10, -12, -3, -4), (-9, -10, 5, -6), (-8, 10, -13, 6),
    (3, 8, -5, -7), (3, -8, 10, -6), (-1, -4, -12, 2), (-7, -8, -9, -4),
    (6, 8, 9, 1), (8, -4, -5, 3), (-11, 5, 5, 1), (0, 11, -1, -12),
    (5, -2, 0, -1), (-3, 1, -2, 3), (-4, 4, 7, 7), (2, 2, -5, 3),
    (0, 4, 1, -4), (-4, 1, -9, 1), (-1, 1, -10, 0), (1, 3, 2, 0),
    (1, 0, 1, -1), (1, 6, 13, 2), (-3, 2, -10, -5), (4, 2, 10, 6),
    (5, -8, -4, 1), (4, 10, -3, 0), (-4, 10, 8, -4), (-3, 5, -2, 6),
    (7, 2, -11, -10), (-5, -5, 4, -3), (-9, 0, -2, 1), (-8, 5, 0, 5),
    (1, -1, -2, 1), (3, 8, -9, -7), (-6, -4, 7, 13), (-9, 1, -13, -5),
    (1, 13, -5, 1), (1, 13, 6, 5), (6, 0, -4, -7), (-2, 9, 1, 5),
    (1, -3, 0, 2), (13, -3, 8, 2), (10, 9, 6, -1), (-3, -6, -4, 7),
    (-3, -2, 5, -9), (12, 4, 3, 3), (4, 1, -2, 3), (0, 13, -2, 8),
    (0, 5, 0, -4), (-4, 1, -7, -2), (-10, -6, -4, -4), (0, -1, 9, -1),
    (-10, -8, 2, -2), (2, 11, 2, 3), (12, -12, -2, 3), (-13, 0, -8, 2),
)

# Concentric pattern: center point plus four rings (radius px, point count).
RING_RADII_PX = (0.0, 2.9, 4.9, 7.4, 10.8)
RING_COUNTS = (1, 10, 14, 15, 20)
# Per-point smoothing scales with ring radius; the floor keeps the center
# and innermost ring from degenerating to no smoothing at all.
SIGMA_FLOOR_PX = 0.5
SIGMA_PER_RADIUS = 0.3
N_SHORT_PAIRS = 512
LONG_PAIR_MIN_DIST_PX = 13.0


def ring_points() -> tuple[np.ndarray, np.ndarray]:
    """All 60 sampling points and their smoothing sigmas.

    Returns (points, sigmas): points has shape (60, 2) as (x, y) offsets,
    sigmas shape (60,). Each ring starts at angle 0 and is spaced evenly.
    """
    xs, ys, sigmas = [], [], []
    for radius, count in zip(RING_RADII_PX, RING_COUNTS):
        sigma = max(SIGMA_FLOOR_PX, SIGMA_PER_RADIUS * radius)
        for k in range(count):
            phi = 2.0 * math.pi * k / count
            xs.append(radius * math.cos(phi))
            ys.append(radius * math.sin(phi))
            sigmas.append(sigma)
    return np.column_stack([xs, ys]), np.asarray(sigmas)


def ring_pairs() -> tuple[np.ndarray, np.ndarray]:
    """Split all point pairs into short (descriptor) and long (orientation).

    Short pairs are the N_SHORT_PAIRS closest pairs by inter-point distance
    (stable order, ties broken by pair enumeration order); long pairs are
    those separated by more than LONG_PAIR_MIN_DIST_PX. Returns two integer
    arrays of shape (n, 2) holding point indices.
    """
    points, _ = ring_points()
    n = len(points)
    idx_i, idx_j = np.triu_indices(n, k=1)
    dist = np.hypot(points[idx_i, 0] - points[idx_j, 0],
                    points[idx_i, 1] - points[idx_j, 1])
    order = np.argsort(dist, kind="stable")
    short = order[:N_SHORT_PAIRS]
    long_mask = dist > LONG_PAIR_MIN_DIST_PX
    short_pairs = np.column_stack([idx_i[short], idx_j[short]])
    long_pairs = np.column_stack([idx_i[long_mask], idx_j[long_mask]])
    return short_pairs, long_pairs
