"""Feature matching, similarity estimation, and loop-closure validation.

Two independent descriptor pipelines are run on a candidate image pair;
each yields good-match counts and a 4-DOF similarity (scale, rotation,
translation). A loop closure is confirmed only when both pipelines agree:
enough inliers each, scales near 1, and mutually consistent transforms.
Confirmed transforms are fused by inlier-count weighting.

Transforms are held in meters/radians internally; the tab-separated report
format mirrors the millimeters/degrees convention used for presentation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .features import DetectorConfig, FeatureSet, detect_and_describe
from .geometry import wrap_angle
from .imgpost import GrayImage

_POPCOUNT = np.unpackbits(np.arange(256, dtype=np.uint8)[:, None],
                          axis=1).sum(1).astype(np.uint16)


@dataclass(frozen=True)
class MatchPair:
    """Best and second-best neighbor of one query descriptor."""

    index_a: int
    index_b: int
    distance: int
    second_distance: int

    def __post_init__(self):
        if self.distance > self.second_distance:
            raise ValueError(
                f"distance {self.distance} exceeds second {self.second_distance}")


@dataclass(frozen=True)
class SimilarityTransform:
    """4-DOF planar map: p' = scale * R(rot) * p + t, metric units."""

    scale: float
    tx_m: float
    ty_m: float
    rot_rad: float

    def __post_init__(self):
        if not (self.scale > 0 and math.isfinite(self.scale)):
            raise ValueError(f"scale must be positive, got {self.scale}")


@dataclass(frozen=True)
class MatchReport:
    """Outcome of one detector's pipeline on an image pair."""

    detector_id: str
    n_keypoints_a: int
    n_keypoints_b: int
    total_matches: int
    good_matches: int
    transform: SimilarityTransform | None

    def __post_init__(self):
        if self.good_matches > self.total_matches:
            raise ValueError(f"good {self.good_matches} > total {self.total_matches}")

    @property
    def good_fraction(self) -> float:
        """good / total after the ratio test (0 when nothing matched)."""
        return self.good_matches / self.total_matches if self.total_matches else 0.0


@dataclass(frozen=True)
class ValidationThresholds:
    min_good_matches: int = 20
    scale_tol: float = 0.05
    translation_tol_m: float = 0.1
    rotation_tol_rad: float = math.radians(2.0)


@dataclass(frozen=True)
class LoopDecision:
    accepted: bool
    fused_transform: SimilarityTransform | None
    reports: tuple[MatchReport, ...]
    reasons: tuple[str, ...]


@dataclass(frozen=True)
class RansacConfig:
    n_iters: int = 2000
    inlier_threshold_px: float = 3.0
    min_inliers: int = 3


def hamming_distances(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Pairwise Hamming distance matrix between packed descriptor rows."""
    xor = a[:, None, :] ^ b[None, :, :]
    return _POPCOUNT[xor].sum(axis=2, dtype=np.int32)


def knn_match(a: FeatureSet, b: FeatureSet) -> list[MatchPair]:
    """Two nearest neighbors in b for every descriptor in a.

    Distance ties pick the lower index in b (argmin keeps the first hit).
    """
    if a.detector_id != b.detector_id:
        raise ValueError(
            f"detector mismatch: {a.detector_id!r} vs {b.detector_id!r}")
    if len(b) < 2:
        raise ValueError(f"need at least 2 descriptors to match against, got {len(b)}")
    if len(a) == 0:
        return []
    dists = hamming_distances(a.descriptors, b.descriptors)
    rows = np.arange(len(a))
    best = dists.argmin(axis=1)
    best_d = dists[rows, best]
    dists[rows, best] = np.iinfo(np.int32).max
    second = dists.argmin(axis=1)
    second_d = dists[rows, second]
    return [MatchPair(int(i), int(best[i]), int(best_d[i]), int(second_d[i]))
            for i in rows]


def ratio_test(matches: Sequence[MatchPair], ratio: float = 0.75) -> list[MatchPair]:
    """Keep unambiguous matches: distance strictly below ratio * second.

    A zero second distance means the two best candidates are equally
    perfect, so only an exact (distance 0) match survives.
    """
    if not 0 < ratio < 1:
        raise ValueError(f"ratio must be in (0, 1), got {ratio}")
    kept = []
    for m in matches:
        if m.second_distance == 0:
            if m.distance == 0:
                kept.append(m)
        elif m.distance < ratio * m.second_distance:
            kept.append(m)
    return kept


def estimate_similarity_ransac(src_xy: np.ndarray, dst_xy: np.ndarray, seed: int,
                               cfg: RansacConfig = RansacConfig(),
                               resolution_m: float = 1.0,
                               ) -> tuple[SimilarityTransform | None, np.ndarray]:
    """RANSAC similarity fit from pixel correspondences src -> dst.

    Two-point minimal samples propose (scale, rotation, translation);
    the proposal with most reprojection inliers wins and is refit by least
    squares over its inliers. Returns (transform, inlier mask); transform
    is None when no proposal reaches cfg.min_inliers. Deterministic for a
    given seed. Translation is converted to meters via resolution_m.
    """
    src = np.asarray(src_xy, dtype=np.float64)
    dst = np.asarray(dst_xy, dtype=np.float64)
    if src.shape != dst.shape or src.ndim != 2 or src.shape[1] != 2:
        raise ValueError(f"correspondence arrays must both be (n, 2), "
                         f"got {src.shape} and {dst.shape}")
    n = src.shape[0]
    if n < 2:
        raise ValueError(f"need at least 2 correspondences, got {n}")

    z = src[:, 0] + 1j * src[:, 1]
    w = dst[:, 0] + 1j * dst[:, 1]
    rng = np.random.default_rng(seed)
    idx = rng.integers(0, n, size=(cfg.n_iters, 2))
    z1, z2 = z[idx[:, 0]], z[idx[:, 1]]
    w1, w2 = w[idx[:, 0]], w[idx[:, 1]]
    dz = z2 - z1
    valid = dz != 0
    a = np.divide(w2 - w1, dz, out=np.zeros_like(dz), where=valid)
    valid &= a != 0
    b = w1 - a * z1
    err = np.abs(a[:, None] * z[None, :] + b[:, None] - w[None, :])
    inlier = err <= cfg.inlier_threshold_px
    counts = np.where(valid, inlier.sum(axis=1), 0)
    best = int(counts.argmax())
    if counts[best] < cfg.min_inliers:
        return None, np.zeros(n, dtype=bool)

    mask = inlier[best]
    zc, wc = z[mask], w[mask]
    zm, wm = zc.mean(), wc.mean()
    denom = float(np.sum(np.abs(zc - zm) ** 2))
    a_fit = np.sum((wc - wm) * np.conj(zc - zm)) / denom if denom > 0 else a[best]
    if a_fit == 0:
        a_fit = a[best]
    b_fit = wm - a_fit * zm
    final = np.abs(a_fit * z + b_fit - w) <= cfg.inlier_threshold_px
    transform = SimilarityTransform(
        scale=float(np.abs(a_fit)),
        tx_m=float(b_fit.real) * resolution_m,
        ty_m=float(b_fit.imag) * resolution_m,
        rot_rad=float(np.angle(a_fit)),
    )
    return transform, final


def matched_points(a: FeatureSet, b: FeatureSet,
                   matches: Sequence[MatchPair]) -> tuple[np.ndarray, np.ndarray]:
    """Pixel coordinate arrays for a list of matches."""
    src = np.array([[a.keypoints[m.index_a].x_px, a.keypoints[m.index_a].y_px]
                    for m in matches], dtype=np.float64).reshape(-1, 2)
    dst = np.array([[b.keypoints[m.index_b].x_px, b.keypoints[m.index_b].y_px]
                    for m in matches], dtype=np.float64).reshape(-1, 2)
    return src, dst


def match_feature_sets(a: FeatureSet, b: FeatureSet, *, ratio: float = 0.75,
                       ransac: RansacConfig = RansacConfig(), seed: int = 0,
                       resolution_m: float = 1.0) -> MatchReport:
    """KNN + ratio test + RANSAC between two feature sets."""
    surviving = ratio_test(knn_match(a, b), ratio)
    if len(surviving) < 2:
        return MatchReport(a.detector_id, len(a), len(b), len(surviving), 0, None)
    src, dst = matched_points(a, b, surviving)
    transform, inliers = estimate_similarity_ransac(
        src, dst, seed, ransac, resolution_m)
    good = int(inliers.sum()) if transform is not None else 0
    return MatchReport(a.detector_id, len(a), len(b), len(surviving), good, transform)


def match_regions(img_a: GrayImage, img_b: GrayImage,
                  cfgs: Sequence[DetectorConfig], *, ratio: float = 0.75,
                  ransac: RansacConfig = RansacConfig(),
                  seed: int = 0) -> list[MatchReport]:
    """Full per-detector pipeline on one candidate image pair.

    Runs each configured detector on both images, matches, filters, and
    fits; one MatchReport per config. Images must share a pixel size so
    translations convert to meters consistently.
    """
    if img_a.resolution_m != img_b.resolution_m:
        raise ValueError(f"image resolutions differ: "
                         f"{img_a.resolution_m} vs {img_b.resolution_m}")
    reports = []
    for k, cfg in enumerate(cfgs):
        fa = detect_and_describe(img_a, cfg)
        fb = detect_and_describe(img_b, cfg)
        reports.append(match_feature_sets(
            fa, fb, ratio=ratio, ransac=ransac, seed=seed + k,
            resolution_m=img_a.resolution_m))
    return reports


def fuse_transform(ta: SimilarityTransform, na: int,
                   tb: SimilarityTransform, nb: int) -> SimilarityTransform:
    """Count-weighted mean of two transform estimates.

    Translations and scale average linearly; rotation averages along the
    shorter arc of the circle. A zero-weight side drops out exactly.
    """
    if na < 0 or nb < 0:
        raise ValueError(f"weights must be non-negative, got {na}, {nb}")
    if na + nb == 0:
        raise ValueError("at least one weight must be positive")
    if nb == 0:
        return ta
    if na == 0:
        return tb
    total = na + nb
    d = wrap_angle(tb.rot_rad - ta.rot_rad)
    return SimilarityTransform(
        scale=(na * ta.scale + nb * tb.scale) / total,
        tx_m=(na * ta.tx_m + nb * tb.tx_m) / total,
        ty_m=(na * ta.ty_m + nb * tb.ty_m) / total,
        rot_rad=wrap_angle(ta.rot_rad + (nb / total) * d),
    )


def validate_loop(report_a: MatchReport, report_b: MatchReport,
                  thresholds: ValidationThresholds = ValidationThresholds(),
                  ) -> LoopDecision:
    """Dual-detector loop-closure decision.

    Accepts only when both detectors found enough RANSAC inliers, both
    scales are near 1, and the two transforms agree in translation and
    rotation. On acceptance the fused transform is the count-weighted mean
    with scale pinned back to exactly 1 (it already passed the near-1
    check). Rejections carry the named failed criteria.
    """
    if report_a.detector_id == report_b.detector_id:
        raise ValueError(
            f"need two distinct detectors, both reports are {report_a.detector_id!r}")
    reasons: list[str] = []
    if (report_a.good_matches < thresholds.min_good_matches
            or report_b.good_matches < thresholds.min_good_matches
            or report_a.transform is None or report_b.transform is None):
        reasons.append("match count")

    present = [r.transform for r in (report_a, report_b) if r.transform is not None]
    lo, hi = 1.0 - thresholds.scale_tol, 1.0 + thresholds.scale_tol
    if any(not lo <= t.scale <= hi for t in present):
        reasons.append("scale")
    if report_a.transform is not None and report_b.transform is not None:
        ta, tb = report_a.transform, report_b.transform
        if (abs(ta.tx_m - tb.tx_m) > thresholds.translation_tol_m
                or abs(ta.ty_m - tb.ty_m) > thresholds.translation_tol_m):
            reasons.append("translation")
        if abs(wrap_angle(ta.rot_rad - tb.rot_rad)) > thresholds.rotation_tol_rad:
            reasons.append("rotation")

    if reasons:
        return LoopDecision(False, None, (report_a, report_b), tuple(reasons))
    fused = fuse_transform(report_a.transform, report_a.good_matches,
                           report_b.transform, report_b.good_matches)
    fused = SimilarityTransform(1.0, fused.tx_m, fused.ty_m, fused.rot_rad)
    return LoopDecision(True, fused, (report_a, report_b), ())


# --------------------------------------------------------------------------
# Report file format

REPORT_COLUMNS = ("detector_id", "kp_a", "kp_b", "total_matches", "good_matches",
                  "scale", "tx_mm", "ty_mm", "rot_deg", "decision", "reasons")


def _report_line(r: MatchReport, decision: str, reasons: str) -> str:
    if r.transform is None:
        cells = ["nan", "nan", "nan", "nan"]
    else:
        t = r.transform
        cells = [f"{t.scale:.6f}", f"{t.tx_m * 1000.0:.3f}",
                 f"{t.ty_m * 1000.0:.3f}", f"{math.degrees(t.rot_rad):.4f}"]
    return "\t".join([r.detector_id, str(r.n_keypoints_a), str(r.n_keypoints_b),
                      str(r.total_matches), str(r.good_matches), *cells,
                      decision, reasons])


def format_report_table(reports: Sequence[MatchReport],
                        decision: LoopDecision | None = None) -> str:
    """Tab-separated match records, one per line, stable column order.

    With a decision, every row carries the verdict and failure reasons, and
    an accepted decision appends a ``fused`` row whose counts are the sums
    of the per-detector counts.
    """
    verdict = "-"
    reasons = "-"
    if decision is not None:
        verdict = "accepted" if decision.accepted else "rejected"
        reasons = ",".join(decision.reasons) or "-"
    lines = ["# " + "\t".join(REPORT_COLUMNS)]
    lines += [_report_line(r, verdict, reasons) for r in reports]
    if decision is not None and decision.accepted:
        fused = MatchReport(
            "fused",
            sum(r.n_keypoints_a for r in reports),
            sum(r.n_keypoints_b for r in reports),
            sum(r.total_matches for r in reports),
            sum(r.good_matches for r in reports),
            decision.fused_transform)
        lines.append(_report_line(fused, verdict, reasons))
    return "\n".join(lines) + "\n"


def write_report_table(path, reports: Sequence[MatchReport],
                       decision: LoopDecision | None = None) -> None:
    with open(path, "w") as fh:
        fh.write(format_report_table(reports, decision))
