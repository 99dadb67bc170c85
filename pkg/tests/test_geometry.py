import math

import numpy as np
import pytest

from sarloop import Pose2, wrap_angle


def test_wrap_angle_fixed_points():
    assert wrap_angle(0.0) == 0.0
    assert wrap_angle(math.pi) == pytest.approx(math.pi)
    assert wrap_angle(-math.pi) == pytest.approx(math.pi)  # interval is (-pi, pi]
    assert wrap_angle(2 * math.pi) == pytest.approx(0.0, abs=1e-12)
    assert wrap_angle(3 * math.pi) == pytest.approx(math.pi)


def test_wrap_angle_range_and_periodicity():
    rng = np.random.default_rng(3)
    for theta in rng.uniform(-50, 50, size=200):
        w = wrap_angle(theta)
        assert -math.pi < w <= math.pi
        assert math.cos(w) == pytest.approx(math.cos(theta), abs=1e-9)
        assert math.sin(w) == pytest.approx(math.sin(theta), abs=1e-9)


def test_pose_normalizes_heading():
    assert Pose2(0, 0, 5 * math.pi / 2).theta_rad == pytest.approx(math.pi / 2)


def test_pose_rejects_non_finite():
    with pytest.raises(ValueError):
        Pose2(math.nan, 0.0, 0.0)
    with pytest.raises(ValueError):
        Pose2(0.0, math.inf, 0.0)
    with pytest.raises(ValueError):
        Pose2(0.0, 0.0, math.nan)
