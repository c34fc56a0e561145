"""Rotation, frame, and feature primitive tests."""

import math

import numpy as np
import pytest

from arcservo import (DegenerateGeometryError, RobotPose, ShapeFeature,
                      body_frame, pseudoinverse, unit, wrap_angle, zyz_angles,
                      zyz_rotation)


def test_zyz_rotation_closed_form():
    x1, x2, x3 = 0.7, 1.2, -0.4
    c1, s1 = math.cos(x1), math.sin(x1)
    c2, s2 = math.cos(x2), math.sin(x2)
    c3, s3 = math.cos(x3), math.sin(x3)
    expected = np.array([
        [c1 * c2 * c3 - s1 * s3, -c1 * c2 * s3 - s1 * c3, c1 * s2],
        [s1 * c2 * c3 + c1 * s3, -s1 * c2 * s3 + c1 * c3, s1 * s2],
        [-s2 * c3, s2 * s3, c2],
    ])
    assert np.allclose(zyz_rotation((x1, x2, x3)), expected, atol=1e-15)


def test_zyz_rotation_is_orthonormal():
    rng = np.random.default_rng(0)
    for _ in range(100):
        angles = rng.uniform(-math.pi, math.pi, 3)
        r = zyz_rotation(angles)
        assert np.allclose(r.T @ r, np.eye(3), atol=1e-12)
        assert abs(np.linalg.det(r) - 1.0) < 1e-12


def test_zyz_angles_round_trip():
    rng = np.random.default_rng(1)
    for _ in range(200):
        angles = np.array([rng.uniform(-math.pi, math.pi),
                           rng.uniform(0.05, math.pi - 0.05),
                           rng.uniform(-math.pi, math.pi)])
        got, degenerate = zyz_angles(zyz_rotation(angles))
        assert not degenerate
        assert np.allclose(got, angles, atol=1e-9)


def test_zyz_angles_gimbal_merges_first_and_third():
    # x2 = 0 leaves only x1 + x3 observable; convention puts it all in x1
    angles, degenerate = zyz_angles(zyz_rotation((0.5, 0.0, 0.2)))
    assert degenerate
    assert np.allclose(angles, [0.7, 0.0, 0.0], atol=1e-12)
    # x2 = pi leaves x1 - x3
    angles, degenerate = zyz_angles(zyz_rotation((0.5, math.pi, 0.2)))
    assert degenerate
    assert abs(angles[1] - math.pi) < 1e-12 and abs(angles[2]) == 0.0
    assert abs(wrap_angle(angles[0] - 0.3)) < 1e-12


def test_zyz_angles_rejects_non_rotation():
    with pytest.raises(ValueError):
        zyz_angles(np.eye(3) * 2.0)


def test_wrap_angle_range():
    assert wrap_angle(math.pi) == pytest.approx(math.pi)
    assert wrap_angle(-math.pi) == pytest.approx(math.pi)
    assert wrap_angle(3 * math.pi / 2) == pytest.approx(-math.pi / 2)
    assert wrap_angle(7.0) == pytest.approx(7.0 - 2 * math.pi)


def test_unit_rejects_zero():
    with pytest.raises(DegenerateGeometryError):
        unit(np.zeros(3))


def test_body_frame_columns():
    rng = np.random.default_rng(2)
    for _ in range(50):
        n = unit(rng.normal(size=3))
        p = rng.normal(size=3)
        p -= (p @ n) * n
        d = unit(p) * rng.uniform(0.1, 0.5)
        center = rng.normal(size=3)
        frame = body_frame(center, n, center + d)
        assert np.allclose(frame[:, 0], unit(d), atol=1e-12)
        assert np.allclose(frame[:, 2], n, atol=1e-12)
        assert np.allclose(frame[:, 1], np.cross(n, unit(d)), atol=1e-12)
        assert np.allclose(frame.T @ frame, np.eye(3), atol=1e-12)


def test_body_frame_rejects_off_plane_grasp():
    with pytest.raises(DegenerateGeometryError):
        body_frame(np.zeros(3), np.array([0.0, 0.0, 1.0]),
                   np.array([0.1, 0.0, 0.2]))


def test_pseudoinverse_moore_penrose_conditions():
    rng = np.random.default_rng(3)
    shapes = [(3, 3), (6, 7), (3, 7), (7, 3), (6, 6)]
    for k in range(60):
        m, n = shapes[k % len(shapes)]
        mat = rng.normal(size=(m, n))
        if k % 3 == 0:   # force rank deficiency
            mat[-1] = mat[0]
        pinv = pseudoinverse(mat)
        assert np.allclose(mat @ pinv @ mat, mat, atol=1e-8)
        assert np.allclose(pinv @ mat @ pinv, pinv, atol=1e-8)
        assert np.allclose((mat @ pinv).T, mat @ pinv, atol=1e-8)
        assert np.allclose((pinv @ mat).T, pinv @ mat, atol=1e-8)


def test_pseudoinverse_zero_matrix():
    assert np.allclose(pseudoinverse(np.zeros((3, 5))), np.zeros((5, 3)))


def test_shape_feature_validation_and_round_trip():
    with pytest.raises(ValueError):
        ShapeFeature(-0.1, np.zeros(3), np.array([0.0, 0.0, 1.0]))
    with pytest.raises(ValueError):
        ShapeFeature(0.2, np.zeros(3), np.array([0.0, 0.0, 1.5]))
    f = ShapeFeature(0.2, np.array([0.1, -0.2, 0.3]), np.array([0.0, 0.0, 1.0]))
    g = ShapeFeature.from_vector(f.vector())
    assert g.radius == f.radius
    assert np.allclose(g.center, f.center)
    assert np.allclose(g.normal, f.normal)


def test_robot_pose_round_trip_and_rotation():
    pose = RobotPose(np.array([0.4, 1.1, -0.3]), np.array([0.1, 0.2, 0.3]))
    again = RobotPose.from_vector(pose.vector())
    assert np.allclose(again.euler, pose.euler)
    assert np.allclose(again.position, pose.position)
    assert np.allclose(pose.rotation(), zyz_rotation(pose.euler), atol=1e-15)
