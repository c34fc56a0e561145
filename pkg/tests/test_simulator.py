"""Rod plant, chord-arc solver, and synthetic cloud tests."""

import math

import numpy as np
import pytest

from arcservo import (CloudNoiseModel, InconsistentGeometryError, RobotPose,
                      case_from_sweep, make_plant, orientation_constraint,
                      position_constraint, random_plant, rod_from_pose,
                      sample_cloud, solve_chord_arc, unit)


def test_solve_chord_arc_known_angles():
    # chord of a theta-radian arc: c = L * sin(theta/2) / (theta/2)
    for theta in (0.5, 1.0, 2.0, math.pi, 4.0, 5.5):
        length = 0.5
        chord = length * math.sin(theta / 2) / (theta / 2)
        assert solve_chord_arc(chord, length) == pytest.approx(theta, abs=1e-10)


def test_solve_chord_arc_rejects_impossible_chords():
    with pytest.raises(InconsistentGeometryError):
        solve_chord_arc(0.5, 0.5)        # straight rod
    with pytest.raises(InconsistentGeometryError):
        solve_chord_arc(0.6, 0.5)        # chord longer than the rod
    with pytest.raises(InconsistentGeometryError):
        solve_chord_arc(0.0, 0.5)


def test_case_from_sweep_quadrants():
    assert case_from_sweep(1.0) == 1
    assert case_from_sweep(4.0) == 2
    assert case_from_sweep(-1.0) == 3
    assert case_from_sweep(-4.0) == 4


def test_rod_from_pose_inverts_construction():
    rng = np.random.default_rng(30)
    for k in range(40):
        plant = random_plant(rng, 1 + k % 4)
        feat, sweep = rod_from_pose(plant.pose, plant.fixed_point,
                                    plant.length, plant.cal)
        assert feat.radius == pytest.approx(plant.feature.radius, rel=1e-9)
        assert np.allclose(feat.center, plant.feature.center, atol=1e-9)
        assert np.allclose(feat.normal, plant.feature.normal, atol=1e-9)
        assert sweep == pytest.approx(plant.sweep, abs=1e-9)


def test_make_plant_initial_state_consistent():
    plant = make_plant(np.array([0.05, -0.1, 0.2]), 0.5, 2.5,
                       [0.0, 0.2, 1.0], [1.0, 0.1, 0.0], [0.4, 1.1, -0.3])
    assert plant.case == 1
    assert abs(plant.sweep) * plant.feature.radius == pytest.approx(0.5)
    ho = orientation_constraint(plant.feature, plant.pose, plant.cal)
    hp = position_constraint(plant.feature, plant.pose, plant.topology())
    assert np.max(np.abs(ho)) < 1e-12
    assert np.max(np.abs(hp)) < 1e-12
    # the fixed end sits on the circle, in the plane
    cf = plant.fixed_point - plant.feature.center
    assert np.linalg.norm(cf) == pytest.approx(plant.feature.radius)
    assert abs(float(cf @ plant.feature.normal)) < 1e-12


def test_make_plant_rejects_bad_arguments():
    with pytest.raises(ValueError):
        make_plant(np.zeros(3), 0.5, 0.0, [0, 0, 1], [1, 0, 0], [0.4, 1.1, 0.2])
    with pytest.raises(ValueError):
        make_plant(np.zeros(3), 0.5, 7.0, [0, 0, 1], [1, 0, 0], [0.4, 1.1, 0.2])
    with pytest.raises(ValueError):
        make_plant(np.zeros(3), 0.5, 2.5, [0, 0, 1], [1, 0, 0],
                   [0.4, 1.1, 0.2], mode="warp_drive")


def test_step_keeps_rod_consistent():
    rng = np.random.default_rng(31)
    plant = random_plant(rng, 1)
    for _ in range(50):
        rate = np.concatenate([rng.uniform(-0.3, 0.3, 3),
                               rng.uniform(-0.03, 0.03, 3)])
        plant = plant.step(rate, 0.05)
        ho = orientation_constraint(plant.feature, plant.pose, plant.cal)
        hp = position_constraint(plant.feature, plant.pose, plant.topology())
        assert np.max(np.abs(ho)) < 1e-10
        assert np.max(np.abs(hp)) < 1e-10
        # inextensible: radius times arc angle stays the rod length
        assert abs(plant.sweep) * plant.feature.radius == pytest.approx(
            plant.length, rel=1e-9)


def test_step_tracks_commanded_position_exactly():
    rng = np.random.default_rng(32)
    plant = random_plant(rng, 2)
    rate = np.array([0.1, -0.05, 0.02, 0.01, -0.02, 0.015])
    before = plant.pose.position.copy()
    after = plant.step(rate, 0.1)
    assert np.allclose(after.pose.position, before + 0.1 * rate[3:])


def test_in_plane_spin_is_shed():
    # spinning the end-effector about the arc plane normal commands a
    # grasp-frame X the rod cannot hold (its X must point along
    # center-to-grasp); the reconciliation sheds the spin entirely
    rng = np.random.default_rng(33)
    plant = random_plant(rng, 1)
    # the normal, transported into the frame the end-effector pose lives in
    axis = plant.cal.erb @ plant.feature.normal
    # euler rate that spins about that axis: use the angular Jacobian of
    # the ZYZ triple numerically via a small twist step
    from arcservo import zyz_angles, zyz_rotation

    def twist(euler, angle):
        k = axis
        kx = np.array([[0, -k[2], k[1]], [k[2], 0, -k[0]], [-k[1], k[0], 0]])
        rot = (np.eye(3) + math.sin(angle) * kx
               + (1 - math.cos(angle)) * kx @ kx)
        angles, _ = zyz_angles(rot @ zyz_rotation(euler))
        return angles

    twisted = twist(plant.pose.euler, 0.2)
    rate = np.concatenate([(twisted - plant.pose.euler) / 0.1, np.zeros(3)])
    after = plant.step(rate, 0.1)
    assert np.allclose(after.feature.vector(), plant.feature.vector(),
                       atol=1e-9)
    assert np.allclose(after.pose.euler, plant.pose.euler, atol=1e-9)


def test_step_rejects_overstretched_chord():
    plant = make_plant(np.zeros(3), 0.5, 2.5, [0, 0, 1], [1, 0, 0],
                       [0.4, 1.1, -0.3])
    rate = np.concatenate([np.zeros(3), 10.0 * unit(plant.pose.position)])
    with pytest.raises(InconsistentGeometryError):
        plant.step(rate, 1.0)


def test_exact_shape_space_mode_moves_feature_not_rod():
    rng = np.random.default_rng(34)
    plant = random_plant(rng, 1, mode="exact_shape_space")
    rate = np.array([0.05, -0.02, 0.04, 0.01, 0.02, -0.01])
    after = plant.step(rate, 0.1)
    assert not np.allclose(after.feature.vector(), plant.feature.vector())
    assert np.allclose(after.pose.position,
                       plant.pose.position + 0.1 * rate[3:])
    assert abs(np.linalg.norm(after.feature.normal) - 1.0) < 1e-12


def test_sample_cloud_spans_fixed_to_grasp():
    rng = np.random.default_rng(35)
    plant = random_plant(rng, 3)
    pts = plant.observe(CloudNoiseModel(0.0, 120), rng)
    assert pts.shape == (120, 3)
    assert np.allclose(pts[0], plant.fixed_point, atol=1e-12)
    assert np.allclose(pts[-1], plant.pose.position, atol=1e-12)
    radii = np.linalg.norm(pts - plant.feature.center, axis=1)
    assert np.allclose(radii, plant.feature.radius, atol=1e-12)


def test_sample_cloud_radial_bias():
    rng = np.random.default_rng(36)
    plant = random_plant(rng, 1)
    pts = sample_cloud(plant.feature, plant.sweep, plant.fixed_point,
                       CloudNoiseModel(0.0, 80, radial_bias=0.01), rng)
    radii = np.linalg.norm(pts - plant.feature.center, axis=1)
    assert np.allclose(radii, plant.feature.radius + 0.01, atol=1e-12)


def test_noise_model_validation():
    with pytest.raises(ValueError):
        CloudNoiseModel(-0.001, 100)
    with pytest.raises(ValueError):
        CloudNoiseModel(0.001, 3)


def test_random_plant_respects_margins():
    rng = np.random.default_rng(37)
    for k in range(100):
        case = 1 + k % 4
        plant = random_plant(rng, case)
        assert plant.case == case
        assert 0.1 <= plant.feature.radius <= 0.4
        assert 0.25 <= plant.pose.euler[1] <= math.pi - 0.25
        mag = abs(plant.sweep)
        if case in (1, 3):
            assert 0.6 <= mag <= math.pi - 0.4
        else:
            assert math.pi + 0.4 <= mag <= 2 * math.pi - 0.6
