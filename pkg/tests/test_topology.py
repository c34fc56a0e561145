"""Case classification, arc-length initialization, and swept angles."""

import math
import warnings

import numpy as np
import pytest

from arcservo import (AmbiguousCaseError, ArcTopology, CloudNoiseModel,
                      InconsistentGeometryError, ShapeFeature, check_case,
                      classify_case, default_estimator, init_topology,
                      initialize_arc_length, random_plant, sample_cloud,
                      swept_angle, swept_angle_magnitude, unit)


def test_swept_angle_table():
    # quarter-turn clockwise rod: negative quarter angle
    assert swept_angle(1.0, math.pi / 2, 3) == pytest.approx(-math.pi / 2)
    assert swept_angle(1.0, 1.0, 1) == pytest.approx(1.0)
    # long cases report the complement to a full turn
    assert swept_angle(1.0, 4.0, 2) == pytest.approx(2 * math.pi - 4.0)
    assert swept_angle(1.0, 4.0, 4) == pytest.approx(-(2 * math.pi - 4.0))
    for case in (1, 2, 3, 4):
        assert swept_angle_magnitude(1.0, 4.0, case) == pytest.approx(
            abs(swept_angle(1.0, 4.0, case)))


def test_swept_angle_validation():
    with pytest.raises(ValueError):
        swept_angle(0.0, 1.0, 1)
    with pytest.raises(ValueError):
        swept_angle(1.0, 1.0, 5)
    with pytest.raises(InconsistentGeometryError):
        swept_angle(0.1, 1.0, 1)    # 10 rad of arc on one circle


def test_classification_recovers_constructing_case():
    noise = CloudNoiseModel(0.0, 200)
    for case in (1, 2, 3, 4):
        for seed in range(10):
            rng = np.random.default_rng(100 * case + seed)
            plant = random_plant(rng, case)
            cloud = plant.observe(noise, rng)
            got = classify_case(cloud, plant.feature, plant.fixed_point,
                                plant.pose.position)
            assert got == case


def test_mirrored_normal_swaps_departure_cases():
    # the same physical points viewed with the opposite hemisphere
    # convention reverse the departure direction: 1 <-> 3, 2 <-> 4
    noise = CloudNoiseModel(0.0, 200)
    swap = {1: 3, 2: 4, 3: 1, 4: 2}
    for case in (1, 2, 3, 4):
        rng = np.random.default_rng(40 + case)
        plant = random_plant(rng, case)
        cloud = plant.observe(noise, rng)
        mirrored = ShapeFeature(plant.feature.radius, plant.feature.center,
                                -plant.feature.normal)
        got = classify_case(cloud, mirrored, plant.fixed_point,
                            plant.pose.position)
        assert got == swap[case]


def test_symmetric_cloud_is_ambiguous():
    # points fanned symmetrically to both sides of the fixed end
    center = np.zeros(3)
    n = np.array([0.0, 0.0, 1.0])
    r = 0.2
    ang = np.linspace(-1.0, 1.0, 101)
    pts = center + r * np.column_stack([np.cos(ang), np.sin(ang),
                                        np.zeros_like(ang)])
    feat = ShapeFeature(r, center, n)
    fixed = center + np.array([r, 0.0, 0.0])
    grasp = pts[-1]
    with pytest.raises(AmbiguousCaseError):
        classify_case(pts, feat, fixed, grasp)


def test_initialize_arc_length_exact_geometry():
    for case in (1, 2, 3, 4):
        rng = np.random.default_rng(200 + case)
        plant = random_plant(rng, case)
        length = initialize_arc_length(plant.feature, plant.fixed_point,
                                       plant.pose.position, case)
        assert length == pytest.approx(plant.length, rel=1e-9)


def test_initialize_arc_length_rejects_center_end():
    feat = ShapeFeature(0.2, np.zeros(3), np.array([0.0, 0.0, 1.0]))
    with pytest.raises(InconsistentGeometryError):
        initialize_arc_length(feat, np.zeros(3), np.array([0.2, 0.0, 0.0]), 1)


def test_init_topology_freezes_case_and_length():
    rng = np.random.default_rng(7)
    plant = random_plant(rng, 2)
    cloud = plant.observe(CloudNoiseModel(0.002, 200), rng)
    fit = default_estimator(initial_ref=plant.feature.normal)(cloud)
    topo = init_topology(cloud, fit.feature, plant.fixed_point,
                         plant.pose.position)
    assert topo.case == 2
    assert topo.length == pytest.approx(plant.length, rel=0.01)


def test_topology_validation():
    with pytest.raises(ValueError):
        ArcTopology(0, 0.5, np.zeros(3))
    with pytest.raises(ValueError):
        ArcTopology(1, -0.5, np.zeros(3))
    with pytest.raises(ValueError):
        ArcTopology(1, 0.5, np.zeros(3), delta=1.0)


def test_check_case_warns_on_flip_only():
    rng = np.random.default_rng(9)
    plant = random_plant(rng, 1)
    cloud = plant.observe(CloudNoiseModel(0.0, 200), rng)
    topo = plant.topology()
    with warnings.catch_warnings():
        warnings.simplefilter("error")   # agreement must stay silent
        got = check_case(topo, cloud, plant.feature, plant.pose.position)
    assert got == 1
    mirrored = ShapeFeature(plant.feature.radius, plant.feature.center,
                            -plant.feature.normal)
    with pytest.warns(UserWarning):
        got = check_case(topo, cloud, mirrored, plant.pose.position)
    assert got == 3
