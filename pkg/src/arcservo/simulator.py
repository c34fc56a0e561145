"""Kinematic rod plant and synthetic measurement clouds.

The plant holds an inextensible elastic rod pinned at a fixed point and
grasped by a 6-DOF end-effector; its centerline is a circular arc at
every instant.  Driving the end-effector pose therefore determines the
arc uniquely: the chord between the two ends plus the rod length fix the
arc angle and radius, and the grasp frame fixes the plane and the side
the arc bulges to.  Measurement clouds are arc samples corrupted by an
optional radial bias and isotropic Gaussian noise.
"""

import math
from dataclasses import dataclass, replace

import numpy as np
from scipy.optimize import brentq

from .errors import DegenerateGeometryError, InconsistentGeometryError
from .geometry import (RobotPose, ShapeFeature, body_frame, pseudoinverse,
                       unit, zyz_angles)
from .jacobians import init_calibration, pose_shape_jacobian
from .topology import ArcTopology

PLANT_MODES = ("rod_geometry", "exact_shape_space")


@dataclass(frozen=True)
class CloudNoiseModel:
    """Measurement model: sample count, Gaussian sigma, radial offset."""

    sigma: float = 0.002
    count: int = 200
    radial_bias: float = 0.0

    def __post_init__(self):
        if self.sigma < 0:
            raise ValueError("noise sigma must be nonnegative")
        if self.count < 4:
            raise ValueError("need at least 4 samples to support an arc fit")


def solve_chord_arc(chord, length):
    """Arc angle in (0, 2*pi) subtended by an arc of the given length
    whose endpoints are a chord apart: the unique root of
    sin(t/2)/(t/2) = chord/length.
    """
    if chord <= 0:
        raise InconsistentGeometryError("chord must be positive")
    ratio = chord / length
    if ratio > 1.0 - 1e-6:
        raise InconsistentGeometryError(
            f"chord {chord} not shorter than rod length {length}")
    half = brentq(lambda p: math.sin(p) / p - ratio,
                  1e-9, math.pi - 1e-9, xtol=1e-14)
    assert abs(math.sin(half) / half - ratio) <= 1e-10
    return 2.0 * half


def case_from_sweep(sweep):
    """Topology case implied by a signed arc angle (positive = ccw)."""
    if sweep > 0:
        return 1 if sweep <= math.pi else 2
    return 3 if -sweep <= math.pi else 4


def rod_from_pose(pose, fixed_point, length, cal):
    """Arc feature and signed arc angle of the rod holding a given pose.

    The grasp body frame (recovered through the calibration rotation)
    provides the arc plane normal and a hint for which side of the chord
    the center lies on; the chord/length relation provides radius and
    arc angle.  On a pose reachable by the rod this inverts the forward
    construction exactly; on a slightly inconsistent pose it returns the
    arc that matches the chord and plane while keeping both rod ends on
    the circle.
    """
    rb = cal.erb.T @ pose.rotation()
    f = np.asarray(fixed_point, dtype=float)
    g = pose.position
    chord_v = g - f
    c = float(np.linalg.norm(chord_v))
    theta_abs = solve_chord_arc(c, length)
    r = length / theta_abs
    # the arc plane contains both ends, so the grasp-frame normal is
    # reconciled with the chord before the circle is built; on a
    # consistent pose they are orthogonal already
    u = chord_v / c
    n = rb[:, 2] - float(rb[:, 2] @ u) * u
    nn = float(np.linalg.norm(n))
    if nn < 1e-9:
        raise DegenerateGeometryError("grasp plane normal parallel to the chord")
    n = n / nn
    bis = np.cross(n, u)
    mid = 0.5 * (f + g)
    lift = math.sqrt(max(0.0, r * r - 0.25 * c * c))
    hint = g - r * rb[:, 0]
    candidates = (mid + lift * bis, mid - lift * bis)
    center = min(candidates, key=lambda p: float(np.linalg.norm(p - hint)))
    uf = unit(f - center)
    ug = unit(g - center)
    beta = math.atan2(float(n @ np.cross(uf, ug)), float(uf @ ug))
    if theta_abs <= math.pi:
        sweep = beta
    else:
        sweep = beta - 2.0 * math.pi if beta > 0 else beta + 2.0 * math.pi
    return ShapeFeature(r, center, n), sweep


def sample_cloud(feature, sweep, fixed_point, noise, rng):
    """Noisy (N, 3) samples along the arc from the fixed end to the grasp."""
    p0 = np.asarray(fixed_point, dtype=float) - feature.center
    p0 = p0 - float(p0 @ feature.normal) * feature.normal
    p0 = unit(p0)
    q0 = np.cross(feature.normal, p0)
    ang = np.linspace(0.0, sweep, noise.count)
    radial = (np.outer(np.cos(ang), p0) + np.outer(np.sin(ang), q0))
    pts = feature.center + (feature.radius + noise.radial_bias) * radial
    if noise.sigma > 0:
        pts = pts + rng.normal(0.0, noise.sigma, pts.shape)
    return pts


def _unwrap_near(angles, ref):
    out = np.array(angles, dtype=float)
    for i in (0, 2):
        out[i] += 2.0 * math.pi * round((ref[i] - out[i]) / (2.0 * math.pi))
    return out


@dataclass(frozen=True)
class RodPlant:
    """Immutable plant state; step() returns the successor state.

    mode 'rod_geometry' integrates the commanded pose rate and rebuilds
    the rod from the new pose, then re-reads the Euler angles off the
    rebuilt grasp frame so any torsion the command applied about the
    grasp axis (which the rod cannot hold) is shed.  mode
    'exact_shape_space' instead pushes the commanded pose rate through
    the pseudoinverse of the pose-shape Jacobian and integrates the
    feature directly, bypassing the rod geometry.
    """

    fixed_point: np.ndarray
    length: float
    cal: object
    pose: RobotPose
    feature: ShapeFeature
    sweep: float
    mode: str = "rod_geometry"

    def __post_init__(self):
        object.__setattr__(self, "fixed_point",
                           np.asarray(self.fixed_point, dtype=float))
        if self.mode not in PLANT_MODES:
            raise ValueError(f"mode must be one of {PLANT_MODES}")
        if not self.length > 0:
            raise ValueError("rod length must be positive")

    @property
    def case(self):
        return case_from_sweep(self.sweep)

    def topology(self, delta=0.2):
        return ArcTopology(self.case, self.length, self.fixed_point, delta)

    def step(self, dx, dt):
        dx = np.asarray(dx, dtype=float)
        new_euler = self.pose.euler + dx[:3] * dt
        new_pos = self.pose.position + dx[3:] * dt
        if self.mode == "exact_shape_space":
            bundle = pose_shape_jacobian(self.feature, self.pose, self.cal,
                                         self.topology())
            dy = pseudoinverse(bundle.full) @ dx * dt
            y = self.feature.vector() + dy
            feature = ShapeFeature(y[0], y[1:4], unit(y[4:7]))
            sweep = math.copysign(self.length / feature.radius, self.sweep)
            pose = RobotPose(new_euler, new_pos)
            return replace(self, pose=pose, feature=feature, sweep=sweep)
        raw = RobotPose(new_euler, new_pos)
        feature, sweep = rod_from_pose(raw, self.fixed_point, self.length,
                                       self.cal)
        rb = body_frame(feature.center, feature.normal, new_pos)
        angles, _ = zyz_angles(self.cal.erb @ rb)
        pose = RobotPose(_unwrap_near(angles, new_euler), new_pos)
        return replace(self, pose=pose, feature=feature, sweep=sweep)

    def observe(self, noise, rng):
        return sample_cloud(self.feature, self.sweep, self.fixed_point,
                            noise, rng)


def random_plant(rng, case, mode="rod_geometry", exact_norm=False):
    """Random consistent plant realizing the given topology case.

    Radii span [0.1, 0.4] m; arc angles keep a 0.4 rad margin from the
    straight, half-turn, and full-turn degeneracies; the middle Euler
    angle keeps 0.25 rad away from the gimbal axis.  Any grasp
    orientation is consistent because the calibration rotation absorbs
    it.
    """
    if case not in (1, 2, 3, 4):
        raise ValueError(f"case must be 1..4, got {case}")
    radius = 0.1 + 0.3 * rng.random()
    if case in (1, 3):
        mag = 0.6 + rng.random() * (math.pi - 1.0)
    else:
        mag = math.pi + 0.4 + rng.random() * (math.pi - 1.0)
    sweep = mag if case in (1, 2) else -mag
    n = unit(rng.normal(size=3))
    p0 = rng.normal(size=3)
    p0 = p0 - float(p0 @ n) * n
    while np.linalg.norm(p0) < 1e-6:
        p0 = rng.normal(size=3)
        p0 = p0 - float(p0 @ n) * n
    p0 = unit(p0)
    center = rng.normal(0.0, 0.3, size=3)
    fixed = center + radius * p0
    euler = np.array([
        rng.uniform(-math.pi, math.pi),
        rng.uniform(0.25, math.pi - 0.25),
        rng.uniform(-math.pi, math.pi),
    ])
    return make_plant(fixed, radius * mag, sweep, n, p0, euler, mode,
                      exact_norm)


def make_plant(fixed_point, length, sweep, normal, radial_dir, euler,
               mode="rod_geometry", exact_norm=False):
    """Assemble a consistent plant from an initial arc description.

    The arc starts at the fixed point, which sits at angle zero along
    direction radial_dir from the center, and sweeps the signed angle
    sweep (around normal) to the grasp.  radial_dir is projected into
    the arc plane, so only its in-plane part matters.  The grasp
    calibration is taken from the supplied initial Euler angles.
    """
    f = np.asarray(fixed_point, dtype=float)
    if not 0 < abs(sweep) < 2.0 * math.pi:
        raise ValueError("initial arc angle must lie in (0, 2*pi)")
    n = unit(np.asarray(normal, dtype=float))
    p0 = np.asarray(radial_dir, dtype=float)
    p0 = p0 - float(p0 @ n) * n
    p0 = unit(p0)
    radius = length / abs(sweep)
    center = f - radius * p0
    q0 = np.cross(n, p0)
    grasp = center + radius * (math.cos(sweep) * p0 + math.sin(sweep) * q0)
    feature = ShapeFeature(radius, center, n)
    pose = RobotPose(np.asarray(euler, dtype=float), grasp)
    cal = init_calibration(feature, pose, exact_norm)
    return RodPlant(f, length, cal, pose, feature, sweep, mode)
