"""Implicit constraint maps between the robot pose and the arc feature,
and the pose-shape Jacobian obtained by differentiating them.

Two constraint stacks bind pose x = [euler(3), position(3)] to feature
y = [r, center(3), normal(3)]:

* orientation (6 equations): the grasp body frame, transported by the
  constant grasp-mount rotation, must match the end-effector rotation
  columns X and Z;
* position (3 equations): the grasp sits on the circle, in the plane,
  at the swept angle the rod length dictates.

Each stack is differentiated analytically with respect to y (J1) and to
its own pose block (J2); solving J2 * dx = -J1 * dy per block and
stacking yields the 6x7 pose-shape Jacobian used by the controller.
"""

import math
from dataclasses import dataclass
from types import SimpleNamespace

import numpy as np

from .errors import InconsistentGeometryError, SingularConfigurationError
from .geometry import body_frame, pseudoinverse, zyz_rotation
from .topology import swept_angle_magnitude

#: |cos| of the end-direction angle beyond which the position constraint
#: Jacobian loses rank (grasp diametral or coincident with the fixed end)
ETA_SINGULAR = 1.0 - 1e-9


@dataclass(frozen=True)
class GraspCalibration:
    """Constant rotation from the grasp body frame to the end-effector
    frame, captured once at startup.

    exact_norm selects whether the orientation map normalizes the
    center-to-grasp vector by its true norm instead of the fitted radius
    (the two agree exactly on a consistent rod).
    """

    erb: np.ndarray
    exact_norm: bool = False

    def __post_init__(self):
        object.__setattr__(self, "erb", np.asarray(self.erb, dtype=float))

    @property
    def etb(self):
        """Block-diagonal transport of erb acting on stacked 3-vector pairs."""
        out = np.zeros((6, 6))
        out[:3, :3] = self.erb
        out[3:, 3:] = self.erb
        return out


@dataclass(frozen=True)
class JacobianBundle:
    """Pose-shape Jacobian rows: angular (3x7), linear (3x7), stacked (6x7)."""

    orientation: np.ndarray
    position: np.ndarray

    @property
    def full(self):
        return np.vstack([self.orientation, self.position])


def init_calibration(feature, pose, exact_norm=False):
    """Grasp-mount rotation from one consistent (feature, pose) pair."""
    rb = body_frame(feature.center, feature.normal, pose.position)
    return GraspCalibration(pose.rotation() @ rb.T, exact_norm)


def _v2(euler):
    re = zyz_rotation(euler)
    return np.concatenate([re[:, 0], re[:, 2]])


def orientation_constraint(feature, pose, cal):
    """6-vector residual of the orientation map (zero on a consistent rod)."""
    dc = pose.position - feature.center
    scale = np.linalg.norm(dc) if cal.exact_norm else feature.radius
    v1 = np.concatenate([dc / scale, feature.normal])
    return cal.etb @ v1 - _v2(pose.euler)


def orientation_jacobians(feature, pose, cal):
    """(J1: 6x7 wrt feature, J2: 6x3 wrt Euler angles) of the orientation map."""
    dc = pose.position - feature.center
    r = feature.radius
    j1t = np.zeros((6, 7))
    if cal.exact_norm:
        dn = np.linalg.norm(dc)
        u = dc / dn
        proj = (np.eye(3) - np.outer(u, u)) / dn
        j1t[:3, 1:4] = -proj
    else:
        j1t[:3, 0] = -dc / r**2
        j1t[:3, 1:4] = -np.eye(3) / r
    j1t[3:, 4:7] = np.eye(3)
    j1 = cal.etb @ j1t

    x1, x2, x3 = pose.euler
    s1, c1 = math.sin(x1), math.cos(x1)
    s2, c2 = math.sin(x2), math.cos(x2)
    s3, c3 = math.sin(x3), math.cos(x3)
    j2 = np.array([
        [s1 * c2 * c3 + c1 * s3, c1 * s2 * c3, c1 * c2 * s3 + s1 * c3],
        [-c1 * c2 * c3 + s1 * s3, s1 * s2 * c3, s1 * c2 * s3 - c1 * c3],
        [0.0, c2 * c3, -s2 * s3],
        [s1 * s2, -c1 * c2, 0.0],
        [-c1 * s2, -s1 * c2, 0.0],
        [0.0, s2, 0.0],
    ])
    return j1, j2


def orientation_position_jacobian(feature, pose, cal):
    """6x3 derivative of the orientation map wrt the grasp position.

    The grasp position enters through the center-to-grasp direction, so
    this block is nonzero; dropping it decouples the angular solve but
    costs first-order accuracy (see pose_shape_jacobian).
    """
    dc = pose.position - feature.center
    out = np.zeros((6, 3))
    if cal.exact_norm:
        dn = np.linalg.norm(dc)
        u = dc / dn
        out[:3, :] = cal.erb @ (np.eye(3) - np.outer(u, u)) / dn
    else:
        out[:3, :] = cal.erb / feature.radius
    return out


def _eta(feature, pose, topo):
    cf = topo.fixed_point - feature.center
    dc = pose.position - feature.center
    return float(cf @ dc) / feature.radius**2, cf, dc


def position_constraint(feature, pose, topo):
    """3-vector residual: swept angle match, in-plane grasp, on-circle grasp."""
    eta, _, dc = _eta(feature, pose, topo)
    if abs(eta) > 1.0 + 1e-6:
        raise InconsistentGeometryError(
            f"end-direction cosine {eta} outside [-1, 1]")
    eta = min(1.0, max(-1.0, eta))
    theta = swept_angle_magnitude(feature.radius, topo.length, topo.case)
    return np.array([
        math.acos(eta) - theta,
        float(feature.normal @ dc),
        float(dc @ dc) - feature.radius**2,
    ])


def position_jacobians(feature, pose, topo):
    """(J1: 3x7 wrt feature, J2: 3x3 wrt grasp position) of the position map.

    The first row differentiates acos of the normalized end-direction
    product, so every term carries the 1/r^2 chain factor; the swept
    angle contributes -d|theta|/dr = +-L/r^2 with + for the short cases
    (1, 3) and - for the long ones (2, 4).
    """
    r = feature.radius
    eta, cf, dc = _eta(feature, pose, topo)
    if abs(eta) >= ETA_SINGULAR:
        raise SingularConfigurationError(
            "grasp direction (anti)parallel to the fixed-end direction; "
            "the swept-angle row is not differentiable here")
    gamma = -1.0 / math.sqrt(1.0 - eta * eta)
    sign = 1.0 if topo.case in (1, 3) else -1.0
    j1 = np.zeros((3, 7))
    j1[0, 0] = (-2.0 * r * gamma * eta + sign * topo.length) / r**2
    j1[0, 1:4] = -gamma * (cf + dc) / r**2
    j1[1, 1:4] = -feature.normal
    j1[1, 4:7] = dc
    j1[2, 0] = -2.0 * r
    j1[2, 1:4] = -2.0 * dc
    j2 = np.vstack([gamma * cf / r**2, feature.normal, 2.0 * dc])
    return j1, j2


def pose_shape_jacobian(feature, pose, cal, topo, coupled=True, tol=1e-10):
    """Solve both constraint blocks for the pose rates driven by a feature
    rate and stack them into the 6x7 pose-shape Jacobian.

    The position block is square and is solved on its own.  With
    coupled=True (default) the angular solve also accounts for the grasp
    translation commanded by the position block, which the orientation
    map feels through the center-to-grasp direction; this restores full
    first-order consistency of the stacked constraints.  coupled=False
    drops that term and treats the two blocks as independent.
    """
    j1o, j2o = orientation_jacobians(feature, pose, cal)
    j1p, j2p = position_jacobians(feature, pose, topo)
    jsp = -pseudoinverse(j2p, tol) @ j1p
    rhs = j1o + orientation_position_jacobian(feature, pose, cal) @ jsp if coupled else j1o
    jso = -pseudoinverse(j2o, tol) @ rhs
    return JacobianBundle(jso, jsp)


def feature_view(y):
    """Unvalidated feature view of a raw 7-vector.

    Finite differencing perturbs single entries of y, which takes the
    normal slightly off the unit sphere; the constraint maps must still
    be evaluated on the raw entries (their derivatives treat the normal
    components as free), so this bypasses the unit-norm check a real
    feature object performs.
    """
    y = np.asarray(y, dtype=float)
    return SimpleNamespace(radius=float(y[0]), center=y[1:4].copy(),
                           normal=y[4:7].copy())


def fd_jacobian(f, x0, step=1e-6):
    """Central-difference Jacobian of f at x0 (m x n for f: R^n -> R^m)."""
    x0 = np.asarray(x0, dtype=float)
    cols = []
    for i in range(x0.size):
        xp = x0.copy()
        xm = x0.copy()
        xp[i] += step
        xm[i] -= step
        cols.append((np.asarray(f(xp)) - np.asarray(f(xm))) / (2.0 * step))
    return np.column_stack(cols)
