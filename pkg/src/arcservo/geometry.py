"""Rigid-body and linear-algebra primitives: ZYZ Euler kinematics, the
grasp body frame, and an SVD pseudoinverse with explicit truncation."""

from dataclasses import dataclass, field

import numpy as np

from .errors import DegenerateGeometryError

UNIT_TOL = 1e-9
ROTATION_TOL = 1e-9
GIMBAL_TOL = 1e-8


def unit(v):
    """Normalize v; raises on (near-)zero input."""
    v = np.asarray(v, dtype=float)
    n = np.linalg.norm(v)
    if n < 1e-12:
        raise DegenerateGeometryError("cannot normalize a zero vector")
    return v / n


def wrap_angle(a):
    """Map angle(s) to (-pi, pi]."""
    w = np.mod(np.asarray(a, dtype=float) + np.pi, 2 * np.pi) - np.pi
    return np.where(w == -np.pi, np.pi, w)


def is_unit(v, tol=UNIT_TOL):
    return abs(np.linalg.norm(v) - 1.0) <= tol


def is_rotation(R, tol=ROTATION_TOL):
    R = np.asarray(R, dtype=float)
    if R.shape != (3, 3):
        return False
    return (np.abs(R.T @ R - np.eye(3)).max() <= tol
            and abs(np.linalg.det(R) - 1.0) <= tol)


@dataclass(frozen=True)
class ShapeFeature:
    """Spatial-arc feature: radius, circle center, unit plane normal."""

    radius: float
    center: np.ndarray
    normal: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "center", np.asarray(self.center, dtype=float))
        object.__setattr__(self, "normal", np.asarray(self.normal, dtype=float))
        if not self.radius > 0:
            raise ValueError(f"radius must be positive, got {self.radius}")
        if not is_unit(self.normal, 1e-6):
            raise ValueError("normal must be a unit vector")

    def vector(self):
        """Feature as the 7-vector [r, center, normal]."""
        return np.concatenate([[self.radius], self.center, self.normal])

    @staticmethod
    def from_vector(y):
        y = np.asarray(y, dtype=float)
        return ShapeFeature(float(y[0]), y[1:4].copy(), y[4:7].copy())


@dataclass(frozen=True)
class RobotPose:
    """End-effector pose: ZYZ Euler angles plus position.

    Angles are stored unwrapped so that integration never jumps across
    the +-pi seam; wrap only when logging.
    """

    euler: np.ndarray
    position: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "euler", np.asarray(self.euler, dtype=float))
        object.__setattr__(self, "position", np.asarray(self.position, dtype=float))

    def vector(self):
        return np.concatenate([self.euler, self.position])

    @staticmethod
    def from_vector(x):
        x = np.asarray(x, dtype=float)
        return RobotPose(x[:3].copy(), x[3:6].copy())

    def rotation(self):
        return zyz_rotation(self.euler)

    def wrapped_euler(self):
        """Euler angles wrapped to (-pi, pi] for logging."""
        return np.asarray(wrap_angle(self.euler))


def zyz_rotation(angles):
    """Rotation matrix R_Z(x1) R_Y(x2) R_Z(x3) of ZYZ Euler angles."""
    x1, x2, x3 = np.asarray(angles, dtype=float)
    c1, s1 = np.cos(x1), np.sin(x1)
    c2, s2 = np.cos(x2), np.sin(x2)
    c3, s3 = np.cos(x3), np.sin(x3)
    return np.array([
        [c1 * c2 * c3 - s1 * s3, -c1 * c2 * s3 - s1 * c3, c1 * s2],
        [s1 * c2 * c3 + c1 * s3, -s1 * c2 * s3 + c1 * c3, s1 * s2],
        [-s2 * c3, s2 * s3, c2],
    ])


def zyz_angles(R):
    """Extract ZYZ Euler angles from a rotation matrix.

    Returns (angles, degenerate) with x2 in [0, pi].  When sin(x2) is
    numerically zero only x1 +- x3 is observable; the convention x3 = 0
    is applied and degenerate is True.
    """
    R = np.asarray(R, dtype=float)
    if not is_rotation(R):
        raise ValueError("input is not a proper rotation matrix")
    s2 = np.hypot(R[2, 0], R[2, 1])
    if s2 < GIMBAL_TOL:
        if R[2, 2] > 0:  # x2 = 0: R reduces to R_Z(x1 + x3)
            return np.array([np.arctan2(R[1, 0], R[0, 0]), 0.0, 0.0]), True
        # x2 = pi: R[0,0] = -cos(x1 - x3), R[0,1] = -sin(x1 - x3)
        return np.array([np.arctan2(-R[0, 1], -R[0, 0]), np.pi, 0.0]), True
    x1 = np.arctan2(R[1, 2], R[0, 2])
    x2 = np.arctan2(s2, R[2, 2])
    x3 = np.arctan2(R[2, 1], -R[2, 0])
    return np.array([x1, x2, x3]), False


def body_frame(center, normal, grasp):
    """Frame at the grasp point: X radially outward from the arc center,
    Z along the plane normal, Y = Z x X (the arc tangent at the grasp).

    Requires the grasp to lie in the arc plane to within 1e-3 relative.
    """
    center = np.asarray(center, dtype=float)
    normal = np.asarray(normal, dtype=float)
    grasp = np.asarray(grasp, dtype=float)
    d = grasp - center
    dn = np.linalg.norm(d)
    if dn < 1e-12:
        raise DegenerateGeometryError("grasp point coincides with the arc center")
    if abs(normal @ d) / dn > 1e-3:
        raise DegenerateGeometryError(
            "grasp point lies off the arc plane; body frame undefined")
    x = d / dn
    y = np.cross(normal, x)
    yn = np.linalg.norm(y)
    if yn < 1e-9:
        raise DegenerateGeometryError("normal parallel to the radial direction")
    y = y / yn
    return np.column_stack([x, y, np.cross(x, y)])


def pseudoinverse(M, tol=1e-10):
    """Moore-Penrose pseudoinverse via SVD.

    Singular values at or below tol times the largest are truncated to
    zero, which keeps the inverse bounded near rank loss.
    """
    M = np.asarray(M, dtype=float)
    if M.size == 0:
        return M.T.copy()
    U, s, Vt = np.linalg.svd(M, full_matrices=False)
    if s[0] == 0.0:
        return np.zeros_like(M.T)
    keep = s > tol * s[0]
    s_inv = np.zeros_like(s)
    s_inv[keep] = 1.0 / s[keep]
    return (Vt.T * s_inv) @ U.T
