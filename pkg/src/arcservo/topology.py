"""Arc topology: which of the four ways the rod can wrap its circle.

The chord between the rod ends does not say on which side, nor how far
around, the material lies.  Counting cloud points inside four angular
sectors disambiguates this once at startup; the detected case and the
rod length are then frozen for the rest of the run.
"""

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .errors import AmbiguousCaseError, InconsistentGeometryError

#: half-angle (rad) of the counting sectors
DEFAULT_DELTA = 0.2


@dataclass(frozen=True)
class ArcTopology:
    """Frozen per-run topology: case 1..4, rod length, fixed end, sector width."""

    case: int
    length: float
    fixed_point: np.ndarray
    delta: float = DEFAULT_DELTA

    def __post_init__(self):
        object.__setattr__(self, "fixed_point",
                           np.asarray(self.fixed_point, dtype=float))
        if self.case not in (1, 2, 3, 4):
            raise ValueError(f"case must be 1..4, got {self.case}")
        if not self.length > 0:
            raise ValueError("rod length must be positive")
        if not 0.0 < self.delta < math.pi / 4:
            raise ValueError("delta must lie in (0, pi/4)")


def sector_counts(points, feature, fixed_point, grasp, delta=DEFAULT_DELTA):
    """Count cloud points within angle delta of the four sector axes.

    Axes (all from the arc center): a1/a2 flank the direction of the
    fixed end on either side, a3 bisects the acute angle between the two
    end directions, a4 is its opposite.  Which cones the material fills
    encodes departure side and short-versus-long wrap.
    """
    c = feature.center
    n = feature.normal
    cf = np.asarray(fixed_point, dtype=float) - c
    dc = np.asarray(grasp, dtype=float) - c
    v = np.cross(n, cf)
    axes = [cf + delta * v, cf - delta * v, cf + dc, -(cf + dc)]
    u = np.asarray(points, dtype=float) - c
    un = np.linalg.norm(u, axis=1)
    valid = un > 1e-12
    counts = []
    for a in axes:
        an = np.linalg.norm(a)
        if an < 1e-12:
            raise InconsistentGeometryError("sector axis degenerates to zero")
        cosang = np.clip((u[valid] @ a) / (un[valid] * an), -1.0, 1.0)
        counts.append(int(np.sum(np.arccos(cosang) < delta)))
    return tuple(counts)


def classify_case(points, feature, fixed_point, grasp, delta=DEFAULT_DELTA):
    """Decide the topology case from sector occupancy.

    Ties in either count pair mean the sectors cannot separate the
    configurations and raise AmbiguousCaseError.
    """
    n1, n2, n3, n4 = sector_counts(points, feature, fixed_point, grasp, delta)
    if n1 == n2 or n3 == n4:
        raise AmbiguousCaseError(
            f"sector counts tie (N1={n1}, N2={n2}, N3={n3}, N4={n4})")
    if n1 > n2:
        return 1 if n3 > n4 else 2
    return 3 if n3 > n4 else 4


def initialize_arc_length(feature, fixed_point, grasp, case):
    """Rod length from the initial feature and both rod ends.

    Uses the unsigned central angle between the end directions; the long
    cases take the complement to a full turn.  The cosine is normalized
    by the actual chord norms and clamped, tolerating 1e-6 of numeric
    overshoot beyond [-1, 1].
    """
    cf = np.asarray(fixed_point, dtype=float) - feature.center
    cg = np.asarray(grasp, dtype=float) - feature.center
    denom = np.linalg.norm(cf) * np.linalg.norm(cg)
    if denom < 1e-12:
        raise InconsistentGeometryError("rod end coincides with the arc center")
    cosang = float(cf @ cg) / denom
    if abs(cosang) > 1.0 + 1e-6:
        raise InconsistentGeometryError(
            f"end-direction cosine {cosang} outside [-1, 1]")
    ang = math.acos(min(1.0, max(-1.0, cosang)))
    if case in (1, 3):
        return feature.radius * ang
    return feature.radius * (2.0 * math.pi - ang)


def swept_angle(radius, length, case):
    """Signed swept angle of the rod for the given case.

    Positive cases (1, 2) run counterclockwise around the plane normal;
    the magnitude is length/radius for the short cases (1, 3) and its
    complement to a full turn for the long cases (2, 4).
    """
    if not radius > 0 or not length > 0:
        raise ValueError("radius and length must be positive")
    t = length / radius
    if t > 2.0 * math.pi:
        raise InconsistentGeometryError(
            f"arc angle {t} exceeds a full turn; length/radius inconsistent")
    mag = t if case in (1, 3) else 2.0 * math.pi - t
    if case in (1, 2):
        return mag
    if case in (3, 4):
        return -mag
    raise ValueError(f"case must be 1..4, got {case}")


def swept_angle_magnitude(radius, length, case):
    """Unsigned swept angle; this is the value the position constraint uses."""
    return abs(swept_angle(radius, length, case))


def init_topology(points, feature, fixed_point, grasp, delta=DEFAULT_DELTA):
    """Classify the case and freeze the topology record for a run."""
    case = classify_case(points, feature, fixed_point, grasp, delta)
    length = initialize_arc_length(feature, fixed_point, grasp, case)
    return ArcTopology(case, length, fixed_point, delta)


def check_case(topo, points, feature, grasp):
    """Re-run detection against a frozen topology; warn on any flip.

    Returns the detected case, or None when the counts tie.  The frozen
    record is never mutated: a transient flip mid-run is diagnostic, not
    actionable.
    """
    try:
        detected = classify_case(points, feature, topo.fixed_point, grasp,
                                 topo.delta)
    except AmbiguousCaseError:
        return None
    if detected != topo.case:
        warnings.warn(
            f"topology case flip detected: initialized {topo.case}, "
            f"now observing {detected}", stacklevel=2)
    return detected
