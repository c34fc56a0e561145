"""Arc-feature identification from unorganized point clouds.

Pipeline: optional decimation and statistical outlier removal, then a
two-stage linear least-squares fit (PCA plane, algebraic circle in the
plane), producing the 7-parameter arc feature plus per-point residuals.
"""

import math
from dataclasses import dataclass

import numpy as np
from scipy.spatial import cKDTree

from .csvio import write_csv
from .errors import DegenerateGeometryError, InputError
from .geometry import ShapeFeature, unit

FIT_CSV_HEADER = ["r", "cx", "cy", "cz", "nx", "ny", "nz",
                  "res_mean", "res_var", "n_points"]


@dataclass(frozen=True)
class FitResult:
    """Fitted feature with residual diagnostics.

    inlier_count is the number of points whose residual lies within
    three standard deviations of the residual mean.
    """

    feature: ShapeFeature
    residuals: np.ndarray
    res_mean: float
    res_var: float
    inlier_count: int

    @property
    def n_points(self):
        return len(self.residuals)


@dataclass(frozen=True)
class ResidualStats:
    mean: float
    variance: float          # population variance (N divisor)
    three_sigma_ok: bool


def load_cloud(path):
    """Read a cloud text file: one 'x y z' triple per line, '#' comments."""
    try:
        pts = np.loadtxt(path, comments="#", dtype=float, ndmin=2)
    except (OSError, ValueError) as exc:
        raise InputError(f"cannot read cloud file {path}: {exc}") from exc
    if pts.size == 0:
        return np.empty((0, 3))
    if pts.shape[1] != 3:
        raise InputError(f"cloud file {path} must have 3 columns, got {pts.shape[1]}")
    return pts


def save_cloud(path, points, comment=None):
    with open(path, "w") as f:
        if comment:
            f.write(f"# {comment}\n")
        for p in np.asarray(points, dtype=float):
            f.write(f"{float(p[0])!r} {float(p[1])!r} {float(p[2])!r}\n")


def downsample(points, factor):
    """Keep every factor-th point (order preserved), so ceil(N/factor) remain."""
    if not (isinstance(factor, (int, np.integer)) and factor >= 1):
        raise ValueError(f"factor must be an integer >= 1, got {factor}")
    return np.asarray(points, dtype=float)[::factor]


def denoise(points, k=8, sigma_mult=2.0):
    """Statistical outlier removal.

    Drops points whose mean distance to their k nearest neighbors exceeds
    the global mean of that statistic by sigma_mult standard deviations.
    Returns (filtered points, skipped) where skipped is True when N <= k
    and the cloud is passed through unchanged.
    """
    points = np.asarray(points, dtype=float)
    n = len(points)
    if n <= k:
        return points, True
    dists, _ = cKDTree(points).query(points, k=k + 1)
    stat = dists[:, 1:].mean(axis=1)   # column 0 is the point itself
    keep = stat <= stat.mean() + sigma_mult * stat.std()
    return points[keep], False


def fit_plane(points):
    """Least-squares plane through a cloud.

    Returns (centroid, normal) where the normal is the eigenvector of the
    point covariance with smallest eigenvalue (total-least-squares plane).
    """
    points = np.asarray(points, dtype=float)
    if len(points) < 3:
        raise DegenerateGeometryError("plane fit needs at least 3 points")
    centroid = points.mean(axis=0)
    q = points - centroid
    evals, evecs = np.linalg.eigh(q.T @ q / len(points))
    if evals[0] < 1e-12 and evals[1] < 1e-12:
        raise DegenerateGeometryError("points are collinear; plane undefined")
    return centroid, evecs[:, 0]


def orient_normal(n, ref):
    """Fix the hemisphere: return n if n.ref >= 0, else -n (ties keep n)."""
    n = np.asarray(n, dtype=float)
    return n if float(n @ ref) >= 0.0 else -n


def _kasa_circle(u, v):
    # linearized circle equation: 2*uc*u + 2*vc*v + (r^2 - uc^2 - vc^2) = u^2 + v^2
    A = np.column_stack([u, v, np.ones_like(u)])
    b = u * u + v * v
    sol, _, rank, _ = np.linalg.lstsq(A, b, rcond=None)
    if rank < 3:
        raise DegenerateGeometryError(
            "projected points are collinear; circle fit is singular")
    uc, vc = 0.5 * sol[0], 0.5 * sol[1]
    r_sq = sol[2] + uc * uc + vc * vc
    if r_sq <= 0:
        raise DegenerateGeometryError("circle fit produced a non-positive radius")
    return uc, vc, math.sqrt(r_sq)


def fit_arc(points, hemisphere_ref):
    """Fit the spatial-arc feature to a cloud.

    Plane first, then the algebraic circle fit on the in-plane
    projections; the circle center is lifted back to 3D and the plane
    normal sign is fixed against hemisphere_ref.
    """
    points = np.asarray(points, dtype=float)
    if len(points) < 4:
        raise DegenerateGeometryError("arc fit needs at least 4 points")
    centroid, normal = fit_plane(points)
    normal = orient_normal(normal, hemisphere_ref)
    # in-plane orthonormal basis
    seed = np.array([1.0, 0.0, 0.0]) if abs(normal[0]) < 0.9 else np.array([0.0, 1.0, 0.0])
    e1 = unit(np.cross(normal, seed))
    e2 = np.cross(normal, e1)
    q = points - centroid
    uc, vc, radius = _kasa_circle(q @ e1, q @ e2)
    center = centroid + uc * e1 + vc * e2
    feature = ShapeFeature(radius, center, normal)
    res = arc_residuals(points, feature)
    stats = residual_stats(res)
    sigma = math.sqrt(stats.variance)
    inliers = int(np.sum(np.abs(res - stats.mean) <= 3.0 * sigma))
    return FitResult(feature, res, stats.mean, stats.variance, inliers)


def arc_residuals(points, feature):
    """Per-point residual f1^2 + f2^2: squared plane offset plus squared
    in-plane radial offset, both in meters."""
    q = np.asarray(points, dtype=float) - feature.center
    f1 = q @ feature.normal
    radial = q - np.outer(f1, feature.normal)
    f2 = np.linalg.norm(radial, axis=1) - feature.radius
    return f1 * f1 + f2 * f2


def residual_stats(residuals):
    """Mean, population variance, and the three-sigma flag (every residual
    within [mean - 3 sigma, mean + 3 sigma])."""
    residuals = np.asarray(residuals, dtype=float)
    if residuals.size == 0:
        raise ValueError("residual list is empty")
    mean = float(residuals.mean())
    var = float(residuals.var())   # population variance
    ok = bool(np.all(np.abs(residuals - mean) <= 3.0 * math.sqrt(var)))
    return ResidualStats(mean, var, ok)


def write_fit_csv(path, fit):
    f = fit.feature
    row = [f.radius, *f.center, *f.normal, fit.res_mean, fit.res_var, fit.n_points]
    write_csv(path, FIT_CSV_HEADER, [row])


def write_residuals_csv(path, residuals):
    write_csv(path, ["index", "residual"],
              [(i, r) for i, r in enumerate(np.asarray(residuals, dtype=float))])


class ArcEstimator:
    """Stateful cloud-to-feature pipeline for the servo loop.

    Keeps the previously fitted normal as the hemisphere reference so the
    normal sign cannot flip between frames; the first frame uses the
    configured initial reference (world +z by default).
    """

    def __init__(self, downsample_factor=1, denoise_k=8, denoise_sigma=2.0,
                 initial_ref=(0.0, 0.0, 1.0)):
        self.downsample_factor = downsample_factor
        self.denoise_k = denoise_k
        self.denoise_sigma = denoise_sigma
        self.ref = np.asarray(initial_ref, dtype=float)

    def __call__(self, points):
        pts = downsample(points, self.downsample_factor)
        if self.denoise_k > 0:
            pts, _ = denoise(pts, self.denoise_k, self.denoise_sigma)
        fit = fit_arc(pts, self.ref)
        self.ref = fit.feature.normal
        return fit
