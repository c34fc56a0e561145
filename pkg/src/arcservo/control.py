"""Shape-error bookkeeping, the servo control law, and the closed loop.

The controller never models the rod: each cycle it takes the current
arc feature (fitted from a cloud or read off the plant), forms the
feature error against the target, maps it through the pose-shape
Jacobian to an end-effector rate, clamps that rate, and integrates.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from .csvio import fmt, write_csv
from .errors import NumericalFaultError
from .fitting import ArcEstimator
from .geometry import RobotPose, unit
from .jacobians import (orientation_constraint, pose_shape_jacobian,
                        position_constraint)
from .simulator import CloudNoiseModel, make_plant, rod_from_pose
from .topology import check_case, init_topology

SERVO_CSV_HEADER = [
    "step", "t", "x1", "x2", "x3", "x4", "x5", "x6",
    "r", "cx", "cy", "cz", "nx", "ny", "nz",
    "e_r", "e_n", "e_c", "e_cx", "e_cy", "e_cz", "e_norm",
    "res_mean", "res_var", "saturated", "fault",
]

#: relative improvement below which the plateau window declares a stall
PLATEAU_RTOL = 1e-3


@dataclass(frozen=True)
class ServoTarget:
    """Target arc feature plus an optional feedforward feature rate."""

    feature: object
    feedforward: np.ndarray = field(default_factory=lambda: np.zeros(7))

    def __post_init__(self):
        object.__setattr__(self, "feedforward",
                           np.asarray(self.feedforward, dtype=float))


@dataclass(frozen=True)
class ErrorReport:
    """Componentwise feature errors (signed where a sign is meaningful)."""

    radius_err: float
    normal_angle_err: float
    center_dist_err: float
    center_axis_errs: np.ndarray
    e_norm: float


def shape_errors(feature, target_feature):
    """Errors of a fitted feature against a target feature."""
    n1 = unit(np.asarray(feature.normal, dtype=float))
    n2 = unit(np.asarray(target_feature.normal, dtype=float))
    cosang = min(1.0, max(-1.0, float(n1 @ n2)))
    dcenter = feature.center - target_feature.center
    dy = feature.vector() - target_feature.vector()
    return ErrorReport(
        radius_err=float(feature.radius - target_feature.radius),
        normal_angle_err=math.acos(cosang),
        center_dist_err=float(np.linalg.norm(dcenter)),
        center_axis_errs=dcenter,
        e_norm=float(np.linalg.norm(dy)),
    )


def control_step(jacobian, feature, target, gain, limit_angular, limit_linear):
    """One proportional step: pose rate from the feature error.

    Returns (rate 6-vector, saturated flag).  The rate is clamped
    per component, angular entries against limit_angular and linear
    entries against limit_linear.  A non-finite rate (singular fit,
    blown-up Jacobian) raises NumericalFaultError before clamping can
    mask it.
    """
    err = feature.vector() - target.feature.vector()
    with np.errstate(invalid="ignore", over="ignore"):
        dx = np.asarray(jacobian, dtype=float) @ (target.feedforward
                                                  - gain * err)
    if not np.all(np.isfinite(dx)):
        raise NumericalFaultError("non-finite commanded rate")
    clamped = np.concatenate([
        np.clip(dx[:3], -limit_angular, limit_angular),
        np.clip(dx[3:], -limit_linear, limit_linear),
    ])
    saturated = bool(np.any(np.abs(clamped - dx) > 0))
    return clamped, saturated


def integrate_pose(pose, rate, dt):
    """Explicit Euler update of the pose; angles stay unwrapped."""
    rate = np.asarray(rate, dtype=float)
    return RobotPose(pose.euler + rate[:3] * dt, pose.position + rate[3:] * dt)


@dataclass
class ServoResult:
    """Per-step log rows (SERVO_CSV_HEADER order) and a run summary."""

    rows: list
    summary: dict
    plant: object


def run_servo_loop(plant, target, *, gain=0.5, dt=0.1, max_steps=500,
                   tol_e_norm=0.0, plateau_window=0, limit_angular=0.5,
                   limit_linear=0.2, estimator=None, noise=None, rng=None,
                   coupled=True, delta=0.2):
    """Drive the plant until the feature error norm drops below
    tol_e_norm, stalls over plateau_window steps, or max_steps is spent.

    With an estimator, each cycle observes a noisy cloud, fits the
    feature, and uses the fit for both the error and the Jacobian; the
    topology (case and rod length) is classified once from the first
    cloud and only re-checked (warning on mismatch) afterwards.  Without
    one, the plant's true feature is used and the residual columns are
    recorded as nan.
    """
    if estimator is not None and (noise is None or rng is None):
        raise ValueError("an estimator needs a noise model and an rng")
    rows = []
    history = []
    reason = "max_steps"
    converged = False
    fault = False
    topo = None
    for step in range(max_steps + 1):
        if estimator is not None:
            cloud = plant.observe(noise, rng)
            fit = estimator(cloud)
            feature = fit.feature
            res_mean, res_var = fit.res_mean, fit.res_var
            if topo is None:
                topo = init_topology(cloud, feature, plant.fixed_point,
                                     plant.pose.position, delta)
            else:
                check_case(topo, cloud, feature, plant.pose.position)
        else:
            feature = plant.feature
            res_mean = res_var = float("nan")
            if topo is None:
                topo = plant.topology(delta)
        report = shape_errors(feature, target.feature)
        history.append(report.e_norm)
        row = ([step, step * dt] + list(plant.pose.vector())
               + list(feature.vector())
               + [report.radius_err, report.normal_angle_err,
                  report.center_dist_err, *report.center_axis_errs,
                  report.e_norm, res_mean, res_var])
        if report.e_norm < tol_e_norm:
            rows.append(row + [0, 0])
            reason, converged = "tolerance", True
            break
        if plateau_window and len(history) > plateau_window:
            recent = min(history[-plateau_window:])
            before = min(history[:-plateau_window])
            if recent >= before * (1.0 - PLATEAU_RTOL):
                rows.append(row + [0, 0])
                reason = "plateau"
                break
        if step == max_steps:
            rows.append(row + [0, 0])
            break
        try:
            bundle = pose_shape_jacobian(feature, plant.pose, plant.cal,
                                         topo, coupled)
            rate, saturated = control_step(bundle.full, feature, target, gain,
                                           limit_angular, limit_linear)
        except NumericalFaultError:
            rows.append(row + [0, 1])
            reason, fault = "fault", True
            break
        rows.append(row + [int(saturated), 0])
        plant = plant.step(rate, dt)
    summary = {
        "converged": converged,
        "reason": reason,
        "steps": len(rows) - 1,
        "case": topo.case,
        "length": topo.length,
        "final_e_norm": history[-1],
        "initial_e_norm": history[0],
        "fault": fault,
    }
    if plant.mode == "rod_geometry":
        ho = orientation_constraint(plant.feature, plant.pose, plant.cal)
        hp = position_constraint(plant.feature, plant.pose, plant.topology(delta))
        summary["constraint_residual"] = float(
            np.linalg.norm(np.concatenate([ho, hp])))
    return ServoResult(rows, summary, plant)


def write_servo_csv(path, result):
    """Servo log CSV; the frozen topology rides along as a comment line."""
    comment = (f"case={result.summary['case']} "
               f"length={fmt(result.summary['length'])}")
    write_csv(path, SERVO_CSV_HEADER, result.rows, [comment])


def default_estimator(downsample_factor=1, denoise_k=8, denoise_sigma=2.0,
                      initial_ref=(0.0, 0.0, 1.0)):
    """ArcEstimator wired with the standard preprocessing defaults."""
    return ArcEstimator(downsample_factor=downsample_factor,
                        denoise_k=denoise_k, denoise_sigma=denoise_sigma,
                        initial_ref=initial_ref)


def scenario_from_config(cfg):
    """Plant, target, estimator, noise model, and rng for one run.

    The target feature is generated by displacing the initial pose by
    the configured pose offset and reading the rod that holds the
    displaced pose, so it is reachable by construction.
    """
    plant = make_plant(cfg.fixed_point, cfg.rod_length, cfg.init_sweep,
                       cfg.init_normal, cfg.init_radial_dir, cfg.init_euler,
                       cfg.plant_mode)
    goal = RobotPose(plant.pose.euler + cfg.target_d_euler,
                     plant.pose.position + cfg.target_d_position)
    goal_feature, _ = rod_from_pose(goal, plant.fixed_point, plant.length,
                                    plant.cal)
    target = ServoTarget(goal_feature)
    noise = CloudNoiseModel(cfg.noise_sigma, cfg.cloud_points, cfg.radial_bias)
    rng = np.random.default_rng(cfg.seed)
    estimator = (default_estimator(cfg.downsample_factor, cfg.denoise_k,
                                   cfg.denoise_sigma,
                                   initial_ref=plant.feature.normal)
                 if cfg.estimator else None)
    return plant, target, estimator, noise, rng
