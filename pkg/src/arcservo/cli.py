"""Command-line harness: three experiment families behind one entry point.

  arcservo fit <cloud>       fit the arc feature to a cloud file
  arcservo jacobian-check    analytic-vs-finite-difference Jacobian audit
  arcservo servo             closed-loop shape-servo run

Every command reads the same flat key=value config, writes CSVs into
--out, and prints a one-line summary.  Exit codes: 0 success, 1 input
error, 2 numerical fault.  Output CSVs are byte-identical across reruns
with the same seed; wall-clock timings go to stdout only.
"""

import argparse
import math
import os
import statistics
import sys
import time

import numpy as np

from .config import RunConfig, load_config
from .control import (default_estimator, run_servo_loop, scenario_from_config,
                      write_servo_csv)
from .csvio import fmt, write_csv
from .errors import (AmbiguousCaseError, DegenerateGeometryError,
                     InconsistentGeometryError, InputError,
                     NumericalFaultError, SingularConfigurationError)
from .fitting import load_cloud, residual_stats, write_fit_csv, write_residuals_csv
from .geometry import RobotPose
from .jacobians import (fd_jacobian, feature_view, orientation_constraint,
                        orientation_jacobians, pose_shape_jacobian,
                        position_constraint, position_jacobians)
from .simulator import make_plant, random_plant

POSE_LABELS = ("x1", "x2", "x3", "x4", "x5", "x6")

#: scripted rate amplitudes for the sign-agreement trajectory; the last
#: linear axis is deliberately near-still to exercise the small-motion
#: exclusion
TRAJ_AMPLITUDE = np.array([0.25, 0.18, 0.2, 0.04, 0.03, 0.002])
TRAJ_PHASE = np.array([0.0, 1.1, 2.3, 0.7, 1.9, 2.9])


class _Parser(argparse.ArgumentParser):
    """argparse maps usage errors to exit code 2; we reserve 2 for
    numerical faults, so usage errors are rethrown as input errors."""

    def error(self, message):
        raise InputError(message)


def _add_common(p):
    p.add_argument("--config", metavar="FILE",
                   help="run configuration, one key=value per line")
    p.add_argument("--seed", type=int, metavar="N",
                   help="override the config seed")
    p.add_argument("--out", default="out", metavar="DIR",
                   help="output directory (default: out)")


def build_parser():
    parser = _Parser(prog="arcservo",
                     description="arc-feature shape servoing toolkit")
    sub = parser.add_subparsers(dest="command", required=True)
    p_fit = sub.add_parser("fit", help="fit the arc feature to a cloud file")
    p_fit.add_argument("cloud", help="cloud file: one 'x y z' row per point")
    _add_common(p_fit)
    p_fit.set_defaults(func=cmd_fit)
    p_jac = sub.add_parser("jacobian-check",
                           help="audit analytic Jacobians against finite "
                                "differences and trajectory signs")
    _add_common(p_jac)
    p_jac.set_defaults(func=cmd_jacobian_check)
    p_servo = sub.add_parser("servo", help="run the closed servo loop")
    _add_common(p_servo)
    p_servo.set_defaults(func=cmd_servo)
    return parser


def _load_cfg(args):
    cfg = load_config(args.config) if args.config else RunConfig()
    if args.seed is not None:
        cfg.seed = args.seed
    return cfg


def cmd_fit(args):
    cfg = _load_cfg(args)
    points = load_cloud(args.cloud)
    estimator = default_estimator(cfg.downsample_factor, cfg.denoise_k,
                                  cfg.denoise_sigma)
    fit = estimator(points)
    os.makedirs(args.out, exist_ok=True)
    write_fit_csv(os.path.join(args.out, "fit.csv"), fit)
    write_residuals_csv(os.path.join(args.out, "residuals.csv"), fit.residuals)
    stats = residual_stats(fit.residuals)
    times = []
    for _ in range(50):
        t0 = time.perf_counter()
        estimator(points)
        times.append((time.perf_counter() - t0) * 1000.0)
    f = fit.feature
    print(f"fit: r={f.radius:.6f} center=({f.center[0]:.6f}, "
          f"{f.center[1]:.6f}, {f.center[2]:.6f}) normal=({f.normal[0]:.6f}, "
          f"{f.normal[1]:.6f}, {f.normal[2]:.6f}) points={fit.n_points}")
    print(f"residuals: mean={stats.mean:.6e} var={stats.variance:.6e} "
          f"three_sigma_ok={stats.three_sigma_ok}")
    print(f"timing: median {statistics.median(times):.3f} ms over 50 fits")
    return 0


def _fd_blocks(plant, delta, step):
    """Entrywise |analytic - finite difference| for all four Jacobian
    blocks at one plant state."""
    feature, pose, cal = plant.feature, plant.pose, plant.cal
    topo = plant.topology(delta)
    j1o, j2o = orientation_jacobians(feature, pose, cal)
    j1p, j2p = position_jacobians(feature, pose, topo)
    y0 = feature.vector()
    fd1o = fd_jacobian(lambda y: orientation_constraint(feature_view(y), pose, cal),
                       y0, step)
    fd2o = fd_jacobian(lambda e: orientation_constraint(
        feature, RobotPose(e, pose.position), cal), pose.euler, step)
    fd1p = fd_jacobian(lambda y: position_constraint(feature_view(y), pose, topo),
                       y0, step)
    fd2p = fd_jacobian(lambda p: position_constraint(
        feature, RobotPose(pose.euler, p), topo), pose.position, step)
    return {
        "orientation_feature": np.abs(j1o - fd1o),
        "orientation_pose": np.abs(j2o - fd2o),
        "position_feature": np.abs(j1p - fd1p),
        "position_pose": np.abs(j2p - fd2p),
    }


def _normalize_columns(a):
    """Rescale each column to [-1, 1] over its own span (flat columns to 0)."""
    lo, hi = a.min(axis=0), a.max(axis=0)
    span = hi - lo
    out = np.zeros_like(a)
    nz = span > 0
    out[:, nz] = 2.0 * (a[:, nz] - lo[nz]) / span[nz] - 1.0
    return out


def _run_trajectory(cfg):
    """Drive the scripted smooth trajectory; compare actual pose
    increments against Jacobian-predicted ones.

    Returns (trajectory rows, agreement rows): the trajectory holds the
    actual and predicted pose histories column-normalized to [-1, 1];
    the agreement table scores per-component sign matches, marking
    components whose motion stays under 10% of their block's largest
    range as excluded.
    """
    plant = make_plant(cfg.fixed_point, cfg.rod_length, cfg.init_sweep,
                       cfg.init_normal, cfg.init_radial_dir, cfg.init_euler,
                       cfg.plant_mode)
    horizon = cfg.traj_steps * cfg.dt
    omega = 4.0 * math.pi / horizon
    poses = [plant.pose.vector()]
    predicted = []
    for k in range(cfg.traj_steps):
        rate = TRAJ_AMPLITUDE * np.sin(omega * k * cfg.dt + TRAJ_PHASE)
        bundle = pose_shape_jacobian(plant.feature, plant.pose, plant.cal,
                                     plant.topology(cfg.delta),
                                     cfg.coupled_jacobian)
        nxt = plant.step(rate, cfg.dt)
        dy = nxt.feature.vector() - plant.feature.vector()
        predicted.append(bundle.full @ dy)
        poses.append(nxt.pose.vector())
        plant = nxt
    actual = np.array(poses)
    d_actual = np.diff(actual, axis=0)
    d_pred = np.array(predicted)
    pred_path = actual[0] + np.vstack([np.zeros(6), np.cumsum(d_pred, axis=0)])
    act_n = _normalize_columns(actual)
    pred_n = _normalize_columns(pred_path)
    traj_rows = [[k, *act_n[k], *pred_n[k]] for k in range(len(actual))]
    ranges = actual.max(axis=0) - actual.min(axis=0)
    agree_rows = []
    for i, label in enumerate(POSE_LABELS):
        block_max = ranges[:3].max() if i < 3 else ranges[3:].max()
        included = ranges[i] >= 0.1 * block_max
        moving = np.abs(d_actual[:, i]) > 1e-12
        if moving.any():
            agreement = float(np.mean(
                np.sign(d_actual[moving, i]) == np.sign(d_pred[moving, i])))
        else:
            agreement = float("nan")
        agree_rows.append([label, ranges[i], int(included), agreement])
    return traj_rows, agree_rows


def cmd_jacobian_check(args):
    cfg = _load_cfg(args)
    rng = np.random.default_rng(cfg.seed)
    plants = [random_plant(rng, 1 + i % 4) for i in range(cfg.check_states)]
    plants.append(make_plant(cfg.fixed_point, cfg.rod_length, cfg.init_sweep,
                             cfg.init_normal, cfg.init_radial_dir,
                             cfg.init_euler, cfg.plant_mode))
    worst = {
        "orientation_feature": np.zeros((6, 7)),
        "orientation_pose": np.zeros((6, 3)),
        "position_feature": np.zeros((3, 7)),
        "position_pose": np.zeros((3, 3)),
    }
    checked = skipped = 0
    for plant in plants:
        try:
            blocks = _fd_blocks(plant, cfg.delta, cfg.fd_step)
        except SingularConfigurationError:
            skipped += 1
            continue
        for name, err in blocks.items():
            worst[name] = np.maximum(worst[name], err)
        checked += 1
    os.makedirs(args.out, exist_ok=True)
    rows = [[name, i, j, mat[i, j]]
            for name, mat in worst.items()
            for i in range(mat.shape[0]) for j in range(mat.shape[1])]
    write_csv(os.path.join(args.out, "jacobian_fd.csv"),
              ["block", "row", "col", "max_abs_err"], rows)
    overall = max(mat.max() for mat in worst.values()) if checked else float("nan")
    print(f"jacobian-check: {checked} states checked, {skipped} skipped "
          f"(singular), max entry error {overall:.3e}")
    try:
        traj_rows, agree_rows = _run_trajectory(cfg)
    except (SingularConfigurationError, InconsistentGeometryError,
            DegenerateGeometryError) as exc:
        print(f"trajectory: skipped ({exc})")
        return 0
    header = (["step"] + [f"{c}_act" for c in POSE_LABELS]
              + [f"{c}_pred" for c in POSE_LABELS])
    write_csv(os.path.join(args.out, "trajectory.csv"), header, traj_rows)
    write_csv(os.path.join(args.out, "sign_agreement.csv"),
              ["component", "range", "included", "agreement"], agree_rows)
    scored = [f"{r[0]}={r[3]:.3f}" for r in agree_rows if r[2]]
    print("sign agreement (moving components): " + " ".join(scored))
    return 0


def cmd_servo(args):
    cfg = _load_cfg(args)
    plant, target, estimator, noise, rng = scenario_from_config(cfg)
    result = run_servo_loop(
        plant, target, gain=cfg.gain, dt=cfg.dt, max_steps=cfg.max_steps,
        tol_e_norm=cfg.tol_e_norm, plateau_window=cfg.plateau_window,
        limit_angular=cfg.limit_angular, limit_linear=cfg.limit_linear,
        estimator=estimator, noise=noise, rng=rng,
        coupled=cfg.coupled_jacobian, delta=cfg.delta)
    os.makedirs(args.out, exist_ok=True)
    write_servo_csv(os.path.join(args.out, "servo_log.csv"), result)
    summary = result.summary
    with open(os.path.join(args.out, "summary.txt"), "w",
              encoding="utf-8") as fh:
        for key, val in summary.items():
            text = fmt(val) if isinstance(val, float) else str(val)
            fh.write(f"{key}={text}\n")
    print(f"servo: {summary['reason']} after {summary['steps']} steps, "
          f"e_norm {summary['initial_e_norm']:.3e} -> "
          f"{summary['final_e_norm']:.3e}")
    return 2 if summary["fault"] else 0


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (DegenerateGeometryError, AmbiguousCaseError,
            InconsistentGeometryError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (NumericalFaultError, SingularConfigurationError) as exc:
        print(f"numerical fault: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
