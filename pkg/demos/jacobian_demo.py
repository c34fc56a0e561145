"""Inspect the pose-shape Jacobian at random rod states.

For a few random consistent grasp states this script compares every
analytic constraint-Jacobian block against central finite differences,
then demonstrates the second-order consistency of the assembled 6x7
pose-shape map: stepping the feature along a feasible direction and the
pose along the Jacobian image keeps the grasp constraints satisfied to
quadratic order.
"""

import argparse
import math

import numpy as np

from arcservo import (RobotPose, feature_view, orientation_constraint,
                      orientation_jacobians, orientation_position_jacobian,
                      pose_shape_jacobian, position_constraint,
                      position_jacobians, pseudoinverse, random_plant)
from arcservo.cli import _fd_blocks


def constraint_norm(plant, topo, bundle, dy, scale):
    fv = feature_view(plant.feature.vector() + scale * dy)
    x = plant.pose.vector() + scale * (bundle.full @ dy)
    pose = RobotPose(x[:3], x[3:])
    return np.linalg.norm(np.concatenate([
        orientation_constraint(fv, pose, plant.cal),
        position_constraint(fv, pose, topo)]))


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--states", type=int, default=8)
    args = ap.parse_args()

    rng = np.random.default_rng(args.seed)
    print("analytic vs finite-difference, worst entry per block")
    print(f"{'state':>5} {'case':>4} {'orient/feat':>12} {'orient/pose':>12} "
          f"{'pos/feat':>12} {'pos/pose':>12}")
    for i in range(args.states):
        case = 1 + i % 4
        plant = random_plant(rng, case)
        blocks = _fd_blocks(plant, 0.2, 1e-6)
        print(f"{i:>5} {case:>4} "
              f"{blocks['orientation_feature'].max():>12.3e} "
              f"{blocks['orientation_pose'].max():>12.3e} "
              f"{blocks['position_feature'].max():>12.3e} "
              f"{blocks['position_pose'].max():>12.3e}")

    plant = random_plant(rng, 1)
    topo = plant.topology()
    f, p, c = plant.feature, plant.pose, plant.cal
    j1o, j2o = orientation_jacobians(f, p, c)
    j1p, j2p = position_jacobians(f, p, topo)
    a_mat = np.vstack([j1o, j1p])
    b_mat = np.zeros((9, 6))
    b_mat[:6, :3] = j2o
    b_mat[:6, 3:] = orientation_position_jacobian(f, p, c)
    b_mat[6:, 3:] = j2p
    bundle = pose_shape_jacobian(f, p, c, topo)
    dy = -pseudoinverse(a_mat) @ (b_mat @ rng.normal(size=6))
    dy /= np.linalg.norm(dy)

    print("\nconstraint norm after a coupled feature+pose step")
    print(f"{'step size':>10} {'|h|':>12} {'order':>7}")
    prev = None
    for scale in (1e-2, 5e-3, 2.5e-3, 1.25e-3, 6.25e-4):
        h = constraint_norm(plant, topo, bundle, dy, scale)
        order = "" if prev is None else f"{math.log(prev / h) / math.log(2):.3f}"
        print(f"{scale:>10.2e} {h:>12.3e} {order:>7}")
        prev = h


if __name__ == "__main__":
    main()
