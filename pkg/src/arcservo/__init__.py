"""Model-free shape servoing of an elastic rod via a spatial-arc feature.

The rod's centerline is described by the 7-vector feature
y = [radius, center, plane normal]; a least-squares pipeline fits y to
noisy 3D clouds, an implicit-function construction differentiates the
grasp constraints into a 6x7 pose-shape Jacobian, and a proportional
controller drives a simulated 6-DOF end-effector until the fitted
feature matches a target.
"""

from .config import RunConfig, load_config, parse_config, serialize_config
from .control import (SERVO_CSV_HEADER, ErrorReport, ServoResult, ServoTarget,
                      control_step, default_estimator, integrate_pose,
                      run_servo_loop, scenario_from_config, shape_errors,
                      write_servo_csv)
from .errors import (AmbiguousCaseError, ArcServoError,
                     DegenerateGeometryError, InconsistentGeometryError,
                     InputError, NumericalFaultError,
                     SingularConfigurationError)
from .fitting import (FIT_CSV_HEADER, ArcEstimator, FitResult, arc_residuals,
                      denoise, downsample, fit_arc, fit_plane, load_cloud,
                      orient_normal, residual_stats, save_cloud,
                      write_fit_csv, write_residuals_csv)
from .geometry import (RobotPose, ShapeFeature, body_frame, pseudoinverse,
                       unit, wrap_angle, zyz_angles, zyz_rotation)
from .jacobians import (GraspCalibration, JacobianBundle, fd_jacobian,
                        feature_view, init_calibration,
                        orientation_constraint, orientation_jacobians,
                        orientation_position_jacobian, pose_shape_jacobian,
                        position_constraint, position_jacobians)
from .simulator import (CloudNoiseModel, RodPlant, case_from_sweep,
                        make_plant, random_plant, rod_from_pose, sample_cloud,
                        solve_chord_arc)
from .topology import (ArcTopology, check_case, classify_case,
                       init_topology, initialize_arc_length, sector_counts,
                       swept_angle, swept_angle_magnitude)

__version__ = "0.1.0"

__all__ = [
    "AmbiguousCaseError", "ArcEstimator", "ArcServoError", "ArcTopology",
    "CloudNoiseModel", "DegenerateGeometryError", "ErrorReport",
    "FIT_CSV_HEADER", "FitResult", "GraspCalibration",
    "InconsistentGeometryError", "InputError", "JacobianBundle",
    "NumericalFaultError", "RobotPose", "RodPlant", "RunConfig",
    "SERVO_CSV_HEADER", "ServoResult", "ServoTarget", "ShapeFeature",
    "SingularConfigurationError", "arc_residuals", "body_frame",
    "case_from_sweep", "check_case", "classify_case", "control_step",
    "default_estimator", "denoise", "downsample", "fd_jacobian",
    "feature_view", "fit_arc", "fit_plane", "init_calibration",
    "init_topology", "initialize_arc_length", "integrate_pose", "load_cloud",
    "load_config", "make_plant", "orient_normal", "orientation_constraint",
    "orientation_jacobians", "orientation_position_jacobian", "parse_config",
    "pose_shape_jacobian", "position_constraint", "position_jacobians",
    "pseudoinverse", "random_plant", "residual_stats", "rod_from_pose",
    "run_servo_loop", "sample_cloud", "save_cloud", "scenario_from_config",
    "sector_counts", "serialize_config", "shape_errors", "solve_chord_arc",
    "swept_angle", "swept_angle_magnitude", "unit", "wrap_angle",
    "write_fit_csv", "write_residuals_csv", "write_servo_csv", "zyz_angles",
    "zyz_rotation",
]
