#pragma once

#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "hetfuse/factor_graph.hpp"

namespace hetfuse {

/// Linear target kinematics over state [X, Xdot, Y, Ydot]:
///   t_{k+1} = F t_k + G u_k + w_k,   w_k ~ N(0, Q).
/// F integrates velocity over dt, G injects a 2d acceleration input, and
/// the default Q is 0.08 * I.
struct TargetDynamics {
  double dt = 1.0;
  Eigen::Matrix4d F = Eigen::Matrix4d::Identity();
  Eigen::Matrix<double, 4, 2> G = Eigen::Matrix<double, 4, 2>::Zero();
  Eigen::Matrix4d Q = 0.08 * Eigen::Matrix4d::Identity();

  static TargetDynamics with_dt(double dt, double process_noise = 0.08);
};

/// One relative position measurement y = [X_robot - X_target, Y_robot -
/// Y_target] + v, v ~ N(0, R), with the association given.
struct RelativePositionMeasurement {
  int robot = 0;
  int target = 0;
  int timestep = 0;
  Eigen::Vector2d y = Eigen::Vector2d::Zero();
  Eigen::Matrix2d R = 0.25 * Eigen::Matrix2d::Identity();
};

/// Gaussian factor over (t_k, t_{k+1}) whose conditional is
/// N(t_{k+1}; F t_k + G u, Q).
Factor dynamics_factor(const TargetDynamics& dyn, int target, int k, const Eigen::Vector2d& u,
                       const FactorId& id);

/// Rank-2 factor over the position dims of RobotPose(m.robot, m.timestep)
/// and TargetState(m.target, m.timestep): H = [I2 | -I2] with information
/// H' R^-1 H. Heading and velocity dims are untouched. Throws NotSpdError
/// for a non-SPD R.
Factor measurement_factor(const RelativePositionMeasurement& m, const FactorId& id);

// --- Sensor readings produced by the world and consumed by the SLAM
// engines and agents. Poses are (x, y, heading) with heading treated as a
// linear coordinate.

struct OdometryReading {
  Eigen::Vector3d delta = Eigen::Vector3d::Zero();
  Eigen::Matrix3d cov = Eigen::Matrix3d::Identity();
};

struct LandmarkSighting {
  int landmark = 0;
  Eigen::Vector2d rel = Eigen::Vector2d::Zero();  // landmark - robot position
  Eigen::Matrix2d cov = Eigen::Matrix2d::Identity();
};

/// Absolute pose reading (GPS / scheduled loop-closure stand-in).
struct PoseFix {
  Eigen::Vector3d pose = Eigen::Vector3d::Zero();
  Eigen::Matrix3d cov = Eigen::Matrix3d::Identity();
};

/// Factor x_k - x_{k-1} = delta + noise over two consecutive poses.
Factor odometry_factor(int robot, int k, const OdometryReading& odo, const FactorId& id);

/// Prior-type factor pinning a single variable.
Factor prior_factor(const VariableId& var, const Eigen::VectorXd& mean,
                    const Eigen::MatrixXd& cov, const FactorId& id);

/// Factor over (pose position, landmark) from a relative sighting
/// rel = landmark - robot position + noise.
Factor landmark_factor(int robot, int k, const LandmarkSighting& s, const FactorId& id);

}  // namespace hetfuse
