#include "hetfuse/models.hpp"

#include "hetfuse/errors.hpp"

namespace hetfuse {

namespace {

Eigen::MatrixXd spd_inverse(const Eigen::MatrixXd& m, const char* what) {
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  if ((m - m.transpose()).cwiseAbs().maxCoeff() > 1e-9 * scale) {
    throw NotSpdError(std::string(what) + " is not symmetric");
  }
  Eigen::LLT<Eigen::MatrixXd> llt(m);
  if (llt.info() != Eigen::Success) {
    throw NotSpdError(std::string(what) + " is not positive definite");
  }
  Eigen::MatrixXd inv = llt.solve(Eigen::MatrixXd::Identity(m.rows(), m.cols()));
  return ((inv + inv.transpose()) * 0.5).eval();
}

// Information-form factor for the linear-Gaussian conditional
// x_next = A x_prev + b + w, w ~ N(0, W), over dims (prev, next).
Factor conditional_factor(const std::vector<DimKey>& prev_dims,
                          const std::vector<DimKey>& next_dims, const Eigen::MatrixXd& A,
                          const Eigen::VectorXd& b, const Eigen::MatrixXd& W,
                          const FactorId& id) {
  const Eigen::MatrixXd Winv = spd_inverse(W, "conditional noise covariance");
  const auto np = static_cast<Eigen::Index>(prev_dims.size());
  const auto nn = static_cast<Eigen::Index>(next_dims.size());
  Eigen::MatrixXd lam(np + nn, np + nn);
  lam.topLeftCorner(np, np) = A.transpose() * Winv * A;
  lam.topRightCorner(np, nn) = -A.transpose() * Winv;
  lam.bottomLeftCorner(nn, np) = -Winv * A;
  lam.bottomRightCorner(nn, nn) = Winv;
  Eigen::VectorXd eta(np + nn);
  eta.head(np) = -A.transpose() * Winv * b;
  eta.tail(nn) = Winv * b;

  std::vector<DimKey> dims = prev_dims;
  dims.insert(dims.end(), next_dims.begin(), next_dims.end());
  return Factor{id, CanonicalGaussian(std::move(dims), std::move(lam), std::move(eta))};
}

}  // namespace

TargetDynamics TargetDynamics::with_dt(double dt, double process_noise) {
  TargetDynamics d;
  d.dt = dt;
  d.F << 1, dt, 0, 0,
         0, 1, 0, 0,
         0, 0, 1, dt,
         0, 0, 0, 1;
  d.G << 0.5 * dt * dt, 0,
         dt, 0,
         0, 0.5 * dt * dt,
         0, dt;
  d.Q = process_noise * Eigen::Matrix4d::Identity();
  return d;
}

Factor dynamics_factor(const TargetDynamics& dyn, int target, int k, const Eigen::Vector2d& u,
                       const FactorId& id) {
  return conditional_factor(dims_of(VariableId::target_state(target, k)),
                            dims_of(VariableId::target_state(target, k + 1)), dyn.F, dyn.G * u,
                            dyn.Q, id);
}

Factor measurement_factor(const RelativePositionMeasurement& m, const FactorId& id) {
  const Eigen::Matrix2d Rinv = spd_inverse(m.R, "measurement covariance R");

  // Dims: pose (x, y), target (X, Y) -- components {0, 1} and {0, 2}.
  const VariableId pose = VariableId::robot_pose(m.robot, m.timestep);
  const VariableId targ = VariableId::target_state(m.target, m.timestep);
  std::vector<DimKey> dims = {{pose, 0}, {pose, 1}, {targ, 0}, {targ, 2}};

  Eigen::Matrix<double, 2, 4> H;
  H << 1, 0, -1, 0,
       0, 1, 0, -1;
  Eigen::MatrixXd lam = H.transpose() * Rinv * H;
  Eigen::VectorXd eta = H.transpose() * Rinv * m.y;
  return Factor{id, CanonicalGaussian(std::move(dims), std::move(lam), std::move(eta))};
}

Factor odometry_factor(int robot, int k, const OdometryReading& odo, const FactorId& id) {
  return conditional_factor(dims_of(VariableId::robot_pose(robot, k - 1)),
                            dims_of(VariableId::robot_pose(robot, k)),
                            Eigen::Matrix3d::Identity(), odo.delta, odo.cov, id);
}

Factor prior_factor(const VariableId& var, const Eigen::VectorXd& mean,
                    const Eigen::MatrixXd& cov, const FactorId& id) {
  return Factor{id, CanonicalGaussian::from_moments(mean, cov, dims_of(var))};
}

Factor landmark_factor(int robot, int k, const LandmarkSighting& s, const FactorId& id) {
  const Eigen::Matrix2d Rinv = spd_inverse(s.cov, "landmark sighting covariance");
  const VariableId pose = VariableId::robot_pose(robot, k);
  const VariableId lm = VariableId::landmark(robot, s.landmark);
  std::vector<DimKey> dims = {{pose, 0}, {pose, 1}, {lm, 0}, {lm, 1}};

  // rel = l - p + v: H = [-I2 | I2] on (pose xy, landmark).
  Eigen::Matrix<double, 2, 4> H;
  H << -1, 0, 1, 0,
       0, -1, 0, 1;
  Eigen::MatrixXd lam = H.transpose() * Rinv * H;
  Eigen::VectorXd eta = H.transpose() * Rinv * s.rel;
  return Factor{id, CanonicalGaussian(std::move(dims), std::move(lam), std::move(eta))};
}

}  // namespace hetfuse
