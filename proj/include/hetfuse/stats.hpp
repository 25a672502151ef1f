#pragma once

#include <Eigen/Cholesky>
#include <Eigen/Core>

namespace hetfuse {

/// Normalized estimation error squared: e' P^-1 e.
inline double nees(const Eigen::VectorXd& error, const Eigen::MatrixXd& cov) {
  return error.dot(cov.ldlt().solve(error));
}

inline double rms(const Eigen::VectorXd& x) {
  if (x.size() == 0) return 0.0;
  return std::sqrt(x.squaredNorm() / static_cast<double>(x.size()));
}

/// Inverse CDF of the chi-square distribution with `dof` degrees of
/// freedom.
double chi_squared_quantile(double p, double dof);

/// Two-sided bounds for the run-averaged NEES of a consistent dim-`dof`
/// estimator over n_runs Monte-Carlo runs:
/// [chi2inv(alpha/2, n*dof), chi2inv(1 - alpha/2, n*dof)] / n.
struct NeesBounds {
  double lower = 0.0;
  double upper = 0.0;
};
NeesBounds average_nees_bounds(int n_runs, int dof, double alpha = 0.05);

}  // namespace hetfuse
