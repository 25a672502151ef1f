#pragma once

#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "hetfuse/dims.hpp"

namespace hetfuse {

/// Gaussian density in information (canonical) form over an ordered set of
/// scalar dimensions: parameters (Lambda, eta) with Lambda = Sigma^-1 and
/// eta = Lambda * mu. Products of densities are parameter sums, which is
/// what makes this the working representation for factors, marginals,
/// fusion products and channel-filter divisions.
///
/// Dims are stored in canonical sorted order; constructors accept any
/// order and permute. Objects are immutable after construction and all
/// operations are pure. Lambda is kept symmetric by symmetrization after
/// every operation. Indefinite objects (channel-filter quotients, flat
/// priors) are legal; only to_moments() demands a proper density.
class CanonicalGaussian {
 public:
  CanonicalGaussian() = default;

  /// Takes dims in any order with matching Lambda/eta rows; permutes to
  /// canonical order. Throws DimensionError on size mismatch or repeated
  /// dims, and rejects grossly asymmetric Lambda.
  CanonicalGaussian(std::vector<DimKey> dims, Eigen::MatrixXd lambda, Eigen::VectorXd eta);

  /// Zero-information (flat) density over the given dims.
  static CanonicalGaussian flat(std::vector<DimKey> dims);

  /// Moment form -> canonical: Lambda = cov^-1, eta = Lambda * mean.
  /// Throws NotSpdError unless covariance is symmetric positive definite.
  static CanonicalGaussian from_moments(const Eigen::VectorXd& mean,
                                        const Eigen::MatrixXd& covariance,
                                        std::vector<DimKey> dims);

  /// Canonical -> moment form. Throws ImproperDensityError unless Lambda
  /// is positive definite.
  std::pair<Eigen::VectorXd, Eigen::MatrixXd> to_moments() const;

  const std::vector<DimKey>& dims() const { return dims_; }
  const Eigen::MatrixXd& info_matrix() const { return lambda_; }
  const Eigen::VectorXd& info_vector() const { return eta_; }
  int size() const { return static_cast<int>(dims_.size()); }
  bool empty() const { return dims_.empty(); }

  bool has_dim(const DimKey& d) const;
  /// Index of d in dims(); -1 if absent.
  int dim_index(const DimKey& d) const;

  /// Proper-density flag: smallest eigenvalue of Lambda > -tol. Flat and
  /// positive semidefinite objects count as proper; CF quotients may not.
  bool is_proper(double tol = 1e-10) const;
  bool is_flat(double tol = 0.0) const;

  /// Same density over a superset of dims (zero information added).
  CanonicalGaussian pad_to(const std::vector<DimKey>& superset) const;
  /// log p(x) up to the normalization constant: -x'Lx/2 + eta'x.
  double log_density_unnormalized(const Eigen::VectorXd& x) const;

  /// Schur-complement marginal onto `keep` (subset of dims). Throws
  /// UnobservableEliminationError when the eliminated block is singular
  /// or indefinite (a flat direction would be integrated over).
  CanonicalGaussian marginalize(const std::vector<DimKey>& keep) const;

  /// Conditions on fixed dims taking the given values (ordered to match
  /// the sorted `fixed` list). Result is over dims \ fixed.
  CanonicalGaussian condition(const std::vector<DimKey>& fixed,
                              const Eigen::VectorXd& values) const;

  nlohmann::json to_json() const;
  static CanonicalGaussian from_json(const nlohmann::json& j);

 private:
  std::vector<DimKey> dims_;  // sorted canonically
  Eigen::MatrixXd lambda_;
  Eigen::VectorXd eta_;
};

/// Exact density product: parameters added on the union of dims.
CanonicalGaussian multiply(const CanonicalGaussian& a, const CanonicalGaussian& b);

/// Density quotient a / b; requires dims(b) to be a subset of dims(a).
/// The result may be improper, which is permitted.
CanonicalGaussian divide(const CanonicalGaussian& a, const CanonicalGaussian& b);

/// Largest absolute parameter difference (Lambda and eta entries).
/// Requires identical dim sets.
double max_param_diff(const CanonicalGaussian& a, const CanonicalGaussian& b);

/// max_param_diff scaled by the largest parameter magnitude (floored at 1).
double rel_param_diff(const CanonicalGaussian& a, const CanonicalGaussian& b);

}  // namespace hetfuse
