#include "hetfuse/canonical.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <Eigen/Eigenvalues>

#include "hetfuse/errors.hpp"

namespace hetfuse {

namespace {

void symmetrize(Eigen::MatrixXd& m) {
  m = ((m + m.transpose()) * 0.5).eval();
}

// Positions of `sub` dims inside `sup` (both sorted); throws if not a subset.
std::vector<int> subset_indices(const std::vector<DimKey>& sub, const std::vector<DimKey>& sup,
                                const char* what) {
  std::vector<int> idx(sub.size());
  std::size_t j = 0;
  for (std::size_t i = 0; i < sub.size(); ++i) {
    while (j < sup.size() && sup[j] < sub[i]) ++j;
    if (j == sup.size() || !(sup[j] == sub[i])) {
      throw DimensionError(std::string(what) + ": dim " + sub[i].str() + " not present");
    }
    idx[i] = static_cast<int>(j++);
  }
  return idx;
}

}  // namespace

void to_json(nlohmann::json& j, const VariableId& v) {
  j = nlohmann::json{{"kind", to_string(v.kind)}, {"owner", v.owner}, {"index", v.index}};
}

void from_json(const nlohmann::json& j, VariableId& v) {
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "pose") {
    v.kind = VarKind::RobotPose;
  } else if (kind == "landmark") {
    v.kind = VarKind::Landmark;
  } else if (kind == "target") {
    v.kind = VarKind::TargetState;
  } else {
    throw ConfigError("unknown variable kind '" + kind + "'");
  }
  v.owner = j.at("owner").get<int32_t>();
  v.index = j.at("index").get<int32_t>();
}

void to_json(nlohmann::json& j, const DimKey& d) {
  j = nlohmann::json{{"var", d.owner}, {"comp", d.comp}};
}

void from_json(const nlohmann::json& j, DimKey& d) {
  d.owner = j.at("var").get<VariableId>();
  d.comp = j.at("comp").get<int32_t>();
}

std::vector<DimKey> dims_of(const VariableId& v) {
  std::vector<DimKey> out;
  out.reserve(v.dimension());
  for (int c = 0; c < v.dimension(); ++c) out.push_back({v, c});
  return out;
}

std::vector<DimKey> dims_of(const std::vector<VariableId>& vars) {
  std::vector<DimKey> out;
  for (const auto& v : vars) {
    for (int c = 0; c < v.dimension(); ++c) out.push_back({v, c});
  }
  std::sort(out.begin(), out.end());
  return out;
}

CanonicalGaussian::CanonicalGaussian(std::vector<DimKey> dims, Eigen::MatrixXd lambda,
                                     Eigen::VectorXd eta) {
  const auto n = static_cast<Eigen::Index>(dims.size());
  if (lambda.rows() != n || lambda.cols() != n || eta.size() != n) {
    throw DimensionError("canonical parameters do not match dim count " + std::to_string(n));
  }
  if (n > 0) {
    const double scale = std::max(1.0, lambda.cwiseAbs().maxCoeff());
    if ((lambda - lambda.transpose()).cwiseAbs().maxCoeff() > 1e-9 * scale) {
      throw DimensionError("information matrix is not symmetric");
    }
  }

  // Permute everything into canonical dim order.
  std::vector<int> perm(dims.size());
  std::iota(perm.begin(), perm.end(), 0);
  std::sort(perm.begin(), perm.end(), [&](int a, int b) { return dims[a] < dims[b]; });
  for (std::size_t i = 1; i < perm.size(); ++i) {
    if (dims[perm[i - 1]] == dims[perm[i]]) {
      throw DimensionError("repeated dim " + dims[perm[i]].str());
    }
  }

  dims_.resize(dims.size());
  lambda_.resize(n, n);
  eta_.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    dims_[i] = dims[perm[i]];
    eta_(i) = eta(perm[i]);
    for (Eigen::Index j = 0; j < n; ++j) lambda_(i, j) = lambda(perm[i], perm[j]);
  }
  symmetrize(lambda_);
}

CanonicalGaussian CanonicalGaussian::flat(std::vector<DimKey> dims) {
  const auto n = static_cast<Eigen::Index>(dims.size());
  return CanonicalGaussian(std::move(dims), Eigen::MatrixXd::Zero(n, n),
                           Eigen::VectorXd::Zero(n));
}

CanonicalGaussian CanonicalGaussian::from_moments(const Eigen::VectorXd& mean,
                                                  const Eigen::MatrixXd& covariance,
                                                  std::vector<DimKey> dims) {
  const auto n = static_cast<Eigen::Index>(dims.size());
  if (mean.size() != n || covariance.rows() != n || covariance.cols() != n) {
    throw DimensionError("moment parameters do not match dim count");
  }
  if (n == 0) return CanonicalGaussian();
  const double scale = std::max(1.0, covariance.cwiseAbs().maxCoeff());
  if ((covariance - covariance.transpose()).cwiseAbs().maxCoeff() > 1e-9 * scale) {
    throw NotSpdError("covariance is not symmetric");
  }
  Eigen::LLT<Eigen::MatrixXd> llt(covariance);
  if (n > 0 && llt.info() != Eigen::Success) {
    throw NotSpdError("covariance is not positive definite");
  }
  Eigen::MatrixXd lambda = llt.solve(Eigen::MatrixXd::Identity(n, n));
  symmetrize(lambda);
  return CanonicalGaussian(std::move(dims), lambda, lambda * mean);
}

std::pair<Eigen::VectorXd, Eigen::MatrixXd> CanonicalGaussian::to_moments() const {
  const Eigen::Index n = lambda_.rows();
  Eigen::LLT<Eigen::MatrixXd> llt(lambda_);
  if (n > 0 && llt.info() != Eigen::Success) {
    throw ImproperDensityError("information matrix is singular or indefinite");
  }
  Eigen::MatrixXd cov = llt.solve(Eigen::MatrixXd::Identity(n, n));
  symmetrize(cov);
  return {llt.solve(eta_), cov};
}

bool CanonicalGaussian::has_dim(const DimKey& d) const {
  return std::binary_search(dims_.begin(), dims_.end(), d);
}

int CanonicalGaussian::dim_index(const DimKey& d) const {
  auto it = std::lower_bound(dims_.begin(), dims_.end(), d);
  if (it == dims_.end() || !(*it == d)) return -1;
  return static_cast<int>(it - dims_.begin());
}

bool CanonicalGaussian::is_proper(double tol) const {
  if (dims_.empty()) return true;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(lambda_, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff() > -tol;
}

bool CanonicalGaussian::is_flat(double tol) const {
  if (dims_.empty()) return true;
  return lambda_.cwiseAbs().maxCoeff() <= tol && eta_.cwiseAbs().maxCoeff() <= tol;
}

CanonicalGaussian CanonicalGaussian::pad_to(const std::vector<DimKey>& superset) const {
  std::vector<DimKey> sorted = superset;
  std::sort(sorted.begin(), sorted.end());
  const auto n = static_cast<Eigen::Index>(sorted.size());
  const auto idx = subset_indices(dims_, sorted, "pad_to");
  Eigen::MatrixXd lambda = Eigen::MatrixXd::Zero(n, n);
  Eigen::VectorXd eta = Eigen::VectorXd::Zero(n);
  for (std::size_t i = 0; i < dims_.size(); ++i) {
    eta(idx[i]) = eta_(static_cast<Eigen::Index>(i));
    for (std::size_t j = 0; j < dims_.size(); ++j) {
      lambda(idx[i], idx[j]) = lambda_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
    }
  }
  return CanonicalGaussian(std::move(sorted), std::move(lambda), std::move(eta));
}

double CanonicalGaussian::log_density_unnormalized(const Eigen::VectorXd& x) const {
  if (x.size() != lambda_.rows()) throw DimensionError("evaluation point has wrong size");
  return -0.5 * x.dot(lambda_ * x) + eta_.dot(x);
}

CanonicalGaussian CanonicalGaussian::marginalize(const std::vector<DimKey>& keep) const {
  std::vector<DimKey> keep_sorted = keep;
  std::sort(keep_sorted.begin(), keep_sorted.end());
  subset_indices(keep_sorted, dims_, "marginalize");  // validates keep subset of dims

  if (keep_sorted.size() == dims_.size()) return *this;

  std::vector<int> kidx, eidx;
  kidx.reserve(keep_sorted.size());
  std::size_t p = 0;
  for (std::size_t i = 0; i < dims_.size(); ++i) {
    if (p < keep_sorted.size() && keep_sorted[p] == dims_[i]) {
      kidx.push_back(static_cast<int>(i));
      ++p;
    } else {
      eidx.push_back(static_cast<int>(i));
    }
  }

  const auto nk = static_cast<Eigen::Index>(kidx.size());
  const auto ne = static_cast<Eigen::Index>(eidx.size());
  Eigen::MatrixXd lkk(nk, nk), lke(nk, ne), lee(ne, ne);
  Eigen::VectorXd etak(nk), etae(ne);
  for (Eigen::Index i = 0; i < nk; ++i) {
    etak(i) = eta_(kidx[i]);
    for (Eigen::Index j = 0; j < nk; ++j) lkk(i, j) = lambda_(kidx[i], kidx[j]);
    for (Eigen::Index j = 0; j < ne; ++j) lke(i, j) = lambda_(kidx[i], eidx[j]);
  }
  for (Eigen::Index i = 0; i < ne; ++i) {
    etae(i) = eta_(eidx[i]);
    for (Eigen::Index j = 0; j < ne; ++j) lee(i, j) = lambda_(eidx[i], eidx[j]);
  }

  Eigen::LLT<Eigen::MatrixXd> llt(lee);
  if (llt.info() != Eigen::Success) {
    throw UnobservableEliminationError(
        "eliminated block is singular or indefinite (flat direction among eliminated dims)");
  }
  Eigen::MatrixXd sol = llt.solve(lke.transpose());  // lee^-1 * lek
  Eigen::MatrixXd lambda = lkk - lke * sol;
  symmetrize(lambda);
  Eigen::VectorXd eta = etak - sol.transpose() * etae;
  return CanonicalGaussian(std::move(keep_sorted), std::move(lambda), std::move(eta));
}

CanonicalGaussian CanonicalGaussian::condition(const std::vector<DimKey>& fixed,
                                               const Eigen::VectorXd& values) const {
  std::vector<DimKey> fixed_sorted = fixed;
  std::sort(fixed_sorted.begin(), fixed_sorted.end());
  if (values.size() != static_cast<Eigen::Index>(fixed_sorted.size())) {
    throw DimensionError("conditioning values do not match fixed dim count");
  }
  subset_indices(fixed_sorted, dims_, "condition");

  // Permutation of `values` must follow the caller's ordering of `fixed`.
  Eigen::VectorXd values_sorted(values.size());
  {
    std::vector<int> perm(fixed.size());
    std::iota(perm.begin(), perm.end(), 0);
    std::sort(perm.begin(), perm.end(), [&](int a, int b) { return fixed[a] < fixed[b]; });
    for (std::size_t i = 0; i < perm.size(); ++i) values_sorted(static_cast<Eigen::Index>(i)) = values(perm[i]);
  }

  std::vector<int> kidx, fidx;
  std::size_t p = 0;
  std::vector<DimKey> keep_dims;
  for (std::size_t i = 0; i < dims_.size(); ++i) {
    if (p < fixed_sorted.size() && fixed_sorted[p] == dims_[i]) {
      fidx.push_back(static_cast<int>(i));
      ++p;
    } else {
      kidx.push_back(static_cast<int>(i));
      keep_dims.push_back(dims_[i]);
    }
  }

  const auto nk = static_cast<Eigen::Index>(kidx.size());
  const auto nf = static_cast<Eigen::Index>(fidx.size());
  Eigen::MatrixXd lkk(nk, nk), lkf(nk, nf);
  Eigen::VectorXd etak(nk);
  for (Eigen::Index i = 0; i < nk; ++i) {
    etak(i) = eta_(kidx[i]);
    for (Eigen::Index j = 0; j < nk; ++j) lkk(i, j) = lambda_(kidx[i], kidx[j]);
    for (Eigen::Index j = 0; j < nf; ++j) lkf(i, j) = lambda_(kidx[i], fidx[j]);
  }
  return CanonicalGaussian(std::move(keep_dims), std::move(lkk), etak - lkf * values_sorted);
}

nlohmann::json CanonicalGaussian::to_json() const {
  nlohmann::json j;
  j["dims"] = dims_;
  std::vector<double> lam;
  lam.reserve(static_cast<std::size_t>(lambda_.size()));
  for (Eigen::Index r = 0; r < lambda_.rows(); ++r) {
    for (Eigen::Index c = 0; c < lambda_.cols(); ++c) lam.push_back(lambda_(r, c));
  }
  j["info_matrix"] = lam;  // row-major
  j["info_vector"] = std::vector<double>(eta_.data(), eta_.data() + eta_.size());
  return j;
}

CanonicalGaussian CanonicalGaussian::from_json(const nlohmann::json& j) {
  auto dims = j.at("dims").get<std::vector<DimKey>>();
  const auto n = static_cast<Eigen::Index>(dims.size());
  const auto lam = j.at("info_matrix").get<std::vector<double>>();
  const auto eta = j.at("info_vector").get<std::vector<double>>();
  if (lam.size() != static_cast<std::size_t>(n * n) || eta.size() != static_cast<std::size_t>(n)) {
    throw DimensionError("serialized canonical parameters have wrong size");
  }
  Eigen::MatrixXd L(n, n);
  for (Eigen::Index r = 0; r < n; ++r) {
    for (Eigen::Index c = 0; c < n; ++c) L(r, c) = lam[static_cast<std::size_t>(r * n + c)];
  }
  return CanonicalGaussian(std::move(dims), std::move(L),
                           Eigen::Map<const Eigen::VectorXd>(eta.data(), n));
}

CanonicalGaussian multiply(const CanonicalGaussian& a, const CanonicalGaussian& b) {
  if (a.dims() == b.dims()) {
    Eigen::MatrixXd lambda = a.info_matrix() + b.info_matrix();
    return CanonicalGaussian(a.dims(), std::move(lambda), a.info_vector() + b.info_vector());
  }
  std::vector<DimKey> u;
  u.reserve(a.dims().size() + b.dims().size());
  std::set_union(a.dims().begin(), a.dims().end(), b.dims().begin(), b.dims().end(),
                 std::back_inserter(u));
  CanonicalGaussian pa = a.pad_to(u);
  const CanonicalGaussian pb = b.pad_to(u);
  Eigen::MatrixXd lambda = pa.info_matrix() + pb.info_matrix();
  return CanonicalGaussian(std::move(u), std::move(lambda), pa.info_vector() + pb.info_vector());
}

CanonicalGaussian divide(const CanonicalGaussian& a, const CanonicalGaussian& b) {
  const CanonicalGaussian pb = b.pad_to(a.dims());  // throws DimensionError if not a subset
  Eigen::MatrixXd lambda = a.info_matrix() - pb.info_matrix();
  return CanonicalGaussian(a.dims(), std::move(lambda), a.info_vector() - pb.info_vector());
}

double max_param_diff(const CanonicalGaussian& a, const CanonicalGaussian& b) {
  if (!(a.dims() == b.dims())) throw DimensionError("max_param_diff: dim sets differ");
  if (a.empty()) return 0.0;
  const double dl = (a.info_matrix() - b.info_matrix()).cwiseAbs().maxCoeff();
  const double de = (a.info_vector() - b.info_vector()).cwiseAbs().maxCoeff();
  return std::max(dl, de);
}

double rel_param_diff(const CanonicalGaussian& a, const CanonicalGaussian& b) {
  if (a.empty() && b.empty()) return 0.0;
  double scale = 1.0;
  if (!a.empty()) {
    scale = std::max({scale, a.info_matrix().cwiseAbs().maxCoeff(),
                      a.info_vector().cwiseAbs().maxCoeff()});
  }
  if (!b.empty()) {
    scale = std::max({scale, b.info_matrix().cwiseAbs().maxCoeff(),
                      b.info_vector().cwiseAbs().maxCoeff()});
  }
  return max_param_diff(a, b) / scale;
}

}  // namespace hetfuse
