#include "hetfuse/factor_graph.hpp"

#include <algorithm>
#include <deque>

#include "hetfuse/errors.hpp"

namespace hetfuse {

const char* to_string(FactorOrigin o) {
  switch (o) {
    case FactorOrigin::LocalMeasurement: return "local_measurement";
    case FactorOrigin::Odometry: return "odometry";
    case FactorOrigin::Prior: return "prior";
    case FactorOrigin::Dynamics: return "dynamics";
    case FactorOrigin::PoseFromSlam: return "pose_from_slam";
    case FactorOrigin::PoseFromTracking: return "pose_from_tracking";
    case FactorOrigin::FusionResult: return "fusion_result";
  }
  return "?";
}

FactorOrigin factor_origin_from_string(const std::string& s) {
  for (auto o : {FactorOrigin::LocalMeasurement, FactorOrigin::Odometry, FactorOrigin::Prior,
                 FactorOrigin::Dynamics, FactorOrigin::PoseFromSlam,
                 FactorOrigin::PoseFromTracking, FactorOrigin::FusionResult}) {
    if (s == to_string(o)) return o;
  }
  throw ConfigError("unknown factor origin '" + s + "'");
}

std::string FactorId::str() const {
  return std::string(to_string(origin)) + "/" + std::to_string(source_robot) + "/" +
         std::to_string(seq);
}

void to_json(nlohmann::json& j, const FactorId& id) {
  j = nlohmann::json{{"origin", to_string(id.origin)},
                     {"robot", id.source_robot},
                     {"seq", id.seq}};
}

void from_json(const nlohmann::json& j, FactorId& id) {
  id.origin = factor_origin_from_string(j.at("origin").get<std::string>());
  id.source_robot = j.at("robot").get<int32_t>();
  id.seq = j.at("seq").get<uint32_t>();
}

std::vector<VariableId> Factor::scope() const {
  std::vector<VariableId> vars;
  for (const auto& d : potential.dims()) {
    if (vars.empty() || !(vars.back() == d.owner)) vars.push_back(d.owner);
  }
  return vars;  // potential dims are sorted, so owners come out sorted/deduped
}

void FactorGraph::add_variable(const VariableId& id) {
  auto it = std::lower_bound(variables_.begin(), variables_.end(), id);
  if (it != variables_.end() && *it == id) {
    throw GraphError("duplicate variable " + id.str());
  }
  variables_.insert(it, id);
  total_dims_ += id.dimension();
  joint_cache_.reset();
}

bool FactorGraph::has_variable(const VariableId& id) const {
  return std::binary_search(variables_.begin(), variables_.end(), id);
}

void FactorGraph::add_factor(Factor f) {
  for (const auto& v : f.scope()) {
    if (!has_variable(v)) {
      throw GraphError("factor " + f.id.str() + " references unknown variable " + v.str());
    }
  }
  for (const auto& g : factors_) {
    if (g.id == f.id) throw GraphError("duplicate factor id " + f.id.str());
  }
  factors_.push_back(std::move(f));
  joint_cache_.reset();
}

Factor FactorGraph::remove_factor(const FactorId& id) {
  for (auto it = factors_.begin(); it != factors_.end(); ++it) {
    if (it->id == id) {
      Factor out = std::move(*it);
      factors_.erase(it);
      joint_cache_.reset();
      return out;
    }
  }
  throw GraphError("no factor with id " + id.str());
}

const Factor* FactorGraph::find_factor(const FactorId& id) const {
  for (const auto& f : factors_) {
    if (f.id == id) return &f;
  }
  return nullptr;
}

const CanonicalGaussian& FactorGraph::joint() const {
  if (!joint_cache_) {
    const std::vector<DimKey> all = dims_of(variables_);
    const auto n = static_cast<Eigen::Index>(all.size());
    Eigen::MatrixXd lam = Eigen::MatrixXd::Zero(n, n);
    Eigen::VectorXd eta = Eigen::VectorXd::Zero(n);
    for (const auto& f : factors_) {
      const auto& dims = f.potential.dims();
      std::vector<int> idx(dims.size());
      std::size_t j = 0;
      for (std::size_t i = 0; i < dims.size(); ++i) {
        while (!(all[j] == dims[i])) ++j;
        idx[i] = static_cast<int>(j++);
      }
      const auto m = static_cast<Eigen::Index>(dims.size());
      for (Eigen::Index r = 0; r < m; ++r) {
        eta(idx[static_cast<std::size_t>(r)]) += f.potential.info_vector()(r);
        for (Eigen::Index c = 0; c < m; ++c) {
          lam(idx[static_cast<std::size_t>(r)], idx[static_cast<std::size_t>(c)]) +=
              f.potential.info_matrix()(r, c);
        }
      }
    }
    joint_cache_ = CanonicalGaussian(all, std::move(lam), std::move(eta));
  }
  return *joint_cache_;
}

std::vector<DimKey> FactorGraph::check_vars(const std::vector<VariableId>& vars) const {
  std::vector<VariableId> sorted = vars;
  std::sort(sorted.begin(), sorted.end());
  sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
  for (const auto& v : sorted) {
    if (!has_variable(v)) throw GraphError("unknown variable " + v.str());
  }
  return dims_of(sorted);
}

CanonicalGaussian FactorGraph::marginal_reference(const std::vector<VariableId>& vars) const {
  return joint().marginalize(check_vars(vars));
}

namespace {

struct WorkFactor {
  std::vector<DimKey> dims;  // sorted
  Eigen::MatrixXd lambda;
  Eigen::VectorXd eta;
  bool live = true;
};

// a = union(a, b) for sorted vectors.
void merge_into(std::vector<DimKey>& a, const std::vector<DimKey>& b) {
  std::vector<DimKey> out;
  out.reserve(a.size() + b.size());
  std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  a.swap(out);
}

// Index of each element of sub (sorted subset) within sup (sorted).
std::vector<int> positions_in(const std::vector<DimKey>& sub, const std::vector<DimKey>& sup) {
  std::vector<int> out(sub.size());
  std::size_t j = 0;
  for (std::size_t i = 0; i < sub.size(); ++i) {
    while (!(sup[j] == sub[i])) ++j;
    out[i] = static_cast<int>(j++);
  }
  return out;
}

}  // namespace

CanonicalGaussian FactorGraph::marginal(const std::vector<VariableId>& keep_vars) const {
  const std::vector<DimKey> keep_dims = check_vars(keep_vars);

  // Variables to eliminate, in canonical (time-major) order.
  std::vector<VariableId> elim;
  {
    std::vector<VariableId> sorted_keep = keep_vars;
    std::sort(sorted_keep.begin(), sorted_keep.end());
    std::set_difference(variables_.begin(), variables_.end(), sorted_keep.begin(),
                        sorted_keep.end(), std::back_inserter(elim));
  }
  if (elim.empty()) return joint();

  std::map<VariableId, int> elim_pos;
  for (std::size_t i = 0; i < elim.size(); ++i) elim_pos[elim[i]] = static_cast<int>(i);

  std::vector<WorkFactor> works;
  works.reserve(factors_.size() + elim.size());
  std::vector<std::vector<int>> bucket(elim.size());
  auto register_work = [&](int w) {
    VariableId last{VarKind::RobotPose, -1, -1};
    bool first = true;
    for (const auto& d : works[w].dims) {
      if (first || !(last == d.owner)) {
        auto it = elim_pos.find(d.owner);
        if (it != elim_pos.end()) bucket[it->second].push_back(w);
        last = d.owner;
        first = false;
      }
    }
  };
  for (const auto& f : factors_) {
    if (f.potential.empty()) continue;
    works.push_back({f.potential.dims(), f.potential.info_matrix(), f.potential.info_vector()});
    register_work(static_cast<int>(works.size()) - 1);
  }

  for (std::size_t pos = 0; pos < elim.size(); ++pos) {
    const VariableId v = elim[pos];
    std::vector<int> gathered;
    for (int w : bucket[pos]) {
      if (works[static_cast<std::size_t>(w)].live) gathered.push_back(w);
    }
    std::sort(gathered.begin(), gathered.end());
    gathered.erase(std::unique(gathered.begin(), gathered.end()), gathered.end());
    if (gathered.empty()) {
      throw UnobservableEliminationError("variable " + v.str() +
                                         " carries no information (flat direction)");
    }

    std::vector<DimKey> u = works[static_cast<std::size_t>(gathered[0])].dims;
    for (std::size_t i = 1; i < gathered.size(); ++i) {
      merge_into(u, works[static_cast<std::size_t>(gathered[i])].dims);
    }
    const auto n = static_cast<Eigen::Index>(u.size());
    Eigen::MatrixXd lam = Eigen::MatrixXd::Zero(n, n);
    Eigen::VectorXd eta = Eigen::VectorXd::Zero(n);
    for (int wi : gathered) {
      auto& w = works[static_cast<std::size_t>(wi)];
      const auto idx = positions_in(w.dims, u);
      const auto m = static_cast<Eigen::Index>(w.dims.size());
      for (Eigen::Index r = 0; r < m; ++r) {
        eta(idx[static_cast<std::size_t>(r)]) += w.eta(r);
        for (Eigen::Index c = 0; c < m; ++c) {
          lam(idx[static_cast<std::size_t>(r)], idx[static_cast<std::size_t>(c)]) += w.lambda(r, c);
        }
      }
      w.live = false;
      w.lambda.resize(0, 0);
      w.eta.resize(0);
      w.dims.clear();
      w.dims.shrink_to_fit();
    }

    // Dims of v are contiguous within u (DimKey sorts owner-major).
    const auto evs = dims_of(v);
    Eigen::Index e0 = 0;
    while (e0 < n && !(u[static_cast<std::size_t>(e0)] == evs.front())) ++e0;
    const auto ne = static_cast<Eigen::Index>(evs.size());
    const Eigen::Index nr = n - ne;

    Eigen::MatrixXd lee = lam.block(e0, e0, ne, ne);
    Eigen::LLT<Eigen::MatrixXd> llt(lee);
    if (llt.info() != Eigen::Success) {
      throw UnobservableEliminationError("eliminating " + v.str() +
                                         ": block is singular or indefinite");
    }

    if (nr == 0) continue;  // fully-consumed island

    std::vector<DimKey> rdims;
    rdims.reserve(static_cast<std::size_t>(nr));
    std::vector<int> ridx;
    ridx.reserve(static_cast<std::size_t>(nr));
    for (Eigen::Index i = 0; i < n; ++i) {
      if (i < e0 || i >= e0 + ne) {
        rdims.push_back(u[static_cast<std::size_t>(i)]);
        ridx.push_back(static_cast<int>(i));
      }
    }
    Eigen::MatrixXd lre(nr, ne);
    Eigen::VectorXd etar(nr);
    for (Eigen::Index i = 0; i < nr; ++i) {
      etar(i) = eta(ridx[static_cast<std::size_t>(i)]);
      for (Eigen::Index j = 0; j < ne; ++j) lre(i, j) = lam(ridx[static_cast<std::size_t>(i)], e0 + j);
    }
    Eigen::MatrixXd sol = llt.solve(lre.transpose());  // lee^-1 * ler
    Eigen::MatrixXd lrr(nr, nr);
    for (Eigen::Index i = 0; i < nr; ++i) {
      for (Eigen::Index j = 0; j < nr; ++j) {
        lrr(i, j) = lam(ridx[static_cast<std::size_t>(i)], ridx[static_cast<std::size_t>(j)]);
      }
    }
    lrr.noalias() -= lre * sol;
    lrr = ((lrr + lrr.transpose()) * 0.5).eval();
    etar.noalias() -= sol.transpose() * eta.segment(e0, ne);

    works.push_back({std::move(rdims), std::move(lrr), std::move(etar)});
    register_work(static_cast<int>(works.size()) - 1);
  }

  // Fold the remainder (all live factors are over kept dims now).
  const auto nk = static_cast<Eigen::Index>(keep_dims.size());
  Eigen::MatrixXd lam = Eigen::MatrixXd::Zero(nk, nk);
  Eigen::VectorXd eta = Eigen::VectorXd::Zero(nk);
  for (const auto& w : works) {
    if (!w.live) continue;
    const auto idx = positions_in(w.dims, keep_dims);
    const auto m = static_cast<Eigen::Index>(w.dims.size());
    for (Eigen::Index r = 0; r < m; ++r) {
      eta(idx[static_cast<std::size_t>(r)]) += w.eta(r);
      for (Eigen::Index c = 0; c < m; ++c) {
        lam(idx[static_cast<std::size_t>(r)], idx[static_cast<std::size_t>(c)]) += w.lambda(r, c);
      }
    }
  }
  return CanonicalGaussian(keep_dims, std::move(lam), std::move(eta));
}

std::set<FactorId> FactorGraph::contributing_factors(const std::vector<VariableId>& vars) const {
  std::set<FactorId> out;
  std::set<VariableId> visited(vars.begin(), vars.end());
  std::deque<VariableId> frontier(vars.begin(), vars.end());
  std::vector<bool> taken(factors_.size(), false);
  while (!frontier.empty()) {
    const VariableId v = frontier.front();
    frontier.pop_front();
    for (std::size_t i = 0; i < factors_.size(); ++i) {
      if (taken[i]) continue;
      const auto scope = factors_[i].scope();
      if (!std::binary_search(scope.begin(), scope.end(), v)) continue;
      taken[i] = true;
      out.insert(factors_[i].id);
      for (const auto& s : scope) {
        if (visited.insert(s).second) frontier.push_back(s);
      }
    }
  }
  return out;
}

nlohmann::json FactorGraph::to_json() const {
  nlohmann::json j;
  j["variables"] = variables_;
  nlohmann::json fs = nlohmann::json::array();
  for (const auto& f : factors_) {
    nlohmann::json fj;
    fj["id"] = f.id;
    fj["scope"] = f.scope();
    fj["potential"] = f.potential.to_json();
    fs.push_back(std::move(fj));
  }
  j["factors"] = std::move(fs);
  return j;
}

VariablePartition::VariablePartition(int robot, std::set<int> own_targets,
                                     std::map<int, std::set<int>> neighbor_targets)
    : robot_(robot), own_targets_(std::move(own_targets)), common_(std::move(neighbor_targets)) {
  for (const auto& [nbr, shared] : common_) {
    for (int t : shared) {
      if (!own_targets_.count(t)) {
        throw ConfigError("robot " + std::to_string(robot_) + ": target " + std::to_string(t) +
                          " declared common with " + std::to_string(nbr) + " but not tracked");
      }
    }
  }
}

const std::set<int>& VariablePartition::common_targets(int neighbor) const {
  auto it = common_.find(neighbor);
  if (it == common_.end()) {
    throw ConfigError("robot " + std::to_string(robot_) + " has no channel to " +
                      std::to_string(neighbor));
  }
  return it->second;
}

std::set<int> VariablePartition::local_targets() const {
  std::set<int> out = own_targets_;
  for (const auto& [nbr, shared] : common_) {
    for (int t : shared) out.erase(t);
  }
  return out;
}

std::set<int> VariablePartition::non_mutual_targets(int neighbor) const {
  std::set<int> out = own_targets_;
  for (int t : common_targets(neighbor)) out.erase(t);
  return out;
}

bool VariablePartition::is_common_with(int target, int neighbor) const {
  auto it = common_.find(neighbor);
  return it != common_.end() && it->second.count(target) > 0;
}

}  // namespace hetfuse
