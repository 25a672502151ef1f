#include "hetfuse/channel_filter.hpp"

#include <algorithm>

#include "hetfuse/errors.hpp"

namespace hetfuse {

std::string Endpoint::str() const {
  switch (kind) {
    case Kind::Robot: return "robot" + std::to_string(robot);
    case Kind::SlamModule: return "slam" + std::to_string(robot);
    case Kind::TrackingModule: return "tracking" + std::to_string(robot);
  }
  return "?";
}

void ChannelFilter::extend_shared(const std::vector<VariableId>& new_vars) {
  for (const auto& v : new_vars) {
    if (shares(v)) {
      throw DimensionError("variable " + v.str() + " already shared on channel " + a_.str() +
                           "<->" + b_.str());
    }
  }
  for (const auto& v : new_vars) {
    shared_.insert(std::upper_bound(shared_.begin(), shared_.end(), v), v);
  }
  shared_dims_ = dims_of(shared_);
  common_ = common_.pad_to(shared_dims_);
}

bool ChannelFilter::shares(const VariableId& v) const {
  return std::binary_search(shared_.begin(), shared_.end(), v);
}

CanonicalGaussian ChannelFilter::novel(const CanonicalGaussian& outgoing_marginal) const {
  for (const auto& d : outgoing_marginal.dims()) {
    if (!std::binary_search(shared_dims_.begin(), shared_dims_.end(), d)) {
      throw DimensionError("outgoing marginal dim " + d.str() + " is not shared on channel " +
                           a_.str() + "<->" + b_.str());
    }
  }
  return divide(outgoing_marginal.pad_to(shared_dims_), common_);
}

void ChannelFilter::update_common(const CanonicalGaussian& fused_marginal) {
  common_ = fused_marginal.pad_to(shared_dims_);
}

void ChannelFilter::absorb_shared_factor(const CanonicalGaussian& potential) {
  common_ = multiply(common_, potential).pad_to(shared_dims_);
}

bool ChannelFilter::has_seen_all(const std::set<FactorId>& provenance) const {
  return std::includes(seen_.begin(), seen_.end(), provenance.begin(), provenance.end());
}

void ChannelFilter::record_seen(const std::set<FactorId>& provenance) {
  seen_.insert(provenance.begin(), provenance.end());
}

nlohmann::json ChannelFilter::to_json() const {
  nlohmann::json j;
  j["endpoints"] = {a_.str(), b_.str()};
  j["shared_variables"] = shared_;
  j["common"] = common_.to_json();
  j["seen_factors"] = std::vector<FactorId>(seen_.begin(), seen_.end());
  return j;
}

bool cf_states_match(const ChannelFilter& x, const ChannelFilter& y, double tol) {
  if (!(x.shared_variables() == y.shared_variables())) return false;
  if (!(x.seen_factors() == y.seen_factors())) return false;
  return max_param_diff(x.common(), y.common()) <= tol;
}

}  // namespace hetfuse
