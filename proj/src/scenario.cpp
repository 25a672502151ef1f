#include "hetfuse/scenario.hpp"

#include <algorithm>
#include <fstream>

#include "hetfuse/errors.hpp"
#include "hetfuse/network.hpp"

namespace hetfuse {

namespace {

nlohmann::json vec_to_json(const Eigen::VectorXd& v) {
  nlohmann::json j = nlohmann::json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) j.push_back(v(i));
  return j;
}

Eigen::VectorXd vec_from_json(const nlohmann::json& j, Eigen::Index expect, const char* what) {
  if (!j.is_array() || static_cast<Eigen::Index>(j.size()) != expect) {
    throw ConfigError(std::string(what) + ": expected array of length " + std::to_string(expect));
  }
  Eigen::VectorXd v(expect);
  for (Eigen::Index i = 0; i < expect; ++i) v(i) = j[static_cast<std::size_t>(i)].get<double>();
  return v;
}

}  // namespace

const char* to_string(EngineKind e) {
  return e == EngineKind::Landmark ? "landmark" : "odometry";
}

EngineKind engine_kind_from_string(const std::string& s) {
  if (s == "landmark") return EngineKind::Landmark;
  if (s == "odometry") return EngineKind::Odometry;
  throw ConfigError("unknown engine kind '" + s + "'");
}

Eigen::Vector2d TargetSpec::input_at(int k) const {
  Eigen::Vector2d u = Eigen::Vector2d::Zero();
  for (const auto& phase : input_script) {
    if (k >= phase.from && k < phase.to) u += phase.u;
  }
  return u;
}

void ScenarioConfig::validate() const {
  if (dt <= 0) throw ConfigError("dt must be positive");
  if (horizon < 0) throw ConfigError("horizon must be nonnegative");
  if (world_process_noise <= 0 || estimator_process_noise <= 0) {
    throw ConfigError("process noise must be positive");
  }
  if (drop_prob < 0 || drop_prob >= 1) throw ConfigError("drop_prob must be in [0, 1)");

  for (std::size_t i = 0; i < robots.size(); ++i) {
    const auto& r = robots[i];
    if (r.id != static_cast<int>(i)) {
      throw ConfigError("robot ids must be dense from 0 in listing order");
    }
    if (r.path.empty()) throw ConfigError("robot " + std::to_string(r.id) + " has an empty path");
    if (r.speed < 0) throw ConfigError("robot speed must be nonnegative");
    if ((r.pose_prior_sigma.array() <= 0).any() || (r.odometry_sigma.array() <= 0).any() ||
        r.landmark_obs_sigma <= 0 || r.measurement_sigma <= 0 || r.fix_sigma <= 0) {
      throw ConfigError("robot " + std::to_string(r.id) + ": sigmas must be positive");
    }
    if (r.detection_range <= 0 || r.sensor_range <= 0) {
      throw ConfigError("robot " + std::to_string(r.id) + ": ranges must be positive");
    }
    for (int t : r.targets) {
      if (t < 0 || t >= static_cast<int>(targets.size())) {
        throw ConfigError("robot " + std::to_string(r.id) + " tracks unknown target " +
                          std::to_string(t));
      }
    }
  }
  for (std::size_t i = 0; i < targets.size(); ++i) {
    if (targets[i].id != static_cast<int>(i)) {
      throw ConfigError("target ids must be dense from 0 in listing order");
    }
    if ((targets[i].prior_sigma.array() <= 0).any()) {
      throw ConfigError("target prior sigmas must be positive");
    }
  }
  for (const auto& e : edges) {
    if (e.a == e.b || e.a < 0 || e.b < 0 || e.a >= static_cast<int>(robots.size()) ||
        e.b >= static_cast<int>(robots.size())) {
      throw ConfigError("edge references unknown robot");
    }
    if (e.period <= 0) throw ConfigError("edge period must be positive");
    if (common_targets(e.a, e.b).empty()) {
      throw ConfigError("edge " + std::to_string(e.a) + "-" + std::to_string(e.b) +
                        " has no common targets");
    }
  }

  Topology topo;
  topo.nodes = static_cast<int>(robots.size());
  for (const auto& e : edges) topo.edges.push_back({e.a, e.b, e.period});
  if (exact_mode) validate_topology(topo);
}

std::vector<int> ScenarioConfig::neighbors_of(int robot) const {
  std::vector<int> out;
  for (const auto& e : edges) {
    if (e.a == robot) out.push_back(e.b);
    if (e.b == robot) out.push_back(e.a);
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::set<int> ScenarioConfig::common_targets(int a, int b) const {
  std::set<int> out;
  const auto& ta = robots.at(static_cast<std::size_t>(a)).targets;
  const auto& tb = robots.at(static_cast<std::size_t>(b)).targets;
  std::set_intersection(ta.begin(), ta.end(), tb.begin(), tb.end(),
                        std::inserter(out, out.end()));
  return out;
}

nlohmann::json ScenarioConfig::to_json() const {
  nlohmann::json j;
  j["schema_version"] = schema_version;
  j["name"] = name;
  j["dt"] = dt;
  j["horizon"] = horizon;
  j["seed"] = seed;
  j["world"] = {{"target_process_noise", world_process_noise}};
  j["estimator"] = {{"process_noise", estimator_process_noise}, {"known_input", known_input}};
  j["topology"] = nlohmann::json::object();
  j["topology"]["exact"] = exact_mode;
  j["topology"]["drop_prob"] = drop_prob;
  nlohmann::json je = nlohmann::json::array();
  for (const auto& e : edges) je.push_back({{"a", e.a}, {"b", e.b}, {"period", e.period}});
  j["topology"]["edges"] = std::move(je);

  nlohmann::json jr = nlohmann::json::array();
  for (const auto& r : robots) {
    nlohmann::json x;
    x["id"] = r.id;
    x["engine"] = to_string(r.engine);
    nlohmann::json path = nlohmann::json::array();
    for (const auto& p : r.path) path.push_back(vec_to_json(p));
    x["path"] = std::move(path);
    x["speed"] = r.speed;
    x["pose_prior_sigma"] = vec_to_json(r.pose_prior_sigma);
    x["odometry_sigma"] = vec_to_json(r.odometry_sigma);
    x["landmark_obs_sigma"] = r.landmark_obs_sigma;
    x["sensor_range"] = r.sensor_range;
    x["detection_range"] = r.detection_range;
    x["measurement_sigma"] = r.measurement_sigma;
    x["targets"] = r.targets;
    x["fix_steps"] = r.fix_steps;
    x["fix_sigma"] = r.fix_sigma;
    jr.push_back(std::move(x));
  }
  j["robots"] = std::move(jr);

  nlohmann::json jt = nlohmann::json::array();
  for (const auto& t : targets) {
    nlohmann::json x;
    x["id"] = t.id;
    x["prior_mean"] = vec_to_json(t.prior_mean);
    x["prior_sigma"] = vec_to_json(t.prior_sigma);
    nlohmann::json script = nlohmann::json::array();
    for (const auto& ph : t.input_script) {
      script.push_back({{"from", ph.from}, {"to", ph.to}, {"u", vec_to_json(ph.u)}});
    }
    x["input_script"] = std::move(script);
    jt.push_back(std::move(x));
  }
  j["targets"] = std::move(jt);

  nlohmann::json jl = nlohmann::json::array();
  for (const auto& l : landmarks) jl.push_back(vec_to_json(l));
  j["landmarks"] = std::move(jl);
  return j;
}

ScenarioConfig ScenarioConfig::from_json(const nlohmann::json& j) {
  ScenarioConfig c;
  c.schema_version = j.value("schema_version", 1);
  c.name = j.value("name", "scenario");
  c.dt = j.at("dt").get<double>();
  c.horizon = j.at("horizon").get<int>();
  c.seed = j.at("seed").get<uint64_t>();
  if (j.contains("world")) {
    c.world_process_noise = j["world"].value("target_process_noise", 0.08);
  }
  if (j.contains("estimator")) {
    c.estimator_process_noise = j["estimator"].value("process_noise", 0.08);
    c.known_input = j["estimator"].value("known_input", false);
  }
  if (j.contains("topology")) {
    const auto& jt = j["topology"];
    c.exact_mode = jt.value("exact", true);
    c.drop_prob = jt.value("drop_prob", 0.0);
    for (const auto& e : jt.value("edges", nlohmann::json::array())) {
      c.edges.push_back({e.at("a").get<int>(), e.at("b").get<int>(), e.value("period", 1)});
    }
  }
  for (const auto& x : j.value("robots", nlohmann::json::array())) {
    RobotSpec r;
    r.id = x.at("id").get<int>();
    r.engine = engine_kind_from_string(x.value("engine", "landmark"));
    for (const auto& p : x.at("path")) r.path.emplace_back(vec_from_json(p, 2, "waypoint"));
    r.speed = x.value("speed", 1.0);
    if (x.contains("pose_prior_sigma")) {
      r.pose_prior_sigma = vec_from_json(x["pose_prior_sigma"], 3, "pose_prior_sigma");
    }
    if (x.contains("odometry_sigma")) {
      r.odometry_sigma = vec_from_json(x["odometry_sigma"], 3, "odometry_sigma");
    }
    r.landmark_obs_sigma = x.value("landmark_obs_sigma", 0.3);
    r.sensor_range = x.value("sensor_range", 12.0);
    r.detection_range = x.value("detection_range", 8.0);
    r.measurement_sigma = x.value("measurement_sigma", 0.5);
    for (const auto& t : x.value("targets", nlohmann::json::array())) {
      r.targets.insert(t.get<int>());
    }
    for (const auto& s : x.value("fix_steps", nlohmann::json::array())) {
      r.fix_steps.push_back(s.get<int>());
    }
    r.fix_sigma = x.value("fix_sigma", 0.2);
    c.robots.push_back(std::move(r));
  }
  for (const auto& x : j.value("targets", nlohmann::json::array())) {
    TargetSpec t;
    t.id = x.at("id").get<int>();
    t.prior_mean = vec_from_json(x.at("prior_mean"), 4, "prior_mean");
    if (x.contains("prior_sigma")) {
      t.prior_sigma = vec_from_json(x["prior_sigma"], 4, "prior_sigma");
    }
    for (const auto& ph : x.value("input_script", nlohmann::json::array())) {
      t.input_script.push_back({ph.at("from").get<int>(), ph.at("to").get<int>(),
                                vec_from_json(ph.at("u"), 2, "input u")});
    }
    c.targets.push_back(std::move(t));
  }
  for (const auto& l : j.value("landmarks", nlohmann::json::array())) {
    c.landmarks.emplace_back(vec_from_json(l, 2, "landmark"));
  }
  return c;
}

ScenarioConfig ScenarioConfig::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open scenario file " + path);
  nlohmann::json j;
  in >> j;
  ScenarioConfig c = from_json(j);
  c.validate();
  return c;
}

void ScenarioConfig::save(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write scenario file " + path);
  out << to_json().dump(2) << "\n";
}

}  // namespace hetfuse
