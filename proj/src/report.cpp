#include <cstdio>
#include <filesystem>
#include <fstream>

#include "hetfuse/errors.hpp"
#include "hetfuse/harness.hpp"
#include "hetfuse/svg_plot.hpp"

namespace hetfuse {

namespace {

std::string d17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::ofstream open_out(const std::filesystem::path& p) {
  std::ofstream out(p);
  if (!out) throw Error("cannot write " + p.string());
  return out;
}

}  // namespace

void write_report(const RunReport& report, const std::string& dir) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  const fs::path base(dir);

  {
    nlohmann::json j;
    j["schema_version"] = report.schema_version;
    j["scenario"] = report.scenario_name;
    j["seed"] = report.seed;
    j["horizon"] = report.horizon;
    j["oracle"] = report.oracle;
    j["target_records"] = report.targets.size();
    j["pose_records"] = report.poses.size();
    auto out = open_out(base / "report.json");
    out << j.dump(2) << "\n";
  }
  {
    auto out = open_out(base / "targets.csv");
    out << "step,robot,target,mean_x,mean_vx,mean_y,mean_vy,"
           "true_x,true_vx,true_y,true_vy,cov_xx,cov_vxvx,cov_yy,cov_vyvy,nees,pos_error\n";
    for (const auto& t : report.targets) {
      out << t.step << "," << t.robot << "," << t.target;
      for (int i = 0; i < 4; ++i) out << "," << d17(t.mean(i));
      for (int i = 0; i < 4; ++i) out << "," << d17(t.truth(i));
      for (int i = 0; i < 4; ++i) out << "," << d17(t.cov(i, i));
      out << "," << d17(t.nees) << "," << d17(t.pos_error) << "\n";
    }
  }
  {
    auto out = open_out(base / "poses.csv");
    out << "step,robot,x,y,heading,true_x,true_y,true_heading,cov_xx,cov_yy,cov_hh\n";
    for (const auto& p : report.poses) {
      out << p.step << "," << p.robot;
      for (int i = 0; i < 3; ++i) out << "," << d17(p.mean(i));
      for (int i = 0; i < 3; ++i) out << "," << d17(p.truth(i));
      for (int i = 0; i < 3; ++i) out << "," << d17(p.cov(i, i));
      out << "\n";
    }
  }
  {
    auto out = open_out(base / "rmse.csv");
    out << "step";
    std::vector<int> robots;
    for (const auto& p : report.poses) {
      if (std::find(robots.begin(), robots.end(), p.robot) == robots.end()) {
        robots.push_back(p.robot);
      }
    }
    std::sort(robots.begin(), robots.end());
    std::vector<std::vector<double>> series;
    for (int r : robots) {
      out << ",pos_rmse_robot" << r;
      series.push_back(report.rmse_series(r));
    }
    out << "\n";
    for (int k = 0; k <= report.horizon; ++k) {
      out << k;
      for (const auto& s : series) out << "," << d17(s[static_cast<std::size_t>(k)]);
      out << "\n";
    }
  }
  {
    auto out = open_out(base / "messages.jsonl");
    for (const auto& m : report.message_log) out << m.dump() << "\n";
  }
  {
    auto out = open_out(base / "agents.jsonl");
    for (const auto& a : report.agent_log) out << a.dump() << "\n";
  }
}

void write_run_plots(const RunReport& report, const std::string& dir) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  std::vector<int> robots;
  for (const auto& p : report.poses) {
    if (std::find(robots.begin(), robots.end(), p.robot) == robots.end()) {
      robots.push_back(p.robot);
    }
  }
  std::sort(robots.begin(), robots.end());

  std::vector<double> steps;
  for (int k = 0; k <= report.horizon; ++k) steps.push_back(k);

  std::vector<PlotSeries> rmse;
  for (int r : robots) {
    rmse.push_back({"robot " + std::to_string(r), steps, report.rmse_series(r)});
  }
  write_line_chart((fs::path(dir) / "rmse.svg").string(),
                   "Target position RMSE (" + report.scenario_name + ")", "step", "RMSE [m]",
                   rmse);

  // Per-(robot,target) NEES curves.
  std::map<std::pair<int, int>, std::vector<double>> nees_by;
  for (const auto& t : report.targets) {
    auto& v = nees_by[{t.robot, t.target}];
    if (v.empty()) v.assign(static_cast<std::size_t>(report.horizon) + 1, 0.0);
    v[static_cast<std::size_t>(t.step)] = t.nees;
  }
  std::vector<PlotSeries> nees_series;
  for (const auto& [key, v] : nees_by) {
    nees_series.push_back(
        {"r" + std::to_string(key.first) + "/t" + std::to_string(key.second), steps, v});
  }
  write_line_chart((fs::path(dir) / "nees.svg").string(),
                   "Target NEES (" + report.scenario_name + ")", "step", "NEES", nees_series,
                   {{"dof", 4.0}});
}

void write_nees_plot(const NeesSummary& summary, const std::string& path) {
  std::vector<double> steps;
  for (int k = 0; k <= summary.horizon; ++k) steps.push_back(k);
  std::vector<PlotSeries> series;
  for (const auto& e : summary.entries) {
    series.push_back({"r" + std::to_string(e.robot) + "/t" + std::to_string(e.target), steps,
                      e.per_step_mean});
  }
  write_line_chart(path, "Average NEES over " + std::to_string(summary.runs) + " runs", "step",
                   "mean NEES",
                   series,
                   {{"lower", summary.bounds.lower}, {"upper", summary.bounds.upper}});
}

}  // namespace hetfuse
