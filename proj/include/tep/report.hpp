#pragma once

// Plan reports: what got built when, what it cost, and proof that nothing
// sheds. Two renderings share one struct: a text table for people and a
// json document for machines. Wall-clock time lives in exactly one field /
// one line so deterministic comparisons can mask it.

#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "tep/io.hpp"
#include "tep/network.hpp"

namespace tep {

struct BuiltCircuitRow {
  int year = 1;
  int circuit = 0;
  int from = 0;
  int to = 0;
  std::string corridor;
  double rating_mw = 0.0;
  double cost = 0.0;
};

struct ShedRow {
  int scenario = 0;
  double shed_mw = 0.0;
};

struct SolverStats {
  std::string mode;  // monolithic | benders | greedy-benders
  int iterations = 0;
  int cuts = 0;
  double gap = 0.0;
  double wall_seconds = 0.0;
};

struct PlanReport {
  bool feasible = true;
  double total_cost = 0.0;
  std::vector<BuiltCircuitRow> built;
  std::vector<ShedRow> residual_shed;
  SolverStats solver;
  std::vector<int> infeasible_scenarios;  // set when feasible is false
};

enum class ReportFormat { Text, Json };

inline nlohmann::json report_to_json(const PlanReport& rep) {
  nlohmann::json j;
  j["feasible"] = rep.feasible;
  j["total_cost"] = rep.total_cost;
  j["built"] = nlohmann::json::array();
  for (const BuiltCircuitRow& row : rep.built)
    j["built"].push_back({{"year", row.year},
                          {"circuit", row.circuit},
                          {"from", row.from},
                          {"to", row.to},
                          {"corridor", row.corridor},
                          {"rating_mw", row.rating_mw},
                          {"cost", row.cost}});
  j["residual_shed"] = nlohmann::json::array();
  for (const ShedRow& row : rep.residual_shed)
    j["residual_shed"].push_back(
        {{"scenario", row.scenario}, {"shed_mw", row.shed_mw}});
  j["solver"] = {{"mode", rep.solver.mode},
                 {"iterations", rep.solver.iterations},
                 {"cuts", rep.solver.cuts},
                 {"gap", rep.solver.gap},
                 {"wall_seconds", rep.solver.wall_seconds}};
  j["infeasible_scenarios"] = rep.infeasible_scenarios;
  return j;
}

inline PlanReport report_from_json(const nlohmann::json& j) {
  PlanReport rep;
  rep.feasible = j.at("feasible").get<bool>();
  rep.total_cost = j.at("total_cost").get<double>();
  for (const nlohmann::json& row : j.at("built")) {
    BuiltCircuitRow r;
    r.year = row.at("year").get<int>();
    r.circuit = row.at("circuit").get<int>();
    r.from = row.at("from").get<int>();
    r.to = row.at("to").get<int>();
    r.corridor = row.at("corridor").get<std::string>();
    r.rating_mw = row.at("rating_mw").get<double>();
    r.cost = row.at("cost").get<double>();
    rep.built.push_back(std::move(r));
  }
  for (const nlohmann::json& row : j.at("residual_shed"))
    rep.residual_shed.push_back({row.at("scenario").get<int>(),
                                 row.at("shed_mw").get<double>()});
  const nlohmann::json& s = j.at("solver");
  rep.solver.mode = s.at("mode").get<std::string>();
  rep.solver.iterations = s.at("iterations").get<int>();
  rep.solver.cuts = s.at("cuts").get<int>();
  rep.solver.gap = s.at("gap").get<double>();
  rep.solver.wall_seconds = s.at("wall_seconds").get<double>();
  rep.infeasible_scenarios =
      j.at("infeasible_scenarios").get<std::vector<int>>();
  return rep;
}

inline std::string report_to_text(const PlanReport& rep) {
  std::string out;
  char buf[256];
  const auto add = [&out, &buf](const char* fmt, auto... args) {
    std::snprintf(buf, sizeof buf, fmt, args...);
    out += buf;
  };

  out += "expansion plan report\n";
  add("status: %s\n", rep.feasible ? "robust" : "infeasible");
  add("total investment cost: %.6f\n", rep.total_cost);
  add("\nbuilt circuits (%zu)\n", rep.built.size());
  add("%6s %8s %5s %5s %-10s %10s %10s\n", "year", "circuit", "from", "to",
      "corridor", "rating_mw", "cost");
  for (const BuiltCircuitRow& row : rep.built)
    add("%6d %8d %5d %5d %-10s %10.2f %10.2f\n", row.year, row.circuit,
        row.from, row.to, row.corridor.empty() ? "-" : row.corridor.c_str(),
        row.rating_mw, row.cost);
  add("\nresidual shed by scenario (%zu)\n", rep.residual_shed.size());
  add("%9s %12s\n", "scenario", "shed_mw");
  for (const ShedRow& row : rep.residual_shed)
    add("%9d %12.6f\n", row.scenario, row.shed_mw);
  if (!rep.infeasible_scenarios.empty()) {
    out += "\nscenarios no plan can serve:";
    for (int id : rep.infeasible_scenarios) add(" %d", id);
    out += "\n";
  }
  add("\nsolver: mode=%s iterations=%d cuts=%d gap=%.6f\n",
      rep.solver.mode.c_str(), rep.solver.iterations, rep.solver.cuts,
      rep.solver.gap);
  add("wall_seconds: %.3f\n", rep.solver.wall_seconds);
  return out;
}

inline void write_plan_report(const PlanReport& rep, const std::string& path,
                              ReportFormat format) {
  std::ofstream out(path);
  if (!out) throw io_error("cannot open for writing: " + path);
  if (format == ReportFormat::Text)
    out << report_to_text(rep);
  else
    out << report_to_json(rep).dump(2) << "\n";
  if (!out) throw io_error("write failed: " + path);
}

inline PlanReport read_plan_report(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw io_error("cannot open: " + path);
  nlohmann::json j;
  in >> j;
  return report_from_json(j);
}

}  // namespace tep
