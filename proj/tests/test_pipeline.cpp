#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "tep/io.hpp"
#include "tep/oracle.hpp"
#include "tep/pipeline.hpp"
#include "tep/scenario_gen.hpp"

using Catch::Approx;
using namespace tep;

namespace {

const std::string kFixtures = TEP_FIXTURE_DIR;

struct Fixture {
  Network net;
  std::vector<OperationScenario> scns;
};

Fixture load_fixture(const std::string& stem) {
  Fixture f;
  f.net = load_network(kFixtures + "/" + stem + ".net");
  f.scns = load_scenarios(kFixtures + "/" + stem + ".scn", f.net);
  return f;
}

Bus make_bus(int id, BusKind kind) {
  Bus b;
  b.id = id;
  b.kind = kind;
  return b;
}

Circuit make_circuit(int id, int from, int to, double b, double rating,
                     CircuitStatus status, double cost = 0.0) {
  Circuit c;
  c.id = id;
  c.from = from;
  c.to = to;
  c.susceptance = b;
  c.rating = rating;
  c.status = status;
  c.cost = cost;
  return c;
}

OperationScenario make_scenario(int id, std::vector<double> gen,
                                std::vector<double> dem, int year = 1) {
  OperationScenario s;
  s.id = id;
  s.generation = std::move(gen);
  s.demand = std::move(dem);
  s.year = year;
  return s;
}

// 100 MW of demand behind at most 60 MW of candidate capacity and a 50 MW
// generator: no plan can avoid shedding.
Network hopeless_net() {
  Network net;
  net.buses = {make_bus(1, BusKind::Connected), make_bus(2, BusKind::Connected)};
  net.circuits = {make_circuit(1, 1, 2, 1.0, 30, CircuitStatus::Candidate, 5.0),
                  make_circuit(2, 1, 2, 1.0, 30, CircuitStatus::Candidate, 5.0)};
  return net;
}

std::vector<BusProfile> six_bus_profiles() {
  return {{1, 200.0, 0.0},
          {2, 0.0, 50.0},
          {3, 60.0, 10.0},
          {4, 0.0, 80.0},
          {5, 0.0, 40.0}};
}

std::string temp_path(const std::string& name) {
  return (std::filesystem::temp_directory_path() / name).string();
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::vector<int> built_ids(const Network& net, const TrialPlan& plan) {
  return built_circuit_ids(net, plan.built);
}

std::vector<int> row_circuits(const PlanReport& rep) {
  std::vector<int> ids;
  for (const BuiltCircuitRow& row : rep.built) ids.push_back(row.circuit);
  return ids;
}

// Wall time is the one nondeterministic field; mask it before comparing.
nlohmann::json result_json(const PipelineResult& res) {
  nlohmann::json j = nlohmann::json::array();
  for (const PlanReport& rep : res.per_year) {
    PlanReport masked = rep;
    masked.solver.wall_seconds = 0.0;
    j.push_back(report_to_json(masked));
  }
  PlanReport combined = res.combined;
  combined.solver.wall_seconds = 0.0;
  j.push_back(report_to_json(combined));
  return j;
}

}  // namespace

TEST_CASE("generated scenario count and labels follow the grid") {
  const Fixture f = load_fixture("six_bus");
  ScenarioGenConfig cfg;
  cfg.profiles = six_bus_profiles();
  cfg.year = 3;

  const std::vector<OperationScenario> scns = generate_scenarios(f.net, cfg);
  REQUIRE(scns.size() == 12u * 5u * 25u);
  CHECK(scns.front().id == 1);
  CHECK(scns.back().id == 1500);
  CHECK(scns.front().month == 1);
  CHECK(scns.front().block == 1);
  CHECK(scns.front().draw == 1);
  CHECK(scns.back().month == 12);
  CHECK(scns.back().block == 5);
  CHECK(scns.back().draw == 25);
  for (size_t i = 0; i < scns.size(); ++i) {
    REQUIRE(scns[i].id == static_cast<int>(i) + 1);
    REQUIRE(scns[i].year == 3);
  }

  ScenarioGenConfig small = cfg;
  small.months = 3;
  small.blocks = 2;
  small.draws = 4;
  CHECK(generate_scenarios(f.net, small).size() == 24);
}

TEST_CASE("every generated scenario balances generation against demand") {
  const Fixture f = load_fixture("six_bus");
  ScenarioGenConfig cfg;
  cfg.profiles = six_bus_profiles();
  cfg.months = 6;
  cfg.draws = 5;

  for (const OperationScenario& s : generate_scenarios(f.net, cfg)) {
    double total_g = 0.0, total_d = 0.0;
    for (double g : s.generation) total_g += g;
    for (double d : s.demand) total_d += d;
    REQUIRE(total_g == Approx(total_d).margin(1e-6));
    REQUIRE(total_d > 0.0);
  }
}

TEST_CASE("scenario generation is reproducible for a fixed seed") {
  const Fixture f = load_fixture("six_bus");
  ScenarioGenConfig cfg;
  cfg.profiles = six_bus_profiles();
  cfg.months = 4;
  cfg.blocks = 3;
  cfg.draws = 6;
  cfg.seed = 99;

  const std::vector<OperationScenario> a = generate_scenarios(f.net, cfg);
  const std::vector<OperationScenario> b = generate_scenarios(f.net, cfg);
  REQUIRE(a.size() == b.size());
  for (size_t i = 0; i < a.size(); ++i) {
    REQUIRE(a[i].generation == b[i].generation);
    REQUIRE(a[i].demand == b[i].demand);
  }

  const std::string p1 = temp_path("gen_scn_a.scn");
  const std::string p2 = temp_path("gen_scn_b.scn");
  write_scenarios(p1, f.net, a);
  write_scenarios(p2, f.net, b);
  CHECK(read_file(p1) == read_file(p2));

  ScenarioGenConfig other = cfg;
  other.seed = 100;
  const std::vector<OperationScenario> c = generate_scenarios(f.net, other);
  bool differs = false;
  for (size_t i = 0; i < a.size() && !differs; ++i)
    differs = a[i].demand != c[i].demand;
  CHECK(differs);
}

TEST_CASE("zero volatility collapses draws within a month-block") {
  const Fixture f = load_fixture("six_bus");
  ScenarioGenConfig cfg;
  cfg.profiles = six_bus_profiles();
  cfg.months = 2;
  cfg.blocks = 3;
  cfg.draws = 5;
  cfg.demand_volatility = 0.0;
  cfg.generation_volatility = 0.0;

  const std::vector<OperationScenario> scns = generate_scenarios(f.net, cfg);
  for (const OperationScenario& s : scns) {
    const OperationScenario& first =
        scns[static_cast<size_t>(((s.month - 1) * cfg.blocks + (s.block - 1)) *
                                 cfg.draws)];
    REQUIRE(s.demand == first.demand);
    REQUIRE(s.generation == first.generation);
  }
  CHECK(scns[0].demand != scns[static_cast<size_t>(cfg.draws)].demand);
}

TEST_CASE("scenario generation rejects unusable profiles") {
  const Fixture f = load_fixture("six_bus");
  ScenarioGenConfig cfg;
  cfg.profiles = six_bus_profiles();

  ScenarioGenConfig bad = cfg;
  bad.profiles.push_back({77, 10.0, 0.0});
  CHECK_THROWS_AS(generate_scenarios(f.net, bad), std::invalid_argument);

  bad = cfg;
  bad.profiles.push_back({6, 10.0, 0.0});  // transshipment relay bus
  CHECK_THROWS_AS(generate_scenarios(f.net, bad), std::invalid_argument);

  bad = cfg;
  bad.profiles.pop_back();  // bus 5 left uncovered
  CHECK_THROWS_AS(generate_scenarios(f.net, bad), std::invalid_argument);

  bad = cfg;
  bad.months = 0;
  CHECK_THROWS_AS(generate_scenarios(f.net, bad), std::invalid_argument);

  bad = cfg;
  for (BusProfile& p : bad.profiles) p.base_generation_mw = 0.0;
  CHECK_THROWS_AS(generate_scenarios(f.net, bad), std::invalid_argument);
}

TEST_CASE("surplus generation is scaled back instead of dumped on the slack") {
  const Fixture f = load_fixture("six_bus");
  ScenarioGenConfig cfg;
  cfg.months = 2;
  cfg.blocks = 2;
  cfg.draws = 3;
  cfg.demand_volatility = 0.0;
  cfg.generation_volatility = 0.0;
  // Bus 3 alone overshoots the whole load, so the slack at bus 1 idles.
  cfg.profiles = {{1, 200.0, 0.0},
                  {2, 0.0, 20.0},
                  {3, 60.0, 0.0},
                  {4, 0.0, 10.0},
                  {5, 0.0, 0.0}};

  const int b1 = f.net.bus_index(1);
  const int b3 = f.net.bus_index(3);
  for (const OperationScenario& s : generate_scenarios(f.net, cfg)) {
    double total_d = 0.0;
    for (double d : s.demand) total_d += d;
    REQUIRE(s.generation[static_cast<size_t>(b1)] == 0.0);
    REQUIRE(s.generation[static_cast<size_t>(b3)] == Approx(total_d));
  }
}

TEST_CASE("plan report round-trips through json") {
  PlanReport rep;
  rep.feasible = true;
  rep.total_cost = 29.5;
  rep.built = {{1, 7, 2, 4, "south", 50.0, 12.0},
               {2, 11, 3, 5, "", 40.0, 17.5}};
  rep.residual_shed = {{1, 0.0}, {2, 0.0005}};
  rep.solver = {"greedy-benders", 4, 9, 0.03, 1.25};

  const std::string path = temp_path("plan_report.json");
  write_plan_report(rep, path, ReportFormat::Json);
  const PlanReport back = read_plan_report(path);

  CHECK(back.feasible == rep.feasible);
  CHECK(back.total_cost == rep.total_cost);
  REQUIRE(back.built.size() == 2);
  CHECK(back.built[0].year == 1);
  CHECK(back.built[0].circuit == 7);
  CHECK(back.built[0].corridor == "south");
  CHECK(back.built[1].year == 2);
  CHECK(back.built[1].corridor.empty());
  CHECK(back.built[1].cost == 17.5);
  REQUIRE(back.residual_shed.size() == 2);
  CHECK(back.residual_shed[1].shed_mw == 0.0005);
  CHECK(back.solver.mode == "greedy-benders");
  CHECK(back.solver.iterations == 4);
  CHECK(back.solver.cuts == 9);
  CHECK(back.solver.gap == 0.03);
  CHECK(back.solver.wall_seconds == 1.25);
  CHECK(report_to_json(back) == report_to_json(rep));
}

TEST_CASE("an empty plan renders as a zero-cost report") {
  PlanReport rep;
  rep.solver.mode = "benders";
  const std::string text = report_to_text(rep);
  CHECK(text.find("status: robust") != std::string::npos);
  CHECK(text.find("total investment cost: 0.000000") != std::string::npos);
  CHECK(text.find("built circuits (0)") != std::string::npos);

  const std::string path = temp_path("plan_report_empty.json");
  write_plan_report(rep, path, ReportFormat::Json);
  const PlanReport back = read_plan_report(path);
  CHECK(back.total_cost == 0.0);
  CHECK(back.built.empty());
}

TEST_CASE("text report carries the tables, solver line, and wall time") {
  PlanReport rep;
  rep.feasible = false;
  rep.total_cost = 39.0;
  rep.built = {{1, 4, 2, 4, "", 30.0, 9.0}};
  rep.residual_shed = {{1, 0.0}};
  rep.infeasible_scenarios = {4, 9};
  rep.solver = {"monolithic", 12, 0, 0.0, 2.5};

  const std::string text = report_to_text(rep);
  CHECK(text.find("status: infeasible") != std::string::npos);
  CHECK(text.find("scenarios no plan can serve: 4 9") != std::string::npos);
  CHECK(text.find("solver: mode=monolithic iterations=12 cuts=0") !=
        std::string::npos);
  CHECK(text.find(" 4     2     4 -") != std::string::npos);
  CHECK(text.rfind("wall_seconds: 2.500\n") == text.size() - 20);

  const std::string path = temp_path("plan_report.txt");
  write_plan_report(rep, path, ReportFormat::Text);
  CHECK(read_file(path) == text);
}

TEST_CASE("single-year pipeline solves the expansion and proves it") {
  const Fixture f = load_fixture("redundancy_trap");
  PipelineConfig cfg;
  cfg.milp_gap = 0.0;

  const PipelineResult res = run_pipeline(f.net, f.scns, 1, cfg);
  REQUIRE(res.feasible);
  CHECK(res.failed_year == 0);
  REQUIRE(res.per_year.size() == 1);
  CHECK(res.combined.total_cost == Approx(39.0));
  CHECK(res.per_year[0].total_cost == Approx(39.0));
  CHECK(built_ids(f.net, res.final_plan) == std::vector<int>{4, 5, 6});
  CHECK(row_circuits(res.per_year[0]) == std::vector<int>{4, 5, 6});
  for (const BuiltCircuitRow& row : res.per_year[0].built) CHECK(row.year == 1);
  REQUIRE(res.combined.residual_shed.size() == f.scns.size());
  for (const ShedRow& row : res.combined.residual_shed)
    CHECK(row.shed_mw <= 1e-3);
  CHECK(res.combined.solver.mode == "greedy-benders");
  CHECK(res.combined.solver.cuts >= 1);
}

TEST_CASE("fixture plan matches the committed golden report") {
  const Fixture f = load_fixture("redundancy_trap");
  PipelineConfig cfg;
  cfg.milp_gap = 0.0;
  const PipelineResult res = run_pipeline(f.net, f.scns, 1, cfg);
  REQUIRE(res.per_year.size() == 1);
  PlanReport rep = res.per_year[0];
  rep.solver.wall_seconds = 0.0;
  CHECK(report_to_text(rep) ==
        read_file(kFixtures + "/redundancy_trap.plan.txt"));
}

TEST_CASE("single-year pipeline matches a hand-wired warm-started run") {
  const Fixture f = load_fixture("redundancy_trap");
  PipelineConfig cfg;
  cfg.milp_gap = 0.0;
  const PipelineResult res = run_pipeline(f.net, f.scns, 1, cfg);

  const GreedyResult greedy = run_greedy(f.net, f.scns);
  BendersConfig bcfg;
  bcfg.milp_gap = 0.0;
  bcfg.initial_cuts = greedy.harvested_cuts;
  bcfg.warm_built = greedy.plan.built;
  const BendersResult direct = run_benders(f.net, f.scns, bcfg);

  REQUIRE(direct.status == BendersStatus::Robust);
  CHECK(res.combined.total_cost == Approx(direct.cost));
  CHECK(res.final_plan.built == direct.plan.built);
}

TEST_CASE("all three modes land on the same optimum") {
  for (const std::string stem : {"two_bus", "triangle", "redundancy_trap"}) {
    const Fixture f = load_fixture(stem);
    double expect = -1.0;
    for (const PlanMode mode :
         {PlanMode::Monolithic, PlanMode::Benders, PlanMode::GreedyBenders}) {
      PipelineConfig cfg;
      cfg.mode = mode;
      cfg.milp_gap = 0.0;
      const PipelineResult res = run_pipeline(f.net, f.scns, 1, cfg);
      INFO(stem << " mode " << to_string(mode));
      REQUIRE(res.feasible);
      if (expect < 0.0)
        expect = res.combined.total_cost;
      else
        CHECK(res.combined.total_cost == Approx(expect));
      CHECK(res.combined.solver.mode == to_string(mode));
    }
  }
}

TEST_CASE("a year-one build carries into later years") {
  const Fixture f = load_fixture("redundancy_trap");
  // Year 1 sees only the mild scenario; the severe one arrives in year 3
  // with nothing new in year 2.
  std::vector<OperationScenario> scns = {f.scns[0]};
  OperationScenario severe = f.scns[1];
  severe.id = 102;
  severe.year = 3;
  scns.push_back(severe);

  PipelineConfig cfg;
  cfg.milp_gap = 0.0;
  const PipelineResult res = run_pipeline(f.net, scns, 3, cfg);

  REQUIRE(res.feasible);
  REQUIRE(res.per_year.size() == 3);
  CHECK(row_circuits(res.per_year[0]) == std::vector<int>{3, 4});
  CHECK(res.per_year[0].total_cost == Approx(19.0));
  CHECK(res.per_year[1].built.empty());
  CHECK(res.per_year[1].total_cost == 0.0);
  CHECK(row_circuits(res.per_year[2]) == std::vector<int>{5, 6});
  CHECK(res.per_year[2].total_cost == Approx(30.0));
  for (const BuiltCircuitRow& row : res.per_year[2].built) CHECK(row.year == 3);
  CHECK(res.combined.total_cost == Approx(49.0));
  CHECK(built_ids(f.net, res.final_plan) == std::vector<int>{3, 4, 5, 6});
  CHECK(row_circuits(res.combined) == std::vector<int>{3, 4, 5, 6});
}

TEST_CASE("a sufficient year-one plan leaves later years empty") {
  const Fixture f = load_fixture("redundancy_trap");
  std::vector<OperationScenario> scns = f.scns;
  for (const OperationScenario& s : f.scns) {
    OperationScenario clone = s;
    clone.id = s.id + 100;
    clone.year = 2;
    scns.push_back(clone);
  }

  PipelineConfig cfg;
  cfg.milp_gap = 0.0;
  const PipelineResult res = run_pipeline(f.net, scns, 0, cfg);

  REQUIRE(res.feasible);
  REQUIRE(res.per_year.size() == 2);
  CHECK(res.per_year[0].total_cost == Approx(39.0));
  CHECK(res.per_year[1].built.empty());
  CHECK(res.per_year[1].total_cost == 0.0);
  CHECK(res.combined.total_cost == Approx(39.0));
  REQUIRE(res.per_year[1].residual_shed.size() == 2);
  for (const ShedRow& row : res.per_year[1].residual_shed)
    CHECK(row.shed_mw <= 1e-3);
}

TEST_CASE("scenario years beyond the horizon are rejected") {
  const Fixture f = load_fixture("redundancy_trap");
  std::vector<OperationScenario> scns = f.scns;
  scns[1].year = 2;
  CHECK_THROWS_AS(run_pipeline(f.net, scns, 1, {}), std::invalid_argument);
}

TEST_CASE("an unservable year halts the chain with a diagnosis") {
  const Network net = hopeless_net();
  std::vector<OperationScenario> scns = {
      make_scenario(4, {50, 0}, {0, 100}, 1),
      make_scenario(9, {40, 0}, {0, 40}, 2)};

  for (const PlanMode mode :
       {PlanMode::Monolithic, PlanMode::Benders, PlanMode::GreedyBenders}) {
    PipelineConfig cfg;
    cfg.mode = mode;
    const PipelineResult res = run_pipeline(net, scns, 2, cfg);
    INFO("mode " << to_string(mode));
    CHECK_FALSE(res.feasible);
    CHECK(res.failed_year == 1);
    REQUIRE(res.per_year.size() == 1);
    CHECK_FALSE(res.per_year[0].feasible);
    CHECK(res.per_year[0].infeasible_scenarios == std::vector<int>{4});
    CHECK(res.combined.infeasible_scenarios == std::vector<int>{4});
    CHECK_FALSE(res.combined.feasible);
  }
}

TEST_CASE("pipeline reruns reproduce the same reports and logs") {
  const Fixture f = load_fixture("six_bus");
  PipelineConfig cfg;

  std::ostringstream log1, log2;
  const PipelineResult a = run_pipeline(f.net, f.scns, 1, cfg, &log1);
  const PipelineResult b = run_pipeline(f.net, f.scns, 1, cfg, &log2);

  REQUIRE(a.feasible);
  CHECK(result_json(a) == result_json(b));
  CHECK(a.final_plan.built == b.final_plan.built);

  // Logs match once per-line wall clocks are masked.
  const auto strip_wall = [](const std::string& text) {
    std::string out;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
      const size_t pos = line.find(" wall=");
      out += line.substr(0, pos) + "\n";
    }
    return out;
  };
  CHECK(strip_wall(log1.str()) == strip_wall(log2.str()));
  CHECK(log1.str().find("year 1: 20 scenario(s)") != std::string::npos);
}
