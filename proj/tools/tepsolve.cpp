// tepsolve: robust transmission expansion planning from the command line.
//
//   validate       parse and sanity-check a network + scenario pair
//   screen         per-scenario power-flow screening at a given plan
//   plan           year-chained expansion planning (three engines)
//   gen-scenarios  synthesize a labeled scenario grid from base profiles
//   oracle         exhaustive enumeration of every candidate subset
//   check          run the solver property suites
//
// Exit codes: 0 success, 1 infeasible plan, 2 input error, 3 internal or
// solver error. Reports go to stdout; convergence and prune logs to stderr.

#include <cstdint>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "tep/io.hpp"
#include "tep/oracle.hpp"
#include "tep/pipeline.hpp"
#include "tep/scenario_gen.hpp"
#include "tep/verification.hpp"

namespace {

using namespace tep;

constexpr int kExitSuccess = 0;
constexpr int kExitInfeasible = 1;
constexpr int kExitInputError = 2;
constexpr int kExitInternalError = 3;

struct Inputs {
  Network net;
  std::vector<OperationScenario> scns;
};

Inputs load_inputs(const std::string& net_path, const std::string& scn_path) {
  Inputs in;
  in.net = load_network(net_path);
  in.scns = load_scenarios(scn_path, in.net);
  return in;
}

void require_valid(const Inputs& in) {
  const ValidationReport rep = validate_network(in.net, in.scns);
  if (rep.ok()) return;
  std::string msg = "invalid input:";
  for (const ValidationIssue& issue : rep.issues)
    msg += std::string("\n  ") + to_string(issue.code) + ": " + issue.message;
  throw std::invalid_argument(msg);
}

TrialPlan plan_from_ids(const Network& net, const std::vector<int>& ids) {
  TrialPlan plan = empty_plan(net);
  const std::vector<int> cand = net.candidate_indices();
  for (int id : ids) {
    bool found = false;
    for (size_t k = 0; k < cand.size(); ++k)
      if (net.circuits[static_cast<size_t>(cand[k])].id == id) {
        plan.built[k] = 1;
        found = true;
      }
    if (!found)
      throw std::invalid_argument("--plan names circuit " + std::to_string(id) +
                                  ", which is not a candidate");
  }
  return plan;
}

int cmd_validate(const std::string& net_path, const std::string& scn_path) {
  const Inputs in = load_inputs(net_path, scn_path);
  std::cout << "network: " << in.net.num_buses() << " buses, "
            << in.net.circuits.size() << " circuits ("
            << in.net.num_candidates() << " candidates)\n";
  std::cout << "scenarios: " << in.scns.size() << "\n";
  const ValidationReport rep = validate_network(in.net, in.scns);
  if (rep.ok()) {
    std::cout << "validation: ok\n";
    return kExitSuccess;
  }
  std::cout << "validation: " << rep.issues.size() << " issue(s)\n";
  for (const ValidationIssue& issue : rep.issues)
    std::cout << "  " << to_string(issue.code) << ": " << issue.message << "\n";
  return kExitInputError;
}

int cmd_screen(const std::string& net_path, const std::string& scn_path,
               const std::vector<int>& plan_ids) {
  const Inputs in = load_inputs(net_path, scn_path);
  require_valid(in);
  const TrialPlan plan = plan_from_ids(in.net, plan_ids);
  const int slack = in.scns.empty() ? 0 : resolve_slack_index(in.net, in.scns);

  int clean = 0;
  for (const OperationScenario& s : in.scns) {
    const ScenarioScreen sc = screen_scenario(in.net, plan, s, slack);
    if (sc.overload_free) {
      ++clean;
      std::printf("scenario %d: ok (worst loading %.3f)\n", s.id, sc.worst_ratio);
    } else if (!sc.solvable) {
      std::printf("scenario %d: unsolvable (demand islanded from generation)\n",
                  s.id);
    } else {
      std::string ids;
      for (int ci : sc.overloaded) {
        if (!ids.empty()) ids += ", ";
        ids += std::to_string(in.net.circuits[static_cast<size_t>(ci)].id);
      }
      std::printf("scenario %d: overloads circuit(s) %s (worst loading %.3f)\n",
                  s.id, ids.c_str(), sc.worst_ratio);
    }
  }
  std::printf("screen: %d of %zu scenario(s) clean at plan %s\n", clean,
              in.scns.size(), detail::plan_ids_text(in.net, plan.built).c_str());
  return clean == static_cast<int>(in.scns.size()) ? kExitSuccess
                                                   : kExitInfeasible;
}

struct PlanFlags {
  std::string mode = "greedy-benders";
  std::string criterion = "shed-amount";
  int max_critical = 3;
  double gap = 0.03;
  double penalty = 0.0;
  std::uint64_t seed = 1;
  int years = 0;
  std::string out;
  std::string format = "text";
};

int cmd_plan(const std::string& net_path, const std::string& scn_path,
             const PlanFlags& flags) {
  const Inputs in = load_inputs(net_path, scn_path);
  require_valid(in);

  PipelineConfig cfg;
  cfg.mode = flags.mode == "monolithic" ? PlanMode::Monolithic
             : flags.mode == "benders"  ? PlanMode::Benders
                                        : PlanMode::GreedyBenders;
  cfg.criterion = flags.criterion == "shed-spread"
                      ? CriticalCriterion::ShedSpread
                      : CriticalCriterion::ShedAmount;
  cfg.max_critical = flags.max_critical;
  cfg.milp_gap = flags.gap;
  cfg.formulation.mu = flags.penalty;

  const PipelineResult res =
      run_pipeline(in.net, in.scns, flags.years, cfg, &std::cerr);

  if (flags.format == "json") {
    nlohmann::json j;
    j["feasible"] = res.feasible;
    j["failed_year"] = res.failed_year;
    j["per_year"] = nlohmann::json::array();
    for (const PlanReport& rep : res.per_year)
      j["per_year"].push_back(report_to_json(rep));
    j["combined"] = report_to_json(res.combined);
    std::cout << j.dump(2) << "\n";
  } else {
    for (size_t y = 0; y < res.per_year.size(); ++y) {
      std::cout << "==== year " << (y + 1) << " ====\n"
                << report_to_text(res.per_year[y]) << "\n";
    }
    std::cout << "==== combined ====\n" << report_to_text(res.combined);
  }
  if (!flags.out.empty())
    write_plan_report(res.combined, flags.out,
                      flags.format == "json" ? ReportFormat::Json
                                             : ReportFormat::Text);
  return res.feasible ? kExitSuccess : kExitInfeasible;
}

struct GenFlags {
  int months = 12;
  int blocks = 5;
  int draws = 25;
  std::uint64_t seed = 1;
  double demand_volatility = 0.10;
  double generation_volatility = 0.20;
  double seasonal_swing = 0.15;
  double block_span = 0.40;
  int year = 1;
  std::string out;
};

int cmd_gen(const std::string& net_path, const std::string& base_path,
            const GenFlags& flags) {
  Network net = load_network(net_path);
  const std::vector<OperationScenario> base = load_scenarios(base_path, net);
  if (base.empty())
    throw std::invalid_argument("base scenario file is empty: " + base_path);

  ScenarioGenConfig cfg;
  cfg.months = flags.months;
  cfg.blocks = flags.blocks;
  cfg.draws = flags.draws;
  cfg.seed = flags.seed;
  cfg.demand_volatility = flags.demand_volatility;
  cfg.generation_volatility = flags.generation_volatility;
  cfg.seasonal_swing = flags.seasonal_swing;
  cfg.block_span = flags.block_span;
  cfg.year = flags.year;
  // The first base scenario supplies the per-bus profile levels.
  for (int bi = 0; bi < net.num_buses(); ++bi) {
    if (net.buses[static_cast<size_t>(bi)].kind == BusKind::Transshipment)
      continue;
    cfg.profiles.push_back({net.buses[static_cast<size_t>(bi)].id,
                            base.front().generation[static_cast<size_t>(bi)],
                            base.front().demand[static_cast<size_t>(bi)]});
  }

  const std::vector<OperationScenario> scns = generate_scenarios(net, cfg);
  write_scenarios(flags.out, net, scns);
  std::cout << "wrote " << scns.size() << " scenario(s) to " << flags.out
            << "\n";
  return kExitSuccess;
}

int cmd_oracle(const std::string& net_path, const std::string& scn_path,
               const std::string& out) {
  const Inputs in = load_inputs(net_path, scn_path);
  require_valid(in);
  const OracleResult res = brute_force_oracle(in.net, in.scns);
  const nlohmann::json j = oracle_to_json(res, in.net);
  if (out.empty()) {
    std::cout << j.dump(2) << "\n";
  } else {
    std::ofstream file(out);
    if (!file) throw io_error("cannot open for writing: " + out);
    file << j.dump(2) << "\n";
  }
  return res.robust_exists ? kExitSuccess : kExitInfeasible;
}

int cmd_check(const std::string& net_path, const std::string& scn_path,
              const std::string& suite) {
  const Inputs in = load_inputs(net_path, scn_path);
  require_valid(in);
  const PropertyReport rep = check_properties(in.net, in.scns, suite);
  int passed = 0;
  for (const PropertyCheck& c : rep.checks) {
    if (c.passed) ++passed;
    std::cout << (c.passed ? "[pass] " : "[FAIL] ") << c.suite << "/" << c.name;
    if (!c.detail.empty()) std::cout << ": " << c.detail;
    std::cout << "\n";
  }
  std::cout << "properties: " << passed << " of " << rep.checks.size()
            << " check(s) passed\n";
  return rep.all_passed() ? kExitSuccess : kExitInternalError;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"robust transmission expansion planning"};
  app.require_subcommand(1);

  std::string net_path, scn_path;

  CLI::App* validate = app.add_subcommand("validate", "parse and check inputs");
  validate->add_option("--network", net_path, "network file")->required();
  validate->add_option("--scenarios", scn_path, "scenario file")->required();

  std::vector<int> plan_ids;
  CLI::App* screen =
      app.add_subcommand("screen", "power-flow screening at a fixed plan");
  screen->add_option("--network", net_path, "network file")->required();
  screen->add_option("--scenarios", scn_path, "scenario file")->required();
  screen->add_option("--plan", plan_ids, "candidate circuit ids to build")
      ->delimiter(',');

  PlanFlags plan_flags;
  CLI::App* plan = app.add_subcommand("plan", "compute an expansion plan");
  plan->add_option("--network", net_path, "network file")->required();
  plan->add_option("--scenarios", scn_path, "scenario file")->required();
  plan->add_option("--mode", plan_flags.mode, "solver engine")
      ->check(CLI::IsMember({"monolithic", "benders", "greedy-benders"}))
      ->capture_default_str();
  plan->add_option("--criterion", plan_flags.criterion,
                   "critical scenario ranking")
      ->check(CLI::IsMember({"shed-amount", "shed-spread"}))
      ->capture_default_str();
  plan->add_option("--max-critical", plan_flags.max_critical,
                   "scenarios embedded into the master")
      ->capture_default_str();
  plan->add_option("--gap", plan_flags.gap, "relative MILP gap")
      ->capture_default_str();
  plan->add_option("--penalty", plan_flags.penalty,
                   "curtailment penalty (0 picks one above any plan cost)")
      ->capture_default_str();
  plan->add_option("--seed", plan_flags.seed,
                   "accepted for uniform batch scripts; planning is "
                   "deterministic and ignores it")
      ->capture_default_str();
  plan->add_option("--years", plan_flags.years,
                   "planning horizon (0 derives it from scenario labels)")
      ->capture_default_str();
  plan->add_option("--out", plan_flags.out, "write the combined report here");
  plan->add_option("--format", plan_flags.format, "report rendering")
      ->check(CLI::IsMember({"text", "json"}))
      ->capture_default_str();

  GenFlags gen_flags;
  std::string base_path;
  CLI::App* gen =
      app.add_subcommand("gen-scenarios", "synthesize a scenario grid");
  gen->add_option("--network", net_path, "network file")->required();
  gen->add_option("--base", base_path,
                  "scenario file whose first row sets the base profiles")
      ->required();
  gen->add_option("--months", gen_flags.months, "months in the seasonal cycle")
      ->capture_default_str();
  gen->add_option("--blocks", gen_flags.blocks, "load blocks per month")
      ->capture_default_str();
  gen->add_option("--draws", gen_flags.draws, "random draws per month-block")
      ->capture_default_str();
  gen->add_option("--seed", gen_flags.seed, "random seed")
      ->capture_default_str();
  gen->add_option("--demand-volatility", gen_flags.demand_volatility,
                  "relative sigma on bus demand")
      ->capture_default_str();
  gen->add_option("--generation-volatility", gen_flags.generation_volatility,
                  "relative sigma on non-slack generation")
      ->capture_default_str();
  gen->add_option("--seasonal-swing", gen_flags.seasonal_swing,
                  "peak-month demand lift")
      ->capture_default_str();
  gen->add_option("--block-span", gen_flags.block_span,
                  "heavy-to-light block spread")
      ->capture_default_str();
  gen->add_option("--year", gen_flags.year, "year label for the output")
      ->capture_default_str();
  gen->add_option("--out", gen_flags.out, "scenario file to write")->required();

  std::string oracle_out;
  CLI::App* oracle =
      app.add_subcommand("oracle", "enumerate every candidate subset");
  oracle->add_option("--network", net_path, "network file")->required();
  oracle->add_option("--scenarios", scn_path, "scenario file")->required();
  oracle->add_option("--out", oracle_out, "write the table here instead of stdout");

  std::string suite = "all";
  CLI::App* check = app.add_subcommand("check", "run the property suites");
  check->add_option("--network", net_path, "network file")->required();
  check->add_option("--scenarios", scn_path, "scenario file")->required();
  check->add_option("--suite", suite, "one suite name, or 'all'")
      ->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitSuccess : kExitInputError;
  }

  try {
    if (validate->parsed()) return cmd_validate(net_path, scn_path);
    if (screen->parsed()) return cmd_screen(net_path, scn_path, plan_ids);
    if (plan->parsed()) return cmd_plan(net_path, scn_path, plan_flags);
    if (gen->parsed()) return cmd_gen(net_path, base_path, gen_flags);
    if (oracle->parsed()) return cmd_oracle(net_path, scn_path, oracle_out);
    if (check->parsed()) return cmd_check(net_path, scn_path, suite);
  } catch (const io_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInputError;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInputError;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kExitInternalError;
  }
  return kExitInputError;
}
