#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "tep/branch_and_bound.hpp"
#include "tep/formulation.hpp"
#include "tep/network.hpp"

using Catch::Approx;
using namespace tep;

namespace {

OperationScenario scn(int id, std::vector<double> g, std::vector<double> d) {
  OperationScenario s;
  s.id = id;
  s.generation = std::move(g);
  s.demand = std::move(d);
  return s;
}

Network two_bus() {
  Network net;
  net.name = "two-bus";
  net.buses = {{1, "gen", BusKind::Connected}, {2, "load", BusKind::Connected}};
  net.circuits = {
      {1, 1, 2, 1.0, 80.0, CircuitStatus::Existing, "", 1, 0.0},
      {2, 1, 2, 1.0, 50.0, CircuitStatus::Candidate, "", 1, 10.0},
  };
  return net;
}

Network triangle() {
  Network net;
  net.name = "triangle";
  net.buses = {{1, "source", BusKind::Connected},
               {2, "middle", BusKind::Connected},
               {3, "sink", BusKind::Connected}};
  net.circuits = {
      {1, 1, 2, 1.0, 100.0, CircuitStatus::Existing, "", 1, 0.0},
      {2, 2, 3, 1.0, 100.0, CircuitStatus::Existing, "", 1, 0.0},
      {3, 1, 3, 1.0, 45.0, CircuitStatus::Existing, "", 1, 0.0},
      {4, 1, 3, 1.0, 45.0, CircuitStatus::Candidate, "", 1, 8.0},
      {5, 2, 3, 1.0, 100.0, CircuitStatus::Candidate, "", 1, 9.0},
  };
  return net;
}

// Evaluates investment-space rows at a binary assignment.
bool satisfies(const std::vector<LpRow>& rows, const std::vector<double>& x) {
  for (const LpRow& row : rows) {
    double lhs = 0.0;
    for (const auto& [var, coef] : row.coeffs) lhs += coef * x[static_cast<size_t>(var)];
    if (row.rel == Relation::LessEqual && lhs > row.rhs + 1e-9) return false;
    if (row.rel == Relation::GreaterEqual && lhs < row.rhs - 1e-9) return false;
    if (row.rel == Relation::Equal && std::abs(lhs - row.rhs) > 1e-9) return false;
  }
  return true;
}

}  // namespace

TEST_CASE("disjunctive constant follows the tightest angle path", "[formulation]") {
  SECTION("parallel candidate is bounded by the existing circuit") {
    Network net;
    net.buses = {{1, "a", BusKind::Connected}, {2, "b", BusKind::Connected}};
    net.circuits = {
        {1, 1, 2, 2.0, 100.0, CircuitStatus::Existing, "", 1, 0.0},
        {2, 1, 2, 2.0, 50.0, CircuitStatus::Candidate, "", 1, 3.0},
    };
    const BigMData m = compute_big_m(net);
    REQUIRE(m.value.size() == 1);
    CHECK(m.value[0] == Approx(100.0));  // gamma 2 x (100/2) angle budget
    CHECK(m.method[0] == BigMMethod::PathBound);
  }

  SECTION("two-edge detour sums both angle budgets") {
    Network net;
    net.buses = {{1, "a", BusKind::Connected},
                 {2, "b", BusKind::Connected},
                 {3, "c", BusKind::Connected}};
    net.circuits = {
        {1, 1, 2, 1.0, 80.0, CircuitStatus::Existing, "", 1, 0.0},
        {2, 2, 3, 1.0, 60.0, CircuitStatus::Existing, "", 1, 0.0},
        {3, 1, 3, 2.0, 50.0, CircuitStatus::Candidate, "", 1, 4.0},
    };
    const BigMData m = compute_big_m(net);
    CHECK(m.value[0] == Approx(280.0));  // 2 x (80 + 60)
    CHECK(m.method[0] == BigMMethod::PathBound);
  }

  SECTION("terminals connected only through the candidate fall back") {
    Network net;
    net.buses = {{1, "a", BusKind::Connected}, {2, "b", BusKind::Connected}};
    net.circuits = {
        {1, 1, 2, 1.0, 50.0, CircuitStatus::Candidate, "", 1, 5.0},
    };
    const BigMData m = compute_big_m(net);
    CHECK(m.method[0] == BigMMethod::FallbackGlobal);
    CHECK(m.value[0] == Approx(2.0 * std::numbers::pi * 50.0));
  }

  SECTION("triangle candidates bound through the remaining circuits") {
    const BigMData m = compute_big_m(triangle());
    REQUIRE(m.value.size() == 2);
    CHECK(m.value[0] == Approx(45.0));   // direct existing circuit
    CHECK(m.value[1] == Approx(100.0));  // direct beats the 145 detour
    CHECK(m.method[0] == BigMMethod::PathBound);
    CHECK(m.method[1] == BigMMethod::PathBound);
  }
}

TEST_CASE("bottleneck rows demand candidate capacity at deficit buses",
          "[formulation]") {
  SECTION("generator bus must export its worst surplus") {
    Network net;
    net.buses = {{1, "gen", BusKind::Connected}, {2, "load", BusKind::Connected}};
    net.circuits = {
        {1, 1, 2, 1.0, 300.0, CircuitStatus::Existing, "", 1, 0.0},
        {2, 1, 2, 1.0, 150.0, CircuitStatus::Candidate, "dup", 1, 7.0},
        {3, 1, 2, 1.0, 150.0, CircuitStatus::Candidate, "dup", 2, 7.0},
    };
    const auto scns = {scn(1, {500, 0}, {0, 500})};
    const std::vector<LpRow> rows = bottleneck_constraints(net, {scns});
    REQUIRE(rows.size() == 2);  // both endpoints carry the full 500
    for (const LpRow& row : rows) {
      CHECK(row.rel == Relation::GreaterEqual);
      CHECK(row.rhs == Approx(200.0));
      REQUIRE(row.coeffs.size() == 2);
      CHECK(row.coeffs[0].second == Approx(150.0));
      CHECK(row.coeffs[1].second == Approx(150.0));
    }
  }

  SECTION("bus within existing capacity contributes no row") {
    const Network net = two_bus();
    const auto rows = bottleneck_constraints(net, {scn(1, {60, 0}, {0, 60})});
    CHECK(rows.empty());
  }

  SECTION("deficit without any incident candidate emits an empty-sum row") {
    Network net;
    net.buses = {{1, "gen", BusKind::Connected}, {2, "load", BusKind::Connected}};
    net.circuits = {
        {1, 1, 2, 1.0, 100.0, CircuitStatus::Existing, "", 1, 0.0},
    };
    const auto rows = bottleneck_constraints(net, {scn(1, {120, 0}, {0, 120})});
    REQUIRE(rows.size() == 2);
    CHECK(rows[0].coeffs.empty());
    CHECK(rows[0].rhs == Approx(20.0));
  }
}

TEST_CASE("connectivity rows forbid a lone circuit into a transshipment bus",
          "[formulation]") {
  Network net;
  net.buses = {{1, "a", BusKind::Connected},
               {2, "b", BusKind::Connected},
               {6, "hub", BusKind::Transshipment}};
  net.circuits = {
      {1, 1, 2, 1.0, 100.0, CircuitStatus::Existing, "", 1, 0.0},
      {2, 1, 6, 1.0, 50.0, CircuitStatus::Candidate, "", 1, 5.0},
      {3, 6, 2, 1.0, 50.0, CircuitStatus::Candidate, "", 1, 5.0},
  };

  SECTION("two incident candidates must be built together") {
    const auto rows = connectivity_constraints(net);
    REQUIRE(rows.size() == 2);
    CHECK(satisfies(rows, {0, 0}));
    CHECK(satisfies(rows, {1, 1}));
    CHECK_FALSE(satisfies(rows, {1, 0}));
    CHECK_FALSE(satisfies(rows, {0, 1}));
  }

  SECTION("three incident candidates exclude exactly-one") {
    net.circuits.push_back({4, 6, 1, 1.0, 50.0, CircuitStatus::Candidate, "", 1, 5.0});
    const auto rows = connectivity_constraints(net);
    REQUIRE(rows.size() == 3);
    for (int bits = 0; bits < 8; ++bits) {
      const std::vector<double> x = {static_cast<double>(bits & 1),
                                     static_cast<double>((bits >> 1) & 1),
                                     static_cast<double>((bits >> 2) & 1)};
      const int built = static_cast<int>(x[0] + x[1] + x[2]);
      CAPTURE(bits);
      CHECK(satisfies(rows, x) == (built != 1));
    }
  }

  SECTION("no transshipment buses means no rows") {
    CHECK(connectivity_constraints(two_bus()).empty());
  }
}

TEST_CASE("precedence rows order duplicate candidates by rank", "[formulation]") {
  Network net;
  net.buses = {{1, "a", BusKind::Connected}, {2, "b", BusKind::Connected}};
  net.circuits = {
      {1, 1, 2, 1.0, 80.0, CircuitStatus::Existing, "", 1, 0.0},
      // Scrambled input order: ranks 2, 1, 3.
      {2, 1, 2, 1.0, 50.0, CircuitStatus::Candidate, "c12", 2, 6.0},
      {3, 1, 2, 1.0, 50.0, CircuitStatus::Candidate, "c12", 1, 6.0},
      {4, 1, 2, 1.0, 50.0, CircuitStatus::Candidate, "c12", 3, 6.0},
  };
  const auto rows = precedence_constraints(net);
  REQUIRE(rows.size() == 2);
  // Candidate positions: 0 = rank 2, 1 = rank 1, 2 = rank 3.
  CHECK(satisfies(rows, {0, 1, 0}));   // rank 1 alone
  CHECK(satisfies(rows, {1, 1, 0}));   // ranks 1, 2
  CHECK(satisfies(rows, {1, 1, 1}));
  CHECK_FALSE(satisfies(rows, {1, 0, 0}));  // rank 2 without rank 1
  CHECK_FALSE(satisfies(rows, {0, 0, 1}));  // rank 3 alone

  CHECK(precedence_constraints(two_bus()).empty());
}

TEST_CASE("monolithic optimum trades investment against the penalty",
          "[formulation]") {
  const Network net = two_bus();
  const std::vector<OperationScenario> scns = {scn(1, {100, 0}, {0, 100})};
  const BigMData m = compute_big_m(net);

  SECTION("default penalty makes building the cheaper choice") {
    const MonolithicProblem prob = build_monolithic(net, scns, m);
    CHECK(prob.mu == Approx(100.0));  // 10 x the only candidate cost
    const MilpSolution sol = solve_milp(prob.lp);
    REQUIRE(sol.status == MilpStatus::Optimal);
    CHECK(sol.objective == Approx(10.0));
    CHECK(extract_plan(prob, sol.x).built == std::vector<std::uint8_t>{1});
    CHECK(monolithic_shed(prob, sol.x, net) == Approx(0.0).margin(1e-7));
  }

  SECTION("a penalty below the build cost prefers curtailment") {
    FormulationOptions opt;
    opt.mu = 0.4;  // shedding 20 MW costs 8, building costs 10
    opt.use_bottleneck = false;  // the deficit row would force the build
    const MonolithicProblem prob = build_monolithic(net, scns, m, opt);
    const MilpSolution sol = solve_milp(prob.lp);
    REQUIRE(sol.status == MilpStatus::Optimal);
    CHECK(sol.objective == Approx(8.0));
    CHECK(extract_plan(prob, sol.x).built == std::vector<std::uint8_t>{0});
    CHECK(monolithic_shed(prob, sol.x, net) == Approx(20.0));
  }

  SECTION("bottleneck rows pin the build even under a weak penalty") {
    FormulationOptions opt;
    opt.mu = 0.4;
    const MonolithicProblem prob = build_monolithic(net, scns, m, opt);
    const MilpSolution sol = solve_milp(prob.lp);
    REQUIRE(sol.status == MilpStatus::Optimal);
    CHECK(sol.objective == Approx(10.0));
    CHECK(extract_plan(prob, sol.x).built == std::vector<std::uint8_t>{1});
  }

  SECTION("no scenarios collapse to the empty plan at cost zero") {
    const MonolithicProblem prob = build_monolithic(net, {}, m);
    const MilpSolution sol = solve_milp(prob.lp);
    REQUIRE(sol.status == MilpStatus::Optimal);
    CHECK(sol.objective == Approx(0.0).margin(1e-9));
    CHECK(extract_plan(prob, sol.x).built == std::vector<std::uint8_t>{0});
  }
}

TEST_CASE("monolithic picks the candidate that clears the triangle",
          "[formulation]") {
  const Network net = triangle();
  const std::vector<OperationScenario> single = {scn(1, {90, 0, 0}, {0, 0, 90})};
  const BigMData m = compute_big_m(net);

  const MonolithicProblem prob = build_monolithic(net, single, m);
  const MilpSolution sol = solve_milp(prob.lp);
  REQUIRE(sol.status == MilpStatus::Optimal);
  CHECK(sol.objective == Approx(8.0));
  CHECK(extract_plan(prob, sol.x).built == std::vector<std::uint8_t>{1, 0});

  SECTION("binary count tracks candidates, not scenarios") {
    const std::vector<OperationScenario> three = {scn(1, {90, 0, 0}, {0, 0, 90}),
                                                  scn(2, {60, 0, 0}, {0, 0, 60}),
                                                  scn(3, {30, 0, 0}, {0, 0, 30})};
    const MonolithicProblem p3 = build_monolithic(net, three, m);
    const auto binaries = [](const LinearProgram& lp) {
      int n = 0;
      for (bool b : lp.is_binary) n += b ? 1 : 0;
      return n;
    };
    CHECK(binaries(prob.lp) == 2);
    CHECK(binaries(p3.lp) == 2);
    CHECK(p3.blocks.size() == 3);
  }

  SECTION("row budget guard refuses oversized assemblies") {
    FormulationOptions opt;
    opt.row_budget = 10;
    CHECK_THROWS_AS(build_monolithic(net, single, m, opt), std::length_error);
    CHECK_THROWS_WITH(build_monolithic(net, single, m, opt),
                      Catch::Matchers::ContainsSubstring("budget"));
  }
}

TEST_CASE("duplicate corridor solutions respect the rank order", "[formulation]") {
  Network net;
  net.buses = {{1, "gen", BusKind::Connected}, {2, "load", BusKind::Connected}};
  net.circuits = {
      {1, 1, 2, 1.0, 80.0, CircuitStatus::Existing, "", 1, 0.0},
      {2, 1, 2, 1.0, 50.0, CircuitStatus::Candidate, "c12", 1, 10.0},
      {3, 1, 2, 1.0, 50.0, CircuitStatus::Candidate, "c12", 2, 10.0},
  };
  const std::vector<OperationScenario> scns = {scn(1, {100, 0}, {0, 100})};

  const MonolithicProblem prob = build_monolithic(net, scns, compute_big_m(net));
  const MilpSolution sol = solve_milp(prob.lp);
  REQUIRE(sol.status == MilpStatus::Optimal);
  CHECK(sol.objective == Approx(10.0));
  // One duplicate suffices; precedence pins it to rank 1.
  CHECK(extract_plan(prob, sol.x).built == std::vector<std::uint8_t>{1, 0});
}

TEST_CASE("bottleneck rows turn hopeless shedding into infeasibility",
          "[formulation]") {
  Network net;
  net.name = "star";
  net.buses = {{1, "gen", BusKind::Connected},
               {2, "east", BusKind::Connected},
               {3, "west", BusKind::Connected}};
  net.circuits = {
      {1, 1, 2, 1.0, 30.0, CircuitStatus::Existing, "", 1, 0.0},
      {2, 1, 3, 1.0, 30.0, CircuitStatus::Existing, "", 1, 0.0},
  };
  const std::vector<OperationScenario> scns = {scn(1, {100, 0, 0}, {0, 50, 50})};
  const BigMData m = compute_big_m(net);

  SECTION("without the rows the penalty optimum sheds") {
    FormulationOptions opt;
    opt.use_bottleneck = false;
    const MonolithicProblem prob = build_monolithic(net, scns, m, opt);
    CHECK(prob.mu == Approx(1.0));  // no candidates: clamped floor
    const MilpSolution sol = solve_milp(prob.lp);
    REQUIRE(sol.status == MilpStatus::Optimal);
    CHECK(sol.objective == Approx(40.0));
  }

  SECTION("with the rows the deficit is provably unfixable") {
    const MonolithicProblem prob = build_monolithic(net, scns, m);
    const MilpSolution sol = solve_milp(prob.lp);
    CHECK(sol.status == MilpStatus::Infeasible);
  }
}
