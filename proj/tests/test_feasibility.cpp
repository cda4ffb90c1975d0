#include <catch2/catch_amalgamated.hpp>

#include <cstdint>
#include <vector>

#include "tep/feasibility.hpp"
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

// Load reachable only through a candidate circuit.
Network islanded() {
  Network net;
  net.name = "islanded";
  net.buses = {{1, "gen", BusKind::Connected}, {2, "load", BusKind::Connected}};
  net.circuits = {
      {1, 1, 2, 1.0, 50.0, CircuitStatus::Candidate, "", 1, 5.0},
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

}  // namespace

TEST_CASE("shortfall equals demand beyond the existing rating", "[feasibility]") {
  const Network net = two_bus();
  const OperationScenario s = scn(1, {100, 0}, {0, 100});
  const std::vector<double> big_m = {1000.0};

  SECTION("unbuilt plan sheds the 20 MW the corridor cannot carry") {
    const TrialPlan plan = empty_plan(net);
    const FeasibilityResult r = solve_feasibility(net, plan, s, big_m, 0);
    REQUIRE(r.status == LpStatus::Optimal);
    CHECK(r.scenario == 1);
    CHECK(r.shed == Approx(20.0));
    CHECK(r.shed_by_bus[1] == Approx(20.0));
    CHECK(r.spill_by_bus[0] == Approx(20.0));
    CHECK(r.shed_buses == 1);
    CHECK_FALSE(r.robust());

    // One unit of the 50 MW candidate removes shortfall at 50 MW per unit.
    const BendersCut cut = compute_cut(r, net, plan);
    REQUIRE(cut.coeffs.size() == 1);
    CHECK(cut.coeffs[0] == Approx(-50.0));
    CHECK(cut.base == Approx(20.0));
    CHECK(cut.evaluate(plan.built) == Approx(cut.base));
  }

  SECTION("built plan serves everything") {
    const FeasibilityResult r = solve_feasibility(net, full_plan(net), s, big_m, 0);
    REQUIRE(r.status == LpStatus::Optimal);
    CHECK(r.shed == Approx(0.0).margin(1e-9));
    CHECK(r.shed_buses == 0);
    CHECK(r.robust());
  }
}

TEST_CASE("candidate-only corridor stays solvable unbuilt", "[feasibility]") {
  const Network net = islanded();
  const OperationScenario s = scn(1, {100, 0}, {0, 100});
  const std::vector<double> big_m = {1000.0};

  SECTION("everything sheds while the load bus is cut off") {
    const TrialPlan plan = empty_plan(net);
    const FeasibilityResult r = solve_feasibility(net, plan, s, big_m, 0);
    REQUIRE(r.status == LpStatus::Optimal);
    CHECK(r.shed == Approx(100.0));
    CHECK(r.spill_by_bus[0] == Approx(100.0));
    CHECK(compute_cut(r, net, plan).coeffs[0] == Approx(-50.0));
  }

  SECTION("building leaves the 50 MW the circuit cannot carry") {
    const TrialPlan plan = full_plan(net);
    const FeasibilityResult r = solve_feasibility(net, plan, s, big_m, 0);
    REQUIRE(r.status == LpStatus::Optimal);
    CHECK(r.shed == Approx(50.0));
    CHECK(r.shed_by_bus[1] == Approx(50.0));
    // The angle-law pair binds with shared slope zero; only capacity prices.
    CHECK(r.pi_m[0] == Approx(0.0).margin(1e-12));
    CHECK(compute_cut(r, net, plan).coeffs[0] == Approx(-50.0));
  }
}

TEST_CASE("loop coupling limits the triangle and prices both candidates",
          "[feasibility]") {
  const Network net = triangle();
  const OperationScenario s = scn(1, {90, 0, 0}, {0, 0, 90});
  const std::vector<double> big_m = {1e4, 1e4};
  const TrialPlan none = empty_plan(net);

  const FeasibilityResult base = solve_feasibility(net, none, s, big_m, 0);
  REQUIRE(base.status == LpStatus::Optimal);
  // Two thirds of any delivery rides the direct 45 MW circuit: cap 67.5.
  CHECK(base.shed == Approx(22.5));

  TrialPlan with_c1 = empty_plan(net);
  with_c1.built[0] = 1;
  const FeasibilityResult r1 = solve_feasibility(net, with_c1, s, big_m, 0);
  REQUIRE(r1.status == LpStatus::Optimal);
  CHECK(r1.shed == Approx(0.0).margin(1e-9));

  TrialPlan with_c2 = empty_plan(net);
  with_c2.built[1] = 1;
  const FeasibilityResult r2 = solve_feasibility(net, with_c2, s, big_m, 0);
  REQUIRE(r2.status == LpStatus::Optimal);
  // Doubling 2-3 shifts the split to 0.6 direct: cap 75, still short.
  CHECK(r2.shed == Approx(15.0));

  const BendersCut cut = compute_cut(base, net, none);

  SECTION("cut is the exact gradient where the optimum is smooth") {
    REQUIRE(cut.coeffs.size() == 2);
    // Marginal candidate flow bypasses the angle law at x = 0, so each
    // candidate prices at its full rating times the shortfall rate.
    CHECK(cut.coeffs[0] == Approx(-45.0));
    CHECK(cut.coeffs[1] == Approx(-50.0));
  }

  SECTION("cut under-estimates the shortfall at every binary point") {
    const double tol = 1e-6;
    const double w_full =
        solve_feasibility(net, full_plan(net), s, big_m, 0).shed;
    const std::vector<std::pair<std::vector<std::uint8_t>, double>> points = {
        {{0, 0}, base.shed}, {{1, 0}, r1.shed}, {{0, 1}, r2.shed}, {{1, 1}, w_full}};
    for (const auto& [x, w] : points) CHECK(w >= cut.evaluate(x) - tol);
  }
}

TEST_CASE("shed spread counts every bus forced to curtail", "[feasibility]") {
  Network net;
  net.name = "star";
  net.buses = {{1, "gen", BusKind::Connected},
               {2, "east", BusKind::Connected},
               {3, "west", BusKind::Connected}};
  net.circuits = {
      {1, 1, 2, 1.0, 30.0, CircuitStatus::Existing, "", 1, 0.0},
      {2, 1, 3, 1.0, 30.0, CircuitStatus::Existing, "", 1, 0.0},
  };
  const OperationScenario s = scn(1, {100, 0, 0}, {0, 50, 50});

  const FeasibilityResult r = solve_feasibility(net, empty_plan(net), s, {}, 0);
  REQUIRE(r.status == LpStatus::Optimal);
  CHECK(r.shed == Approx(40.0));
  CHECK(r.shed_by_bus[1] == Approx(20.0));
  CHECK(r.shed_by_bus[2] == Approx(20.0));
  CHECK(r.shed_buses == 2);
  CHECK(compute_cut(r, net, empty_plan(net)).coeffs.empty());
}

TEST_CASE("subproblem solves are deterministic", "[feasibility]") {
  const Network net = triangle();
  const OperationScenario s = scn(1, {90, 0, 0}, {0, 0, 90});
  const std::vector<double> big_m = {1e4, 1e4};

  const FeasibilityResult a = solve_feasibility(net, empty_plan(net), s, big_m, 0);
  const FeasibilityResult b = solve_feasibility(net, empty_plan(net), s, big_m, 0);
  REQUIRE(a.status == LpStatus::Optimal);
  CHECK(a.shed == b.shed);
  CHECK(a.pi_m == b.pi_m);
  CHECK(a.pi_f == b.pi_f);
  CHECK(a.shed_by_bus == b.shed_by_bus);
  CHECK(a.iterations == b.iterations);
}
