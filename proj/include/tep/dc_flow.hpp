#pragma once
// DC power flow for a fixed build plan: per-island reduced Laplacian solve,
// then branch flows f = gamma * (theta_from - theta_to). Islands must be
// individually balanced for the flow to exist at all; the screen treats an
// imbalanced island as a violation just like an overload.

#include <Eigen/Dense>
#include <cmath>
#include <vector>

#include "tep/network.hpp"

namespace tep {

// Circuit indices (into net.circuits) that carry flow under the plan:
// existing first, then built candidates, deterministic order.
inline std::vector<int> in_service_circuits(const Network& net, const TrialPlan& plan) {
  std::vector<int> on = net.existing_indices();
  const auto cand = net.candidate_indices();
  for (size_t k = 0; k < cand.size(); ++k)
    if (plan.built[k]) on.push_back(cand[k]);
  return on;
}

struct DcFlowResult {
  bool solvable = false;          // every island balanced
  std::vector<double> theta;      // radians per bus index; references pinned at 0
  std::vector<double> flow;       // MW per circuit index; out of service = 0
  std::vector<int> component;     // island id per bus index
  std::vector<double> imbalance;  // per island: total generation minus demand
};

inline DcFlowResult solve_dc_flow(const Network& net, const TrialPlan& plan,
                                  const OperationScenario& scn, int slack_index) {
  const int nb = net.num_buses();
  DcFlowResult res;
  res.theta.assign(static_cast<size_t>(nb), 0.0);
  res.flow.assign(net.circuits.size(), 0.0);
  res.component.assign(static_cast<size_t>(nb), -1);

  const std::vector<int> on = in_service_circuits(net, plan);

  detail::DisjointSet ds(nb);
  for (int ci : on) {
    const Circuit& c = net.circuits[static_cast<size_t>(ci)];
    ds.unite(net.bus_index(c.from), net.bus_index(c.to));
  }
  int ncomp = 0;
  std::vector<int> comp_of_root(static_cast<size_t>(nb), -1);
  for (int i = 0; i < nb; ++i) {
    const int r = ds.find(i);
    if (comp_of_root[static_cast<size_t>(r)] < 0) comp_of_root[static_cast<size_t>(r)] = ncomp++;
    res.component[static_cast<size_t>(i)] = comp_of_root[static_cast<size_t>(r)];
  }

  res.imbalance.assign(static_cast<size_t>(ncomp), 0.0);
  std::vector<double> scale(static_cast<size_t>(ncomp), 1.0);
  for (int i = 0; i < nb; ++i) {
    const double g = scn.generation[static_cast<size_t>(i)];
    const double d = scn.demand[static_cast<size_t>(i)];
    res.imbalance[static_cast<size_t>(res.component[static_cast<size_t>(i)])] += g - d;
    scale[static_cast<size_t>(res.component[static_cast<size_t>(i)])] += g + d;
  }
  res.solvable = true;
  for (int c = 0; c < ncomp; ++c)
    if (std::abs(res.imbalance[static_cast<size_t>(c)]) > 1e-6 * scale[static_cast<size_t>(c)])
      res.solvable = false;
  if (!res.solvable) return res;

  // Reference per island: the slack bus where it lives, lowest index elsewhere.
  std::vector<int> ref(static_cast<size_t>(ncomp), -1);
  if (slack_index >= 0 && slack_index < nb)
    ref[static_cast<size_t>(res.component[static_cast<size_t>(slack_index)])] = slack_index;
  for (int i = 0; i < nb; ++i) {
    int& r = ref[static_cast<size_t>(res.component[static_cast<size_t>(i)])];
    if (r < 0) r = i;
  }

  std::vector<int> local(static_cast<size_t>(nb), -1);
  for (int c = 0; c < ncomp; ++c) {
    std::vector<int> members;
    for (int i = 0; i < nb; ++i)
      if (res.component[static_cast<size_t>(i)] == c) members.push_back(i);
    if (members.size() <= 1) continue;  // lone bus: balanced means zero injection
    int m = 0;
    for (int i : members)
      local[static_cast<size_t>(i)] = (i == ref[static_cast<size_t>(c)]) ? -1 : m++;

    Eigen::MatrixXd lap = Eigen::MatrixXd::Zero(m, m);
    Eigen::VectorXd p = Eigen::VectorXd::Zero(m);
    for (int i : members) {
      const int li = local[static_cast<size_t>(i)];
      if (li >= 0)
        p[li] = scn.generation[static_cast<size_t>(i)] - scn.demand[static_cast<size_t>(i)];
    }
    for (int ci : on) {
      const Circuit& cc = net.circuits[static_cast<size_t>(ci)];
      const int fi = net.bus_index(cc.from), ti = net.bus_index(cc.to);
      if (res.component[static_cast<size_t>(fi)] != c) continue;
      const double g = net.gamma(cc);
      const int lf = local[static_cast<size_t>(fi)], lt = local[static_cast<size_t>(ti)];
      if (lf >= 0) lap(lf, lf) += g;
      if (lt >= 0) lap(lt, lt) += g;
      if (lf >= 0 && lt >= 0) {
        lap(lf, lt) -= g;
        lap(lt, lf) -= g;
      }
    }
    const Eigen::VectorXd th = lap.ldlt().solve(p);
    for (int i : members) {
      const int li = local[static_cast<size_t>(i)];
      res.theta[static_cast<size_t>(i)] = li >= 0 ? th[li] : 0.0;
    }
  }

  for (int ci : on) {
    const Circuit& cc = net.circuits[static_cast<size_t>(ci)];
    const int fi = net.bus_index(cc.from), ti = net.bus_index(cc.to);
    res.flow[static_cast<size_t>(ci)] =
        net.gamma(cc) *
        (res.theta[static_cast<size_t>(fi)] - res.theta[static_cast<size_t>(ti)]);
  }
  return res;
}

// ---------------------------------------------------------------------------
// Screening

struct ScenarioScreen {
  bool solvable = false;
  bool overload_free = false;   // solvable and every in-service flow within rating
  double worst_ratio = 0.0;     // max |flow| / rating over in-service circuits
  std::vector<int> overloaded;  // circuit indices beyond tolerance
  std::vector<double> excess;   // |flow| - rating, aligned with overloaded
};

inline ScenarioScreen screen_scenario(const Network& net, const TrialPlan& plan,
                                      const OperationScenario& scn, int slack_index) {
  ScenarioScreen out;
  const DcFlowResult res = solve_dc_flow(net, plan, scn, slack_index);
  out.solvable = res.solvable;
  if (!res.solvable) return out;
  out.overload_free = true;
  for (int ci : in_service_circuits(net, plan)) {
    const Circuit& c = net.circuits[static_cast<size_t>(ci)];
    const double f = std::abs(res.flow[static_cast<size_t>(ci)]);
    out.worst_ratio = std::max(out.worst_ratio, f / c.rating);
    if (f > c.rating + 1e-6 * std::max(1.0, c.rating)) {
      out.overloaded.push_back(ci);
      out.excess.push_back(f - c.rating);
      out.overload_free = false;
    }
  }
  return out;
}

// Indices (into `scenarios`) the plan fails on, ascending.
inline std::vector<int> violated_scenarios(const Network& net,
                                           const std::vector<OperationScenario>& scenarios,
                                           const TrialPlan& plan, int slack_index) {
  std::vector<int> out;
  for (size_t s = 0; s < scenarios.size(); ++s)
    if (!screen_scenario(net, plan, scenarios[s], slack_index).overload_free)
      out.push_back(static_cast<int>(s));
  return out;
}

}  // namespace tep
