#pragma once
// Static network description for expansion studies: buses, existing and
// candidate circuits, operation scenarios (fixed dispatch snapshots), and
// trial investment plans. Everything downstream (power flow, feasibility
// subproblems, MILP assembly) reads this model and never mutates it.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

namespace tep {

enum class BusKind {
  Connected,      // part of the synchronous grid today
  Transshipment,  // reachable only through candidate circuits; no injections
};

struct Bus {
  int id = 0;  // unique positive; files may list in any order
  std::string name;
  BusKind kind = BusKind::Connected;
};

enum class CircuitStatus { Existing, Candidate };

struct Circuit {
  int id = 0;
  int from = 0;  // bus id, positive flow orientation from -> to
  int to = 0;
  double susceptance = 0.0;  // per-unit on the network MVA base
  double rating = 0.0;       // MW, symmetric |f| limit
  CircuitStatus status = CircuitStatus::Existing;
  std::string corridor;  // duplicate group for candidates; "" = standalone
  int rank = 1;          // build order inside the corridor, 1-based
  double cost = 0.0;     // investment cost, candidates only

  bool is_candidate() const { return status == CircuitStatus::Candidate; }
};

// One dispatch snapshot. Generation is fixed (no redispatch downstream);
// vectors are aligned with Network::buses order.
struct OperationScenario {
  int id = 0;
  std::vector<double> generation;  // MW
  std::vector<double> demand;      // MW
  int year = 1;
  // Provenance when produced by the scenario generator (0 = unlabelled).
  int month = 0;
  int block = 0;
  int draw = 0;

  double total_generation() const {
    double s = 0;
    for (double g : generation) s += g;
    return s;
  }
  double total_demand() const {
    double s = 0;
    for (double d : demand) s += d;
    return s;
  }
};

// Build decision over the candidate list: built[k] is 1 when the k-th
// candidate (candidate order, not circuit id) is in service.
struct TrialPlan {
  std::vector<std::uint8_t> built;
  int iteration = 0;  // which algorithm step produced it, for traces

  bool is_built(int k) const { return built[static_cast<size_t>(k)] != 0; }
  int built_count() const {
    int n = 0;
    for (auto b : built) n += b ? 1 : 0;
    return n;
  }
};

struct Network {
  std::string name;
  double mva_base = 1.0;  // susceptance-to-MW scaling: f = b * base * dtheta
  int slack_bus = 0;      // bus id; 0 = resolve from the first scenario
  std::vector<Bus> buses;
  std::vector<Circuit> circuits;  // input order; existing and candidates mixed

  int num_buses() const { return static_cast<int>(buses.size()); }

  int bus_index(int bus_id) const {
    for (size_t i = 0; i < buses.size(); ++i)
      if (buses[i].id == bus_id) return static_cast<int>(i);
    return -1;
  }

  // Circuit indices (positions in `circuits`) by status, preserving input
  // order. Existing circuits occupy the first J incidence columns, then
  // candidates; all plan vectors follow the candidate order returned here.
  std::vector<int> existing_indices() const {
    std::vector<int> r;
    for (size_t i = 0; i < circuits.size(); ++i)
      if (!circuits[i].is_candidate()) r.push_back(static_cast<int>(i));
    return r;
  }
  std::vector<int> candidate_indices() const {
    std::vector<int> r;
    for (size_t i = 0; i < circuits.size(); ++i)
      if (circuits[i].is_candidate()) r.push_back(static_cast<int>(i));
    return r;
  }
  int num_existing() const { return static_cast<int>(existing_indices().size()); }
  int num_candidates() const { return static_cast<int>(candidate_indices().size()); }

  // Effective susceptance in MW per radian.
  double gamma(const Circuit& c) const { return c.susceptance * mva_base; }
};

inline TrialPlan empty_plan(const Network& net) {
  TrialPlan p;
  p.built.assign(static_cast<size_t>(net.num_candidates()), 0);
  return p;
}

inline TrialPlan full_plan(const Network& net) {
  TrialPlan p;
  p.built.assign(static_cast<size_t>(net.num_candidates()), 1);
  return p;
}

inline double plan_cost(const Network& net, const TrialPlan& plan) {
  const auto cand = net.candidate_indices();
  double c = 0;
  for (size_t k = 0; k < cand.size(); ++k)
    if (plan.built[k]) c += net.circuits[static_cast<size_t>(cand[k])].cost;
  return c;
}

// Bus-circuit incidence: +1 at the from-bus row, -1 at the to-bus row.
// Columns: existing circuits first (J), candidates after (K), input order
// within each group. Stored as terminal pairs; entries are only ever +-1/0.
struct IncidenceMatrix {
  int rows = 0;
  int cols = 0;
  std::vector<std::pair<int, int>> terminals;  // per column: (from, to) bus index
  std::vector<int> column_circuit;             // per column: index into circuits

  int coeff(int row, int col) const {
    const auto& t = terminals[static_cast<size_t>(col)];
    if (row == t.first) return 1;
    if (row == t.second) return -1;
    return 0;
  }
};

inline IncidenceMatrix build_incidence(const Network& net) {
  IncidenceMatrix m;
  m.rows = net.num_buses();
  auto add = [&](int ci) {
    const Circuit& c = net.circuits[static_cast<size_t>(ci)];
    m.terminals.emplace_back(net.bus_index(c.from), net.bus_index(c.to));
    m.column_circuit.push_back(ci);
  };
  for (int ci : net.existing_indices()) add(ci);
  for (int ci : net.candidate_indices()) add(ci);
  m.cols = static_cast<int>(m.terminals.size());
  return m;
}

// ---------------------------------------------------------------------------
// Validation

enum class ValidationCode {
  NoBuses,
  DuplicateBusId,
  BadBusId,
  DuplicateCircuitId,
  DanglingEndpoint,
  SelfLoop,
  NonPositiveSusceptance,
  NonPositiveRating,
  BadCandidateCost,
  CorridorMismatch,     // duplicates in one corridor differ in parameters
  CorridorRankGap,      // ranks not 1..w within a corridor
  CorridorHasExisting,  // corridor labels are for candidates only
  TransshipmentExisting,
  TransshipmentInjection,
  TransshipmentDegree,  // fewer than two incident candidates
  DisconnectedExisting,
  BadSlackBus,
  NoScenarios,
  DuplicateScenarioId,
  ScenarioShape,
  NegativeInjection,
  ScenarioImbalance,
  BadYear,
};

inline const char* to_string(ValidationCode c) {
  switch (c) {
    case ValidationCode::NoBuses: return "no-buses";
    case ValidationCode::DuplicateBusId: return "duplicate-bus-id";
    case ValidationCode::BadBusId: return "bad-bus-id";
    case ValidationCode::DuplicateCircuitId: return "duplicate-circuit-id";
    case ValidationCode::DanglingEndpoint: return "dangling-endpoint";
    case ValidationCode::SelfLoop: return "self-loop";
    case ValidationCode::NonPositiveSusceptance: return "non-positive-susceptance";
    case ValidationCode::NonPositiveRating: return "non-positive-rating";
    case ValidationCode::BadCandidateCost: return "bad-candidate-cost";
    case ValidationCode::CorridorMismatch: return "corridor-mismatch";
    case ValidationCode::CorridorRankGap: return "corridor-rank-gap";
    case ValidationCode::CorridorHasExisting: return "corridor-has-existing";
    case ValidationCode::TransshipmentExisting: return "transshipment-existing";
    case ValidationCode::TransshipmentInjection: return "transshipment-injection";
    case ValidationCode::TransshipmentDegree: return "transshipment-degree";
    case ValidationCode::DisconnectedExisting: return "disconnected-existing";
    case ValidationCode::BadSlackBus: return "bad-slack-bus";
    case ValidationCode::NoScenarios: return "no-scenarios";
    case ValidationCode::DuplicateScenarioId: return "duplicate-scenario-id";
    case ValidationCode::ScenarioShape: return "scenario-shape";
    case ValidationCode::NegativeInjection: return "negative-injection";
    case ValidationCode::ScenarioImbalance: return "scenario-imbalance";
    case ValidationCode::BadYear: return "bad-year";
  }
  return "unknown";
}

struct ValidationIssue {
  ValidationCode code;
  std::string message;
};

struct ValidationReport {
  std::vector<ValidationIssue> issues;
  bool ok() const { return issues.empty(); }
  bool has(ValidationCode c) const {
    for (const auto& i : issues)
      if (i.code == c) return true;
    return false;
  }
};

namespace detail {

// Union-find over bus indices, used for existing-grid connectivity.
struct DisjointSet {
  std::vector<int> parent;
  explicit DisjointSet(int n) : parent(static_cast<size_t>(n)) {
    for (int i = 0; i < n; ++i) parent[static_cast<size_t>(i)] = i;
  }
  int find(int a) {
    while (parent[static_cast<size_t>(a)] != a) {
      parent[static_cast<size_t>(a)] = parent[static_cast<size_t>(parent[static_cast<size_t>(a)])];
      a = parent[static_cast<size_t>(a)];
    }
    return a;
  }
  void unite(int a, int b) { parent[static_cast<size_t>(find(a))] = find(b); }
};

}  // namespace detail

// Default slack rule: lowest-id connected bus with nonzero generation in the
// first scenario; falls back to the lowest-id connected bus. Returns a bus
// index, or -1 when the network has no connected bus at all.
inline int resolve_slack_index(const Network& net,
                               const std::vector<OperationScenario>& scenarios) {
  if (net.slack_bus > 0) return net.bus_index(net.slack_bus);
  int best = -1, best_id = 0;
  int fallback = -1, fallback_id = 0;
  for (int i = 0; i < net.num_buses(); ++i) {
    const Bus& b = net.buses[static_cast<size_t>(i)];
    if (b.kind != BusKind::Connected) continue;
    if (fallback < 0 || b.id < fallback_id) {
      fallback = i;
      fallback_id = b.id;
    }
    if (!scenarios.empty() &&
        static_cast<int>(scenarios.front().generation.size()) == net.num_buses() &&
        scenarios.front().generation[static_cast<size_t>(i)] > 0) {
      if (best < 0 || b.id < best_id) {
        best = i;
        best_id = b.id;
      }
    }
  }
  return best >= 0 ? best : fallback;
}

inline ValidationReport validate_network(const Network& net,
                                         const std::vector<OperationScenario>& scenarios) {
  ValidationReport rep;
  auto add = [&](ValidationCode c, std::string msg) {
    rep.issues.push_back({c, std::move(msg)});
  };

  const int nb = net.num_buses();
  if (nb == 0) {
    add(ValidationCode::NoBuses, "network has no buses");
    return rep;
  }

  std::set<int> bus_ids;
  for (const Bus& b : net.buses) {
    if (b.id <= 0) add(ValidationCode::BadBusId, "bus id must be positive: " + std::to_string(b.id));
    if (!bus_ids.insert(b.id).second)
      add(ValidationCode::DuplicateBusId, "duplicate bus id " + std::to_string(b.id));
  }

  std::set<int> circuit_ids;
  std::map<std::string, std::vector<int>> corridors;  // corridor -> circuit indices
  for (size_t ci = 0; ci < net.circuits.size(); ++ci) {
    const Circuit& c = net.circuits[ci];
    const std::string tag = "circuit " + std::to_string(c.id);
    if (!circuit_ids.insert(c.id).second)
      add(ValidationCode::DuplicateCircuitId, "duplicate circuit id " + std::to_string(c.id));
    const int fi = net.bus_index(c.from), ti = net.bus_index(c.to);
    if (fi < 0 || ti < 0)
      add(ValidationCode::DanglingEndpoint, tag + " references an unknown bus");
    if (c.from == c.to) add(ValidationCode::SelfLoop, tag + " connects a bus to itself");
    if (!(c.susceptance > 0))
      add(ValidationCode::NonPositiveSusceptance, tag + " susceptance must be > 0");
    if (!(c.rating > 0)) add(ValidationCode::NonPositiveRating, tag + " rating must be > 0");
    if (c.is_candidate()) {
      if (!(c.cost >= 0) || !std::isfinite(c.cost))
        add(ValidationCode::BadCandidateCost, tag + " candidate cost must be finite and >= 0");
      if (!c.corridor.empty()) corridors[c.corridor].push_back(static_cast<int>(ci));
    } else if (!c.corridor.empty()) {
      add(ValidationCode::CorridorHasExisting, tag + " is existing but carries a corridor label");
    }
    // Transshipment buses exist only on the candidate side of the grid.
    for (int bi : {fi, ti}) {
      if (bi < 0) continue;
      if (net.buses[static_cast<size_t>(bi)].kind == BusKind::Transshipment &&
          !c.is_candidate())
        add(ValidationCode::TransshipmentExisting,
            tag + " is existing but touches transshipment bus " +
                std::to_string(net.buses[static_cast<size_t>(bi)].id));
    }
  }

  // Corridor duplicates must be interchangeable circuits with dense ranks.
  for (const auto& [name, members] : corridors) {
    const Circuit& first = net.circuits[static_cast<size_t>(members.front())];
    std::vector<int> ranks;
    for (int ci : members) {
      const Circuit& c = net.circuits[static_cast<size_t>(ci)];
      ranks.push_back(c.rank);
      const bool same_ends = (c.from == first.from && c.to == first.to) ||
                             (c.from == first.to && c.to == first.from);
      if (!same_ends || c.susceptance != first.susceptance ||
          c.rating != first.rating || c.cost != first.cost)
        add(ValidationCode::CorridorMismatch,
            "corridor " + name + " members are not identical circuits");
    }
    std::sort(ranks.begin(), ranks.end());
    for (size_t i = 0; i < ranks.size(); ++i) {
      if (ranks[i] != static_cast<int>(i) + 1) {
        add(ValidationCode::CorridorRankGap,
            "corridor " + name + " ranks must be 1.." + std::to_string(ranks.size()));
        break;
      }
    }
  }

  // Transshipment buses: no injections anywhere, and at least two incident
  // candidates (otherwise the connectivity rows are meaningless).
  for (int bi = 0; bi < nb; ++bi) {
    const Bus& b = net.buses[static_cast<size_t>(bi)];
    if (b.kind != BusKind::Transshipment) continue;
    int incident = 0;
    for (const Circuit& c : net.circuits)
      if (c.is_candidate() && (c.from == b.id || c.to == b.id)) ++incident;
    if (incident < 2)
      add(ValidationCode::TransshipmentDegree,
          "transshipment bus " + std::to_string(b.id) +
              " needs at least two incident candidates, has " + std::to_string(incident));
  }

  // Existing grid must be one synchronous island over connected-kind buses.
  {
    detail::DisjointSet ds(nb);
    for (const Circuit& c : net.circuits) {
      if (c.is_candidate()) continue;
      const int fi = net.bus_index(c.from), ti = net.bus_index(c.to);
      if (fi >= 0 && ti >= 0) ds.unite(fi, ti);
    }
    int root = -1;
    for (int bi = 0; bi < nb; ++bi) {
      if (net.buses[static_cast<size_t>(bi)].kind != BusKind::Connected) continue;
      if (root < 0) {
        root = ds.find(bi);
      } else if (ds.find(bi) != root) {
        add(ValidationCode::DisconnectedExisting,
            "existing grid does not connect all connected-kind buses");
        break;
      }
    }
  }

  if (net.slack_bus > 0) {
    const int si = net.bus_index(net.slack_bus);
    if (si < 0 || net.buses[static_cast<size_t>(si)].kind != BusKind::Connected)
      add(ValidationCode::BadSlackBus,
          "slack bus " + std::to_string(net.slack_bus) + " missing or not connected-kind");
  }

  if (scenarios.empty()) add(ValidationCode::NoScenarios, "no operation scenarios");

  std::set<int> scen_ids;
  for (const OperationScenario& s : scenarios) {
    const std::string tag = "scenario " + std::to_string(s.id);
    if (!scen_ids.insert(s.id).second)
      add(ValidationCode::DuplicateScenarioId, "duplicate scenario id " + std::to_string(s.id));
    if (s.year < 1) add(ValidationCode::BadYear, tag + " year must be >= 1");
    if (static_cast<int>(s.generation.size()) != nb ||
        static_cast<int>(s.demand.size()) != nb) {
      add(ValidationCode::ScenarioShape, tag + " vectors do not match the bus count");
      continue;
    }
    double tg = 0, td = 0;
    for (int bi = 0; bi < nb; ++bi) {
      const double g = s.generation[static_cast<size_t>(bi)];
      const double d = s.demand[static_cast<size_t>(bi)];
      if (g < 0 || d < 0) {
        add(ValidationCode::NegativeInjection,
            tag + " has negative injection at bus " +
                std::to_string(net.buses[static_cast<size_t>(bi)].id));
      }
      if (net.buses[static_cast<size_t>(bi)].kind == BusKind::Transshipment && (g != 0 || d != 0))
        add(ValidationCode::TransshipmentInjection,
            tag + " injects at transshipment bus " +
                std::to_string(net.buses[static_cast<size_t>(bi)].id));
      tg += g;
      td += d;
    }
    // Fixed-dispatch recourse has no system-wide generation slack: reject
    // imbalanced snapshots outright instead of mis-measuring them later.
    const double tol = 1e-6 * std::max(1.0, std::max(tg, td));
    if (std::abs(tg - td) > tol)
      add(ValidationCode::ScenarioImbalance,
          tag + " generation and demand totals differ by " + std::to_string(tg - td) + " MW");
  }

  return rep;
}

}  // namespace tep
