#pragma once

// Synthetic dispatch sampling. Real studies feed the planner with scenario
// sets from an upstream production-costing run; this generator stands in
// for that feed with a seasonal shape, stacked load blocks, and seeded
// random draws so large scenario volumes can be exercised reproducibly.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "tep/network.hpp"

namespace tep {

struct BusProfile {
  int bus = 0;
  double base_generation_mw = 0.0;
  double base_demand_mw = 0.0;
};

struct ScenarioGenConfig {
  int months = 12;
  int blocks = 5;  // load blocks, ordered heavy to light
  int draws = 25;  // random draws per (month, block)
  std::uint64_t seed = 1;
  std::vector<BusProfile> profiles;  // one per bus carrying injections
  double demand_volatility = 0.10;      // relative sigma per draw
  double generation_volatility = 0.20;  // relative sigma per draw
  double seasonal_swing = 0.15;  // peak-month demand lift (and trough dip)
  double block_span = 0.40;      // heavy block sits this far above the light one
  int year = 1;
};

// months x blocks x draws scenarios, balanced bus by bus via the largest
// base generator, labeled with their (month, block, draw) origin. The same
// seed always yields the same list.
inline std::vector<OperationScenario> generate_scenarios(
    const Network& net, const ScenarioGenConfig& cfg) {
  if (cfg.months < 1 || cfg.blocks < 1 || cfg.draws < 1)
    throw std::invalid_argument("scenario generation needs months, blocks, draws >= 1");
  const int nb = net.num_buses();

  std::vector<double> base_g(static_cast<size_t>(nb), 0.0);
  std::vector<double> base_d(static_cast<size_t>(nb), 0.0);
  std::vector<std::uint8_t> covered(static_cast<size_t>(nb), 0);
  for (const BusProfile& p : cfg.profiles) {
    const int bi = net.bus_index(p.bus);
    if (bi < 0)
      throw std::invalid_argument("profile references unknown bus " +
                                  std::to_string(p.bus));
    if (net.buses[static_cast<size_t>(bi)].kind == BusKind::Transshipment)
      throw std::invalid_argument("profile on transshipment bus " +
                                  std::to_string(p.bus));
    if (p.base_generation_mw < 0.0 || p.base_demand_mw < 0.0)
      throw std::invalid_argument("negative profile on bus " + std::to_string(p.bus));
    base_g[static_cast<size_t>(bi)] = p.base_generation_mw;
    base_d[static_cast<size_t>(bi)] = p.base_demand_mw;
    covered[static_cast<size_t>(bi)] = 1;
  }
  for (int bi = 0; bi < nb; ++bi)
    if (!covered[static_cast<size_t>(bi)] &&
        net.buses[static_cast<size_t>(bi)].kind != BusKind::Transshipment)
      throw std::invalid_argument("no profile for bus " +
                                  std::to_string(net.buses[static_cast<size_t>(bi)].id));

  int slack = -1;
  double slack_g = -1.0;
  for (int bi = 0; bi < nb; ++bi)
    if (base_g[static_cast<size_t>(bi)] > slack_g) {
      slack_g = base_g[static_cast<size_t>(bi)];
      slack = bi;
    }
  if (slack < 0 || slack_g <= 0.0)
    throw std::invalid_argument("profiles carry no generation to balance with");

  std::mt19937_64 rng(cfg.seed);
  std::normal_distribution<double> unit(0.0, 1.0);
  // Clamp draws to three sigmas so a single outlier cannot demand more than
  // any plan could ever deliver.
  const auto draw_noise = [&rng, &unit](double sigma) {
    return sigma <= 0.0 ? 0.0 : sigma * std::clamp(unit(rng), -3.0, 3.0);
  };
  const double pi = std::acos(-1.0);

  std::vector<OperationScenario> out;
  out.reserve(static_cast<size_t>(cfg.months) * cfg.blocks * cfg.draws);
  int id = 0;
  for (int m = 1; m <= cfg.months; ++m) {
    const double season =
        1.0 + cfg.seasonal_swing *
                  std::sin(2.0 * pi * static_cast<double>(m - 1) / cfg.months);
    for (int b = 1; b <= cfg.blocks; ++b) {
      const double block =
          cfg.blocks == 1
              ? 1.0
              : 1.0 + cfg.block_span * (0.5 - static_cast<double>(b - 1) /
                                                  (cfg.blocks - 1));
      for (int d = 1; d <= cfg.draws; ++d) {
        OperationScenario s;
        s.id = ++id;
        s.year = cfg.year;
        s.month = m;
        s.block = b;
        s.draw = d;
        s.generation.resize(static_cast<size_t>(nb), 0.0);
        s.demand.resize(static_cast<size_t>(nb), 0.0);

        double total_d = 0.0;
        for (int bi = 0; bi < nb; ++bi) {
          if (base_d[static_cast<size_t>(bi)] <= 0.0) continue;
          const double v = base_d[static_cast<size_t>(bi)] * season * block *
                           std::max(0.0, 1.0 + draw_noise(cfg.demand_volatility));
          s.demand[static_cast<size_t>(bi)] = v;
          total_d += v;
        }
        double total_g = 0.0;
        for (int bi = 0; bi < nb; ++bi) {
          if (bi == slack || base_g[static_cast<size_t>(bi)] <= 0.0) continue;
          const double v =
              base_g[static_cast<size_t>(bi)] *
              std::max(0.0, 1.0 + draw_noise(cfg.generation_volatility));
          s.generation[static_cast<size_t>(bi)] = v;
          total_g += v;
        }
        // The slack generator absorbs the imbalance; if the other units
        // already overshoot the load they are scaled back proportionally.
        if (total_g > total_d && total_g > 0.0) {
          const double scale = total_d / total_g;
          for (int bi = 0; bi < nb; ++bi)
            if (bi != slack) s.generation[static_cast<size_t>(bi)] *= scale;
          s.generation[static_cast<size_t>(slack)] = 0.0;
        } else {
          s.generation[static_cast<size_t>(slack)] = total_d - total_g;
        }
        out.push_back(std::move(s));
      }
    }
  }
  return out;
}

}  // namespace tep
