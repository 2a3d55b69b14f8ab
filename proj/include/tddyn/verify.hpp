#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "tddyn/game.hpp"
#include "tddyn/introspection.hpp"
#include "tddyn/oracles.hpp"
#include "tddyn/rng.hpp"
#include "tddyn/wright_fisher.hpp"

// Self-check battery: runs every brute-force oracle against the optimized
// implementation it validates, on small instances, and reports the worst
// deviation per check. Exposed through the `verify` CLI subcommand so a build
// can be validated in the field.

namespace tddyn::oracle {

struct OracleReport {
  std::string oracle;
  std::string instance;
  double max_abs_deviation = 0.0;
  double tolerance = 0.0;
  bool pass = false;
};

inline std::vector<OracleReport> run_battery() {
  std::vector<OracleReport> reports;

  // Payoff matrix vs. the payoff rule, entry by entry.
  for (const GameParams params : {GameParams{2, 100, 2}, GameParams{2, 3, 2}, GameParams{7, 20, 3}}) {
    const PayoffMatrix pm = build_payoff_matrix(params);
    double dev = 0.0;
    for (Claim a = params.lower; a <= params.upper; ++a)
      for (Claim b = params.lower; b <= params.upper; ++b)
        dev = std::max(dev, std::abs(static_cast<double>(
                                pm.at(pm.index_of(a), pm.index_of(b)) - payoff(a, b, params))));
    reports.push_back({"payoff_matrix_vs_rule",
                       "[" + std::to_string(params.lower) + "," + std::to_string(params.upper) +
                           "] R=" + std::to_string(params.reward),
                       dev, 0.0, dev <= 0.0});
  }

  // Histogram-based accumulated payoffs vs. the O(N^2) double loop.
  {
    const GameParams params{2, 100, 2};
    double dev = 0.0;
    for (std::uint64_t seed : {11ull, 12ull, 13ull}) {
      auto rng = make_rng(seed);
      wf::Population pop(100);
      for (auto& c : pop) c = uniform_int(rng, params.lower, params.upper);
      const auto fast = wf::accumulated_payoffs(pop, params);
      const auto slow = pairwise_payoff_oracle(pop, params);
      for (std::size_t k = 0; k < pop.size(); ++k)
        dev = std::max(dev, std::abs(fast[k] - static_cast<double>(slow[k])));
    }
    reports.push_back({"pairwise_payoff_vs_histogram", "random N=100 populations, [2,100] R=2",
                       dev, 0.0, dev <= 0.0});
  }

  // Nash enumeration vs. iterated elimination: both must single out the low end.
  {
    double mismatches = 0.0;
    auto rng = make_rng(77);
    std::vector<GameParams> cases = {GameParams{2, 100, 2}, GameParams{2, 3, 2}, GameParams{7, 20, 3}};
    for (int i = 0; i < 12; ++i) {
      const Claim lower = uniform_int(rng, 0, 30);
      const Claim upper = lower + uniform_int(rng, 1, 40);
      const int reward = uniform_int(rng, 2, 12);
      cases.push_back(GameParams{lower, upper, reward});
    }
    for (const auto& params : cases) {
      const auto nash = nash_enumeration_oracle(params);
      const auto survivors = iterated_elimination(params);
      const bool ok = nash.size() == 1 && nash[0].first == params.lower &&
                      nash[0].second == params.lower && survivors.size() == 1 &&
                      survivors[0] == params.lower;
      if (!ok) mismatches += 1.0;
    }
    reports.push_back({"nash_enumeration_vs_elimination",
                       std::to_string(cases.size()) + " parameter sets", mismatches, 0.0,
                       mismatches == 0.0});
  }

  // Dense stationary solve vs. power iteration on the sparse kernel.
  {
    struct CaseSpec { GameParams params; double beta; };
    for (const auto& [params, beta] : {CaseSpec{{2, 5, 2}, 1.0}, CaseSpec{{2, 3, 2}, 10.0},
                                       CaseSpec{{2, 20, 2}, 0.5}}) {
      const auto dense = dense_stationary_oracle(params, beta);
      const auto power = intro::stationary_distribution(intro::build_transition(params, beta));
      double dev = 0.0;
      for (std::size_t i = 0; i < dense.size(); ++i)
        dev = std::max(dev, std::abs(dense[i] - power.probs[i]));
      reports.push_back({"dense_stationary_vs_power_iteration",
                         "[" + std::to_string(params.lower) + "," + std::to_string(params.upper) +
                             "] R=" + std::to_string(params.reward) + " beta=" + std::to_string(beta),
                         dev, 1e-10, dev <= 1e-10});
    }
  }

  return reports;
}

}  // namespace tddyn::oracle
