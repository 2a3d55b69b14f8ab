#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "tddyn/game.hpp"
#include "tddyn/rng.hpp"
#include "tddyn/sweep.hpp"

// Finite-population dynamics with discrete non-overlapping generations:
// every generation is resampled with replacement, weights proportional to
// exp(selection_intensity * accumulated payoff), and each offspring mutates
// with some probability by a bounded claim step, clamped to the action space.

namespace tddyn::wf {

using Population = std::vector<Claim>;

struct UniformInit {};                      // every claim drawn uniformly from [L, U]
struct MonomorphicInit { Claim claim; };    // all individuals share one claim
struct ExplicitInit { Population claims; }; // caller-provided multiset
using InitRule = std::variant<UniformInit, MonomorphicInit, ExplicitInit>;

struct Config {
  GameParams game;
  int population_size = 100;       // N
  double mutation_prob = 0.0;      // mu, per offspring
  int max_mutation_step = 1;       // delta; steps drawn uniformly from +-{1..delta}
  double selection_intensity = 1.0;  // rho
  int generations = 1000;
  std::uint64_t seed = 0;
  InitRule init = UniformInit{};

  void validate() const {
    game.validate();
    if (population_size < 1)
      throw std::invalid_argument("N: population size must be >= 1, got " + std::to_string(population_size));
    if (!(mutation_prob >= 0.0) || mutation_prob > 1.0)
      throw std::invalid_argument("mu: mutation probability must lie in [0, 1]");
    if (max_mutation_step < 1)
      throw std::invalid_argument("delta: maximal mutation size must be >= 1, got " +
                                  std::to_string(max_mutation_step));
    if (!(selection_intensity >= 0.0))
      throw std::invalid_argument("rho: selection intensity must be >= 0");
    if (generations < 0)
      throw std::invalid_argument("t: generations must be >= 0");
    if (const auto* mono = std::get_if<MonomorphicInit>(&init)) {
      if (mono->claim < game.lower || mono->claim > game.upper)
        throw std::invalid_argument("init claim outside the action space");
    } else if (const auto* expl = std::get_if<ExplicitInit>(&init)) {
      if (static_cast<int>(expl->claims.size()) != population_size)
        throw std::invalid_argument("explicit init must have exactly N claims");
      for (Claim c : expl->claims)
        if (c < game.lower || c > game.upper)
          throw std::invalid_argument("init claim outside the action space");
    }
  }
};

namespace detail {

inline std::vector<std::int64_t> claim_histogram(const Population& pop, const GameParams& params) {
  std::vector<std::int64_t> hist(params.num_claims(), 0);
  for (Claim c : pop) {
    if (c < params.lower || c > params.upper)
      throw std::domain_error("population claim " + std::to_string(c) + " outside the action space");
    ++hist[c - params.lower];
  }
  return hist;
}

inline std::vector<double> accumulated_payoffs_hist(const Population& pop, const PayoffMatrix& pm,
                                                    const std::vector<std::int64_t>& hist) {
  const int m = pm.size;
  // total[i] = payoff of claim lower+i summed over the whole population
  std::vector<std::int64_t> total(m, 0);
  for (int i = 0; i < m; ++i) {
    const std::int64_t* row = &pm.entries[static_cast<std::size_t>(i) * m];
    std::int64_t s = 0;
    for (int j = 0; j < m; ++j)
      if (hist[j]) s += hist[j] * row[j];
    total[i] = s;
  }
  std::vector<double> acc(pop.size());
  for (std::size_t k = 0; k < pop.size(); ++k) {
    const int i = pop[k] - pm.lower;
    acc[k] = static_cast<double>(total[i] - pm.at(i, i));  // self-interaction excluded
  }
  return acc;
}

}  // namespace detail

/// Accumulated payoff of every individual against all others (self excluded),
/// computed through the claim histogram in O(m^2 + N).
inline std::vector<double> accumulated_payoffs(const Population& pop, const GameParams& params) {
  params.validate();
  const PayoffMatrix pm = build_payoff_matrix(params);
  return detail::accumulated_payoffs_hist(pop, pm, detail::claim_histogram(pop, params));
}

/// Sampling weights proportional to exp(rho * payoff), normalized. The
/// maximum is subtracted in the payoff domain before scaling by rho, so the
/// result is finite for any input and exactly invariant under a common
/// integer shift of the payoffs.
inline std::vector<double> fitness_weights(const std::vector<double>& accumulated, double rho) {
  if (accumulated.empty()) throw std::invalid_argument("fitness_weights: empty input");
  if (!(rho >= 0.0)) throw std::invalid_argument("rho: selection intensity must be >= 0");
  double top = accumulated[0];
  for (double a : accumulated) {
    if (!std::isfinite(a)) throw std::invalid_argument("fitness_weights: non-finite payoff");
    top = std::max(top, a);
  }
  std::vector<double> w(accumulated.size());
  double sum = 0.0;
  for (std::size_t k = 0; k < accumulated.size(); ++k) {
    w[k] = std::exp(rho * (accumulated[k] - top));
    sum += w[k];
  }
  for (double& x : w) x /= sum;
  return w;
}

/// One generation: N offspring sampled with replacement per the weights, each
/// independently mutating with probability mu by a uniform step from
/// +-{1..delta}, clamped into [L, U]. RNG use per offspring: one draw for the
/// parent, one for the mutation check, one more for the step if it mutates.
inline Population next_generation(const Population& pop, const std::vector<double>& weights,
                                  const Config& cfg, std::mt19937_64& rng) {
  if (weights.size() != pop.size())
    throw std::invalid_argument("next_generation: weight vector length mismatch");
  std::vector<double> cdf(weights.size());
  double acc = 0.0;
  for (std::size_t k = 0; k < weights.size(); ++k) {
    acc += weights[k];
    cdf[k] = acc;
  }
  const double total = cdf.back();

  const int n = cfg.population_size;
  const int delta = cfg.max_mutation_step;
  Population next(n);
  for (int k = 0; k < n; ++k) {
    const double u = uniform01(rng) * total;
    const auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
    const std::size_t parent = std::min<std::size_t>(it - cdf.begin(), pop.size() - 1);
    Claim child = pop[parent];
    if (uniform01(rng) < cfg.mutation_prob) {
      const auto j = static_cast<int>(uniform_below(rng, 2ull * delta));
      const int step = j < delta ? j - delta : j - delta + 1;  // +-{1..delta}
      child = std::clamp(child + step, cfg.game.lower, cfg.game.upper);
    }
    next[k] = child;
  }
  return next;
}

inline Population initial_population(const Config& cfg, std::mt19937_64& rng) {
  if (std::holds_alternative<UniformInit>(cfg.init)) {
    Population pop(cfg.population_size);
    for (auto& c : pop) c = uniform_int(rng, cfg.game.lower, cfg.game.upper);
    return pop;
  }
  if (const auto* mono = std::get_if<MonomorphicInit>(&cfg.init))
    return Population(cfg.population_size, mono->claim);
  return std::get<ExplicitInit>(cfg.init).claims;
}

struct Result {
  std::vector<double> mean_claim_series;     // one entry per generation, initial included
  double terminal_mean_claim = 0.0;
  std::vector<std::int64_t> terminal_histogram;  // per claim, sums to N
  Population terminal_population;
};

inline double mean_claim(const Population& pop) {
  std::int64_t s = 0;
  for (Claim c : pop) s += c;
  return static_cast<double>(s) / static_cast<double>(pop.size());
}

/// Full run: payoffs -> weights -> resampling, for the configured number of
/// generations, deterministic in the seed. Without mutation a monomorphic
/// population is absorbing, so the loop exits early and the series is padded
/// with the constant mean.
inline Result run(const Config& cfg) {
  cfg.validate();
  const PayoffMatrix pm = build_payoff_matrix(cfg.game);
  std::mt19937_64 rng = make_rng(cfg.seed);
  Population pop = initial_population(cfg, rng);

  Result res;
  res.mean_claim_series.reserve(cfg.generations + 1);
  res.mean_claim_series.push_back(mean_claim(pop));

  for (int gen = 0; gen < cfg.generations; ++gen) {
    const auto hist = detail::claim_histogram(pop, cfg.game);
    if (cfg.mutation_prob == 0.0 &&
        *std::max_element(hist.begin(), hist.end()) == cfg.population_size) {
      res.mean_claim_series.resize(cfg.generations + 1, res.mean_claim_series.back());
      break;
    }
    const auto acc = detail::accumulated_payoffs_hist(pop, pm, hist);
    const auto w = fitness_weights(acc, cfg.selection_intensity);
    pop = next_generation(pop, w, cfg, rng);
    res.mean_claim_series.push_back(mean_claim(pop));
  }

  res.terminal_mean_claim = res.mean_claim_series.back();
  res.terminal_histogram = detail::claim_histogram(pop, cfg.game);
  res.terminal_population = std::move(pop);
  return res;
}

/// Replicated grid sweep over (rho, mu, delta). Row order is the nested grid
/// order with replicates innermost; the seed of every run derives from
/// (base seed, grid index, replicate), so rows never share randomness and
/// adding grid points leaves existing rows untouched.
inline SweepResult sweep(const std::vector<double>& rho_values,
                         const std::vector<double>& mu_values,
                         const std::vector<int>& delta_values,
                         int replicates, const Config& base, std::uint64_t base_seed,
                         int threads, RunMetadata meta) {
  if (replicates < 1) throw std::invalid_argument("reps: replicates must be >= 1");
  const std::size_t grid = rho_values.size() * mu_values.size() * delta_values.size();
  const std::size_t n = grid * static_cast<std::size_t>(replicates);

  const auto decompose = [&](std::size_t i) {
    const std::size_t g = i / replicates;
    const std::size_t r = i % replicates;
    const std::size_t d = g % delta_values.size();
    const std::size_t mu = (g / delta_values.size()) % mu_values.size();
    const std::size_t rho = g / (delta_values.size() * mu_values.size());
    return std::tuple<std::size_t, std::size_t, std::size_t, std::size_t, std::size_t>{rho, mu, d, g, r};
  };
  const auto config_at = [&](std::size_t i) {
    const auto [rho, mu, d, g, r] = decompose(i);
    Config cfg = base;
    cfg.selection_intensity = rho_values[rho];
    cfg.mutation_prob = mu_values[mu];
    cfg.max_mutation_step = delta_values[d];
    cfg.seed = derive_seed(base_seed, g, r);
    return cfg;
  };
  for (std::size_t i = 0; i < n; ++i) config_at(i).validate();

  return run_parallel(
      {"rho", "mu", "delta", "replicate", "seed", "mean_claim"}, n,
      [&](std::size_t i) {
        const auto [rho, mu, d, g, r] = decompose(i);
        (void)g;
        return std::vector<Cell>{cell(rho_values[rho]), cell(mu_values[mu]),
                                 cell(delta_values[d]), cell(static_cast<std::int64_t>(r)),
                                 cell(config_at(i).seed)};
      },
      [&](std::size_t i) {
        return std::vector<Cell>{cell(run(config_at(i)).terminal_mean_claim)};
      },
      threads, std::move(meta));
}

}  // namespace tddyn::wf
