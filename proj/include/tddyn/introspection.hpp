#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "tddyn/game.hpp"
#include "tddyn/rng.hpp"
#include "tddyn/sweep.hpp"

// Two players who repeatedly compare a uniformly drawn counterfactual claim
// against their realized payoff (the opponent's claim held fixed) and adopt
// it with the logistic acceptance probability in the payoff difference.
// Available both as a seeded simulation and as an exact Markov-chain
// computation over the m^2 joint states.

namespace tddyn::intro {

/// Logistic acceptance probability 1 / (1 + exp(-beta * delta_payoff)),
/// evaluated overflow-free for any argument sign.
inline double fermi(double delta_payoff, double beta) {
  if (!(beta >= 0.0)) throw std::invalid_argument("beta: selection intensity must be >= 0");
  const double z = beta * delta_payoff;
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

/// Ordered claim pair; player identity matters.
struct JointState {
  Claim claim_a = 0;
  Claim claim_b = 0;
  bool operator==(const JointState&) const = default;
};

struct UniformInit {};
struct FixedInit { JointState state; };
using InitRule = std::variant<UniformInit, FixedInit>;

struct Config {
  GameParams game;
  double selection_intensity = 1.0;  // beta
  std::uint64_t steps = 100000;
  std::uint64_t burn_in = 0;
  std::uint64_t seed = 0;
  InitRule init = UniformInit{};
  std::uint64_t record_every = 0;  // trace stride; 0 keeps no trace

  void validate() const {
    game.validate();
    if (!(selection_intensity >= 0.0) || !std::isfinite(selection_intensity))
      throw std::invalid_argument("beta: selection intensity must be finite and >= 0");
    if (burn_in >= steps)
      throw std::invalid_argument("burn-in must be smaller than steps");
    if (const auto* fixed = std::get_if<FixedInit>(&init)) {
      const auto& s = fixed->state;
      if (s.claim_a < game.lower || s.claim_a > game.upper ||
          s.claim_b < game.lower || s.claim_b > game.upper)
        throw std::invalid_argument("init state outside the action space");
    }
  }
};

/// One update: a uniformly chosen player draws a uniformly random alternative
/// claim and adopts it with the logistic probability in the payoff gain
/// against the opponent's current claim. Proposing the current claim is a
/// self-transition. Consumes exactly three RNG draws (player, proposal,
/// acceptance) per call.
inline JointState step(JointState state, const Config& cfg, std::mt19937_64& rng) {
  const int m = cfg.game.num_claims();
  const bool update_a = uniform_below(rng, 2) == 0;
  const Claim alternative = cfg.game.lower + static_cast<Claim>(uniform_below(rng, m));
  const double u = uniform01(rng);

  const Claim mine = update_a ? state.claim_a : state.claim_b;
  const Claim theirs = update_a ? state.claim_b : state.claim_a;
  const auto gain = static_cast<double>(
      detail::payoff_unchecked(alternative, theirs, cfg.game.reward) -
      detail::payoff_unchecked(mine, theirs, cfg.game.reward));
  if (u < fermi(gain, cfg.selection_intensity)) {
    if (update_a) state.claim_a = alternative;
    else state.claim_b = alternative;
  }
  return state;
}

struct TraceEntry {
  std::uint64_t step;
  Claim claim_a;
  Claim claim_b;
};

struct RunResult {
  std::vector<TraceEntry> trace;             // only when record_every > 0
  std::vector<std::uint64_t> joint_counts;   // m^2 histogram over post-burn-in states
  double average_claim = 0.0;                // post-burn-in mean of (a + b) / 2
  JointState final_state;
};

inline RunResult run(const Config& cfg) {
  cfg.validate();
  const int m = cfg.game.num_claims();
  std::mt19937_64 rng = make_rng(cfg.seed);

  JointState state;
  if (std::holds_alternative<UniformInit>(cfg.init)) {
    state.claim_a = cfg.game.lower + static_cast<Claim>(uniform_below(rng, m));
    state.claim_b = cfg.game.lower + static_cast<Claim>(uniform_below(rng, m));
  } else {
    state = std::get<FixedInit>(cfg.init).state;
  }

  RunResult res;
  res.joint_counts.assign(static_cast<std::size_t>(m) * m, 0);
  if (cfg.record_every > 0) res.trace.push_back({0, state.claim_a, state.claim_b});

  std::int64_t claim_sum = 0;
  for (std::uint64_t t = 1; t <= cfg.steps; ++t) {
    state = step(state, cfg, rng);
    if (t > cfg.burn_in) {
      const std::size_t idx =
          static_cast<std::size_t>(state.claim_a - cfg.game.lower) * m + (state.claim_b - cfg.game.lower);
      ++res.joint_counts[idx];
      claim_sum += state.claim_a + state.claim_b;
    }
    if (cfg.record_every > 0 && t % cfg.record_every == 0)
      res.trace.push_back({t, state.claim_a, state.claim_b});
  }
  res.average_claim =
      static_cast<double>(claim_sum) / (2.0 * static_cast<double>(cfg.steps - cfg.burn_in));
  res.final_state = state;
  return res;
}

/// Exact one-step kernel of the update process over joint states, sparse and
/// row-stochastic by construction. State index = (claim_a - L) * m + (claim_b - L).
struct TransitionKernel {
  Claim lower = 0;
  int m = 0;
  std::vector<std::vector<std::pair<int, double>>> rows;  // (column, probability)

  int num_states() const { return m * m; }
  int state_index(Claim a, Claim b) const { return (a - lower) * m + (b - lower); }
};

inline TransitionKernel build_transition(const GameParams& params, double beta) {
  params.validate();
  if (!(beta >= 0.0) || !std::isfinite(beta))
    throw std::invalid_argument("beta: selection intensity must be finite and >= 0");
  const int m = params.num_claims();
  TransitionKernel k{params.lower, m, {}};
  k.rows.resize(static_cast<std::size_t>(m) * m);
  const double pick = 1.0 / (2.0 * m);

  for (int ia = 0; ia < m; ++ia)
    for (int ib = 0; ib < m; ++ib) {
      auto& row = k.rows[static_cast<std::size_t>(ia) * m + ib];
      row.reserve(2 * m - 1);
      row.emplace_back(ia * m + ib, 0.0);  // self mass accumulates at the front
      const Claim a = params.lower + ia;
      const Claim b = params.lower + ib;
      double stay = 0.0;
      const std::int64_t payoff_a = detail::payoff_unchecked(a, b, params.reward);
      const std::int64_t payoff_b = detail::payoff_unchecked(b, a, params.reward);
      for (int ialt = 0; ialt < m; ++ialt) {
        const Claim alt = params.lower + ialt;
        if (ialt == ia) {
          stay += pick;
        } else {
          const double p = fermi(
              static_cast<double>(detail::payoff_unchecked(alt, b, params.reward) - payoff_a), beta);
          row.emplace_back(ialt * m + ib, pick * p);
          stay += pick * (1.0 - p);
        }
        if (ialt == ib) {
          stay += pick;
        } else {
          const double p = fermi(
              static_cast<double>(detail::payoff_unchecked(alt, a, params.reward) - payoff_b), beta);
          row.emplace_back(ia * m + ialt, pick * p);
          stay += pick * (1.0 - p);
        }
      }
      row.front().second = stay;
    }
  return k;
}

struct StationaryDistribution {
  Claim lower = 0;
  int m = 0;
  std::vector<double> probs;  // row-major over (claim_a, claim_b)
  double residual = 0.0;      // achieved L1 residual of v K - v
  std::size_t iterations = 0;

  double prob(Claim a, Claim b) const {
    return probs[static_cast<std::size_t>(a - lower) * m + (b - lower)];
  }
};

struct PowerIterationOptions {
  double tol = 1e-12;                  // L1 residual target
  std::size_t max_iterations = 1000000;
  // Every this many iterations, attempt a geometric-tail jump along the
  // dominant error mode (kept only when it lowers the residual). Metastable
  // kernels at strong selection mix slowly; the jump cuts the iteration count
  // by orders of magnitude while the residual check still certifies the
  // returned vector. 0 disables it.
  std::size_t extrapolate_every = 100;
};

struct ConvergenceError : std::runtime_error {
  explicit ConvergenceError(StationaryDistribution best_iterate)
      : std::runtime_error("stationary distribution did not converge: residual " +
                           std::to_string(best_iterate.residual) + " after " +
                           std::to_string(best_iterate.iterations) + " iterations"),
        best(std::move(best_iterate)) {}
  StationaryDistribution best;
};

/// Unique stationary vector of the kernel by power iteration from the uniform
/// vector, to an L1 residual below tol. Throws ConvergenceError carrying the
/// best iterate when the iteration cap is reached.
inline StationaryDistribution stationary_distribution(const TransitionKernel& kernel,
                                                      PowerIterationOptions opt = {}) {
  const int n = kernel.num_states();
  if (n == 0) throw std::invalid_argument("stationary_distribution: empty kernel");

  // Flatten in-edges per destination (sources ascending) for the v -> v K pass.
  std::vector<std::size_t> offset(n + 1, 0);
  for (int s = 0; s < n; ++s)
    for (const auto& [col, p] : kernel.rows[s]) {
      (void)p;
      ++offset[col + 1];
    }
  for (int d = 0; d < n; ++d) offset[d + 1] += offset[d];
  std::vector<int> src(offset[n]);
  std::vector<double> prob(offset[n]);
  {
    std::vector<std::size_t> cursor(offset.begin(), offset.end() - 1);
    for (int s = 0; s < n; ++s)
      for (const auto& [col, p] : kernel.rows[s]) {
        src[cursor[col]] = s;
        prob[cursor[col]] = p;
        ++cursor[col];
      }
  }

  // One v -> v K pass; returns the L1 residual and leaves `out` normalized.
  const auto apply = [&](const std::vector<double>& in, std::vector<double>& out) {
    double drift = 0.0;
    double sum = 0.0;
    for (int d = 0; d < n; ++d) {
      double s = 0.0;
      for (std::size_t e = offset[d]; e < offset[d + 1]; ++e) s += in[src[e]] * prob[e];
      out[d] = s;
      drift += std::abs(s - in[d]);
      sum += s;
    }
    for (int d = 0; d < n; ++d) out[d] /= sum;
    return drift;
  };

  std::vector<double> v(n, 1.0 / n), next(n);
  std::vector<double> older, old_v, candidate, probe;
  double residual = std::numeric_limits<double>::infinity();
  for (std::size_t it = 1; it <= opt.max_iterations; ++it) {
    residual = apply(v, next);
    v.swap(next);
    if (residual < opt.tol)
      return StationaryDistribution{kernel.lower, kernel.m, std::move(v), residual, it};

    if (opt.extrapolate_every && it % opt.extrapolate_every == 0) {
      if (!old_v.empty() && !older.empty()) {
        // Block-end iterates behave like s_k = v* + c r^k w along the slowest
        // mode; estimate r by projection and add the remaining geometric tail.
        double num = 0.0, den = 0.0;
        for (int d = 0; d < n; ++d) {
          const double d1 = old_v[d] - older[d];
          const double d2 = v[d] - old_v[d];
          num += d2 * d1;
          den += d1 * d1;
        }
        const double r = den > 0.0 ? num / den : 0.0;
        if (r > 0.0 && r < 1.0) {
          const double tail = r / (1.0 - r);
          candidate.resize(n);
          double sum = 0.0;
          for (int d = 0; d < n; ++d) {
            double w = v[d] + (v[d] - old_v[d]) * tail;
            if (w < 0.0) w = 0.0;
            sum += w;
          }
          if (sum > 0.0) {
            for (int d = 0; d < n; ++d) {
              const double w = v[d] + (v[d] - old_v[d]) * tail;
              candidate[d] = (w < 0.0 ? 0.0 : w) / sum;
            }
            probe.resize(n);
            if (apply(candidate, probe) < residual) v = candidate;
          }
        }
      }
      older = old_v;
      old_v = v;
    }
  }
  throw ConvergenceError(
      StationaryDistribution{kernel.lower, kernel.m, std::move(v), residual, opt.max_iterations});
}

/// Expected value of (claim_a + claim_b) / 2 under the distribution.
inline double average_claim(const StationaryDistribution& dist) {
  double s = 0.0;
  std::size_t idx = 0;
  for (int ia = 0; ia < dist.m; ++ia)
    for (int ib = 0; ib < dist.m; ++ib, ++idx)
      s += dist.probs[idx] * (0.5 * static_cast<double>((dist.lower + ia) + (dist.lower + ib)));
  return s;
}

/// Exact-solver sweep over (R, beta); one row per grid point with the average
/// claim and the achieved residual. Convergence failures are recorded on
/// their row and the sweep continues.
inline SweepResult sweep(const std::vector<int>& reward_values,
                         const std::vector<double>& beta_values,
                         const GameParams& base, int threads, RunMetadata meta,
                         PowerIterationOptions opt = {}) {
  const std::size_t n = reward_values.size() * beta_values.size();
  for (int r : reward_values) {
    GameParams p = base;
    p.reward = r;
    p.validate();
  }
  return run_parallel(
      {"R", "beta", "average_claim", "residual"}, n,
      [&](std::size_t i) {
        return std::vector<Cell>{cell(reward_values[i / beta_values.size()]),
                                 cell(beta_values[i % beta_values.size()])};
      },
      [&](std::size_t i) {
        GameParams p = base;
        p.reward = reward_values[i / beta_values.size()];
        const double beta = beta_values[i % beta_values.size()];
        const auto dist = stationary_distribution(build_transition(p, beta), opt);
        return std::vector<Cell>{cell(average_claim(dist)), cell(dist.residual)};
      },
      threads, std::move(meta));
}

}  // namespace tddyn::intro
