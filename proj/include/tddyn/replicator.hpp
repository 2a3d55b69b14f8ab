#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "tddyn/game.hpp"
#include "tddyn/sweep.hpp"

// Selection-mutation dynamics on the claim-frequency simplex: the growth rate
// of each claim is its expected payoff against the population mixture, and a
// uniform mutation kernel redistributes a fraction of every claim's
// reproduction over all other claims. Integrated with a fixed-step classic
// fourth-order Runge-Kutta scheme.

namespace tddyn::rm {

/// Frequency distribution over claims; index i corresponds to claim lower+i.
struct SimplexVector {
  Claim lower = 0;
  std::vector<double> freqs;

  int dimension() const { return static_cast<int>(freqs.size()); }
  Claim claim_at(int index) const { return lower + index; }

  double sum() const {
    double s = 0.0;
    for (double f : freqs) s += f;
    return s;
  }
  bool valid(double tol = 1e-12) const {
    for (double f : freqs)
      if (!(f >= 0.0) || !std::isfinite(f)) return false;
    return std::abs(sum() - 1.0) <= tol;
  }
};

inline SimplexVector uniform_simplex(const GameParams& params) {
  params.validate();
  const int m = params.num_claims();
  return SimplexVector{params.lower, std::vector<double>(m, 1.0 / m)};
}

/// Uniform mutation kernel: a type keeps its identity with probability
/// 1 - strength and otherwise becomes any of the m-1 other types uniformly.
/// Stored parametrically; dense() materializes the row-stochastic matrix.
struct MutationMatrix {
  int size = 0;
  double strength = 0.0;  // admissible range [0, (m-1)/m]

  double entry(int from, int to) const {
    return from == to ? 1.0 - strength : strength / (size - 1);
  }
  std::vector<double> dense() const {
    std::vector<double> q(static_cast<std::size_t>(size) * size);
    for (int i = 0; i < size; ++i)
      for (int j = 0; j < size; ++j) q[static_cast<std::size_t>(i) * size + j] = entry(i, j);
    return q;
  }
};

inline MutationMatrix build_mutation_matrix(int m, double strength) {
  if (m < 2) throw std::invalid_argument("mutation matrix needs m >= 2, got " + std::to_string(m));
  const double upper = static_cast<double>(m - 1) / m;
  if (!(strength >= 0.0) || strength > upper + 1e-15)
    throw std::invalid_argument("q: mutation strength must lie in [0, " + std::to_string(upper) +
                                "], got " + std::to_string(strength));
  return MutationMatrix{m, strength};
}

/// Expected payoff of each claim against the mixture x (self-interaction
/// included, as usual for an infinite population).
inline std::vector<double> fitness_vector(const SimplexVector& x, const PayoffMatrix& pm) {
  if (x.dimension() != pm.size)
    throw std::invalid_argument("fitness_vector: dimension mismatch (" +
                                std::to_string(x.dimension()) + " vs " + std::to_string(pm.size) + ")");
  const int m = pm.size;
  std::vector<double> f(m, 0.0);
  for (int i = 0; i < m; ++i) {
    const std::int64_t* row = &pm.entries[static_cast<std::size_t>(i) * m];
    double s = 0.0;
    for (int j = 0; j < m; ++j) s += static_cast<double>(row[j]) * x.freqs[j];
    f[i] = s;
  }
  return f;
}

/// Right-hand side of the selection-mutation flow:
///   dx_i = sum_j x_j f_j Q[j][i] - x_i phi,   phi = sum_i x_i f_i.
/// The components sum to zero because Q is row-stochastic.
inline std::vector<double> rm_rhs(const SimplexVector& x, const PayoffMatrix& pm,
                                  const MutationMatrix& q) {
  if (x.dimension() != pm.size || q.size != pm.size)
    throw std::invalid_argument("rm_rhs: dimension mismatch");
  const int m = pm.size;
  const std::vector<double> f = fitness_vector(x, pm);
  double phi = 0.0;
  std::vector<double> xf(m);
  for (int i = 0; i < m; ++i) {
    xf[i] = x.freqs[i] * f[i];
    phi += xf[i];
  }
  // Uniform kernel: sum_j xf_j Q[j][i] = (1-q) xf_i + q/(m-1) (phi - xf_i).
  const double keep = 1.0 - q.strength;
  const double spread = q.strength / (m - 1);
  std::vector<double> dx(m);
  for (int i = 0; i < m; ++i) dx[i] = keep * xf[i] + spread * (phi - xf[i]) - x.freqs[i] * phi;
  return dx;
}

/// Entrywise shift applied to the payoff matrix before it feeds the flow,
/// keeping fitness nonnegative when the reward exceeds the lowest claim.
inline std::int64_t payoff_shift(const GameParams& params) {
  return params.reward > params.lower ? static_cast<std::int64_t>(params.reward) - params.lower : 0;
}

inline PayoffMatrix shifted_payoff_matrix(const GameParams& params) {
  PayoffMatrix pm = build_payoff_matrix(params);
  const std::int64_t shift = payoff_shift(params);
  if (shift != 0)
    for (auto& e : pm.entries) e += shift;
  return pm;
}

struct Config {
  GameParams game;
  double mutation_strength = 0.0;  // q
  double dt = 0.01;
  double t_max = 10000.0;
  double conv_tol = 1e-10;   // on the max-norm of the right-hand side
  double record_dt = 1.0;    // snapshot spacing in time units

  void validate() const {
    game.validate();
    const int m = game.num_claims();
    const double upper = static_cast<double>(m - 1) / m;
    if (!(mutation_strength >= 0.0) || mutation_strength > upper + 1e-15)
      throw std::invalid_argument("q: mutation strength must lie in [0, " + std::to_string(upper) +
                                  "], got " + std::to_string(mutation_strength));
    if (!(dt > 0.0)) throw std::invalid_argument("dt must be > 0");
    if (!(t_max >= 0.0)) throw std::invalid_argument("tmax must be >= 0");
    if (!(conv_tol > 0.0)) throw std::invalid_argument("conv-tol must be > 0");
    if (!(record_dt > 0.0)) throw std::invalid_argument("record-every must be > 0");
  }
};

struct Trajectory {
  std::vector<double> times;
  std::vector<SimplexVector> snapshots;
  SimplexVector terminal;
  double terminal_time = 0.0;
  bool converged = false;
  std::int64_t applied_payoff_shift = 0;
  // step diagnostics, before the per-step clip / renormalize guard
  double max_sum_drift = 0.0;
  double min_component_seen = 0.0;
};

struct IntegrationError : std::runtime_error {
  explicit IntegrationError(double at_time)
      : std::runtime_error("integration produced a non-finite state at t = " + std::to_string(at_time)),
        time_reached(at_time) {}
  double time_reached;
};

namespace detail {

inline void rhs_into(const std::vector<double>& x, const PayoffMatrix& pm, double q_strength,
                     std::vector<double>& dx) {
  const int m = pm.size;
  double phi = 0.0;
  for (int i = 0; i < m; ++i) {
    const std::int64_t* row = &pm.entries[static_cast<std::size_t>(i) * m];
    double s = 0.0;
    for (int j = 0; j < m; ++j) s += static_cast<double>(row[j]) * x[j];
    dx[i] = x[i] * s;  // xf_i, reused below
    phi += dx[i];
  }
  const double keep = 1.0 - q_strength;
  const double spread = q_strength / (m - 1);
  for (int i = 0; i < m; ++i) dx[i] = keep * dx[i] + spread * (phi - dx[i]) - x[i] * phi;
}

}  // namespace detail

/// Fixed-step RK4 integration from x0. After every step, negative round-off
/// components are clipped to zero and the state renormalized to the simplex.
/// Converged means the max-norm of the right-hand side fell below conv_tol;
/// otherwise integration stops at t_max.
inline Trajectory integrate(const Config& cfg, const SimplexVector& x0) {
  cfg.validate();
  const int m = cfg.game.num_claims();
  if (x0.dimension() != m) throw std::invalid_argument("integrate: x0 dimension mismatch");
  if (!x0.valid(1e-9)) throw std::invalid_argument("integrate: x0 is not on the simplex");

  const PayoffMatrix pm = shifted_payoff_matrix(cfg.game);
  Trajectory traj;
  traj.applied_payoff_shift = payoff_shift(cfg.game);

  std::vector<double> x = x0.freqs;
  std::vector<double> k1(m), k2(m), k3(m), k4(m), tmp(m);
  double t = 0.0;
  double next_record = 0.0;
  const auto record = [&](double at) {
    traj.times.push_back(at);
    traj.snapshots.push_back(SimplexVector{cfg.game.lower, x});
  };

  const std::uint64_t max_steps = static_cast<std::uint64_t>(std::ceil(cfg.t_max / cfg.dt));
  for (std::uint64_t step = 0;; ++step) {
    detail::rhs_into(x, pm, cfg.mutation_strength, k1);
    double rhs_max = 0.0;
    for (int i = 0; i < m; ++i) rhs_max = std::max(rhs_max, std::abs(k1[i]));

    if (t >= next_record) {
      record(t);
      next_record += cfg.record_dt;
    }
    if (rhs_max < cfg.conv_tol) {
      traj.converged = true;
      break;
    }
    if (step >= max_steps) break;

    const double h = cfg.dt;
    for (int i = 0; i < m; ++i) tmp[i] = x[i] + 0.5 * h * k1[i];
    detail::rhs_into(tmp, pm, cfg.mutation_strength, k2);
    for (int i = 0; i < m; ++i) tmp[i] = x[i] + 0.5 * h * k2[i];
    detail::rhs_into(tmp, pm, cfg.mutation_strength, k3);
    for (int i = 0; i < m; ++i) tmp[i] = x[i] + h * k3[i];
    detail::rhs_into(tmp, pm, cfg.mutation_strength, k4);
    for (int i = 0; i < m; ++i)
      x[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    t += h;

    double sum = 0.0;
    double min_comp = 0.0;
    for (int i = 0; i < m; ++i) {
      sum += x[i];
      min_comp = std::min(min_comp, x[i]);
    }
    if (!std::isfinite(sum)) throw IntegrationError(t);
    traj.max_sum_drift = std::max(traj.max_sum_drift, std::abs(sum - 1.0));
    traj.min_component_seen = std::min(traj.min_component_seen, min_comp);
    double clipped_sum = 0.0;
    for (int i = 0; i < m; ++i) {
      if (x[i] < 0.0) x[i] = 0.0;
      clipped_sum += x[i];
    }
    for (int i = 0; i < m; ++i) x[i] /= clipped_sum;
  }

  if (traj.times.empty() || traj.times.back() != t) record(t);
  traj.terminal = SimplexVector{cfg.game.lower, std::move(x)};
  traj.terminal_time = t;
  return traj;
}

/// Claim carrying the largest frequency; ties break toward the lowest claim.
inline Claim highest_frequency_claim(const SimplexVector& x) {
  if (x.freqs.empty()) throw std::invalid_argument("highest_frequency_claim: empty vector");
  int best = 0;
  for (int i = 1; i < x.dimension(); ++i)
    if (x.freqs[i] > x.freqs[best]) best = i;
  return x.claim_at(best);
}

/// Grid sweep over reward and mutation-strength values from the uniform
/// initial condition. One row per (R, q): highest-frequency claim of the
/// terminal state plus the convergence flag. Integration failures are
/// recorded per row without aborting the sweep.
inline SweepResult sweep(const std::vector<int>& reward_values,
                         const std::vector<double>& q_values,
                         const Config& base, int threads, RunMetadata meta) {
  const std::size_t n = reward_values.size() * q_values.size();
  const auto config_at = [&](std::size_t i) {
    Config cfg = base;
    cfg.game.reward = reward_values[i / q_values.size()];
    cfg.mutation_strength = q_values[i % q_values.size()];
    return cfg;
  };
  for (std::size_t i = 0; i < n; ++i) config_at(i).validate();

  return run_parallel(
      {"R", "q", "highest_claim", "converged"}, n,
      [&](std::size_t i) {
        return std::vector<Cell>{cell(reward_values[i / q_values.size()]),
                                 cell(q_values[i % q_values.size()])};
      },
      [&](std::size_t i) {
        const Config cfg = config_at(i);
        const Trajectory traj = integrate(cfg, uniform_simplex(cfg.game));
        return std::vector<Cell>{cell(highest_frequency_claim(traj.terminal)),
                                 cell(traj.converged)};
      },
      threads, std::move(meta));
}

}  // namespace tddyn::rm
