#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "tddyn/game.hpp"

// Independent brute-force oracles used to validate the optimized
// implementations on small instances. Each oracle re-derives its arithmetic
// from the game rules directly (its own payoff branches, its own kernel
// enumeration) and shares no code path with the module it checks.

namespace tddyn::oracle {

namespace detail {

// Deliberately separate re-statement of the payoff rule.
inline std::int64_t raw_payoff(int own, int other, int reward) {
  if (own < other) return own + reward;
  if (own > other) return other - reward;
  return own;
}

}  // namespace detail

/// O(N^2) accumulated payoffs: ordered double loop over all pairs, self
/// excluded. Exact integers. Intended for N <= 1000.
inline std::vector<std::int64_t> pairwise_payoff_oracle(const std::vector<Claim>& claims,
                                                        const GameParams& params) {
  params.validate();
  if (claims.size() > 1000)
    throw std::invalid_argument("pairwise_payoff_oracle: population too large (N <= 1000)");
  std::vector<std::int64_t> acc(claims.size(), 0);
  for (std::size_t k = 0; k < claims.size(); ++k)
    for (std::size_t l = 0; l < claims.size(); ++l) {
      if (k == l) continue;
      acc[k] += detail::raw_payoff(claims[k], claims[l], params.reward);
    }
  return acc;
}

/// Exhaustive pure-strategy Nash profiles over all claim pairs, via
/// best-response tables. Intended for action spaces up to 200 claims.
inline std::vector<std::pair<Claim, Claim>> nash_enumeration_oracle(const GameParams& params) {
  params.validate();
  const int m = params.num_claims();
  if (m > 200) throw std::invalid_argument("nash_enumeration_oracle: action space too large (m <= 200)");

  // best_reply[j] = best payoff attainable against an opponent claiming lower+j
  std::vector<std::int64_t> best_reply(m, INT64_MIN);
  for (int j = 0; j < m; ++j)
    for (int i = 0; i < m; ++i) {
      const std::int64_t p = detail::raw_payoff(params.lower + i, params.lower + j, params.reward);
      if (p > best_reply[j]) best_reply[j] = p;
    }

  std::vector<std::pair<Claim, Claim>> nash;
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) {
      const std::int64_t pi = detail::raw_payoff(params.lower + i, params.lower + j, params.reward);
      const std::int64_t pj = detail::raw_payoff(params.lower + j, params.lower + i, params.reward);
      if (pi == best_reply[j] && pj == best_reply[i])
        nash.emplace_back(params.lower + i, params.lower + j);
    }
  return nash;
}

/// Stationary distribution of the two-player introspection chain on tiny
/// action spaces, by dense enumeration of every (player, proposal, accept /
/// reject) branch and a direct linear solve of v K = v with a normalization
/// row (Gaussian elimination, partial pivoting). Result is indexed row-major
/// over joint states (claim_a, claim_b), i.e. index = ia * m + ib.
/// Requires m*m <= 400 and finite selection intensity.
inline std::vector<double> dense_stationary_oracle(const GameParams& params, double beta) {
  params.validate();
  const int m = params.num_claims();
  const int n = m * m;
  if (n > 400) throw std::invalid_argument("dense_stationary_oracle: m^2 must be <= 400");
  if (!std::isfinite(beta) || beta < 0)
    throw std::invalid_argument("dense_stationary_oracle: beta must be finite and >= 0");

  // Dense kernel K[s][t].
  std::vector<double> K(static_cast<std::size_t>(n) * n, 0.0);
  const double pick = 1.0 / (2.0 * m);  // player choice times proposal choice
  for (int ia = 0; ia < m; ++ia)
    for (int ib = 0; ib < m; ++ib) {
      const int s = ia * m + ib;
      const int a = params.lower + ia;
      const int b = params.lower + ib;
      double stay = 0.0;
      for (int ialt = 0; ialt < m; ++ialt) {
        const int alt = params.lower + ialt;
        // player A introspects
        {
          const double gain = static_cast<double>(detail::raw_payoff(alt, b, params.reward) -
                                                  detail::raw_payoff(a, b, params.reward));
          const double accept = 1.0 / (1.0 + std::exp(-beta * gain));
          if (ialt == ia) {
            stay += pick;  // proposing the current claim changes nothing
          } else {
            K[static_cast<std::size_t>(s) * n + (ialt * m + ib)] += pick * accept;
            stay += pick * (1.0 - accept);
          }
        }
        // player B introspects
        {
          const double gain = static_cast<double>(detail::raw_payoff(alt, a, params.reward) -
                                                  detail::raw_payoff(b, a, params.reward));
          const double accept = 1.0 / (1.0 + std::exp(-beta * gain));
          if (ialt == ib) {
            stay += pick;
          } else {
            K[static_cast<std::size_t>(s) * n + (ia * m + ialt)] += pick * accept;
            stay += pick * (1.0 - accept);
          }
        }
      }
      K[static_cast<std::size_t>(s) * n + s] += stay;
    }

  // Solve v (K - I) = 0 with sum(v) = 1: transpose, replace last row.
  std::vector<double> A(static_cast<std::size_t>(n) * n);
  std::vector<double> rhs(n, 0.0);
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c)
      A[static_cast<std::size_t>(r) * n + c] = K[static_cast<std::size_t>(c) * n + r] - (r == c ? 1.0 : 0.0);
  for (int c = 0; c < n; ++c) A[static_cast<std::size_t>(n - 1) * n + c] = 1.0;
  rhs[n - 1] = 1.0;

  for (int col = 0; col < n; ++col) {
    int piv = col;
    for (int r = col + 1; r < n; ++r)
      if (std::abs(A[static_cast<std::size_t>(r) * n + col]) >
          std::abs(A[static_cast<std::size_t>(piv) * n + col]))
        piv = r;
    if (A[static_cast<std::size_t>(piv) * n + col] == 0.0)
      throw std::runtime_error("dense_stationary_oracle: singular system");
    if (piv != col) {
      for (int c = col; c < n; ++c)
        std::swap(A[static_cast<std::size_t>(piv) * n + c], A[static_cast<std::size_t>(col) * n + c]);
      std::swap(rhs[piv], rhs[col]);
    }
    const double d = A[static_cast<std::size_t>(col) * n + col];
    for (int r = col + 1; r < n; ++r) {
      const double factor = A[static_cast<std::size_t>(r) * n + col] / d;
      if (factor == 0.0) continue;
      for (int c = col; c < n; ++c)
        A[static_cast<std::size_t>(r) * n + c] -= factor * A[static_cast<std::size_t>(col) * n + c];
      rhs[r] -= factor * rhs[col];
    }
  }
  std::vector<double> v(n, 0.0);
  for (int r = n - 1; r >= 0; --r) {
    double s = rhs[r];
    for (int c = r + 1; c < n; ++c) s -= A[static_cast<std::size_t>(r) * n + c] * v[c];
    v[r] = s / A[static_cast<std::size_t>(r) * n + r];
  }
  // Clean tiny negative round-off and renormalize.
  double total = 0.0;
  for (double& x : v) {
    if (x < 0.0 && x > -1e-12) x = 0.0;
    total += x;
  }
  for (double& x : v) x /= total;
  return v;
}

}  // namespace tddyn::oracle
