#pragma once

#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

// Traveler's Dilemma payoff structure, payoff matrix, the local/global
// sub-game classification, and iterated elimination of dominated claims.
// Everything here is exact integer arithmetic.

namespace tddyn {

using Claim = int;

/// Action space [lower, upper] (integer claims) and the reward parameter.
struct GameParams {
  Claim lower = 2;
  Claim upper = 100;
  int reward = 2;

  int num_claims() const { return upper - lower + 1; }

  void validate() const {
    if (lower < 0)
      throw std::invalid_argument("L: lower claim must be >= 0, got " + std::to_string(lower));
    if (lower >= upper)
      throw std::invalid_argument("L/U: claim interval requires L < U, got [" +
                                  std::to_string(lower) + ", " + std::to_string(upper) + "]");
    if (reward <= 1)
      throw std::invalid_argument("R: reward must be > 1, got " + std::to_string(reward));
  }

  bool operator==(const GameParams&) const = default;
};

namespace detail {

// Payoff rule without the domain check, for callers iterating valid claims.
inline std::int64_t payoff_unchecked(Claim own, Claim other, int reward) {
  if (own == other) return own;
  if (own < other) return own + reward;
  return other - reward;
}

}  // namespace detail

/// Payoff of claiming `own` against an opponent claiming `other`: the common
/// value when the claims agree, otherwise the lower claimant earns its claim
/// plus the reward and the higher claimant earns the lower claim minus it.
inline std::int64_t payoff(Claim own, Claim other, const GameParams& params) {
  params.validate();
  if (own < params.lower || own > params.upper)
    throw std::domain_error("claim " + std::to_string(own) + " outside [" +
                            std::to_string(params.lower) + ", " + std::to_string(params.upper) + "]");
  if (other < params.lower || other > params.upper)
    throw std::domain_error("claim " + std::to_string(other) + " outside [" +
                            std::to_string(params.lower) + ", " + std::to_string(params.upper) + "]");
  return detail::payoff_unchecked(own, other, params.reward);
}

/// Dense payoff table; row = own claim index, column = opponent claim index,
/// index i corresponds to claim lower + i.
struct PayoffMatrix {
  Claim lower = 0;
  int size = 0;
  std::vector<std::int64_t> entries;  // row-major, size*size

  std::int64_t at(int row, int col) const {
    return entries[static_cast<std::size_t>(row) * size + col];
  }
  Claim claim_at(int index) const { return lower + index; }
  int index_of(Claim c) const { return c - lower; }
};

inline PayoffMatrix build_payoff_matrix(const GameParams& params) {
  params.validate();
  const int m = params.num_claims();
  PayoffMatrix pm{params.lower, m, std::vector<std::int64_t>(static_cast<std::size_t>(m) * m)};
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j)
      pm.entries[static_cast<std::size_t>(i) * m + j] =
          detail::payoff_unchecked(params.lower + i, params.lower + j, params.reward);
  return pm;
}

enum class SubgameKind { PrisonersDilemma, Coordination, Other };

inline const char* to_string(SubgameKind k) {
  switch (k) {
    case SubgameKind::PrisonersDilemma: return "PrisonersDilemma";
    case SubgameKind::Coordination: return "Coordination";
    default: return "Other";
  }
}

/// Classification of the 2x2 game restricted to a claim pair {n, n+s}.
/// The dominance flags are meaningful only when kind == Coordination.
struct SubgameClass {
  SubgameKind kind = SubgameKind::Other;
  bool high_equilibrium_payoff_dominant = false;
  bool high_equilibrium_risk_dominant = false;
};

/// Restrict the game to the two claims {base, base + gap} and classify it.
/// PrisonersDilemma: the low claim strictly dominates, yet the high diagonal
/// profile strictly payoff-dominates the low one. Coordination: both diagonal
/// profiles are Nash equilibria of the restriction (non-strict equilibria
/// count, which makes the boundary gap == reward a coordination game). Risk
/// dominance of the high equilibrium uses the deviation-loss comparison
/// (D - B) > (A - C).
inline SubgameClass classify_subgame(Claim base, int gap, const GameParams& params) {
  params.validate();
  if (gap < 1) throw std::domain_error("gap must be >= 1, got " + std::to_string(gap));
  if (base < params.lower || base + gap > params.upper)
    throw std::domain_error("claim pair {" + std::to_string(base) + ", " +
                            std::to_string(base + gap) + "} outside [" +
                            std::to_string(params.lower) + ", " + std::to_string(params.upper) + "]");
  const std::int64_t low_low = detail::payoff_unchecked(base, base, params.reward);            // A
  const std::int64_t low_high = detail::payoff_unchecked(base, base + gap, params.reward);     // B
  const std::int64_t high_low = detail::payoff_unchecked(base + gap, base, params.reward);     // C
  const std::int64_t high_high = detail::payoff_unchecked(base + gap, base + gap, params.reward);  // D

  SubgameClass out;
  const bool low_dominates_strictly = low_low > high_low && low_high > high_high;
  const bool both_diagonals_nash = high_low <= low_low && low_high <= high_high;
  if (low_dominates_strictly && high_high > low_low) {
    out.kind = SubgameKind::PrisonersDilemma;
  } else if (both_diagonals_nash) {
    out.kind = SubgameKind::Coordination;
    out.high_equilibrium_payoff_dominant = high_high > low_low;
    out.high_equilibrium_risk_dominant = (high_high - low_high) > (low_low - high_low);
  } else {
    out.kind = SubgameKind::Other;
  }
  return out;
}

/// Iterated elimination of dominated claims. Each round removes, all at once,
/// every claim dominated within the surviving set (another survivor does at
/// least as well against every surviving opponent and strictly better against
/// one). Dominance is taken in the weak sense: strict dominance alone never
/// fires in this game, because any two claims tie against opponents below
/// both, while weak dominance unravels the action space from the top.
inline std::vector<Claim> iterated_elimination(const GameParams& params) {
  params.validate();
  std::vector<Claim> survivors(static_cast<std::size_t>(params.num_claims()));
  std::iota(survivors.begin(), survivors.end(), params.lower);

  bool removed = true;
  while (removed && survivors.size() > 1) {
    removed = false;
    std::vector<char> dominated(survivors.size(), 0);
    for (std::size_t a = 0; a < survivors.size(); ++a) {
      for (std::size_t b = 0; b < survivors.size() && !dominated[a]; ++b) {
        if (a == b) continue;
        bool never_worse = true;
        bool strictly_better_once = false;
        for (Claim c : survivors) {
          const std::int64_t pa = detail::payoff_unchecked(survivors[a], c, params.reward);
          const std::int64_t pb = detail::payoff_unchecked(survivors[b], c, params.reward);
          if (pb < pa) {
            never_worse = false;
            break;
          }
          if (pb > pa) strictly_better_once = true;
        }
        if (never_worse && strictly_better_once) dominated[a] = 1;
      }
    }
    std::vector<Claim> next;
    next.reserve(survivors.size());
    for (std::size_t a = 0; a < survivors.size(); ++a)
      if (!dominated[a]) next.push_back(survivors[a]);
    removed = next.size() < survivors.size();
    survivors.swap(next);
  }
  return survivors;
}

}  // namespace tddyn
