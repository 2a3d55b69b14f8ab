#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "tddyn/replicator.hpp"
#include "tddyn/rng.hpp"

using namespace tddyn;

namespace {

rm::SimplexVector random_simplex(Claim lower, int m, std::mt19937_64& rng) {
  rm::SimplexVector x{lower, std::vector<double>(m)};
  double sum = 0.0;
  for (auto& f : x.freqs) {
    f = -std::log(1.0 - uniform01(rng));
    sum += f;
  }
  for (auto& f : x.freqs) f /= sum;
  return x;
}

}  // namespace

TEST_CASE("mutation matrix") {
  SECTION("diagonal keeps 1-q, off-diagonal spreads q uniformly") {
    const auto q = rm::build_mutation_matrix(99, 0.7);
    CHECK(q.entry(0, 0) == Catch::Approx(0.3).margin(1e-15));
    CHECK(q.entry(17, 3) == Catch::Approx(0.7 / 98).margin(1e-18));
  }
  SECTION("no mutation gives the identity") {
    const auto q = rm::build_mutation_matrix(2, 0.0);
    const auto dense = q.dense();
    CHECK(dense == std::vector<double>{1.0, 0.0, 0.0, 1.0});
  }
  SECTION("maximal strength makes every entry equal") {
    const auto q = rm::build_mutation_matrix(4, 0.75);
    for (double e : q.dense()) CHECK(e == Catch::Approx(0.25).margin(1e-15));
  }
  SECTION("rows are stochastic") {
    auto rng = make_rng(90);
    for (int i = 0; i < 50; ++i) {
      const int m = uniform_int(rng, 2, 120);
      const double strength = uniform01(rng) * (m - 1) / m;
      const auto q = rm::build_mutation_matrix(m, strength);
      const auto dense = q.dense();
      for (int r = 0; r < m; ++r) {
        double sum = 0.0;
        for (int c = 0; c < m; ++c) sum += dense[static_cast<std::size_t>(r) * m + c];
        REQUIRE(sum == Catch::Approx(1.0).margin(1e-12));
      }
    }
  }
  SECTION("out-of-range strength is rejected") {
    CHECK_THROWS_AS(rm::build_mutation_matrix(99, 1.5), std::invalid_argument);
    CHECK_THROWS_AS(rm::build_mutation_matrix(99, -0.1), std::invalid_argument);
    CHECK_THROWS_AS(rm::build_mutation_matrix(1, 0.0), std::invalid_argument);
  }
}

TEST_CASE("fitness vector") {
  SECTION("monomorphic low claim zeroes every higher claim") {
    const GameParams params{2, 10, 2};
    const auto pm = build_payoff_matrix(params);
    rm::SimplexVector x{2, std::vector<double>(pm.size, 0.0)};
    x.freqs[0] = 1.0;
    const auto f = fitness_vector(x, pm);
    CHECK(f[0] == Catch::Approx(2.0));
    for (int i = 1; i < pm.size; ++i) CHECK(f[i] == Catch::Approx(0.0));
  }
  SECTION("uniform mix over a 2x2 game") {
    const auto pm = build_payoff_matrix(GameParams{2, 3, 2});
    const rm::SimplexVector x{2, {0.5, 0.5}};
    const auto f = fitness_vector(x, pm);
    CHECK(f[0] == Catch::Approx(3.0));
    CHECK(f[1] == Catch::Approx(1.5));
  }
  SECTION("matches the direct double loop") {
    const auto pm = build_payoff_matrix(GameParams{2, 40, 5});
    auto rng = make_rng(7);
    for (int rep = 0; rep < 20; ++rep) {
      const auto x = random_simplex(2, pm.size, rng);
      const auto f = fitness_vector(x, pm);
      for (int i = 0; i < pm.size; ++i) {
        double direct = 0.0;
        for (int j = 0; j < pm.size; ++j) direct += static_cast<double>(pm.at(i, j)) * x.freqs[j];
        REQUIRE(f[i] == Catch::Approx(direct).margin(1e-12));
      }
    }
  }
  SECTION("dimension mismatch is rejected") {
    const auto pm = build_payoff_matrix(GameParams{2, 10, 2});
    CHECK_THROWS_AS(fitness_vector(rm::SimplexVector{2, {1.0}}, pm), std::invalid_argument);
  }
}

TEST_CASE("selection-mutation right-hand side") {
  SECTION("monomorphic lowest claim is a fixed point of the pure replicator") {
    const auto pm = build_payoff_matrix(GameParams{2, 10, 2});
    rm::SimplexVector x{2, std::vector<double>(pm.size, 0.0)};
    x.freqs[0] = 1.0;
    for (double d : rm_rhs(x, pm, rm::build_mutation_matrix(pm.size, 0.0)))
      CHECK(d == Catch::Approx(0.0).margin(1e-15));
  }
  SECTION("uniform 2x2 mix, hand-computed flow") {
    // f = (3, 1.5), phi = 2.25, dx_i = x_i (f_i - phi) = (+0.375, -0.375)
    const auto pm = build_payoff_matrix(GameParams{2, 3, 2});
    const auto dx = rm_rhs(rm::SimplexVector{2, {0.5, 0.5}}, pm, rm::build_mutation_matrix(2, 0.0));
    CHECK(dx[0] == Catch::Approx(0.375).margin(1e-15));
    CHECK(dx[1] == Catch::Approx(-0.375).margin(1e-15));
  }
  SECTION("components always sum to zero") {
    const auto pm = build_payoff_matrix(GameParams{2, 20, 2});
    auto rng = make_rng(11);
    for (int rep = 0; rep < 1000; ++rep) {
      const auto x = random_simplex(2, pm.size, rng);
      const double strength = uniform01(rng) * (pm.size - 1) / pm.size;
      const auto dx = rm_rhs(x, pm, rm::build_mutation_matrix(pm.size, strength));
      double sum = 0.0;
      for (double d : dx) sum += d;
      REQUIRE(std::abs(sum) < 1e-12);
    }
  }
  SECTION("reduces to the replicator flow when mutation is off") {
    const auto pm = build_payoff_matrix(GameParams{2, 15, 3});
    auto rng = make_rng(12);
    for (int rep = 0; rep < 200; ++rep) {
      const auto x = random_simplex(2, pm.size, rng);
      const auto f = fitness_vector(x, pm);
      double phi = 0.0;
      for (int i = 0; i < pm.size; ++i) phi += x.freqs[i] * f[i];
      const auto dx = rm_rhs(x, pm, rm::build_mutation_matrix(pm.size, 0.0));
      for (int i = 0; i < pm.size; ++i)
        REQUIRE(dx[i] == Catch::Approx(x.freqs[i] * (f[i] - phi)).margin(1e-12));
    }
  }
}

TEST_CASE("payoff shift keeps fitness nonnegative") {
  CHECK(rm::payoff_shift(GameParams{2, 100, 2}) == 0);
  CHECK(rm::payoff_shift(GameParams{2, 100, 40}) == 38);
  const auto pm = rm::shifted_payoff_matrix(GameParams{2, 100, 40});
  std::int64_t lowest = pm.entries[0];
  for (auto e : pm.entries) lowest = std::min(lowest, e);
  CHECK(lowest == 0);
}

TEST_CASE("integration") {
  SECTION("pure replicator eliminates everything above the lowest claim") {
    rm::Config cfg;
    cfg.game = GameParams{2, 10, 2};
    cfg.mutation_strength = 0.0;
    const auto traj = rm::integrate(cfg, rm::uniform_simplex(cfg.game));
    CHECK(traj.converged);
    CHECK(traj.terminal.freqs[0] >= 1.0 - 1e-6);
    CHECK(rm::highest_frequency_claim(traj.terminal) == 2);
  }
  SECTION("snapshots stay on the simplex and step drift is tiny") {
    rm::Config cfg;
    cfg.game = GameParams{2, 10, 2};
    cfg.mutation_strength = 0.5;
    cfg.t_max = 200.0;
    const auto traj = rm::integrate(cfg, rm::uniform_simplex(cfg.game));
    for (const auto& snap : traj.snapshots) REQUIRE(snap.valid(1e-9));
    CHECK(traj.max_sum_drift < 1e-9);
    CHECK(traj.min_component_seen > -1e-12);
  }
  SECTION("maximal mutation strength drives the state to the uniform point") {
    rm::Config cfg;
    cfg.game = GameParams{2, 10, 2};
    const int m = cfg.game.num_claims();
    cfg.mutation_strength = static_cast<double>(m - 1) / m;
    const auto traj = rm::integrate(cfg, rm::uniform_simplex(cfg.game));
    // the uniform mix is the unique fixed point of the all-equal kernel
    for (double f : traj.terminal.freqs) CHECK(f == Catch::Approx(1.0 / m).margin(1e-9));
  }
  SECTION("the top claim declines monotonically under the pure replicator") {
    rm::Config cfg;
    cfg.game = GameParams{2, 10, 2};
    cfg.mutation_strength = 0.0;
    cfg.record_dt = 0.5;
    const auto traj = rm::integrate(cfg, rm::uniform_simplex(cfg.game));
    const int top = cfg.game.num_claims() - 1;
    for (std::size_t k = 1; k < traj.snapshots.size(); ++k)
      REQUIRE(traj.snapshots[k].freqs[top] <= traj.snapshots[k - 1].freqs[top] + 1e-15);
  }
  SECTION("a wildly oversized step produces a diagnosed failure") {
    rm::Config cfg;
    cfg.game = GameParams{2, 100, 2};
    cfg.mutation_strength = 0.0;
    cfg.dt = 1e6;
    cfg.t_max = 1e9;
    try {
      rm::integrate(cfg, rm::uniform_simplex(cfg.game));
      // divergence may also clip-renormalize into a valid corner; only a
      // thrown IntegrationError must carry the time reached
    } catch (const rm::IntegrationError& e) {
      CHECK(e.time_reached > 0.0);
    }
  }
  SECTION("rejects off-simplex initial conditions") {
    rm::Config cfg;
    cfg.game = GameParams{2, 3, 2};
    CHECK_THROWS_AS(rm::integrate(cfg, rm::SimplexVector{2, {0.7, 0.7}}), std::invalid_argument);
  }
}

TEST_CASE("highest frequency claim") {
  CHECK(rm::highest_frequency_claim(rm::SimplexVector{2, {1.0, 0.0, 0.0}}) == 2);
  CHECK(rm::highest_frequency_claim(rm::SimplexVector{2, {0.2, 0.5, 0.3}}) == 3);
  // exact ties break toward the lowest claim
  CHECK(rm::highest_frequency_claim(rm::SimplexVector{5, {0.25, 0.25, 0.25, 0.25}}) == 5);
}

TEST_CASE("halving the step does not move the terminal highest claim") {
  for (int reward : {2, 5}) {
    for (double strength : {0.0, 0.5}) {
      rm::Config cfg;
      cfg.game = GameParams{2, 15, reward};
      cfg.mutation_strength = strength;
      cfg.t_max = 4000.0;
      const auto coarse = rm::integrate(cfg, rm::uniform_simplex(cfg.game));
      cfg.dt /= 2;
      const auto fine = rm::integrate(cfg, rm::uniform_simplex(cfg.game));
      REQUIRE(rm::highest_frequency_claim(coarse.terminal) ==
              rm::highest_frequency_claim(fine.terminal));
    }
  }
}

TEST_CASE("reward/mutation sweep") {
  rm::Config base;
  base.game = GameParams{2, 10, 2};
  base.t_max = 2000.0;
  RunMetadata meta;
  const auto result = rm::sweep({2, 5}, {0.0, 0.5}, base, 2, meta);
  REQUIRE(result.columns == std::vector<std::string>{"R", "q", "highest_claim", "converged"});
  REQUIRE(result.rows.size() == 4);
  CHECK_FALSE(result.any_failed());
  // mutation off: the lowest claim wins for every reward
  CHECK(std::get<std::int64_t>(result.rows[0][2]) == 2);
  CHECK(std::get<std::int64_t>(result.rows[2][2]) == 2);
  // grid order is rewards outer, strengths inner
  CHECK(std::get<std::int64_t>(result.rows[1][0]) == 2);
  CHECK(std::get<double>(result.rows[1][1]) == 0.5);
}
