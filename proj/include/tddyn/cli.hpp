#pragma once

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <memory>
#include <string>
#include <vector>

#include "tddyn/csv.hpp"
#include "tddyn/game.hpp"
#include "tddyn/introspection.hpp"
#include "tddyn/replicator.hpp"
#include "tddyn/svg.hpp"
#include "tddyn/sweep.hpp"
#include "tddyn/verify.hpp"
#include "tddyn/wright_fisher.hpp"

// Command-line front end. Every subcommand validates its flags against the
// module invariants before running, emits CSV tables with a reparsable
// metadata header, and reports through exit codes: 0 success, 1 runtime
// failure, 2 usage error.

#ifndef TDDYN_VERSION
#define TDDYN_VERSION "0.1.0"
#endif

namespace tddyn::cli {

inline const char* version() { return TDDYN_VERSION; }

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Shortest decimal string that parses back to exactly the same double.
inline std::string fmt_double(double v) {
  char buf[64];
  for (int prec = 6; prec <= 17; ++prec) {
    std::snprintf(buf, sizeof buf, "%.*g", prec, v);
    if (std::strtod(buf, nullptr) == v) return buf;
  }
  return buf;
}

inline std::string fmt_list(const std::vector<double>& xs) {
  std::string out;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i) out += ',';
    out += fmt_double(xs[i]);
  }
  return out;
}

inline std::string fmt_list(const std::vector<int>& xs) {
  std::string out;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i) out += ',';
    out += std::to_string(xs[i]);
  }
  return out;
}

enum class Command {
  None, GameMatrix, GameClassify, GameEliminate,
  RmRun, RmSweep, WfRun, WfSweep, IntroSim, IntroExact, IntroSweep, Verify
};

/// Flat bag of every flag; unused fields keep their defaults so parsed
/// invocations compare cleanly. `threads` is an execution detail and is
/// deliberately excluded from the canonical config echo.
struct Invocation {
  Command command = Command::None;
  std::uint64_t seed = 0;
  int threads = 0;  // 0 = hardware concurrency

  GameParams game{2, 100, 2};
  std::string out;
  std::string svg;

  // replicator-mutator
  double q = 0.0;
  std::vector<int> reward_list;
  std::vector<double> q_list;
  double dt = 0.01;
  double t_max = 10000.0;
  double conv_tol = 1e-10;
  double record_dt = 1.0;

  // wright-fisher
  int population = 100;
  double mu = 0.01;
  int delta = 1;
  double rho = 1.0;
  int generations = 1000;
  std::vector<double> mu_list;
  std::vector<int> delta_list;
  std::vector<double> rho_list;
  int replicates = 20;
  std::string init = "uniform";

  // introspection
  double beta = 1.0;
  std::vector<double> beta_list;
  std::uint64_t steps = 100000;
  std::uint64_t burn_in = 0;
  std::uint64_t record_steps = 1;

  bool operator==(const Invocation&) const = default;
};

/// Copy with execution-only knobs reset; this is what the config echo
/// round-trips.
inline Invocation scientific_config(Invocation inv) {
  inv.threads = 0;
  return inv;
}

namespace detail_cli {

inline wf::InitRule parse_wf_init(const std::string& text, const GameParams& game) {
  if (text == "uniform") return wf::UniformInit{};
  if (text.rfind("mono:", 0) == 0) {
    try {
      const Claim c = std::stoi(text.substr(5));
      if (c < game.lower || c > game.upper)
        throw UsageError("--init: claim " + std::to_string(c) + " outside the action space");
      return wf::MonomorphicInit{c};
    } catch (const UsageError&) {
      throw;
    } catch (const std::exception&) {
      throw UsageError("--init: cannot parse '" + text + "' (expected uniform or mono:<claim>)");
    }
  }
  throw UsageError("--init: unknown rule '" + text + "' (expected uniform or mono:<claim>)");
}

inline intro::InitRule parse_intro_init(const std::string& text, const GameParams& game) {
  if (text == "uniform") return intro::UniformInit{};
  if (text.rfind("fixed:", 0) == 0) {
    const auto comma = text.find(',', 6);
    try {
      if (comma == std::string::npos) throw std::invalid_argument("no comma");
      const Claim a = std::stoi(text.substr(6, comma - 6));
      const Claim b = std::stoi(text.substr(comma + 1));
      if (a < game.lower || a > game.upper || b < game.lower || b > game.upper)
        throw UsageError("--init: claims outside the action space");
      return intro::FixedInit{{a, b}};
    } catch (const UsageError&) {
      throw;
    } catch (const std::exception&) {
      throw UsageError("--init: cannot parse '" + text + "' (expected uniform or fixed:<a>,<b>)");
    }
  }
  throw UsageError("--init: unknown rule '" + text + "' (expected uniform or fixed:<a>,<b>)");
}

}  // namespace detail_cli

inline rm::Config rm_config(const Invocation& inv) {
  rm::Config cfg;
  cfg.game = inv.game;
  cfg.mutation_strength = inv.q;
  cfg.dt = inv.dt;
  cfg.t_max = inv.t_max;
  cfg.conv_tol = inv.conv_tol;
  cfg.record_dt = inv.record_dt;
  return cfg;
}

inline wf::Config wf_config(const Invocation& inv) {
  wf::Config cfg;
  cfg.game = inv.game;
  cfg.population_size = inv.population;
  cfg.mutation_prob = inv.mu;
  cfg.max_mutation_step = inv.delta;
  cfg.selection_intensity = inv.rho;
  cfg.generations = inv.generations;
  cfg.seed = inv.seed;
  cfg.init = detail_cli::parse_wf_init(inv.init, inv.game);
  return cfg;
}

inline intro::Config intro_config(const Invocation& inv) {
  intro::Config cfg;
  cfg.game = inv.game;
  cfg.selection_intensity = inv.beta;
  cfg.steps = inv.steps;
  cfg.burn_in = inv.burn_in;
  cfg.seed = inv.seed;
  cfg.init = detail_cli::parse_intro_init(inv.init, inv.game);
  cfg.record_every = inv.record_steps;
  return cfg;
}

/// Canonical single-line echo of the invocation; reparsing it reproduces
/// scientific_config(inv).
inline std::string canonical_config(const Invocation& inv) {
  const auto game = [&] {
    return " --L " + std::to_string(inv.game.lower) + " --U " + std::to_string(inv.game.upper);
  };
  const auto reward = [&] { return " --R " + std::to_string(inv.game.reward); };
  const auto out = [&] {
    std::string s;
    if (!inv.out.empty()) s += " --out " + inv.out;
    if (!inv.svg.empty()) s += " --svg " + inv.svg;
    return s;
  };
  switch (inv.command) {
    case Command::GameMatrix:
      return "game matrix" + game() + reward() + out();
    case Command::GameClassify:
      return "game classify" + game() + reward();
    case Command::GameEliminate:
      return "game eliminate" + game() + reward();
    case Command::RmRun:
      return "rm run" + game() + reward() + " --q " + fmt_double(inv.q) + " --dt " +
             fmt_double(inv.dt) + " --tmax " + fmt_double(inv.t_max) + " --conv-tol " +
             fmt_double(inv.conv_tol) + " --record-every " + fmt_double(inv.record_dt) + out();
    case Command::RmSweep:
      return "rm sweep" + game() + " --R-list " + fmt_list(inv.reward_list) + " --q-list " +
             fmt_list(inv.q_list) + " --dt " + fmt_double(inv.dt) + " --tmax " +
             fmt_double(inv.t_max) + " --conv-tol " + fmt_double(inv.conv_tol) + out();
    case Command::WfRun:
      return "wf run" + game() + reward() + " --N " + std::to_string(inv.population) + " --mu " +
             fmt_double(inv.mu) + " --delta " + std::to_string(inv.delta) + " --rho " +
             fmt_double(inv.rho) + " --t " + std::to_string(inv.generations) + " --init " +
             inv.init + " --seed " + std::to_string(inv.seed) + out();
    case Command::WfSweep:
      return "wf sweep" + game() + reward() + " --N " + std::to_string(inv.population) +
             " --mu-list " + fmt_list(inv.mu_list) + " --delta-list " + fmt_list(inv.delta_list) +
             " --rho-list " + fmt_list(inv.rho_list) + " --reps " + std::to_string(inv.replicates) +
             " --t " + std::to_string(inv.generations) + " --seed " + std::to_string(inv.seed) +
             out();
    case Command::IntroSim:
      return "intro sim" + game() + reward() + " --beta " + fmt_double(inv.beta) + " --steps " +
             std::to_string(inv.steps) + " --burn-in " + std::to_string(inv.burn_in) +
             " --record-every " + std::to_string(inv.record_steps) + " --init " + inv.init +
             " --seed " + std::to_string(inv.seed) + out();
    case Command::IntroExact:
      return "intro exact" + game() + reward() + " --beta " + fmt_double(inv.beta) + out();
    case Command::IntroSweep:
      return "intro sweep" + game() + " --R-list " + fmt_list(inv.reward_list) + " --beta-list " +
             fmt_list(inv.beta_list) + out();
    case Command::Verify:
      return "verify";
    default:
      return "";
  }
}

namespace detail_cli {

struct App {
  Invocation* inv;
  CLI::App app{"Traveler's Dilemma dynamics toolkit", "tddyn"};
  CLI::App *game_matrix, *game_classify, *game_eliminate;
  CLI::App *rm_run, *rm_sweep, *wf_run, *wf_sweep;
  CLI::App *intro_sim, *intro_exact, *intro_sweep, *verify;

  explicit App(Invocation& target) : inv(&target) {
    app.require_subcommand(1);
    app.fallthrough();
    app.set_version_flag("--version", std::string("tddyn ") + cli::version());
    app.add_option("--seed", inv->seed, "base RNG seed (64-bit)");
    app.add_option("--threads", inv->threads, "worker threads for sweeps (0 = hardware)");

    const auto add_game = [&](CLI::App* cmd, bool with_reward = true) {
      cmd->add_option("--L", inv->game.lower, "lowest claim");
      cmd->add_option("--U", inv->game.upper, "highest claim");
      if (with_reward) cmd->add_option("--R", inv->game.reward, "reward parameter");
    };
    const auto add_out = [&](CLI::App* cmd, bool required = true) {
      auto* o = cmd->add_option("--out", inv->out, "output CSV path");
      if (required) o->required();
    };
    const auto add_svg = [&](CLI::App* cmd) {
      cmd->add_option("--svg", inv->svg, "optional heatmap SVG path");
    };

    auto* game = app.add_subcommand("game", "payoff structure and classical analysis");
    game->require_subcommand(1);
    game_matrix = game->add_subcommand("matrix", "emit the payoff matrix as CSV");
    add_game(game_matrix);
    add_out(game_matrix);
    game_classify = game->add_subcommand("classify", "classify every restricted claim pair");
    add_game(game_classify);
    game_eliminate = game->add_subcommand("eliminate", "iterated elimination of dominated claims");
    add_game(game_eliminate);

    auto* rm_cmd = app.add_subcommand("rm", "selection-mutation flow on the claim simplex");
    rm_cmd->require_subcommand(1);
    rm_run = rm_cmd->add_subcommand("run", "integrate one trajectory from the uniform state");
    add_game(rm_run);
    rm_run->add_option("--q", inv->q, "mutation strength in [0, (m-1)/m]");
    rm_run->add_option("--dt", inv->dt, "integration step");
    rm_run->add_option("--tmax", inv->t_max, "maximum integration time");
    rm_run->add_option("--conv-tol", inv->conv_tol, "equilibrium tolerance on max|dx|");
    rm_run->add_option("--record-every", inv->record_dt, "snapshot spacing in time units");
    add_out(rm_run);
    rm_sweep = rm_cmd->add_subcommand("sweep", "terminal highest claim over a (R, q) grid");
    add_game(rm_sweep, false);
    rm_sweep->add_option("--R-list", inv->reward_list, "reward values")->delimiter(',')->required();
    rm_sweep->add_option("--q-list", inv->q_list, "mutation strengths")->delimiter(',')->required();
    rm_sweep->add_option("--dt", inv->dt, "integration step");
    rm_sweep->add_option("--tmax", inv->t_max, "maximum integration time");
    rm_sweep->add_option("--conv-tol", inv->conv_tol, "equilibrium tolerance on max|dx|");
    add_out(rm_sweep);
    add_svg(rm_sweep);

    auto* wf_cmd = app.add_subcommand("wf", "finite-population resampling dynamics");
    wf_cmd->require_subcommand(1);
    wf_run = wf_cmd->add_subcommand("run", "one seeded run, mean claim per generation");
    add_game(wf_run);
    wf_run->add_option("--N", inv->population, "population size");
    wf_run->add_option("--mu", inv->mu, "per-offspring mutation probability");
    wf_run->add_option("--delta", inv->delta, "maximal mutation size");
    wf_run->add_option("--rho", inv->rho, "selection intensity");
    wf_run->add_option("--t", inv->generations, "generations");
    wf_run->add_option("--init", inv->init, "initial population: uniform or mono:<claim>");
    add_out(wf_run);
    wf_sweep = wf_cmd->add_subcommand("sweep", "replicated terminal mean over a (rho, mu, delta) grid");
    add_game(wf_sweep);
    wf_sweep->add_option("--N", inv->population, "population size");
    wf_sweep->add_option("--mu-list", inv->mu_list, "mutation probabilities")->delimiter(',')->required();
    wf_sweep->add_option("--delta-list", inv->delta_list, "maximal mutation sizes")->delimiter(',')->required();
    wf_sweep->add_option("--rho-list", inv->rho_list, "selection intensities")->delimiter(',')->required();
    wf_sweep->add_option("--reps", inv->replicates, "replicates per grid point");
    wf_sweep->add_option("--t", inv->generations, "generations");
    wf_sweep->add_option("--init", inv->init, "initial population: uniform or mono:<claim>");
    add_out(wf_sweep);
    add_svg(wf_sweep);

    auto* intro_cmd = app.add_subcommand("intro", "two-player introspection dynamics");
    intro_cmd->require_subcommand(1);
    intro_sim = intro_cmd->add_subcommand("sim", "seeded stochastic simulation");
    add_game(intro_sim);
    intro_sim->add_option("--beta", inv->beta, "selection intensity");
    intro_sim->add_option("--steps", inv->steps, "update steps");
    intro_sim->add_option("--burn-in", inv->burn_in, "discarded prefix steps");
    intro_sim->add_option("--record-every", inv->record_steps, "trace stride in steps");
    intro_sim->add_option("--init", inv->init, "initial state: uniform or fixed:<a>,<b>");
    add_out(intro_sim);
    intro_exact = intro_cmd->add_subcommand("exact", "exact stationary distribution of the joint chain");
    add_game(intro_exact);
    intro_exact->add_option("--beta", inv->beta, "selection intensity");
    add_out(intro_exact);
    intro_sweep = intro_cmd->add_subcommand("sweep", "exact average claim over a (R, beta) grid");
    add_game(intro_sweep, false);
    intro_sweep->add_option("--R-list", inv->reward_list, "reward values")->delimiter(',')->required();
    intro_sweep->add_option("--beta-list", inv->beta_list, "selection intensities")->delimiter(',')->required();
    add_out(intro_sweep);
    add_svg(intro_sweep);

    verify = app.add_subcommand("verify", "run the brute-force oracle battery");
  }

  Command parsed_command() const {
    if (game_matrix->parsed()) return Command::GameMatrix;
    if (game_classify->parsed()) return Command::GameClassify;
    if (game_eliminate->parsed()) return Command::GameEliminate;
    if (rm_run->parsed()) return Command::RmRun;
    if (rm_sweep->parsed()) return Command::RmSweep;
    if (wf_run->parsed()) return Command::WfRun;
    if (wf_sweep->parsed()) return Command::WfSweep;
    if (intro_sim->parsed()) return Command::IntroSim;
    if (intro_exact->parsed()) return Command::IntroExact;
    if (intro_sweep->parsed()) return Command::IntroSweep;
    if (verify->parsed()) return Command::Verify;
    return Command::None;
  }
};

}  // namespace detail_cli

/// Validates every numeric range against the module invariants; throws
/// UsageError (exit code 2) with the offending flag in the message.
inline void validate_invocation(const Invocation& inv) {
  try {
    switch (inv.command) {
      case Command::GameMatrix:
      case Command::GameClassify:
      case Command::GameEliminate:
        inv.game.validate();
        break;
      case Command::RmRun:
        rm_config(inv).validate();
        break;
      case Command::RmSweep: {
        for (int r : inv.reward_list)
          for (double q : inv.q_list) {
            Invocation probe = inv;
            probe.game.reward = r;
            probe.q = q;
            rm_config(probe).validate();
          }
        break;
      }
      case Command::WfRun:
        wf_config(inv).validate();
        break;
      case Command::WfSweep: {
        if (inv.replicates < 1) throw std::invalid_argument("reps: replicates must be >= 1");
        for (double rho : inv.rho_list)
          for (double mu : inv.mu_list)
            for (int delta : inv.delta_list) {
              Invocation probe = inv;
              probe.rho = rho;
              probe.mu = mu;
              probe.delta = delta;
              wf_config(probe).validate();
            }
        break;
      }
      case Command::IntroSim:
        intro_config(inv).validate();
        break;
      case Command::IntroExact: {
        inv.game.validate();
        if (!(inv.beta >= 0.0) || !std::isfinite(inv.beta))
          throw std::invalid_argument("beta: selection intensity must be finite and >= 0");
        break;
      }
      case Command::IntroSweep: {
        for (int r : inv.reward_list) {
          GameParams p = inv.game;
          p.reward = r;
          p.validate();
        }
        for (double beta : inv.beta_list)
          if (!(beta >= 0.0) || !std::isfinite(beta))
            throw std::invalid_argument("beta-list: selection intensities must be finite and >= 0");
        break;
      }
      default:
        break;
    }
  } catch (const std::invalid_argument& e) {
    throw UsageError(std::string("--") + e.what());
  }
}

/// Parses a full command line (no program name) into a validated Invocation.
inline Invocation parse_cli(const std::string& command_line) {
  Invocation inv;
  detail_cli::App holder(inv);
  holder.app.parse(command_line, false);
  inv.command = holder.parsed_command();
  validate_invocation(inv);
  return inv;
}

inline RunMetadata make_metadata(const Invocation& inv) {
  RunMetadata meta;
  meta.tool_version = version();
  meta.timestamp = iso8601_utc_now();
  meta.base_seed = inv.seed;
  meta.rng_name = rng_algorithm_name();
  meta.config_line = canonical_config(inv);
  if (inv.command == Command::RmRun || inv.command == Command::RmSweep)
    meta.payoff_shift = rm::payoff_shift(inv.game);
  return meta;
}

namespace detail_cli {

inline int run_game_matrix(const Invocation& inv) {
  const PayoffMatrix pm = build_payoff_matrix(inv.game);
  SweepResult table;
  table.meta = make_metadata(inv);
  table.columns.push_back("own_claim");
  for (int j = 0; j < pm.size; ++j) table.columns.push_back(std::to_string(pm.claim_at(j)));
  for (int i = 0; i < pm.size; ++i) {
    std::vector<Cell> row;
    row.reserve(pm.size + 1);
    row.push_back(cell(pm.claim_at(i)));
    for (int j = 0; j < pm.size; ++j) row.push_back(cell(pm.at(i, j)));
    table.push_row(std::move(row));
  }
  write_csv(table, inv.out);
  std::cout << "wrote " << pm.size << "x" << pm.size << " payoff matrix to " << inv.out << "\n";
  return 0;
}

inline int run_game_classify(const Invocation& inv) {
  for (Claim n = inv.game.lower; n < inv.game.upper; ++n)
    for (int s = 1; n + s <= inv.game.upper; ++s) {
      const SubgameClass cls = classify_subgame(n, s, inv.game);
      std::cout << "n=" << n << " s=" << s << " " << to_string(cls.kind);
      if (cls.kind == SubgameKind::Coordination)
        std::cout << " payoff_dominant=" << (cls.high_equilibrium_payoff_dominant ? 1 : 0)
                  << " risk_dominant=" << (cls.high_equilibrium_risk_dominant ? 1 : 0);
      std::cout << "\n";
    }
  return 0;
}

inline int run_game_eliminate(const Invocation& inv) {
  const auto survivors = iterated_elimination(inv.game);
  std::cout << "surviving claims:";
  for (Claim c : survivors) std::cout << " " << c;
  std::cout << "\n";
  return 0;
}

inline int run_rm_run(const Invocation& inv) {
  const rm::Config cfg = rm_config(inv);
  const rm::Trajectory traj = rm::integrate(cfg, rm::uniform_simplex(cfg.game));
  SweepResult table;
  table.meta = make_metadata(inv);
  table.columns.push_back("t");
  for (int i = 0; i < cfg.game.num_claims(); ++i)
    table.columns.push_back("claim_" + std::to_string(cfg.game.lower + i));
  for (std::size_t k = 0; k < traj.times.size(); ++k) {
    std::vector<Cell> row;
    row.reserve(1 + traj.snapshots[k].freqs.size());
    row.push_back(cell(traj.times[k]));
    for (double f : traj.snapshots[k].freqs) row.push_back(cell(f));
    table.push_row(std::move(row));
  }
  write_csv(table, inv.out);
  std::cout << "highest_claim " << rm::highest_frequency_claim(traj.terminal) << "\n"
            << "converged " << (traj.converged ? 1 : 0) << " at t " << fmt_double(traj.terminal_time)
            << "\n";
  return 0;
}

inline int run_rm_sweep(const Invocation& inv) {
  const rm::Config base = rm_config(inv);
  const SweepResult result =
      rm::sweep(inv.reward_list, inv.q_list, base, inv.threads, make_metadata(inv));
  write_csv(result, inv.out);
  if (!inv.svg.empty()) {
    HeatmapSpec spec{"q", "R", "highest_claim", static_cast<double>(inv.game.lower),
                     static_cast<double>(inv.game.upper), "terminal highest claim"};
    write_heatmap_svg(result, spec, inv.svg);
  }
  std::cout << "wrote " << result.rows.size() << " rows to " << inv.out << "\n";
  if (result.any_failed()) {
    std::cerr << "some grid points failed; see the error column\n";
    return 1;
  }
  return 0;
}

inline int run_wf_run(const Invocation& inv) {
  const wf::Config cfg = wf_config(inv);
  const wf::Result res = wf::run(cfg);
  SweepResult table;
  table.meta = make_metadata(inv);
  table.columns = {"generation", "mean_claim"};
  for (std::size_t g = 0; g < res.mean_claim_series.size(); ++g)
    table.push_row({cell(static_cast<std::int64_t>(g)), cell(res.mean_claim_series[g])});
  write_csv(table, inv.out);
  std::cout << "terminal_mean_claim " << fmt_double(res.terminal_mean_claim) << "\n";
  return 0;
}

inline int run_wf_sweep(const Invocation& inv) {
  const wf::Config base = wf_config(inv);
  const SweepResult result = wf::sweep(inv.rho_list, inv.mu_list, inv.delta_list, inv.replicates,
                                       base, inv.seed, inv.threads, make_metadata(inv));
  write_csv(result, inv.out);
  if (!inv.svg.empty()) {
    // one heatmap per selection intensity; cells are replicate means
    for (double rho : inv.rho_list) {
      SweepResult panel;
      panel.meta = result.meta;
      panel.columns = {"mu", "delta", "mean_claim"};
      for (double mu : inv.mu_list)
        for (int delta : inv.delta_list) {
          double sum = 0.0;
          int count = 0;
          for (std::size_t r = 0; r < result.rows.size(); ++r) {
            const auto& row = result.rows[r];
            if (!result.row_errors[r].empty()) continue;
            if (std::get<double>(row[0]) == rho && std::get<double>(row[1]) == mu &&
                std::get<std::int64_t>(row[2]) == delta) {
              sum += std::get<double>(row[5]);
              ++count;
            }
          }
          if (count)
            panel.push_row({cell(mu), cell(delta), cell(sum / count)});
        }
      HeatmapSpec spec{"mu", "delta", "mean_claim", static_cast<double>(inv.game.lower),
                       static_cast<double>(inv.game.upper), "terminal mean claim, rho=" + fmt_double(rho)};
      std::string path = inv.svg;
      const auto dot = path.rfind(".svg");
      const std::string suffix = "_rho" + fmt_double(rho);
      if (dot != std::string::npos) path.insert(dot, suffix);
      else path += suffix + ".svg";
      write_heatmap_svg(panel, spec, path);
    }
  }
  std::cout << "wrote " << result.rows.size() << " rows to " << inv.out << "\n";
  if (result.any_failed()) {
    std::cerr << "some grid points failed; see the error column\n";
    return 1;
  }
  return 0;
}

inline int run_intro_sim(const Invocation& inv) {
  Invocation adjusted = inv;
  if (adjusted.record_steps == 0) adjusted.record_steps = 1;  // the trace is the product here
  const intro::Config cfg = intro_config(adjusted);
  const intro::RunResult res = intro::run(cfg);
  SweepResult table;
  table.meta = make_metadata(inv);
  table.columns = {"step", "claim_a", "claim_b"};
  for (const auto& e : res.trace)
    table.push_row({cell(e.step), cell(e.claim_a), cell(e.claim_b)});
  write_csv(table, inv.out);
  std::cout << "average_claim " << fmt_double(res.average_claim) << "\n";
  return 0;
}

inline int run_intro_exact(const Invocation& inv) {
  const auto kernel = intro::build_transition(inv.game, inv.beta);
  const auto dist = intro::stationary_distribution(kernel);
  SweepResult table;
  table.meta = make_metadata(inv);
  table.columns = {"claim_a", "claim_b", "probability"};
  for (int ia = 0; ia < dist.m; ++ia)
    for (int ib = 0; ib < dist.m; ++ib)
      table.push_row({cell(dist.lower + ia), cell(dist.lower + ib),
                      cell(dist.probs[static_cast<std::size_t>(ia) * dist.m + ib])});
  write_csv(table, inv.out);
  std::cout << "average_claim " << fmt_double(intro::average_claim(dist)) << "\n"
            << "residual " << fmt_double(dist.residual) << "\n";
  return 0;
}

inline int run_intro_sweep(const Invocation& inv) {
  const SweepResult result =
      intro::sweep(inv.reward_list, inv.beta_list, inv.game, inv.threads, make_metadata(inv));
  write_csv(result, inv.out);
  if (!inv.svg.empty()) {
    HeatmapSpec spec{"beta", "R", "average_claim", static_cast<double>(inv.game.lower),
                     static_cast<double>(inv.game.upper), "stationary average claim"};
    write_heatmap_svg(result, spec, inv.svg);
  }
  std::cout << "wrote " << result.rows.size() << " rows to " << inv.out << "\n";
  if (result.any_failed()) {
    std::cerr << "some grid points failed; see the error column\n";
    return 1;
  }
  return 0;
}

inline int run_verify() {
  const auto reports = oracle::run_battery();
  bool all_pass = true;
  for (const auto& r : reports) {
    std::cout << (r.pass ? "[ ok ]" : "[FAIL]") << " " << r.oracle << " (" << r.instance
              << "): max deviation " << fmt_double(r.max_abs_deviation) << ", tolerance "
              << fmt_double(r.tolerance) << "\n";
    all_pass = all_pass && r.pass;
  }
  std::cout << (all_pass ? "all oracle checks passed" : "oracle checks FAILED") << "\n";
  return all_pass ? 0 : 1;
}

}  // namespace detail_cli

inline int execute(const Invocation& inv) {
  switch (inv.command) {
    case Command::GameMatrix: return detail_cli::run_game_matrix(inv);
    case Command::GameClassify: return detail_cli::run_game_classify(inv);
    case Command::GameEliminate: return detail_cli::run_game_eliminate(inv);
    case Command::RmRun: return detail_cli::run_rm_run(inv);
    case Command::RmSweep: return detail_cli::run_rm_sweep(inv);
    case Command::WfRun: return detail_cli::run_wf_run(inv);
    case Command::WfSweep: return detail_cli::run_wf_sweep(inv);
    case Command::IntroSim: return detail_cli::run_intro_sim(inv);
    case Command::IntroExact: return detail_cli::run_intro_exact(inv);
    case Command::IntroSweep: return detail_cli::run_intro_sweep(inv);
    case Command::Verify: return detail_cli::run_verify();
    default: return 2;
  }
}

inline int main(int argc, char** argv) {
  Invocation inv;
  detail_cli::App holder(inv);
  try {
    holder.app.parse(argc, argv);
    inv.command = holder.parsed_command();
    validate_invocation(inv);
  } catch (const CLI::CallForHelp& e) {
    return holder.app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return holder.app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return holder.app.exit(e);
  } catch (const CLI::ParseError& e) {
    holder.app.exit(e);
    return 2;
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  }
  try {
    return execute(inv);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace tddyn::cli
