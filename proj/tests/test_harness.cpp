#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "tddyn/cli.hpp"
#include "tddyn/csv.hpp"
#include "tddyn/rng.hpp"
#include "tddyn/svg.hpp"
#include "tddyn/sweep.hpp"

using namespace tddyn;

namespace {

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::filesystem::path tmp_file(const std::string& name) {
  return std::filesystem::temp_directory_path() / name;
}

}  // namespace

TEST_CASE("seed derivation") {
  SECTION("depends on every component") {
    CHECK(derive_seed(1, 0, 0) != derive_seed(2, 0, 0));
    CHECK(derive_seed(1, 0, 0) != derive_seed(1, 1, 0));
    CHECK(derive_seed(1, 0, 0) != derive_seed(1, 0, 1));
  }
  SECTION("is a pure function") {
    CHECK(derive_seed(42, 3, 7) == derive_seed(42, 3, 7));
  }
}

TEST_CASE("cell formatting") {
  CHECK(format_cell(cell(0.1)) == "0.10000000000000001");
  CHECK(format_cell(cell(static_cast<std::int64_t>(-12))) == "-12");
  CHECK(format_cell(cell(std::uint64_t{18446744073709551615ull})) == "18446744073709551615");
  CHECK(format_cell(cell(std::string("plain"))) == "plain");
  CHECK(csv_escape("a,b") == "\"a,b\"");
  CHECK(csv_escape("say \"hi\"") == "\"say \"\"hi\"\"\"");
}

TEST_CASE("csv round trip of the metadata header") {
  SweepResult table;
  table.meta.tool_version = "9.9.9";
  table.meta.timestamp = "2024-01-01T00:00:00Z";
  table.meta.base_seed = 1234567890123456789ull;
  table.meta.payoff_shift = 38;
  table.meta.config_line = "rm sweep --L 2 --U 100 --R-list 2,5 --q-list 0,0.7";
  table.columns = {"a", "b"};
  table.push_row({cell(1), cell(2.5)});

  std::ostringstream out;
  write_csv(table, out);
  std::istringstream in(out.str());
  const auto kv = read_csv_metadata(in);
  CHECK(kv.at("tool") == "tddyn 9.9.9");
  CHECK(kv.at("timestamp") == "2024-01-01T00:00:00Z");
  CHECK(kv.at("seed") == "1234567890123456789");
  CHECK(kv.at("rng") == "mt19937_64+splitmix64");
  CHECK(kv.at("payoff_shift") == "38");
  CHECK(kv.at("config") == table.meta.config_line);
}

TEST_CASE("write_csv reports unwritable paths") {
  SweepResult table;
  table.columns = {"x"};
  try {
    write_csv(table, "/nonexistent-dir/out.csv");
    FAIL("expected an exception");
  } catch (const std::runtime_error& e) {
    CHECK(std::string(e.what()).find("/nonexistent-dir/out.csv") != std::string::npos);
  }
}

TEST_CASE("parallel grid runner") {
  RunMetadata meta;
  const auto params_of = [](std::size_t i) {
    return std::vector<Cell>{cell(static_cast<std::int64_t>(i))};
  };

  SECTION("single point equals a direct call") {
    const auto r = run_parallel({"i", "sq"}, 1, params_of,
                                [](std::size_t i) { return std::vector<Cell>{cell(static_cast<std::int64_t>(i * i))}; },
                                4, meta);
    REQUIRE(r.rows.size() == 1);
    CHECK(std::get<std::int64_t>(r.rows[0][1]) == 0);
  }
  SECTION("results are byte-identical across concurrency levels") {
    const auto metrics = [](std::size_t i) {
      double acc = 0.0;
      for (int k = 1; k < 2000; ++k) acc += std::sin(static_cast<double>(i + 1) / k);
      return std::vector<Cell>{cell(acc)};
    };
    const auto serial = run_parallel({"i", "v"}, 16, params_of, metrics, 1, meta);
    const auto parallel = run_parallel({"i", "v"}, 16, params_of, metrics, 8, meta);
    std::ostringstream a, b;
    write_csv(serial, a);
    write_csv(parallel, b);
    REQUIRE(a.str() == b.str());
  }
  SECTION("a failing row leaves the others intact") {
    const auto r = run_parallel({"i", "v"}, 4, params_of,
                                [](std::size_t i) {
                                  if (i == 2) throw std::runtime_error("worker blew up");
                                  return std::vector<Cell>{cell(static_cast<std::int64_t>(10 * i))};
                                },
                                3, meta);
    CHECK(r.any_failed());
    CHECK(r.row_errors[2] == "worker blew up");
    CHECK(r.row_errors[1].empty());
    CHECK(std::get<std::int64_t>(r.rows[3][1]) == 30);
    CHECK(std::isnan(std::get<double>(r.rows[2][1])));
    std::ostringstream out;
    write_csv(r, out);
    CHECK(out.str().find("i,v,error") != std::string::npos);
    CHECK(out.str().find("worker blew up") != std::string::npos);
  }
}

TEST_CASE("svg heatmaps") {
  SweepResult grid;
  grid.columns = {"x", "y", "z"};
  grid.push_row({cell(0.0), cell(0.0), cell(2.0)});
  grid.push_row({cell(1.0), cell(0.0), cell(6.0)});
  grid.push_row({cell(0.0), cell(1.0), cell(8.0)});
  grid.push_row({cell(1.0), cell(1.0), cell(10.0)});
  const HeatmapSpec spec{"x", "y", "z", 2.0, 10.0, "demo"};

  SECTION("renders one rect per cell plus axes and a color bar") {
    const std::string svg = render_heatmap_svg(grid, spec);
    std::size_t cells = 0, pos = 0;
    while ((pos = svg.find("class=\"cell\"", pos)) != std::string::npos) {
      ++cells;
      pos += 1;
    }
    CHECK(cells == 4);
    CHECK(svg.find("class=\"colorbar\"") != std::string::npos);
    CHECK(svg.find(">x</text>") != std::string::npos);
    CHECK(svg.find(">y</text>") != std::string::npos);
  }
  SECTION("ramp endpoints map to the documented colors") {
    const std::string svg = render_heatmap_svg(grid, spec);
    CHECK(svg.find("#0d0887") != std::string::npos);  // z = z_min
    CHECK(svg.find("#f0f921") != std::string::npos);  // z = z_max
  }
  SECTION("constant z renders every cell in the same color") {
    SweepResult flat = grid;
    for (auto& row : flat.rows) row[2] = cell(5.0);
    const std::string svg = render_heatmap_svg(flat, spec);
    const auto first = svg.find("fill=\"#");
    const std::string color = svg.substr(first + 6, 7);
    std::size_t cells = 0, pos = 0;
    while ((pos = svg.find("class=\"cell\"", pos)) != std::string::npos) {
      const auto f = svg.find("fill=\"", pos);
      REQUIRE(svg.substr(f + 6, 7) == color);
      ++cells;
      pos += 1;
    }
    CHECK(cells == 4);
  }
  SECTION("incomplete grids are rejected with the missing cells named") {
    SweepResult holes = grid;
    holes.rows.pop_back();
    holes.row_errors.pop_back();
    try {
      render_heatmap_svg(holes, spec);
      FAIL("expected an exception");
    } catch (const std::runtime_error& e) {
      CHECK(std::string(e.what()).find("(1, 1)") != std::string::npos);
    }
  }
}

TEST_CASE("cli parsing") {
  SECTION("happy path fills the invocation") {
    const auto inv =
        cli::parse_cli("rm sweep --L 2 --U 100 --R-list 2,5,40 --q-list 0,0.5 --out x.csv");
    CHECK(inv.command == cli::Command::RmSweep);
    CHECK(inv.reward_list == std::vector<int>{2, 5, 40});
    CHECK(inv.q_list == std::vector<double>{0.0, 0.5});
    CHECK(inv.out == "x.csv");
  }
  SECTION("mutation strength above the admissible bound names the flag") {
    try {
      cli::parse_cli("rm sweep --L 2 --U 100 --R-list 2 --q-list 1.5 --out x.csv");
      FAIL("expected UsageError");
    } catch (const cli::UsageError& e) {
      CHECK(std::string(e.what()).find("q") != std::string::npos);
      CHECK(std::string(e.what()).find("0.98") != std::string::npos);  // (m-1)/m for m=99
    }
  }
  SECTION("degenerate claim interval names the flag") {
    try {
      cli::parse_cli("game eliminate --L 5 --U 5 --R 2");
      FAIL("expected UsageError");
    } catch (const cli::UsageError& e) {
      CHECK(std::string(e.what()).find("L") != std::string::npos);
    }
  }
  SECTION("unknown flags are rejected by the parser") {
    CHECK_THROWS_AS(cli::parse_cli("game eliminate --L 2 --U 100 --R 2 --frobnicate"),
                    CLI::ParseError);
  }
  SECTION("burn-in must be smaller than steps") {
    CHECK_THROWS_AS(
        cli::parse_cli("intro sim --L 2 --U 10 --R 2 --steps 10 --burn-in 10 --out t.csv"),
        cli::UsageError);
  }
  SECTION("init rules parse and validate") {
    const auto inv = cli::parse_cli("wf run --L 2 --U 100 --R 2 --init mono:42 --out w.csv");
    CHECK(std::get<wf::MonomorphicInit>(cli::wf_config(inv).init).claim == 42);
    CHECK_THROWS_AS(cli::parse_cli("wf run --L 2 --U 100 --R 2 --init mono:1 --out w.csv"),
                    cli::UsageError);
    const auto fixed = cli::parse_cli("intro sim --L 2 --U 10 --R 2 --init fixed:3,5 --out t.csv");
    CHECK(std::get<intro::FixedInit>(cli::intro_config(fixed).init).state ==
          intro::JointState{3, 5});
  }
}

TEST_CASE("config echo round trip") {
  const std::vector<std::string> lines = {
      "game matrix --L 2 --U 100 --R 2 --out m.csv",
      "rm run --L 2 --U 10 --R 2 --q 0.7 --dt 0.005 --out t.csv",
      "rm sweep --L 2 --U 20 --R-list 2,5 --q-list 0,0.7 --threads 8 --out s.csv --svg s.svg",
      "wf run --L 2 --U 100 --R 2 --N 50 --mu 0.25 --delta 3 --rho 0.1 --t 77 --seed 99 --out w.csv",
      "wf sweep --L 2 --U 100 --R 2 --mu-list 0.01,0.9 --delta-list 1,30 --rho-list 1 --reps 5 "
      "--t 100 --seed 4 --out ws.csv",
      "intro sim --L 2 --U 20 --R 2 --beta 0.1 --steps 5000 --burn-in 100 --seed 5 --out i.csv",
      "intro exact --L 2 --U 20 --R 3 --beta 2 --out e.csv",
      "intro sweep --L 2 --U 20 --R-list 2,40 --beta-list 0,0.1,1 --out is.csv",
  };
  for (const auto& line : lines) {
    INFO(line);
    const auto inv = cli::parse_cli(line);
    const std::string echo = cli::canonical_config(inv);
    const auto reparsed = cli::parse_cli(echo);
    REQUIRE(cli::scientific_config(reparsed) == cli::scientific_config(inv));
    REQUIRE(cli::canonical_config(reparsed) == echo);
  }
}

TEST_CASE("cli execution writes reparsable files") {
  const auto out = tmp_file("tddyn_harness_rm.csv");
  const std::string line =
      "rm sweep --L 2 --U 10 --R-list 2 --q-list 0,0.5 --tmax 500 --out " + out.string();
  const auto inv = cli::parse_cli(line);
  REQUIRE(cli::execute(inv) == 0);

  const auto kv = read_csv_metadata(out.string());
  const auto reparsed = cli::parse_cli(kv.at("config"));
  CHECK(cli::scientific_config(reparsed) == cli::scientific_config(inv));

  const std::string body = slurp(out);
  CHECK(body.find("R,q,highest_claim,converged") != std::string::npos);
  std::filesystem::remove(out);
}

TEST_CASE("cli entry point exit codes") {
  const auto run_main = [](std::vector<std::string> args) {
    std::vector<char*> argv;
    std::string prog = "tddyn";
    argv.push_back(prog.data());
    for (auto& a : args) argv.push_back(a.data());
    // silence help/error output
    std::ostringstream sink;
    auto* old_out = std::cout.rdbuf(sink.rdbuf());
    auto* old_err = std::cerr.rdbuf(sink.rdbuf());
    const int rc = cli::main(static_cast<int>(argv.size()), argv.data());
    std::cout.rdbuf(old_out);
    std::cerr.rdbuf(old_err);
    return rc;
  };
  CHECK(run_main({"--help"}) == 0);
  CHECK(run_main({"game", "--help"}) == 0);
  CHECK(run_main({"game", "eliminate", "--L", "2", "--U", "6", "--R", "2"}) == 0);
  CHECK(run_main({"game", "eliminate", "--L", "2", "--U", "6", "--R", "2", "--bogus"}) == 2);
  CHECK(run_main({"game", "eliminate", "--L", "6", "--U", "6", "--R", "2"}) == 2);
  CHECK(run_main({"rm", "run", "--L", "2", "--U", "4", "--R", "2", "--q", "0", "--tmax", "1",
                  "--out", "/nonexistent-dir/x.csv"}) == 1);
}

TEST_CASE("source date epoch pins the timestamp") {
  setenv("SOURCE_DATE_EPOCH", "0", 1);
  CHECK(iso8601_utc_now() == "1970-01-01T00:00:00Z");
  setenv("SOURCE_DATE_EPOCH", "1700000000", 1);
  CHECK(iso8601_utc_now() == "2023-11-14T22:13:20Z");
  unsetenv("SOURCE_DATE_EPOCH");
}
