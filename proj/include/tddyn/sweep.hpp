#pragma once

#include <atomic>
#include <cinttypes>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <functional>
#include <limits>
#include <stdexcept>
#include <string>
#include <thread>
#include <variant>
#include <vector>

// Tabular results for parameter sweeps, run metadata, and the deterministic
// parallel grid runner shared by the dynamics modules.

namespace tddyn {

using Cell = std::variant<std::int64_t, std::uint64_t, double, std::string>;

inline Cell cell(std::int64_t v) { return Cell{v}; }
inline Cell cell(std::uint64_t v) { return Cell{v}; }
inline Cell cell(double v) { return Cell{v}; }
inline Cell cell(int v) { return Cell{static_cast<std::int64_t>(v)}; }
inline Cell cell(bool v) { return Cell{static_cast<std::int64_t>(v ? 1 : 0)}; }
inline Cell cell(std::string v) { return Cell{std::move(v)}; }

inline double cell_as_double(const Cell& c) {
  if (std::holds_alternative<double>(c)) return std::get<double>(c);
  if (std::holds_alternative<std::int64_t>(c)) return static_cast<double>(std::get<std::int64_t>(c));
  if (std::holds_alternative<std::uint64_t>(c)) return static_cast<double>(std::get<std::uint64_t>(c));
  throw std::runtime_error("cell is not numeric");
}

/// Reals carry 17 significant digits so a reader recovers the exact double.
inline std::string format_cell(const Cell& c) {
  char buf[64];
  if (std::holds_alternative<double>(c)) {
    std::snprintf(buf, sizeof buf, "%.17g", std::get<double>(c));
    return buf;
  }
  if (std::holds_alternative<std::int64_t>(c)) {
    std::snprintf(buf, sizeof buf, "%" PRId64, std::get<std::int64_t>(c));
    return buf;
  }
  if (std::holds_alternative<std::uint64_t>(c)) {
    std::snprintf(buf, sizeof buf, "%" PRIu64, std::get<std::uint64_t>(c));
    return buf;
  }
  return std::get<std::string>(c);
}

/// Provenance header embedded in every output file. The timestamp honours
/// SOURCE_DATE_EPOCH so archived outputs can be reproduced byte for byte.
struct RunMetadata {
  std::string tool_version = "unknown";
  std::string timestamp;  // ISO-8601 UTC
  std::uint64_t base_seed = 0;
  std::string rng_name = "mt19937_64+splitmix64";
  std::int64_t payoff_shift = 0;
  std::string config_line;  // canonical CLI echo, reparsable
};

inline std::string iso8601_utc_now() {
  std::time_t t = 0;
  if (const char* sde = std::getenv("SOURCE_DATE_EPOCH"))
    t = static_cast<std::time_t>(std::strtoll(sde, nullptr, 10));
  else
    t = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[40];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

/// Rectangular result table: one row per grid point (or time step), shared
/// column set, rows kept in deterministic grid order regardless of how the
/// computation was scheduled.
struct SweepResult {
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;
  std::vector<std::string> row_errors;  // parallel to rows, empty = success
  RunMetadata meta;

  bool any_failed() const {
    for (const auto& e : row_errors)
      if (!e.empty()) return true;
    return false;
  }

  void push_row(std::vector<Cell> cells) {
    rows.push_back(std::move(cells));
    row_errors.emplace_back();
  }
};

/// Runs `metrics_of` for every grid index on a pool of `threads` workers and
/// assembles rows as params_of(i) ++ metrics_of(i), merged in index order.
/// A throwing worker marks only its own row as failed (metric cells become
/// NaN, the error text is recorded); all other rows are unaffected.
inline SweepResult run_parallel(std::vector<std::string> columns,
                                std::size_t n_rows,
                                const std::function<std::vector<Cell>(std::size_t)>& params_of,
                                const std::function<std::vector<Cell>(std::size_t)>& metrics_of,
                                int threads,
                                RunMetadata meta) {
  SweepResult result;
  result.columns = std::move(columns);
  result.meta = std::move(meta);
  result.rows.resize(n_rows);
  result.row_errors.resize(n_rows);

  std::vector<std::vector<Cell>> metric_cells(n_rows);
  std::atomic<std::size_t> next{0};
  const unsigned hw = std::thread::hardware_concurrency();
  std::size_t pool = threads > 0 ? static_cast<std::size_t>(threads) : (hw ? hw : 1);
  if (pool > n_rows && n_rows > 0) pool = n_rows;

  auto work = [&]() {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= n_rows) return;
      try {
        metric_cells[i] = metrics_of(i);
      } catch (const std::exception& e) {
        result.row_errors[i] = e.what();
      } catch (...) {
        result.row_errors[i] = "unknown error";
      }
    }
  };
  if (pool <= 1) {
    work();
  } else {
    std::vector<std::thread> ts;
    ts.reserve(pool);
    for (std::size_t k = 0; k < pool; ++k) ts.emplace_back(work);
    for (auto& t : ts) t.join();
  }

  const std::size_t n_params = n_rows ? params_of(0).size() : 0;
  const std::size_t n_metrics = result.columns.size() - n_params;
  for (std::size_t i = 0; i < n_rows; ++i) {
    std::vector<Cell> row = params_of(i);
    if (result.row_errors[i].empty()) {
      for (auto& c : metric_cells[i]) row.push_back(std::move(c));
    } else {
      for (std::size_t k = 0; k < n_metrics; ++k)
        row.push_back(cell(std::numeric_limits<double>::quiet_NaN()));
    }
    result.rows[i] = std::move(row);
  }
  return result;
}

}  // namespace tddyn
