#pragma once

#include <fstream>
#include <map>
#include <ostream>
#include <sstream>
#include <string>

#include "tddyn/sweep.hpp"

// CSV emission with a comment-prefixed metadata header, plus the matching
// header parser used to round-trip a file back to its generating config.

namespace tddyn {

inline std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += "\"\"";
    else out += ch;
  }
  out += "\"";
  return out;
}

inline void write_metadata_header(std::ostream& os, const RunMetadata& meta) {
  os << "# tool: tddyn " << meta.tool_version << "\n";
  os << "# timestamp: " << meta.timestamp << "\n";
  os << "# seed: " << meta.base_seed << "\n";
  os << "# rng: " << meta.rng_name << "\n";
  os << "# payoff_shift: " << meta.payoff_shift << "\n";
  os << "# config: " << meta.config_line << "\n";
}

inline void write_csv(const SweepResult& result, std::ostream& os) {
  write_metadata_header(os, result.meta);
  const bool with_errors = result.any_failed();
  for (std::size_t c = 0; c < result.columns.size(); ++c) {
    if (c) os << ',';
    os << csv_escape(result.columns[c]);
  }
  if (with_errors) os << ",error";
  os << '\n';
  for (std::size_t r = 0; r < result.rows.size(); ++r) {
    const auto& row = result.rows[r];
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c) os << ',';
      os << csv_escape(format_cell(row[c]));
    }
    if (with_errors) os << ',' << csv_escape(r < result.row_errors.size() ? result.row_errors[r] : "");
    os << '\n';
  }
}

inline void write_csv(const SweepResult& result, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  write_csv(result, out);
  out.flush();
  if (!out) throw std::runtime_error("write failed: " + path);
}

/// Parses the "# key: value" header lines of a CSV produced by write_csv.
inline std::map<std::string, std::string> read_csv_metadata(std::istream& is) {
  std::map<std::string, std::string> kv;
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty() || line[0] != '#') break;
    const auto colon = line.find(": ");
    if (colon == std::string::npos || colon < 2) continue;
    kv[line.substr(2, colon - 2)] = line.substr(colon + 2);
  }
  return kv;
}

inline std::map<std::string, std::string> read_csv_metadata(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open for reading: " + path);
  return read_csv_metadata(in);
}

}  // namespace tddyn
