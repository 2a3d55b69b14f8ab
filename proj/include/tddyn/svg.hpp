#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "tddyn/sweep.hpp"

// Standalone SVG heatmaps for sweep tables. One rectangle per grid cell,
// linear two-color ramp (low #0d0887 at z_min, high #f0f921 at z_max),
// labeled axes and a color bar. The (x, y) pairs must form a complete
// rectangular grid.

namespace tddyn {

struct HeatmapSpec {
  std::string x_col;
  std::string y_col;
  std::string z_col;
  double z_min = 0.0;
  double z_max = 1.0;
  std::string title;
};

namespace detail_svg {

inline constexpr int kLowColor[3] = {0x0d, 0x08, 0x87};
inline constexpr int kHighColor[3] = {0xf0, 0xf9, 0x21};

inline std::string ramp_color(double t) {
  t = std::clamp(t, 0.0, 1.0);
  char buf[8];
  std::snprintf(buf, sizeof buf, "#%02x%02x%02x",
                static_cast<int>(std::lround(kLowColor[0] + t * (kHighColor[0] - kLowColor[0]))),
                static_cast<int>(std::lround(kLowColor[1] + t * (kHighColor[1] - kLowColor[1]))),
                static_cast<int>(std::lround(kLowColor[2] + t * (kHighColor[2] - kLowColor[2]))));
  return buf;
}

inline std::string num_label(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

inline std::size_t column_index(const SweepResult& r, const std::string& name) {
  for (std::size_t i = 0; i < r.columns.size(); ++i)
    if (r.columns[i] == name) return i;
  throw std::runtime_error("heatmap: no column named '" + name + "'");
}

}  // namespace detail_svg

inline std::string render_heatmap_svg(const SweepResult& result, const HeatmapSpec& spec) {
  using namespace detail_svg;
  const std::size_t xi = column_index(result, spec.x_col);
  const std::size_t yi = column_index(result, spec.y_col);
  const std::size_t zi = column_index(result, spec.z_col);

  std::set<double> xs_set, ys_set;
  std::map<std::pair<double, double>, double> z_of;
  for (const auto& row : result.rows) {
    const double x = cell_as_double(row[xi]);
    const double y = cell_as_double(row[yi]);
    xs_set.insert(x);
    ys_set.insert(y);
    z_of[{x, y}] = cell_as_double(row[zi]);
  }
  const std::vector<double> xs(xs_set.begin(), xs_set.end());
  const std::vector<double> ys(ys_set.begin(), ys_set.end());

  std::vector<std::string> missing;
  for (double x : xs)
    for (double y : ys)
      if (!z_of.count({x, y}))
        missing.push_back("(" + num_label(x) + ", " + num_label(y) + ")");
  if (!missing.empty()) {
    std::string msg = "heatmap: grid incomplete, missing cells:";
    for (const auto& cellname : missing) msg += " " + cellname;
    throw std::runtime_error(msg);
  }

  const int cell_w = std::max<int>(18, static_cast<int>(360 / xs.size()));
  const int cell_h = std::max<int>(18, static_cast<int>(300 / ys.size()));
  const int margin_left = 70, margin_bottom = 60, margin_top = 34, bar_space = 90;
  const int plot_w = cell_w * static_cast<int>(xs.size());
  const int plot_h = cell_h * static_cast<int>(ys.size());
  const int width = margin_left + plot_w + bar_space;
  const int height = margin_top + plot_h + margin_bottom;

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
      << "\" font-family=\"sans-serif\" font-size=\"11\">\n";
  svg << "<!-- color ramp: " << ramp_color(0.0) << " at z=" << num_label(spec.z_min) << " to "
      << ramp_color(1.0) << " at z=" << num_label(spec.z_max) << " -->\n";
  if (!spec.title.empty())
    svg << "<text x=\"" << margin_left << "\" y=\"18\" font-size=\"13\">" << spec.title
        << "</text>\n";

  const double z_span = spec.z_max > spec.z_min ? spec.z_max - spec.z_min : 1.0;
  for (std::size_t col = 0; col < xs.size(); ++col)
    for (std::size_t row = 0; row < ys.size(); ++row) {
      const double z = z_of[{xs[col], ys[row]}];
      const double t = (z - spec.z_min) / z_span;
      const int px = margin_left + static_cast<int>(col) * cell_w;
      const int py = margin_top + plot_h - static_cast<int>(row + 1) * cell_h;  // low y at bottom
      svg << "<rect class=\"cell\" x=\"" << px << "\" y=\"" << py << "\" width=\"" << cell_w
          << "\" height=\"" << cell_h << "\" fill=\"" << ramp_color(t) << "\"><title>"
          << spec.x_col << "=" << num_label(xs[col]) << " " << spec.y_col << "="
          << num_label(ys[row]) << " " << spec.z_col << "=" << num_label(z) << "</title></rect>\n";
    }

  for (std::size_t col = 0; col < xs.size(); ++col)
    svg << "<text x=\"" << margin_left + static_cast<int>(col) * cell_w + cell_w / 2 << "\" y=\""
        << margin_top + plot_h + 16 << "\" text-anchor=\"middle\">" << num_label(xs[col])
        << "</text>\n";
  for (std::size_t row = 0; row < ys.size(); ++row)
    svg << "<text x=\"" << margin_left - 6 << "\" y=\""
        << margin_top + plot_h - static_cast<int>(row) * cell_h - cell_h / 2 + 4
        << "\" text-anchor=\"end\">" << num_label(ys[row]) << "</text>\n";
  svg << "<text class=\"axis-label\" x=\"" << margin_left + plot_w / 2 << "\" y=\""
      << margin_top + plot_h + 40 << "\" text-anchor=\"middle\">" << spec.x_col << "</text>\n";
  svg << "<text class=\"axis-label\" x=\"16\" y=\"" << margin_top + plot_h / 2
      << "\" text-anchor=\"middle\" transform=\"rotate(-90 16 " << margin_top + plot_h / 2 << ")\">"
      << spec.y_col << "</text>\n";

  // color bar
  const int bar_x = margin_left + plot_w + 24;
  const int bar_steps = 32;
  const int bar_h = plot_h;
  for (int s = 0; s < bar_steps; ++s) {
    const double t = (s + 0.5) / bar_steps;
    const int py = margin_top + bar_h - (s + 1) * bar_h / bar_steps;
    const int ph = bar_h / bar_steps + 1;
    svg << "<rect class=\"colorbar\" x=\"" << bar_x << "\" y=\"" << py << "\" width=\"14\" height=\""
        << ph << "\" fill=\"" << ramp_color(t) << "\"/>\n";
  }
  svg << "<text x=\"" << bar_x + 18 << "\" y=\"" << margin_top + bar_h << "\">"
      << num_label(spec.z_min) << "</text>\n";
  svg << "<text x=\"" << bar_x + 18 << "\" y=\"" << margin_top + 10 << "\">"
      << num_label(spec.z_max) << "</text>\n";
  svg << "<text x=\"" << bar_x << "\" y=\"" << margin_top - 8 << "\">" << spec.z_col << "</text>\n";
  svg << "</svg>\n";
  return svg.str();
}

inline void write_heatmap_svg(const SweepResult& result, const HeatmapSpec& spec,
                              const std::string& path) {
  const std::string body = render_heatmap_svg(result, spec);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << body;
  out.flush();
  if (!out) throw std::runtime_error("write failed: " + path);
}

}  // namespace tddyn
