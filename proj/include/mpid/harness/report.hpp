#pragma once
//
// CSV and SVG output for sweep results.
//

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "mpid/errors.hpp"
#include "mpid/harness/experiments.hpp"
#include "mpid/harness/io.hpp"

namespace mpid::harness {

inline constexpr const char* csv_header = "experiment,dataset,variant,k,n,seed,error_kind,error_value,status";

inline std::string format_csv(const std::vector<ResultRow>& rows) {
  std::string out = csv_header;
  out.push_back('\n');
  char buf[64];
  for (const ResultRow& r : rows) {
    out += r.experiment + ',' + r.dataset + ',' + r.variant + ',' + std::to_string(r.k) + ',' +
           std::to_string(r.n) + ',' + std::to_string(r.seed) + ',' + r.error_kind + ',';
    if (r.ok() && std::isfinite(r.error_value)) {
      std::snprintf(buf, sizeof buf, "%.16e", r.error_value);
      out += buf;
    } else {
      out += "nan";
    }
    out += ',';
    out += name(r.status);
    out.push_back('\n');
  }
  return out;
}

inline void emit_csv(const std::vector<ResultRow>& rows, const std::string& path) {
  if (rows.empty()) throw IOError("emit_csv: no rows to write");
  write_file(path, format_csv(rows));
}

namespace detail {

inline std::string xml_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out.push_back(c);
    }
  }
  return out;
}

}  // namespace detail

// Log-scale line chart, one polyline per series (dataset/variant, with the
// seed appended when several seeds are present). Only ok cells are plotted,
// so a factorization that breaks shows up as a truncated curve. The x axis
// is k, or n for column-dimension sweeps. ROM results plot mse_mean only.
inline std::string format_svg(const std::vector<ResultRow>& rows) {
  constexpr double width = 720, height = 480, left = 80, right = 200, top = 30, bottom = 50;
  constexpr double floor_value = 1e-17;

  std::set<std::uint64_t> seeds;
  std::set<std::string> kinds;
  for (const ResultRow& r : rows) {
    seeds.insert(r.seed);
    if (!r.error_kind.starts_with("mse_column")) kinds.insert(r.error_kind);
  }

  std::map<std::string, std::vector<std::pair<double, double>>> series;
  double xmin = INFINITY, xmax = -INFINITY, ymin = INFINITY, ymax = -INFINITY;
  for (const ResultRow& r : rows) {
    if (r.error_kind.starts_with("mse_column")) continue;
    std::string key = r.dataset + "/" + r.variant;
    if (kinds.size() > 1) key += "/" + r.error_kind;
    if (seeds.size() > 1) key += "/seed" + std::to_string(r.seed);
    auto& pts = series[key];
    if (!r.ok() || !std::isfinite(r.error_value)) continue;
    const double x = static_cast<double>(r.experiment == "coldim_sweep" ? r.n : r.k);
    const double y = std::log10(std::max(r.error_value, floor_value));
    pts.emplace_back(x, y);
    xmin = std::min(xmin, x);
    xmax = std::max(xmax, x);
    ymin = std::min(ymin, y);
    ymax = std::max(ymax, y);
  }
  if (!std::isfinite(xmin)) xmin = 0, xmax = 1, ymin = -1, ymax = 0;
  ymin = std::floor(ymin);
  ymax = std::ceil(ymax);
  if (ymax <= ymin) ymax = ymin + 1;
  if (xmax <= xmin) xmax = xmin + 1;

  const double pw = width - left - right, ph = height - top - bottom;
  auto sx = [&](double x) { return left + (x - xmin) / (xmax - xmin) * pw; };
  auto sy = [&](double y) { return top + (ymax - y) / (ymax - ymin) * ph; };

  static constexpr const char* palette[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
                                            "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};
  char buf[128];
  std::string out;
  out += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  std::snprintf(buf, sizeof buf,
                "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"%.0f\" height=\"%.0f\">\n",
                width, height);
  out += buf;
  out += "<rect x=\"0\" y=\"0\" width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  std::snprintf(buf, sizeof buf,
                "<rect x=\"%.1f\" y=\"%.1f\" width=\"%.1f\" height=\"%.1f\" fill=\"none\" stroke=\"black\"/>\n",
                left, top, pw, ph);
  out += buf;
  for (int d = static_cast<int>(ymin); d <= static_cast<int>(ymax); ++d) {
    std::snprintf(buf, sizeof buf,
                  "<text x=\"%.1f\" y=\"%.1f\" font-size=\"11\" text-anchor=\"end\">1e%d</text>\n",
                  left - 6, sy(d) + 4, d);
    out += buf;
  }
  for (double x : {xmin, xmax}) {
    std::snprintf(buf, sizeof buf,
                  "<text x=\"%.1f\" y=\"%.1f\" font-size=\"11\" text-anchor=\"middle\">%.0f</text>\n",
                  sx(x), top + ph + 16, x);
    out += buf;
  }
  const bool coldim = !rows.empty() && rows.front().experiment == "coldim_sweep";
  std::snprintf(buf, sizeof buf, "<text x=\"%.1f\" y=\"%.1f\" font-size=\"12\" text-anchor=\"middle\">%s</text>\n",
                left + pw / 2, height - 12, coldim ? "column dimension n" : "target rank k");
  out += buf;

  std::size_t idx = 0;
  for (const auto& [key, pts] : series) {
    if (pts.empty()) continue;
    auto sorted = pts;
    std::ranges::sort(sorted);
    const char* color = palette[idx % std::size(palette)];
    out += "<polyline fill=\"none\" stroke=\"";
    out += color;
    out += "\" stroke-width=\"1.5\" points=\"";
    for (const auto& [x, y] : sorted) {
      std::snprintf(buf, sizeof buf, "%.2f,%.2f ", sx(x), sy(y));
      out += buf;
    }
    out += "\"/>\n";
    std::snprintf(buf, sizeof buf, "<text x=\"%.1f\" y=\"%.1f\" font-size=\"11\" fill=\"%s\">",
                  left + pw + 10, top + 14.0 * static_cast<double>(idx + 1), color);
    out += buf;
    out += detail::xml_escape(key);
    out += "</text>\n";
    ++idx;
  }
  out += "</svg>\n";
  return out;
}

inline void emit_svg(const std::vector<ResultRow>& rows, const std::string& path) {
  if (rows.empty()) throw IOError("emit_svg: no rows to write");
  write_file(path, format_svg(rows));
}

}  // namespace mpid::harness
