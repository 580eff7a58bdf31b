// Copyright 2026 The cfpower Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "cfpower/plots.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace cfpower {

namespace fs = std::filesystem;

std::string format_number(double v) {
  char buf[32];
  for (int prec = 1; prec <= 17; ++prec) {
    std::snprintf(buf, sizeof buf, "%.*g", prec, v);
    if (std::strtod(buf, nullptr) == v) break;
  }
  return buf;
}

namespace {

struct Series {
  std::string name;
  std::vector<double> x, y;
};

const std::array<const char*, 4> kColors = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd"};

// Minimal line chart with axes, tick labels and a legend.
void write_svg(const fs::path& path, const std::string& title, const std::string& x_label, const std::string& y_label,
               const std::vector<Series>& series) {
  double x0 = std::numeric_limits<double>::infinity(), x1 = -x0, y0 = x0, y1 = -x0;
  for (const auto& s : series)
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      x0 = std::min(x0, s.x[i]);
      x1 = std::max(x1, s.x[i]);
      y0 = std::min(y0, s.y[i]);
      y1 = std::max(y1, s.y[i]);
    }
  if (!std::isfinite(x0)) x0 = 0, x1 = 1, y0 = 0, y1 = 1;
  if (x1 <= x0) x1 = x0 + 1;
  if (y1 <= y0) y1 = y0 + 1;
  const double W = 640, H = 420, ml = 70, mr = 150, mt = 40, mb = 60;
  auto px = [&](double x) { return ml + (x - x0) / (x1 - x0) * (W - ml - mr); };
  auto py = [&](double y) { return H - mb - (y - y0) / (y1 - y0) * (H - mt - mb); };

  std::ostringstream o;
  o << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
    << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\" viewBox=\"0 0 " << W
    << ' ' << H << "\">\n"
    << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
    << "<text x=\"" << W / 2 << "\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"16\">"
    << title << "</text>\n"
    << "<line x1=\"" << ml << "\" y1=\"" << H - mb << "\" x2=\"" << W - mr << "\" y2=\"" << H - mb
    << "\" stroke=\"black\"/>\n"
    << "<line x1=\"" << ml << "\" y1=\"" << mt << "\" x2=\"" << ml << "\" y2=\"" << H - mb << "\" stroke=\"black\"/>\n";
  for (int t = 0; t <= 4; ++t) {
    const double xv = x0 + (x1 - x0) * t / 4.0, yv = y0 + (y1 - y0) * t / 4.0;
    char xs[32], ys[32];
    std::snprintf(xs, sizeof xs, "%.3g", xv);
    std::snprintf(ys, sizeof ys, "%.3g", yv);
    o << "<text x=\"" << px(xv) << "\" y=\"" << H - mb + 18
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">" << xs << "</text>\n"
      << "<text x=\"" << ml - 6 << "\" y=\"" << py(yv) + 4
      << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">" << ys << "</text>\n";
  }
  o << "<text x=\"" << (ml + W - mr) / 2 << "\" y=\"" << H - 16
    << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\">" << x_label << "</text>\n"
    << "<text x=\"18\" y=\"" << (mt + H - mb) / 2 << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
    << "font-size=\"13\" transform=\"rotate(-90 18 " << (mt + H - mb) / 2 << ")\">" << y_label << "</text>\n";
  for (std::size_t s = 0; s < series.size(); ++s) {
    const char* color = kColors[s % kColors.size()];
    o << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
    for (std::size_t i = 0; i < series[s].x.size(); ++i)
      o << (i ? " " : "") << px(series[s].x[i]) << ',' << py(series[s].y[i]);
    o << "\"/>\n";
    const double ly = mt + 20.0 * static_cast<double>(s);
    o << "<line x1=\"" << W - mr + 10 << "\" y1=\"" << ly << "\" x2=\"" << W - mr + 30 << "\" y2=\"" << ly
      << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n"
      << "<text x=\"" << W - mr + 36 << "\" y=\"" << ly + 4 << "\" font-family=\"sans-serif\" font-size=\"12\">"
      << series[s].name << "</text>\n";
  }
  o << "</svg>\n";
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << o.str();
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
}

}  // namespace

std::vector<fs::path> export_cdf_plots(const std::vector<EvalRecord>& records, const fs::path& out_dir, bool svg) {
  if (records.empty()) throw std::invalid_argument("export_cdf_plots: no records");
  fs::create_directories(out_dir);
  std::vector<fs::path> written;
  for (const bool uplink : {true, false}) {
    std::array<std::vector<double>, 4> cols;  // optimal, predicted, epa, fpa
    for (const auto& r : records) {
      const std::array<const SchemeSE*, 4> schemes = {&r.optimal, &r.predicted, &r.epa, &r.fpa};
      for (std::size_t s = 0; s < 4; ++s) {
        const Eigen::VectorXd& v = uplink ? schemes[s]->ul : schemes[s]->dl;
        cols[s].insert(cols[s].end(), v.data(), v.data() + v.size());
      }
    }
    const std::size_t n = cols[0].size();
    for (auto& c : cols) std::sort(c.begin(), c.end());
    const bool has_pred = cols[1].size() == n;
    std::ostringstream csv;
    csv << "fraction,optimal,predicted,epa,fpa\n";
    for (std::size_t i = 0; i < n; ++i) {
      csv << format_number(static_cast<double>(i + 1) / static_cast<double>(n)) << ',' << format_number(cols[0][i])
          << ',' << (has_pred ? format_number(cols[1][i]) : "") << ',' << format_number(cols[2][i]) << ','
          << format_number(cols[3][i]) << '\n';
    }
    const std::string stem = uplink ? "cdf_ul" : "cdf_dl";
    write_text(out_dir / (stem + ".csv"), csv.str());
    written.push_back(out_dir / (stem + ".csv"));
    if (svg) {
      std::vector<Series> series;
      const std::array<const char*, 4> names = {"optimal", "predicted", "EPA", "FPA"};
      for (std::size_t s = 0; s < 4; ++s) {
        if (cols[s].size() != n) continue;
        Series ser{names[s], {}, {}};
        for (std::size_t i = 0; i < n; ++i) {
          ser.x.push_back(cols[s][i]);
          ser.y.push_back(static_cast<double>(i + 1) / static_cast<double>(n));
        }
        series.push_back(std::move(ser));
      }
      write_svg(out_dir / (stem + ".svg"), uplink ? "UL per-UE SE CDF" : "DL per-UE SE CDF", "SE [bit/s/Hz]",
                "CDF", series);
      written.push_back(out_dir / (stem + ".svg"));
    }
  }
  return written;
}

std::vector<fs::path> export_sweep_plot(const std::vector<SweepRow>& rows, const std::string& stem,
                                        const fs::path& out_dir, bool svg) {
  if (rows.empty()) throw std::invalid_argument("export_sweep_plot: no rows");
  fs::create_directories(out_dir);
  std::ostringstream csv;
  csv << "K,L,samples,se_opt_ul,se_pred_ul,se_epa_ul,se_opt_dl,se_pred_dl,se_epa_dl\n";
  for (const auto& r : rows)
    csv << r.K << ',' << r.L << ',' << r.samples << ',' << format_number(r.se_opt_ul) << ','
        << format_number(r.se_pred_ul) << ',' << format_number(r.se_epa_ul) << ',' << format_number(r.se_opt_dl)
        << ',' << format_number(r.se_pred_dl) << ',' << format_number(r.se_epa_dl) << '\n';
  std::vector<fs::path> written{out_dir / (stem + ".csv")};
  write_text(written.back(), csv.str());
  if (svg) {
    // The swept axis is whichever of K and L varies.
    const bool over_k = rows.size() < 2 || rows.front().K != rows.back().K;
    std::vector<Series> series(4);
    series[0].name = "optimal UL";
    series[1].name = "predicted UL";
    series[2].name = "optimal DL";
    series[3].name = "predicted DL";
    for (const auto& r : rows) {
      const double x = over_k ? r.K : r.L;
      const std::array<double, 4> ys = {r.se_opt_ul, r.se_pred_ul, r.se_opt_dl, r.se_pred_dl};
      for (std::size_t s = 0; s < 4; ++s) {
        series[s].x.push_back(x);
        series[s].y.push_back(ys[s]);
      }
    }
    write_svg(out_dir / (stem + ".svg"), over_k ? "Mean per-UE SE vs K" : "Mean per-UE SE vs L",
              over_k ? "K" : "L", "SE [bit/s/Hz]", series);
    written.push_back(out_dir / (stem + ".svg"));
  }
  return written;
}

}  // namespace cfpower
