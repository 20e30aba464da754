// Copyright 2026 The srd Authors
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

#include "srd/plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "srd/error.hpp"

namespace srd {
namespace {

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.3f", v);
  std::string s = buf;
  if (s == "-0.000") s = "0.000";
  return s;
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

// Smallest step from {1, 2, 2.5, 5} x 10^k giving at most `max_ticks` steps.
double nice_step(double range, int max_ticks) {
  const double raw = range / max_ticks;
  const double magnitude = std::pow(10.0, std::floor(std::log10(raw)));
  for (double m : {1.0, 2.0, 2.5, 5.0, 10.0}) {
    if (m * magnitude >= raw) return m * magnitude;
  }
  return 10.0 * magnitude;
}

}  // namespace

std::string plot_rank_histogram(const RankDistribution& dist, const RankDistribution* overlay,
                                const PlotOptions& options) {
  const std::size_t n = dist.n_references();
  if (overlay && overlay->n_references() != n)
    throw Error("cli_report", "overlay has " + std::to_string(overlay->n_references()) +
                                  " ranks, histogram has " + std::to_string(n));

  const double left = 64.0, right = 16.0, top = 40.0, bottom = 48.0;
  const double plot_w = options.width - left - right;
  const double plot_h = options.height - top - bottom;
  const double chance = 1.0 / static_cast<double>(n);

  double peak = chance;
  for (double p : dist.probabilities()) peak = std::max(peak, p);
  if (overlay)
    for (double p : overlay->probabilities()) peak = std::max(peak, p);
  const double step = nice_step(peak, 5);
  const double y_max = std::ceil(peak * 1.05 / step) * step;

  const double slot = plot_w / static_cast<double>(n);
  auto y_of = [&](double v) { return top + plot_h - v / y_max * plot_h; };
  const double baseline = y_of(0.0);

  std::ostringstream os;
  os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
     << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << options.width << "\" height=\""
     << options.height << "\" viewBox=\"0 0 " << options.width << ' ' << options.height
     << "\" font-family=\"sans-serif\" font-size=\"11\">\n"
     << "<rect x=\"0\" y=\"0\" width=\"" << options.width << "\" height=\"" << options.height
     << "\" fill=\"white\"/>\n";
  if (!options.title.empty())
    os << "<text x=\"" << num(left + plot_w / 2) << "\" y=\"22\" text-anchor=\"middle\" "
       << "font-size=\"14\">" << escape(options.title) << "</text>\n";

  // Horizontal grid and y tick labels.
  os << "<g stroke=\"#dddddd\" stroke-width=\"1\">\n";
  const int n_ticks = static_cast<int>(std::lround(y_max / step));
  for (int t = 0; t <= n_ticks; ++t) {
    const double y = y_of(step * t);
    os << "<line x1=\"" << num(left) << "\" y1=\"" << num(y) << "\" x2=\"" << num(left + plot_w)
       << "\" y2=\"" << num(y) << "\"/>\n";
  }
  os << "</g>\n<g text-anchor=\"end\">\n";
  for (int t = 0; t <= n_ticks; ++t) {
    char label[32];
    std::snprintf(label, sizeof(label), "%.3g", step * t);
    os << "<text x=\"" << num(left - 6) << "\" y=\"" << num(y_of(step * t) + 4) << "\">" << label
       << "</text>\n";
  }
  os << "</g>\n";

  auto bars = [&](const RankDistribution& d, const char* id, const char* fill, double opacity) {
    os << "<g id=\"" << id << "\" fill=\"" << fill << "\" fill-opacity=\"" << num(opacity)
       << "\">\n";
    const auto probs = d.probabilities();
    for (std::size_t k = 0; k < n; ++k) {
      const double y = y_of(probs[k]);
      os << "<rect x=\"" << num(left + slot * k + slot * 0.1) << "\" y=\"" << num(y)
         << "\" width=\"" << num(slot * 0.8) << "\" height=\"" << num(baseline - y)
         << "\"><title>rank " << k + 1 << ": " << num(probs[k]) << "</title></rect>\n";
    }
    os << "</g>\n";
  };
  bars(dist, "primary", "#1f77b4", 1.0);
  if (overlay) bars(*overlay, "overlay", "#2ca02c", 0.5);

  if (options.chance_line) {
    os << "<line id=\"chance\" x1=\"" << num(left) << "\" y1=\"" << num(y_of(chance))
       << "\" x2=\"" << num(left + plot_w) << "\" y2=\"" << num(y_of(chance))
       << "\" stroke=\"#d62728\" stroke-width=\"1.5\" stroke-dasharray=\"6 4\"/>\n";
  }

  // Axes and x tick labels at rank 1 and every `every` ranks after.
  os << "<g stroke=\"black\" stroke-width=\"1\">\n"
     << "<line x1=\"" << num(left) << "\" y1=\"" << num(baseline) << "\" x2=\""
     << num(left + plot_w) << "\" y2=\"" << num(baseline) << "\"/>\n"
     << "<line x1=\"" << num(left) << "\" y1=\"" << num(top) << "\" x2=\"" << num(left)
     << "\" y2=\"" << num(baseline) << "\"/>\n</g>\n";
  const std::size_t every = n <= 10 ? 1 : static_cast<std::size_t>(nice_step(n, 8));
  os << "<g text-anchor=\"middle\">\n";
  for (std::size_t k = 1; k <= n; ++k) {
    if (k != 1 && k % every != 0) continue;
    os << "<text x=\"" << num(left + slot * (k - 1) + slot / 2) << "\" y=\""
       << num(baseline + 16) << "\">" << k << "</text>\n";
  }
  os << "</g>\n"
     << "<text x=\"" << num(left + plot_w / 2) << "\" y=\"" << num(options.height - 10)
     << "\" text-anchor=\"middle\">rank of matching reference</text>\n"
     << "<text transform=\"translate(16 " << num(top + plot_h / 2)
     << ") rotate(-90)\" text-anchor=\"middle\">probability</text>\n";

  // Legend.
  double ly = top + 6;
  auto legend = [&](const std::string& label, const char* swatch, bool dashed) {
    const double lx = left + plot_w - 150;
    if (dashed)
      os << "<line x1=\"" << num(lx) << "\" y1=\"" << num(ly + 5) << "\" x2=\"" << num(lx + 14)
         << "\" y2=\"" << num(ly + 5) << "\" stroke=\"" << swatch
         << "\" stroke-width=\"1.5\" stroke-dasharray=\"4 2\"/>\n";
    else
      os << "<rect x=\"" << num(lx) << "\" y=\"" << num(ly) << "\" width=\"14\" height=\"10\" fill=\""
         << swatch << "\"/>\n";
    os << "<text x=\"" << num(lx + 20) << "\" y=\"" << num(ly + 9) << "\">" << escape(label)
       << "</text>\n";
    ly += 16;
  };
  legend(options.primary_label, "#1f77b4", false);
  if (overlay) legend(options.overlay_label, "#2ca02c", false);
  if (options.chance_line) legend("chance (1/N)", "#d62728", true);

  os << "</svg>\n";
  return os.str();
}

}  // namespace srd
