// Copyright 2026 The pronav Authors.
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

#pragma once

#include <algorithm>
#include <cstdio>
#include <limits>
#include <ostream>
#include <string>
#include <vector>

#include "pronav/pipeline.hpp"
#include "pronav/profile.hpp"
#include "pronav/terrain_model.hpp"

namespace pronav {

namespace plot {

inline std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", v);
  return buf;
}

inline const char* gait_color(std::optional<Gait> g) {
  if (!g) return "#7f7f7f";
  switch (*g) {
    case Gait::Trot: return "#1f77b4";
    case Gait::Crawl: return "#ff7f0e";
    case Gait::Amble: return "#9467bd";
  }
  return "#000000";
}

inline const char* terrain_color(const std::string& terrain) {
  if (terrain == "granular") return "#d62728";
  if (terrain == "poor-foothold") return "#1f3fbf";
  if (terrain == "solid-flat") return "#2ca02c";
  if (terrain == "high-resistance") return "#000000";
  return "#8c564b";
}

inline const char* gait_dash(Gait g) {
  switch (g) {
    case Gait::Trot: return "";
    case Gait::Amble: return "8,4";
    case Gait::Crawl: return "8,3,2,3";
  }
  return "";
}

struct Frame {
  double x0, x1, y0, y1;
  double width = 800, height = 600, margin = 50;

  double sx(double x) const { return margin + (x - x0) / (x1 - x0) * (width - 2 * margin); }
  double sy(double y) const { return height - margin - (y - y0) / (y1 - y0) * (height - 2 * margin); }
};

}  // namespace plot

/// Scatter of decided points over the stable-zone ellipses and the safe
/// region. `csv` receives one row per plotted point with the same numbers.
inline void render_svg(std::ostream& svg, std::ostream& csv, const CalibrationProfile& profile,
                       const std::vector<DecisionPoint>& points) {
  if (points.empty()) throw Error("nothing to plot: empty decision stream");
  const ZoneSet zones = profile.zones();
  double x0 = std::numeric_limits<double>::infinity(), x1 = -x0, y0 = x0, y1 = -x0;
  auto grow = [&](double x, double y) {
    x0 = std::min(x0, x); x1 = std::max(x1, x);
    y0 = std::min(y0, y); y1 = std::max(y1, y);
  };
  for (const auto& d : points) grow(d.p.pc1, d.p.pc2);
  for (const auto& b : boundary_points(zones.gamma_safe)) grow(b.x(), b.y());
  const double padx = 0.05 * std::max(x1 - x0, 1e-6), pady = 0.05 * std::max(y1 - y0, 1e-6);
  const plot::Frame fr{x0 - padx, x1 + padx, y0 - pady, y1 + pady};

  auto path = [&](const Region& r) {
    std::string d;
    const auto pts = boundary_points(r, 128);
    for (std::size_t i = 0; i < pts.size(); ++i) {
      d += (i == 0 ? "M" : " L") + plot::num(fr.sx(pts[i].x())) + " " + plot::num(fr.sy(pts[i].y()));
    }
    return d + " Z";
  };

  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << fr.width << "\" height=\""
      << fr.height << "\" viewBox=\"0 0 " << fr.width << ' ' << fr.height << "\">\n";
  svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  svg << "<text x=\"" << fr.width / 2 << "\" y=\"" << fr.height - 12
      << "\" text-anchor=\"middle\" font-size=\"14\">PC1</text>\n";
  svg << "<text x=\"14\" y=\"" << fr.height / 2 << "\" font-size=\"14\" transform=\"rotate(-90 14 "
      << fr.height / 2 << ")\" text-anchor=\"middle\">PC2</text>\n";

  csv << "t,pc1,pc2,gait,x,y\n";
  svg << "<g class=\"points\">\n";
  for (const auto& d : points) {
    const std::string cx = plot::num(fr.sx(d.p.pc1)), cy = plot::num(fr.sy(d.p.pc2));
    svg << "<circle class=\"point\" cx=\"" << cx << "\" cy=\"" << cy << "\" r=\"2\" fill=\""
        << plot::gait_color(d.gait) << "\"/>\n";
    csv << nlohmann::json(d.t).dump() << ',' << nlohmann::json(d.p.pc1).dump() << ','
        << nlohmann::json(d.p.pc2).dump() << ',' << (d.gait ? to_string(*d.gait) : "none") << ','
        << cx << ',' << cy << '\n';
  }
  svg << "</g>\n";

  for (const auto& e : zones.sz) {
    svg << "<path class=\"ellipse\" data-id=\"" << e.id << "\" d=\"" << path(e.region)
        << "\" fill=\"none\" stroke=\"" << plot::terrain_color(e.terrain) << "\" stroke-width=\"2\"";
    if (*plot::gait_dash(e.gait)) svg << " stroke-dasharray=\"" << plot::gait_dash(e.gait) << '"';
    svg << "/>\n";
  }
  svg << "<path class=\"ellipse\" data-id=\"gamma_safe\" d=\"" << path(zones.gamma_safe)
      << "\" fill=\"none\" stroke=\"#555555\" stroke-width=\"1.5\" stroke-dasharray=\"2,3\"/>\n";
  svg << "</svg>\n";
}

}  // namespace pronav
