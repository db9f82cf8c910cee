// Copyright 2026 The Report Triage Authors
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

#include "triage/report.h"

#include <array>
#include <cstdio>
#include <sstream>

#include "triage/error.h"

namespace triage {
namespace {

constexpr double kWidth = 720;
constexpr double kHeight = 520;
constexpr double kLeft = 64;
constexpr double kRight = 220;  // legend column
constexpr double kTop = 48;
constexpr double kBottom = 56;

constexpr std::array<const char*, 10> kPalette = {
    "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
    "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};

std::string fmt(double v, int digits = 2) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.*f", digits, v);
  return buf;
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

double px(double recall) {
  return kLeft + recall * (kWidth - kLeft - kRight);
}
double py(double precision) {
  return kTop + (1.0 - precision) * (kHeight - kTop - kBottom);
}

std::string aggregate_text(const Json& a) {
  if (a.is_null()) return "n/a";
  return fmt(a.at("mean").get<double>(), 3) + " \xC2\xB1 " +
         fmt(a.at("std").get<double>(), 3);
}

}  // namespace

std::string render_pr_svg(const Json& summary) {
  std::ostringstream svg;
  const std::string title = summary.value("title", summary.value("dimension", ""));
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth
      << "\" height=\"" << kHeight << "\" viewBox=\"0 0 " << kWidth << ' '
      << kHeight << "\" font-family=\"sans-serif\">\n";
  svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  svg << "<text x=\"" << fmt(kLeft) << "\" y=\"28\" font-size=\"16\">"
      << escape(title) << ": precision-recall (mAP "
      << aggregate_text(summary.at("map")) << ")</text>\n";

  // Grid and ticks.
  for (int i = 0; i <= 5; ++i) {
    const double v = i / 5.0;
    svg << "<line x1=\"" << fmt(px(v)) << "\" y1=\"" << fmt(py(0)) << "\" x2=\""
        << fmt(px(v)) << "\" y2=\"" << fmt(py(1))
        << "\" stroke=\"#e0e0e0\"/>\n";
    svg << "<line x1=\"" << fmt(px(0)) << "\" y1=\"" << fmt(py(v)) << "\" x2=\""
        << fmt(px(1)) << "\" y2=\"" << fmt(py(v))
        << "\" stroke=\"#e0e0e0\"/>\n";
    svg << "<text x=\"" << fmt(px(v)) << "\" y=\"" << fmt(py(0) + 18)
        << "\" font-size=\"11\" text-anchor=\"middle\">" << fmt(v, 1)
        << "</text>\n";
    svg << "<text x=\"" << fmt(px(0) - 8) << "\" y=\"" << fmt(py(v) + 4)
        << "\" font-size=\"11\" text-anchor=\"end\">" << fmt(v, 1)
        << "</text>\n";
  }
  svg << "<rect x=\"" << fmt(px(0)) << "\" y=\"" << fmt(py(1)) << "\" width=\""
      << fmt(px(1) - px(0)) << "\" height=\"" << fmt(py(0) - py(1))
      << "\" fill=\"none\" stroke=\"black\"/>\n";
  svg << "<text x=\"" << fmt((px(0) + px(1)) / 2) << "\" y=\""
      << fmt(kHeight - 16) << "\" font-size=\"12\" text-anchor=\"middle\">"
      << "Recall</text>\n";
  svg << "<text x=\"18\" y=\"" << fmt((py(0) + py(1)) / 2)
      << "\" font-size=\"12\" text-anchor=\"middle\" transform=\"rotate(-90 18 "
      << fmt((py(0) + py(1)) / 2) << ")\">Precision</text>\n";

  const auto& classes = summary.at("classes");
  const auto& folds = summary.at("folds");
  for (std::size_t f = 0; f < folds.size(); ++f) {
    const auto& fold_classes = folds[f].at("classes");
    for (std::size_t c = 0; c < fold_classes.size(); ++c) {
      const auto& curve = fold_classes[c].at("curve");
      if (curve.empty()) continue;
      std::ostringstream points;
      points << fmt(px(0)) << ',' << fmt(py(curve[0][1].get<double>()));
      for (const auto& p : curve) {
        points << ' ' << fmt(px(p[0].get<double>())) << ','
               << fmt(py(p[1].get<double>()));
      }
      svg << "<polyline fill=\"none\" stroke-width=\"1.6\" stroke=\""
          << kPalette[c % kPalette.size()] << "\""
          << (f == 0 ? "" : " stroke-dasharray=\"5,3\"") << " points=\""
          << points.str() << "\"/>\n";
    }
  }

  // Legend.
  const double lx = kWidth - kRight + 16;
  const auto& per_class = summary.at("per_class");
  for (std::size_t c = 0; c < classes.size(); ++c) {
    const double ly = kTop + 8 + 20.0 * static_cast<double>(c);
    svg << "<line x1=\"" << fmt(lx) << "\" y1=\"" << fmt(ly) << "\" x2=\""
        << fmt(lx + 18) << "\" y2=\"" << fmt(ly) << "\" stroke-width=\"3\" stroke=\""
        << kPalette[c % kPalette.size()] << "\"/>\n";
    svg << "<text x=\"" << fmt(lx + 24) << "\" y=\"" << fmt(ly + 4)
        << "\" font-size=\"10\">" << escape(classes[c].get<std::string>());
    if (c < per_class.size() && !per_class[c].at("ap").is_null()) {
      svg << " (AP " << fmt(per_class[c]["ap"]["mean"].get<double>(), 2) << ')';
    }
    svg << "</text>\n";
  }
  const double note_y = kTop + 16 + 20.0 * static_cast<double>(classes.size());
  svg << "<text x=\"" << fmt(lx) << "\" y=\"" << fmt(note_y)
      << "\" font-size=\"10\" fill=\"#555\">solid: fold 0, dashed: other folds"
      << "</text>\n";
  svg << "</svg>\n";
  return svg.str();
}

std::string render_table_csv(const std::vector<Json>& summaries) {
  std::ostringstream csv;
  csv << "Dimension,mAP,F-score,mAP_mean,mAP_std,F_mean,F_std\n";
  for (const auto& s : summaries) {
    const auto& map = s.at("map");
    const auto& f = s.at("f_score");
    csv << s.value("title", "") << ',' << aggregate_text(map) << ','
        << aggregate_text(f) << ',' << fmt(map["mean"].get<double>(), 6) << ','
        << fmt(map["std"].get<double>(), 6) << ','
        << fmt(f["mean"].get<double>(), 6) << ','
        << fmt(f["std"].get<double>(), 6) << '\n';
  }
  return csv.str();
}

}  // namespace triage
