#pragma once

#include "accelode/io.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <string>
#include <vector>

namespace accelode::tools {

/// Minimal SVG plot of phase-plane polylines with optional highlighted
/// points. The view auto-scales to the bounding box of the data.
class PhasePlot {
 public:
  struct Series {
    std::vector<Point2> points;
    std::vector<bool> highlight;
  };

  void add(Series s) { series_.push_back(std::move(s)); }

  void write(std::ostream& os, const std::string& title) const {
    double qmin = INFINITY, qmax = -INFINITY, pmin = INFINITY, pmax = -INFINITY;
    for (const Series& s : series_) {
      for (const Point2& x : s.points) {
        if (!std::isfinite(x.q) || !std::isfinite(x.p)) continue;
        qmin = std::min(qmin, x.q);
        qmax = std::max(qmax, x.q);
        pmin = std::min(pmin, x.p);
        pmax = std::max(pmax, x.p);
      }
    }
    if (!(qmax >= qmin)) qmin = -1, qmax = 1, pmin = -1, pmax = 1;
    if (qmax - qmin < 1e-12) qmin -= 0.5, qmax += 0.5;
    if (pmax - pmin < 1e-12) pmin -= 0.5, pmax += 0.5;

    const double sx = (kWidth - 2 * kMargin) / (qmax - qmin);
    const double sy = (kHeight - 2 * kMargin) / (pmax - pmin);
    auto X = [&](double q) { return kMargin + (q - qmin) * sx; };
    auto Y = [&](double p) { return kHeight - kMargin - (p - pmin) * sy; };
    auto num = [](double v) { return format_double(std::round(v * 100.0) / 100.0); };

    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
       << "\" viewBox=\"0 0 " << kWidth << ' ' << kHeight << "\">\n";
    os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    os << "<text x=\"" << kWidth / 2 << "\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" "
          "font-size=\"16\">"
       << title << "</text>\n";
    // Frame and axes through the origin when visible.
    os << "<rect x=\"" << kMargin << "\" y=\"" << kMargin << "\" width=\"" << kWidth - 2 * kMargin
       << "\" height=\"" << kHeight - 2 * kMargin << "\" fill=\"none\" stroke=\"black\"/>\n";
    if (qmin <= 0 && 0 <= qmax) {
      os << "<line x1=\"" << num(X(0)) << "\" y1=\"" << kMargin << "\" x2=\"" << num(X(0)) << "\" y2=\""
         << kHeight - kMargin << "\" stroke=\"#bbb\"/>\n";
    }
    if (pmin <= 0 && 0 <= pmax) {
      os << "<line x1=\"" << kMargin << "\" y1=\"" << num(Y(0)) << "\" x2=\"" << kWidth - kMargin << "\" y2=\""
         << num(Y(0)) << "\" stroke=\"#bbb\"/>\n";
    }
    os << "<text x=\"" << kWidth / 2 << "\" y=\"" << kHeight - 12
       << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\">q  [" << format_double(qmin)
       << ", " << format_double(qmax) << "]</text>\n";
    os << "<text x=\"14\" y=\"" << kHeight / 2 << "\" font-family=\"sans-serif\" font-size=\"13\" "
       << "transform=\"rotate(-90 14 " << kHeight / 2 << ")\" text-anchor=\"middle\">p  ["
       << format_double(pmin) << ", " << format_double(pmax) << "]</text>\n";

    for (const Series& s : series_) {
      os << "<polyline fill=\"none\" stroke=\"#3060a0\" stroke-width=\"1\" points=\"";
      for (const Point2& x : s.points) {
        if (!std::isfinite(x.q) || !std::isfinite(x.p)) continue;
        os << num(X(x.q)) << ',' << num(Y(x.p)) << ' ';
      }
      os << "\"/>\n";
      for (std::size_t i = 0; i < s.points.size(); ++i) {
        const Point2& x = s.points[i];
        if (!std::isfinite(x.q) || !std::isfinite(x.p)) continue;
        const double cx = X(x.q), cy = Y(x.p);
        if (i < s.highlight.size() && s.highlight[i]) {
          os << "<path d=\"M" << num(cx - 3) << ' ' << num(cy - 3) << "L" << num(cx + 3) << ' ' << num(cy + 3)
             << "M" << num(cx - 3) << ' ' << num(cy + 3) << "L" << num(cx + 3) << ' ' << num(cy - 3)
             << "\" stroke=\"#d02020\" stroke-width=\"1.5\"/>\n";
        } else {
          os << "<circle cx=\"" << num(cx) << "\" cy=\"" << num(cy) << "\" r=\"1.8\" fill=\"#3060a0\"/>\n";
        }
      }
    }
    os << "</svg>\n";
  }

 private:
  static constexpr int kWidth = 800;
  static constexpr int kHeight = 600;
  static constexpr int kMargin = 50;
  std::vector<Series> series_;
};

}  // namespace accelode::tools
