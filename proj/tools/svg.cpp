#include "svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ctime>

namespace convbound::svg {

namespace {

constexpr double kWidth = 720.0;
constexpr double kHeight = 440.0;
constexpr double kLeft = 64.0;
constexpr double kRight = 24.0;
constexpr double kTop = 44.0;
constexpr double kBottom = 52.0;
constexpr double kPlotW = kWidth - kLeft - kRight;
constexpr double kPlotH = kHeight - kTop - kBottom;

std::string num(double v) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

std::string escape(const std::string& text) {
  std::string out;
  out.reserve(text.size());
  for (const char c : text) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      default: out += c;
    }
  }
  return out;
}

void open_svg(std::ostream& out, const ChartOptions& opt) {
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth
      << "\" height=\"" << kHeight << "\" viewBox=\"0 0 " << kWidth << ' '
      << kHeight << "\">\n";
  if (opt.timestamp) {
    char stamp[32];
    const std::time_t now = std::time(nullptr);
    std::tm utc{};
    gmtime_r(&now, &utc);
    std::strftime(stamp, sizeof(stamp), "%Y-%m-%dT%H:%M:%SZ", &utc);
    out << "<!-- generated " << stamp << " -->\n";
  }
  out << "<rect width=\"" << kWidth << "\" height=\"" << kHeight
      << "\" fill=\"white\"/>\n";
  if (!opt.title.empty()) {
    out << "<text x=\"" << kWidth / 2 << "\" y=\"26\" text-anchor=\"middle\" "
           "font-family=\"sans-serif\" font-size=\"16\">"
        << escape(opt.title) << "</text>\n";
  }
}

void axis_labels(std::ostream& out, const ChartOptions& opt) {
  if (!opt.x_label.empty()) {
    out << "<text x=\"" << kLeft + kPlotW / 2 << "\" y=\"" << kHeight - 12
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
           "font-size=\"13\">"
        << escape(opt.x_label) << "</text>\n";
  }
  if (!opt.y_label.empty()) {
    out << "<text x=\"18\" y=\"" << kTop + kPlotH / 2
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
           "font-size=\"13\" transform=\"rotate(-90 18 "
        << kTop + kPlotH / 2 << ")\">" << escape(opt.y_label) << "</text>\n";
  }
}

void frame(std::ostream& out) {
  out << "<rect x=\"" << kLeft << "\" y=\"" << kTop << "\" width=\"" << kPlotW
      << "\" height=\"" << kPlotH
      << "\" fill=\"none\" stroke=\"#444\" stroke-width=\"1\"/>\n";
}

void tick_text(std::ostream& out, double x, double y, const std::string& text,
               const char* anchor) {
  out << "<text x=\"" << num(x) << "\" y=\"" << num(y) << "\" text-anchor=\""
      << anchor << "\" font-family=\"sans-serif\" font-size=\"11\" "
      << "fill=\"#333\">" << text << "</text>\n";
}

}  // namespace

void write_bar_chart(std::ostream& out, const std::vector<double>& bars,
                     const std::vector<double>& overlay,
                     const ChartOptions& opt) {
  const std::size_t n = std::max(bars.size(), overlay.size());
  double max_y = 0.0;
  for (const double v : bars) max_y = std::max(max_y, v);
  for (const double v : overlay) max_y = std::max(max_y, v);
  if (max_y <= 0.0) max_y = 1.0;

  open_svg(out, opt);
  frame(out);
  const double step = kPlotW / static_cast<double>(std::max<std::size_t>(n, 1));
  const auto y_of = [&](double v) { return kTop + kPlotH * (1.0 - v / max_y); };

  for (std::size_t k = 0; k < bars.size(); ++k) {
    if (bars[k] <= 0.0) continue;
    const double h = kPlotH * bars[k] / max_y;
    out << "<rect x=\"" << num(kLeft + step * static_cast<double>(k))
        << "\" y=\"" << num(kTop + kPlotH - h) << "\" width=\""
        << num(std::max(step, 0.5)) << "\" height=\"" << num(h)
        << "\" fill=\"#7fa8d0\"/>\n";
  }
  if (!overlay.empty()) {
    out << "<polyline fill=\"none\" stroke=\"#b03030\" stroke-width=\"1.5\" "
           "points=\"";
    for (std::size_t k = 0; k < overlay.size(); ++k) {
      if (k > 0) out << ' ';
      out << num(kLeft + step * (static_cast<double>(k) + 0.5)) << ','
          << num(y_of(overlay[k]));
    }
    out << "\"/>\n";
  }
  tick_text(out, kLeft, kTop + kPlotH + 16, "0", "middle");
  tick_text(out, kLeft + kPlotW, kTop + kPlotH + 16,
            num(static_cast<double>(n == 0 ? 0 : n - 1)), "middle");
  tick_text(out, kLeft - 6, kTop + kPlotH, "0", "end");
  tick_text(out, kLeft - 6, kTop + 10, num(max_y), "end");
  axis_labels(out, opt);
  out << "</svg>\n";
}

void write_line_chart(std::ostream& out,
                      const std::vector<std::pair<double, double>>& points,
                      const ChartOptions& opt) {
  double x_min = 0.0, x_max = 1.0, y_max = 1.0;
  if (!points.empty()) {
    x_min = x_max = points.front().first;
    y_max = 0.0;
    for (const auto& [x, y] : points) {
      x_min = std::min(x_min, x);
      x_max = std::max(x_max, x);
      y_max = std::max(y_max, y);
    }
    if (x_max == x_min) x_max = x_min + 1.0;
    if (y_max <= 0.0) y_max = 1.0;
  }

  open_svg(out, opt);
  frame(out);
  if (!points.empty()) {
    out << "<polyline fill=\"none\" stroke=\"#2060a0\" stroke-width=\"1.5\" "
           "points=\"";
    for (std::size_t k = 0; k < points.size(); ++k) {
      if (k > 0) out << ' ';
      const double fx = (points[k].first - x_min) / (x_max - x_min);
      const double fy = points[k].second / y_max;
      out << num(kLeft + kPlotW * fx) << ',' << num(kTop + kPlotH * (1 - fy));
    }
    out << "\"/>\n";
  }
  tick_text(out, kLeft, kTop + kPlotH + 16, num(x_min), "middle");
  tick_text(out, kLeft + kPlotW, kTop + kPlotH + 16, num(x_max), "middle");
  tick_text(out, kLeft - 6, kTop + kPlotH, "0", "end");
  tick_text(out, kLeft - 6, kTop + 10, num(y_max), "end");
  axis_labels(out, opt);
  out << "</svg>\n";
}

void write_heatmap(std::ostream& out, const JointDensity& density,
                   const ChartOptions& opt) {
  const std::size_t side = density.side();
  double max_p = 0.0;
  for (std::size_t i = 0; i < side; ++i) {
    for (std::size_t j = 0; j < side; ++j) {
      max_p = std::max(max_p, density.at(i, j));
    }
  }
  if (max_p <= 0.0) max_p = 1.0;

  open_svg(out, opt);
  frame(out);
  const double cell =
      std::min(kPlotW, kPlotH) / static_cast<double>(std::max<std::size_t>(side, 1));
  for (std::size_t i = 0; i < side; ++i) {
    for (std::size_t j = 0; j < side; ++j) {
      const double v = density.at(i, j);
      if (v <= 0.0) continue;  // white background shows through
      out << "<rect x=\"" << num(kLeft + cell * static_cast<double>(j))
          << "\" y=\"" << num(kTop + cell * static_cast<double>(i))
          << "\" width=\"" << num(cell) << "\" height=\"" << num(cell)
          << "\" fill=\"#20508c\" fill-opacity=\"" << num(v / max_p)
          << "\"/>\n";
    }
  }
  tick_text(out, kLeft, kTop + kPlotH + 16, "0", "middle");
  tick_text(out, kLeft + cell * static_cast<double>(side),
            kTop + kPlotH + 16, num(static_cast<double>(side) - 1), "middle");
  tick_text(out, kLeft - 6, kTop + 10, "0", "end");
  tick_text(out, kLeft - 6, kTop + cell * static_cast<double>(side),
            num(static_cast<double>(side) - 1), "end");
  axis_labels(out, opt);
  out << "</svg>\n";
}

void write_labeled_bars(
    std::ostream& out,
    const std::vector<std::pair<std::string, double>>& rows,
    const ChartOptions& opt) {
  double lo = 0.0, hi = 0.0;
  for (const auto& [label, v] : rows) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  if (hi == lo) hi = lo + 1.0;

  open_svg(out, opt);
  frame(out);
  const double row_h =
      kPlotH / static_cast<double>(std::max<std::size_t>(rows.size(), 1));
  const auto x_of = [&](double v) {
    return kLeft + kPlotW * (v - lo) / (hi - lo);
  };
  const double x_zero = x_of(0.0);
  out << "<line x1=\"" << num(x_zero) << "\" y1=\"" << kTop << "\" x2=\""
      << num(x_zero) << "\" y2=\"" << kTop + kPlotH
      << "\" stroke=\"#888\" stroke-width=\"1\"/>\n";
  for (std::size_t k = 0; k < rows.size(); ++k) {
    const double v = rows[k].second;
    const double x = std::min(x_zero, x_of(v));
    const double w = std::abs(x_of(v) - x_zero);
    const double y = kTop + row_h * static_cast<double>(k) + row_h * 0.2;
    out << "<rect x=\"" << num(x) << "\" y=\"" << num(y) << "\" width=\""
        << num(std::max(w, 0.5)) << "\" height=\"" << num(row_h * 0.6)
        << "\" fill=\"" << (v < 0 ? "#b03030" : "#2f7d4f") << "\"/>\n";
    tick_text(out, kLeft - 6, y + row_h * 0.45, escape(rows[k].first), "end");
    tick_text(out, x_of(v) + (v < 0 ? -4 : 4), y + row_h * 0.45, num(v),
              v < 0 ? "end" : "start");
  }
  tick_text(out, kLeft, kTop + kPlotH + 16, num(lo), "middle");
  tick_text(out, kLeft + kPlotW, kTop + kPlotH + 16, num(hi), "middle");
  axis_labels(out, opt);
  out << "</svg>\n";
}

}  // namespace convbound::svg
