#pragma once

#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "convbound/joint_density.hpp"

namespace convbound::svg {

struct ChartOptions {
  std::string title;
  std::string x_label;
  std::string y_label;
  // Emit a `<!-- generated ... -->` comment with the current UTC time.
  bool timestamp = true;
};

// Vertical bars indexed 0..n-1, with an optional overlay polyline sharing
// the same x axis (used for regeneration-vs-original comparisons). Either
// vector may be empty; lengths may differ.
void write_bar_chart(std::ostream& out, const std::vector<double>& bars,
                     const std::vector<double>& overlay,
                     const ChartOptions& opt);

// Polyline through (x, y) points, axes fit to the data range.
void write_line_chart(std::ostream& out,
                      const std::vector<std::pair<double, double>>& points,
                      const ChartOptions& opt);

// Matrix heatmap, row index downward, shaded by cell magnitude.
void write_heatmap(std::ostream& out, const JointDensity& density,
                   const ChartOptions& opt);

// Horizontal bars with one text label per value; supports negatives with a
// zero baseline (used for correlation reports and category summaries).
void write_labeled_bars(
    std::ostream& out,
    const std::vector<std::pair<std::string, double>>& rows,
    const ChartOptions& opt);

}  // namespace convbound::svg
