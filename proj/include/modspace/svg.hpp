#pragma once

#include <string>
#include <utility>
#include <vector>

namespace modspace {

struct ChartSeries {
    std::string name;
    std::vector<std::pair<double, double>> points;
};

/// Minimal polyline chart with axes and labels; no plotting dependency.
std::string svg_line_chart(const std::string& title, const std::string& x_label,
                           const std::string& y_label, const std::vector<ChartSeries>& series);

/// Series rendered as CSV: one "x,<name>" block per series.
std::string series_to_csv(const std::vector<ChartSeries>& series);

}  // namespace modspace
