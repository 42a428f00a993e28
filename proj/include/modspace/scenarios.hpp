#pragma once

#include <string>
#include <vector>

#include "modspace/json_io.hpp"
#include "modspace/svg.hpp"

namespace modspace {

struct ScenarioResult {
    std::string name;
    bool pass = false;
    std::string detail;               // one-line summary
    json data;                        // metrics for the JSON report
    std::vector<ChartSeries> series;  // trend data for CSV/SVG output
};

/// Runs one reproduction scenario. The config carries a "scenario" key naming
/// the check plus its parameters (seeds, tolerances, sizes).
ScenarioResult run_scenario(const json& config);

/// Vertex ids of a coordinate graph lying on coord[axis] == value.
std::vector<int> side_ids(const MetricGraph& g, int axis, double value);

/// Monotone crossing family across a grid-like space along the given axis
/// (axis 0: left->right, axis 1: bottom->top).
CurveFamily axis_crossing_family(const MetricGraph& g, int axis);

}  // namespace modspace
