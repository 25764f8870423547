#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace cilc {

/// One polyline of a chart. Points are (x, y) pairs.
struct SvgSeries {
    std::string name;
    std::vector<std::pair<double, double>> points;
};

struct SvgChartOptions {
    std::string title;
    std::string x_label;
    std::string y_label;
    bool log_y = false;     // log10 axis; non-positive values are dropped
    bool equal_axes = false; // same scale on both axes (locus plots)
};

/// Minimal self-contained line chart (no external assets). Plots exist to
/// mirror the paper-style figures; the CSV twin is the record.
void write_svg_chart(const std::filesystem::path& file,
                     const std::vector<SvgSeries>& series,
                     const SvgChartOptions& options);

} // namespace cilc
