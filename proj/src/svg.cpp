#include "cilc/svg.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>

#include "cilc/csv.hpp"
#include "cilc/errors.hpp"

namespace cilc {

namespace {

constexpr int kWidth = 640;
constexpr int kHeight = 440;
constexpr int kMarginLeft = 70;
constexpr int kMarginRight = 20;
constexpr int kMarginTop = 40;
constexpr int kMarginBottom = 50;

const char* kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
                         "#9467bd", "#8c564b", "#17becf", "#7f7f7f"};

struct Range {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    void grow(double v) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
};

} // namespace

void write_svg_chart(const std::filesystem::path& file,
                     const std::vector<SvgSeries>& series,
                     const SvgChartOptions& options) {
    Range xr;
    Range yr;
    for (const auto& s : series) {
        for (const auto& [x, y] : s.points) {
            if (options.log_y && !(y > 0.0)) continue;
            xr.grow(x);
            yr.grow(options.log_y ? std::log10(y) : y);
        }
    }
    if (!(xr.lo <= xr.hi)) { // nothing plottable
        xr = {0.0, 1.0};
        yr = {0.0, 1.0};
    }
    if (xr.hi == xr.lo) xr.hi = xr.lo + 1.0;
    if (yr.hi == yr.lo) yr.hi = yr.lo + 1.0;

    if (options.equal_axes) {
        const double span = std::max(xr.hi - xr.lo, yr.hi - yr.lo);
        const double xc = 0.5 * (xr.lo + xr.hi);
        const double yc = 0.5 * (yr.lo + yr.hi);
        xr = {xc - span / 2, xc + span / 2};
        yr = {yc - span / 2, yc + span / 2};
    }

    const double plot_w = kWidth - kMarginLeft - kMarginRight;
    const double plot_h = kHeight - kMarginTop - kMarginBottom;
    const auto px = [&](double x) {
        return kMarginLeft + (x - xr.lo) / (xr.hi - xr.lo) * plot_w;
    };
    const auto py = [&](double y) {
        const double v = options.log_y ? std::log10(y) : y;
        return kMarginTop + (yr.hi - v) / (yr.hi - yr.lo) * plot_h;
    };

    std::ofstream out(file);
    if (!out) throw Error("cannot open SVG file for writing: " + file.string());
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth
        << "\" height=\"" << kHeight << "\" viewBox=\"0 0 " << kWidth << ' '
        << kHeight << "\">\n";
    out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    out << "<text x=\"" << kWidth / 2 << "\" y=\"24\" text-anchor=\"middle\" "
        << "font-family=\"sans-serif\" font-size=\"16\">" << options.title
        << "</text>\n";

    // Axes box and ticks.
    out << "<rect x=\"" << kMarginLeft << "\" y=\"" << kMarginTop
        << "\" width=\"" << plot_w << "\" height=\"" << plot_h
        << "\" fill=\"none\" stroke=\"black\"/>\n";
    for (int k = 0; k <= 4; ++k) {
        const double fx = xr.lo + (xr.hi - xr.lo) * k / 4.0;
        const double fy = yr.lo + (yr.hi - yr.lo) * k / 4.0;
        out << "<text x=\"" << px(fx) << "\" y=\"" << kHeight - kMarginBottom + 18
            << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
               "font-size=\"11\">"
            << format_double(std::round(fx * 1e4) / 1e4) << "</text>\n";
        const double label = options.log_y ? std::pow(10.0, fy) : fy;
        out << "<text x=\"" << kMarginLeft - 8 << "\" y=\""
            << kMarginTop + (yr.hi - fy) / (yr.hi - yr.lo) * plot_h + 4
            << "\" text-anchor=\"end\" font-family=\"sans-serif\" "
               "font-size=\"11\">"
            << format_double(std::round(label * 1e4) / 1e4) << "</text>\n";
    }
    out << "<text x=\"" << kMarginLeft + plot_w / 2 << "\" y=\""
        << kHeight - 12
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
           "font-size=\"13\">"
        << options.x_label << "</text>\n";
    out << "<text x=\"18\" y=\"" << kMarginTop + plot_h / 2
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
           "font-size=\"13\" transform=\"rotate(-90 18 "
        << kMarginTop + plot_h / 2 << ")\">" << options.y_label << "</text>\n";

    for (size_t si = 0; si < series.size(); ++si) {
        const char* color = kColors[si % (sizeof(kColors) / sizeof(kColors[0]))];
        out << "<polyline fill=\"none\" stroke=\"" << color
            << "\" stroke-width=\"1.5\" points=\"";
        for (const auto& [x, y] : series[si].points) {
            if (options.log_y && !(y > 0.0)) continue;
            out << px(x) << ',' << py(y) << ' ';
        }
        out << "\"/>\n";
        // Legend entry.
        const double ly = kMarginTop + 16 + 16 * static_cast<double>(si);
        out << "<line x1=\"" << kMarginLeft + 10 << "\" y1=\"" << ly
            << "\" x2=\"" << kMarginLeft + 34 << "\" y2=\"" << ly
            << "\" stroke=\"" << color << "\" stroke-width=\"1.5\"/>\n";
        out << "<text x=\"" << kMarginLeft + 40 << "\" y=\"" << ly + 4
            << "\" font-family=\"sans-serif\" font-size=\"12\">"
            << series[si].name << "</text>\n";
    }
    out << "</svg>\n";
}

} // namespace cilc
