#include "fdrecon/svg_plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <ostream>

#include "fdrecon/errors.hpp"

namespace fdrecon {
namespace {

constexpr double kWidth = 840.0;
constexpr double kHeight = 520.0;
constexpr double kMargin = 40.0;

struct Mapper {
    double x0, x1, y0, y1;
    double px(double x) const {
        return kMargin + (x - x0) / (x1 - x0) * (kWidth - 2 * kMargin);
    }
    double py(double y) const {
        return kHeight - kMargin - (y - y0) / (y1 - y0) * (kHeight - 2 * kMargin);
    }
};

std::string coord(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    return buf;
}

/// Emit one polyline per contiguous finite run of the series.
void emit_series(std::ostream& out, const Mapper& map, const Grid& grid,
                 const std::vector<double>& values, const char* style) {
    std::string points;
    std::size_t run = 0;
    auto flush = [&]() {
        if (run >= 2)
            out << "<polyline fill=\"none\" " << style << " points=\"" << points << "\"/>\n";
        else if (run == 1)
            out << "<circle " << style << " r=\"1.5\" cx=\""
                << points.substr(0, points.find(',')) << "\" cy=\""
                << points.substr(points.find(',') + 1, points.find(' ') - points.find(',') - 1)
                << "\"/>\n";
        points.clear();
        run = 0;
    };
    for (std::size_t t = 0; t < grid.size(); ++t) {
        if (!std::isfinite(values[t])) {
            flush();
            continue;
        }
        points += coord(map.px(grid.point(t)));
        points += ',';
        points += coord(map.py(values[t]));
        points += ' ';
        ++run;
    }
    flush();
}

}  // namespace

void write_plot_svg(std::ostream& out, const FunctionalSample& sample,
                    const std::vector<ReconstructionResult>& reconstructions,
                    const FunctionalSample* truth) {
    const Grid& g = sample.grid();
    double ymin = std::numeric_limits<double>::infinity();
    double ymax = -std::numeric_limits<double>::infinity();
    auto widen = [&](double v) {
        if (!std::isfinite(v)) return;
        ymin = std::min(ymin, v);
        ymax = std::max(ymax, v);
    };
    for (std::size_t i = 0; i < sample.size(); ++i)
        for (std::size_t t = 0; t < g.size(); ++t)
            if (sample.curve(i).observed(t)) widen(sample.curve(i).value(t));
    for (const auto& r : reconstructions)
        for (double v : r.filled_values) widen(v);
    if (truth)
        for (const auto& r : reconstructions)
            for (std::size_t t = 0; t < g.size(); ++t)
                if (truth->curve(r.focal).observed(t)) widen(truth->curve(r.focal).value(t));
    if (!std::isfinite(ymin)) {
        ymin = 0.0;
        ymax = 1.0;
    }
    if (ymin == ymax) {
        ymin -= 0.5;
        ymax += 0.5;
    }
    const double pad = 0.05 * (ymax - ymin);
    const Mapper map{g.point(0), g.point(g.size() - 1), ymin - pad, ymax + pad};

    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\""
        << kHeight << "\" viewBox=\"0 0 " << kWidth << " " << kHeight << "\">\n";
    out << "<rect width=\"" << kWidth << "\" height=\"" << kHeight << "\" fill=\"white\"/>\n";
    out << "<rect x=\"" << kMargin << "\" y=\"" << kMargin << "\" width=\"" << kWidth - 2 * kMargin
        << "\" height=\"" << kHeight - 2 * kMargin
        << "\" fill=\"none\" stroke=\"#cccccc\" stroke-width=\"1\"/>\n";

    for (std::size_t i = 0; i < sample.size(); ++i)
        emit_series(out, map, g, sample.curve(i).values(),
                    "stroke=\"#b0b0b0\" stroke-width=\"0.6\"");
    if (truth) {
        for (const auto& r : reconstructions)
            emit_series(out, map, g, truth->curve(r.focal).values(),
                        "stroke=\"#2b6cb0\" stroke-width=\"1.4\"");
    }
    for (const auto& r : reconstructions)
        emit_series(out, map, g, r.filled_values,
                    "stroke=\"#cc2222\" stroke-width=\"1.6\" stroke-dasharray=\"5,3\"");
    for (const auto& r : reconstructions)
        emit_series(out, map, g, sample.curve(r.focal).values(),
                    "stroke=\"#222222\" stroke-width=\"1.6\"");
    out << "</svg>\n";
}

void write_plot_svg_file(const std::string& path, const FunctionalSample& sample,
                         const std::vector<ReconstructionResult>& reconstructions,
                         const FunctionalSample* truth) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open for writing: " + path);
    write_plot_svg(out, sample, reconstructions, truth);
    out.flush();
    if (!out) throw IoError("write failed: " + path);
}

}  // namespace fdrecon
