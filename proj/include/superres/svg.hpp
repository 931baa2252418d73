#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

namespace superres {

/// Minimal self-contained SVG charts; no plotting dependency on purpose so
/// sweep outputs can be inspected anywhere.
namespace svg {

struct Series {
    std::string label;
    std::string color;
    std::vector<double> x, y;
};

namespace detail {

inline std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

struct Mapper {
    double x_min, x_max, y_min, y_max;
    bool log_x, log_y;
    double width = 640.0, height = 420.0, margin = 56.0;

    double tx(double x) const {
        const double a = log_x ? std::log10(x) : x;
        const double lo = log_x ? std::log10(x_min) : x_min;
        const double hi = log_x ? std::log10(x_max) : x_max;
        return margin + (a - lo) / std::max(1e-300, hi - lo) * (width - 2 * margin);
    }
    double ty(double y) const {
        const double a = log_y ? std::log10(y) : y;
        const double lo = log_y ? std::log10(y_min) : y_min;
        const double hi = log_y ? std::log10(y_max) : y_max;
        return height - margin - (a - lo) / std::max(1e-300, hi - lo) * (height - 2 * margin);
    }
};

}  // namespace detail

/// Line chart; log axes expect strictly positive data.
inline std::string line_chart(const std::vector<Series>& series, const std::string& title,
                              const std::string& x_label, const std::string& y_label,
                              bool log_x = false, bool log_y = false) {
    double x_min = 1e300, x_max = -1e300, y_min = 1e300, y_max = -1e300;
    for (const auto& s : series) {
        for (double v : s.x) { x_min = std::min(x_min, v); x_max = std::max(x_max, v); }
        for (double v : s.y) { y_min = std::min(y_min, v); y_max = std::max(y_max, v); }
    }
    if (x_min > x_max) { x_min = 0; x_max = 1; y_min = 0; y_max = 1; }
    if (x_min == x_max) { x_max = x_min + 1; }
    if (y_min == y_max) { y_max = y_min + 1; }

    detail::Mapper m{x_min, x_max, y_min, y_max, log_x, log_y};
    std::string out;
    out += "<svg xmlns='http://www.w3.org/2000/svg' width='640' height='420' "
           "viewBox='0 0 640 420'>\n";
    out += "<rect width='640' height='420' fill='white'/>\n";
    out += "<text x='320' y='24' text-anchor='middle' font-size='15'>" + title + "</text>\n";
    out += "<line x1='56' y1='364' x2='584' y2='364' stroke='black'/>\n";
    out += "<line x1='56' y1='56' x2='56' y2='364' stroke='black'/>\n";
    out += "<text x='320' y='404' text-anchor='middle' font-size='12'>" + x_label + "</text>\n";
    out += "<text x='16' y='210' text-anchor='middle' font-size='12' "
           "transform='rotate(-90 16 210)'>" + y_label + "</text>\n";
    out += "<text x='52' y='376' text-anchor='end' font-size='10'>" + detail::fmt(x_min) + "</text>\n";
    out += "<text x='584' y='376' text-anchor='end' font-size='10'>" + detail::fmt(x_max) + "</text>\n";
    out += "<text x='52' y='364' text-anchor='end' font-size='10'>" + detail::fmt(y_min) + "</text>\n";
    out += "<text x='52' y='60' text-anchor='end' font-size='10'>" + detail::fmt(y_max) + "</text>\n";

    double legend_y = 60.0;
    for (const auto& s : series) {
        std::string pts;
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            pts += detail::fmt(m.tx(s.x[i])) + "," + detail::fmt(m.ty(s.y[i])) + " ";
        }
        out += "<polyline fill='none' stroke='" + s.color + "' stroke-width='1.5' points='" +
               pts + "'/>\n";
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            out += "<circle cx='" + detail::fmt(m.tx(s.x[i])) + "' cy='" +
                   detail::fmt(m.ty(s.y[i])) + "' r='2.5' fill='" + s.color + "'/>\n";
        }
        out += "<text x='470' y='" + detail::fmt(legend_y) + "' font-size='11' fill='" + s.color +
               "'>" + s.label + "</text>\n";
        legend_y += 14.0;
    }
    out += "</svg>\n";
    return out;
}

/// Stem chart for spike trains (location on [0,1) vs amplitude modulus).
inline std::string stem_chart(const std::vector<Series>& series, const std::string& title) {
    double y_max = 0.0;
    for (const auto& s : series) {
        for (double v : s.y) y_max = std::max(y_max, v);
    }
    if (y_max == 0.0) y_max = 1.0;
    detail::Mapper m{0.0, 1.0, 0.0, y_max, false, false};
    std::string out;
    out += "<svg xmlns='http://www.w3.org/2000/svg' width='640' height='420' "
           "viewBox='0 0 640 420'>\n";
    out += "<rect width='640' height='420' fill='white'/>\n";
    out += "<text x='320' y='24' text-anchor='middle' font-size='15'>" + title + "</text>\n";
    out += "<line x1='56' y1='364' x2='584' y2='364' stroke='black'/>\n";
    out += "<text x='56' y='380' font-size='10'>0</text>\n";
    out += "<text x='576' y='380' font-size='10'>1</text>\n";
    double legend_y = 60.0;
    const double base = m.ty(0.0);
    for (const auto& s : series) {
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            const double px = m.tx(s.x[i]);
            const double py = m.ty(s.y[i]);
            out += "<line x1='" + detail::fmt(px) + "' y1='" + detail::fmt(base) + "' x2='" +
                   detail::fmt(px) + "' y2='" + detail::fmt(py) + "' stroke='" + s.color +
                   "' stroke-width='1.5'/>\n";
            out += "<circle cx='" + detail::fmt(px) + "' cy='" + detail::fmt(py) +
                   "' r='3' fill='none' stroke='" + s.color + "'/>\n";
        }
        out += "<text x='470' y='" + detail::fmt(legend_y) + "' font-size='11' fill='" + s.color +
               "'>" + s.label + "</text>\n";
        legend_y += 14.0;
    }
    out += "</svg>\n";
    return out;
}

}  // namespace svg
}  // namespace superres
