#pragma once

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include "hywave/errors.hpp"

namespace hywave {

namespace detail {

// Small fixed color ramp (dark blue -> teal -> yellow), linear between stops.
inline std::string ramp_color(double t) {
    static const double stops[5][3] = {{68, 1, 84},     {59, 82, 139},   {33, 145, 140},
                                       {94, 201, 98},   {253, 231, 37}};
    t = std::clamp(t, 0.0, 1.0) * 4.0;
    int i = std::min(static_cast<int>(t), 3);
    double f = t - i;
    int r = static_cast<int>(stops[i][0] + f * (stops[i + 1][0] - stops[i][0]));
    int g = static_cast<int>(stops[i][1] + f * (stops[i + 1][1] - stops[i][1]));
    int b = static_cast<int>(stops[i][2] + f * (stops[i + 1][2] - stops[i][2]));
    std::ostringstream ss;
    ss << "rgb(" << r << "," << g << "," << b << ")";
    return ss.str();
}

inline std::string fmt_num(double v) {
    std::ostringstream ss;
    ss.precision(4);
    ss << v;
    return ss.str();
}

} // namespace detail

// Cell-grid heatmap (rows = y axis bins bottom-up, cols = x axis bins left-right).
inline std::string svg_heatmap(const std::vector<std::vector<double>>& grid,
                               const std::string& title, const std::string& x_label,
                               const std::string& y_label, double x0, double dx, double y0,
                               double dy) {
    if (grid.empty() || grid[0].empty()) fail(errc::validation, "svg_heatmap: empty grid");
    std::size_t ny = grid.size(), nx = grid[0].size();
    double vmax = 0.0;
    for (const auto& row : grid)
        for (double v : row) vmax = std::max(vmax, v);
    const double cw = std::max(12.0, 560.0 / nx), ch = std::max(12.0, 360.0 / ny);
    const double ml = 70, mb = 50, mt = 40, mr = 20;
    double W = ml + nx * cw + mr, H = mt + ny * ch + mb;
    std::ostringstream s;
    s << "<svg xmlns='http://www.w3.org/2000/svg' width='" << W << "' height='" << H << "'>\n";
    s << "<rect width='100%' height='100%' fill='white'/>\n";
    s << "<text x='" << W / 2 << "' y='22' text-anchor='middle' font-size='15'>" << title
      << "</text>\n";
    for (std::size_t iy = 0; iy < ny; ++iy) {
        for (std::size_t ix = 0; ix < nx; ++ix) {
            double v = grid[iy][ix];
            double t = vmax > 0 ? v / vmax : 0.0;
            double px = ml + ix * cw;
            double py = mt + (ny - 1 - iy) * ch;
            s << "<rect x='" << px << "' y='" << py << "' width='" << cw << "' height='" << ch
              << "' fill='" << (v > 0 ? detail::ramp_color(t) : std::string("#f4f4f4"))
              << "' stroke='#ddd' stroke-width='0.5'/>\n";
        }
    }
    for (std::size_t ix = 0; ix <= nx; ix += std::max<std::size_t>(1, nx / 8)) {
        double px = ml + ix * cw;
        s << "<text x='" << px << "' y='" << mt + ny * ch + 16
          << "' text-anchor='middle' font-size='10'>" << detail::fmt_num(x0 + ix * dx)
          << "</text>\n";
    }
    for (std::size_t iy = 0; iy <= ny; iy += std::max<std::size_t>(1, ny / 8)) {
        double py = mt + (ny - iy) * ch;
        s << "<text x='" << ml - 6 << "' y='" << py + 4
          << "' text-anchor='end' font-size='10'>" << detail::fmt_num(y0 + iy * dy)
          << "</text>\n";
    }
    s << "<text x='" << ml + nx * cw / 2 << "' y='" << H - 10
      << "' text-anchor='middle' font-size='12'>" << x_label << "</text>\n";
    s << "<text x='16' y='" << mt + ny * ch / 2 << "' text-anchor='middle' font-size='12' "
      << "transform='rotate(-90 16 " << mt + ny * ch / 2 << ")'>" << y_label << "</text>\n";
    s << "</svg>\n";
    return s.str();
}

// Stacked strip chart of uniformly sampled channels.
inline std::string svg_strips(const std::vector<std::string>& names,
                              const std::vector<const std::vector<double>*>& series, double dt,
                              const std::string& title) {
    if (names.size() != series.size() || names.empty())
        fail(errc::validation, "svg_strips: mismatched channels");
    const double W = 760, strip_h = 90, ml = 60, mr = 15, mt = 40;
    double H = mt + names.size() * strip_h + 20;
    std::ostringstream s;
    s << "<svg xmlns='http://www.w3.org/2000/svg' width='" << W << "' height='" << H << "'>\n";
    s << "<rect width='100%' height='100%' fill='white'/>\n";
    s << "<text x='" << W / 2 << "' y='22' text-anchor='middle' font-size='15'>" << title
      << "</text>\n";
    for (std::size_t c = 0; c < names.size(); ++c) {
        const auto& v = *series[c];
        if (v.size() < 2) continue;
        double lo = v[0], hi = v[0];
        for (double x : v) {
            lo = std::min(lo, x);
            hi = std::max(hi, x);
        }
        if (hi - lo < 1e-12) {
            hi += 0.5;
            lo -= 0.5;
        }
        double top = mt + c * strip_h + 8, bot = top + strip_h - 22;
        s << "<text x='" << ml << "' y='" << top - 1 << "' font-size='11'>" << names[c]
          << "  [" << detail::fmt_num(lo) << ", " << detail::fmt_num(hi) << "]</text>\n";
        s << "<polyline fill='none' stroke='#2060a0' stroke-width='1' points='";
        std::size_t stride = std::max<std::size_t>(1, v.size() / 1500);
        for (std::size_t i = 0; i < v.size(); i += stride) {
            double px = ml + (W - ml - mr) * static_cast<double>(i) / (v.size() - 1);
            double py = bot - (bot - top) * (v[i] - lo) / (hi - lo);
            s << px << ',' << py << ' ';
        }
        s << "'/>\n";
    }
    s << "<text x='" << W / 2 << "' y='" << H - 6 << "' text-anchor='middle' font-size='11'>t (0 to "
      << detail::fmt_num(dt * (series[0]->size() - 1)) << " s)</text>\n";
    s << "</svg>\n";
    return s.str();
}

} // namespace hywave
