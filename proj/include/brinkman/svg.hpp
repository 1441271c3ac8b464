#pragma once

// Minimal standalone SVG line plots (linear or log-log axes). No external
// renderer, fixed number formatting, deterministic output: identical input
// gives byte-identical files.

#include <cmath>
#include <cstdio>
#include <ostream>
#include <string>
#include <vector>

#include "brinkman/common.hpp"

namespace brinkman {

struct PlotSeries {
    std::string name;
    std::vector<double> x;
    std::vector<double> y;
    std::string color = "#1f6fb2";
    bool dashed = false;
};

struct PlotOptions {
    std::string title;
    std::string x_label = "x";
    std::string y_label = "y";
    bool log_x = false;
    bool log_y = false;
    int width = 640;
    int height = 420;
};

namespace detail {

inline std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

}  // namespace detail

inline void write_svg(std::ostream& os, const std::vector<PlotSeries>& series,
                      const PlotOptions& opt) {
    auto tx = [&](double v) { return opt.log_x ? std::log10(v) : v; };
    auto ty = [&](double v) { return opt.log_y ? std::log10(v) : v; };

    double xmin = kInf, xmax = -kInf, ymin = kInf, ymax = -kInf;
    for (const auto& s : series)
        for (std::size_t k = 0; k < s.x.size(); ++k) {
            if ((opt.log_x && s.x[k] <= 0.0) || (opt.log_y && s.y[k] <= 0.0)) continue;
            xmin = std::min(xmin, tx(s.x[k]));
            xmax = std::max(xmax, tx(s.x[k]));
            ymin = std::min(ymin, ty(s.y[k]));
            ymax = std::max(ymax, ty(s.y[k]));
        }
    if (!(xmin <= xmax)) { xmin = 0.0; xmax = 1.0; }
    if (!(ymin <= ymax)) { ymin = 0.0; ymax = 1.0; }
    if (xmax - xmin < 1e-12) { xmin -= 0.5; xmax += 0.5; }
    if (ymax - ymin < 1e-12) { ymin -= 0.5; ymax += 0.5; }

    const double ml = 60, mr = 20, mt = 40, mb = 45;
    const double pw = opt.width - ml - mr, ph = opt.height - mt - mb;
    auto px = [&](double v) { return ml + (tx(v) - xmin) / (xmax - xmin) * pw; };
    auto py = [&](double v) { return mt + (ymax - ty(v)) / (ymax - ymin) * ph; };

    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << opt.width
       << "\" height=\"" << opt.height << "\" viewBox=\"0 0 " << opt.width << ' '
       << opt.height << "\">\n";
    os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    os << "<text x=\"" << opt.width / 2 << "\" y=\"22\" text-anchor=\"middle\" "
          "font-family=\"monospace\" font-size=\"14\">" << opt.title << "</text>\n";
    // frame
    os << "<rect x=\"" << detail::fmt(ml) << "\" y=\"" << detail::fmt(mt) << "\" width=\""
       << detail::fmt(pw) << "\" height=\"" << detail::fmt(ph)
       << "\" fill=\"none\" stroke=\"#444\"/>\n";
    // axis ticks (4 per axis, value labels in data coordinates)
    for (int k = 0; k <= 4; ++k) {
        double fx = xmin + (xmax - xmin) * k / 4.0;
        double fy = ymin + (ymax - ymin) * k / 4.0;
        double vx = opt.log_x ? std::pow(10.0, fx) : fx;
        double vy = opt.log_y ? std::pow(10.0, fy) : fy;
        double sx = ml + pw * k / 4.0;
        double sy = mt + ph - ph * k / 4.0;
        os << "<text x=\"" << detail::fmt(sx) << "\" y=\"" << detail::fmt(mt + ph + 16)
           << "\" text-anchor=\"middle\" font-family=\"monospace\" font-size=\"10\">"
           << detail::fmt(vx) << "</text>\n";
        os << "<text x=\"" << detail::fmt(ml - 6) << "\" y=\"" << detail::fmt(sy + 3)
           << "\" text-anchor=\"end\" font-family=\"monospace\" font-size=\"10\">"
           << detail::fmt(vy) << "</text>\n";
    }
    os << "<text x=\"" << opt.width / 2 << "\" y=\"" << opt.height - 8
       << "\" text-anchor=\"middle\" font-family=\"monospace\" font-size=\"12\">"
       << opt.x_label << "</text>\n";
    os << "<text x=\"14\" y=\"" << opt.height / 2
       << "\" text-anchor=\"middle\" font-family=\"monospace\" font-size=\"12\" "
          "transform=\"rotate(-90 14 " << opt.height / 2 << ")\">" << opt.y_label
       << "</text>\n";

    int legend_row = 0;
    for (const auto& s : series) {
        os << "<polyline fill=\"none\" stroke=\"" << s.color << "\" stroke-width=\"1.5\"";
        if (s.dashed) os << " stroke-dasharray=\"6 4\"";
        os << " points=\"";
        bool first = true;
        for (std::size_t k = 0; k < s.x.size(); ++k) {
            if ((opt.log_x && s.x[k] <= 0.0) || (opt.log_y && s.y[k] <= 0.0)) continue;
            if (!first) os << ' ';
            os << detail::fmt(px(s.x[k])) << ',' << detail::fmt(py(s.y[k]));
            first = false;
        }
        os << "\"/>\n";
        if (!s.dashed)
            for (std::size_t k = 0; k < s.x.size(); ++k) {
                if ((opt.log_x && s.x[k] <= 0.0) || (opt.log_y && s.y[k] <= 0.0)) continue;
                os << "<circle cx=\"" << detail::fmt(px(s.x[k])) << "\" cy=\""
                   << detail::fmt(py(s.y[k])) << "\" r=\"2.5\" fill=\"" << s.color
                   << "\"/>\n";
            }
        os << "<text x=\"" << detail::fmt(ml + 10) << "\" y=\""
           << detail::fmt(mt + 16 + 14 * legend_row)
           << "\" font-family=\"monospace\" font-size=\"11\" fill=\"" << s.color << "\">"
           << s.name << "</text>\n";
        ++legend_row;
    }
    os << "</svg>\n";
}

/// log-log convergence plot with a reference envelope c * param^rate drawn
/// through the first data point.
inline void write_rate_plot(std::ostream& os, const PlotSeries& data, double rate,
                            const PlotOptions& base) {
    PlotOptions opt = base;
    opt.log_x = true;
    opt.log_y = true;
    std::vector<PlotSeries> series = {data};
    PlotSeries env;
    env.name = "envelope ~ x^" + detail::fmt(rate);
    env.color = "#b24a1f";
    env.dashed = true;
    double c = 0.0;
    for (std::size_t k = 0; k < data.x.size(); ++k)
        if (data.x[k] > 0.0 && data.y[k] > 0.0) {
            c = std::max(c, data.y[k] / std::pow(data.x[k], rate));
        }
    for (double x : data.x)
        if (x > 0.0) {
            env.x.push_back(x);
            env.y.push_back(c * std::pow(x, rate));
        }
    series.push_back(env);
    write_svg(os, series, opt);
}

}  // namespace brinkman
