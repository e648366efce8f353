#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <string>
#include <vector>

#include "forage/csv.hpp"

namespace forage {

// Self-contained SVG renderings of the two figure layouts the harness
// emits: a bar chart of condition means and 4-point rank curves, both with
// 95% CI whiskers. No external assets; coordinates fixed to 2 decimals so
// output is byte-stable.

struct BarDatum {
    std::string label;
    double mean = 0.0;
    double ci = 0.0;
};

struct RankSeries {
    std::string label;
    std::array<double, 4> means{};
    std::array<double, 4> ci{};
};

namespace svgdetail {

inline constexpr const char* kPalette[8] = {"#4477aa", "#ee6677", "#228833", "#ccbb44",
                                            "#66ccee", "#aa3377", "#bbbbbb", "#222222"};

inline std::string esc(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
        case '&': out += "&amp;"; break;
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        default: out += c;
        }
    }
    return out;
}

inline std::string num(double v) { return fmt_fixed(v, 2); }

inline void line(std::string& out, double x1, double y1, double x2, double y2,
                 const std::string& stroke, double width = 1.0) {
    out += "<line x1=\"" + num(x1) + "\" y1=\"" + num(y1) + "\" x2=\"" + num(x2) + "\" y2=\"" +
           num(y2) + "\" stroke=\"" + stroke + "\" stroke-width=\"" + num(width) + "\"/>\n";
}

inline void text(std::string& out, double x, double y, const std::string& s, int size,
                 const std::string& anchor) {
    out += "<text x=\"" + num(x) + "\" y=\"" + num(y) + "\" font-family=\"sans-serif\" font-size=\"" +
           std::to_string(size) + "\" text-anchor=\"" + anchor + "\">" + esc(s) + "</text>\n";
}

inline void whisker(std::string& out, double x, double y_lo, double y_hi, double cap) {
    line(out, x, y_lo, x, y_hi, "#333333");
    line(out, x - cap, y_lo, x + cap, y_lo, "#333333");
    line(out, x - cap, y_hi, x + cap, y_hi, "#333333");
}

// 5 round-valued axis ticks covering [0, hi].
inline std::vector<double> ticks(double hi) {
    if (hi <= 0.0) hi = 1.0;
    double raw = hi / 4.0;
    double mag = std::pow(10.0, std::floor(std::log10(raw)));
    double step = std::ceil(raw / mag) * mag;
    std::vector<double> t;
    for (double v = 0.0; v <= hi + step * 0.5; v += step) t.push_back(v);
    return t;
}

} // namespace svgdetail

inline std::string render_bar_chart(const std::vector<BarDatum>& bars, const std::string& title,
                                    const std::string& y_label) {
    using namespace svgdetail;
    const double width = 800, height = 500;
    const double left = 80, right = 30, top = 50, bottom = 90;
    const double plot_w = width - left - right, plot_h = height - top - bottom;

    double hi = 1.0;
    for (const auto& b : bars) hi = std::max(hi, b.mean + b.ci);
    auto tick_vals = ticks(hi * 1.05);
    double y_max = tick_vals.back();
    auto y_of = [&](double v) { return top + plot_h * (1.0 - v / y_max); };

    std::string out = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(width) +
                      "\" height=\"" + num(height) + "\" viewBox=\"0 0 " + num(width) + " " +
                      num(height) + "\">\n";
    out += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    text(out, width / 2, 28, title, 16, "middle");

    for (double tv : tick_vals) {
        double y = y_of(tv);
        line(out, left, y, width - right, y, "#dddddd");
        text(out, left - 8, y + 4, fmt_double(tv), 11, "end");
    }
    line(out, left, top, left, top + plot_h, "#333333");
    line(out, left, top + plot_h, width - right, top + plot_h, "#333333");
    text(out, 20, top + plot_h / 2, y_label, 12, "middle");

    const double n = static_cast<double>(bars.size());
    const double slot = plot_w / std::max(n, 1.0);
    const double bar_w = slot * 0.6;
    for (std::size_t i = 0; i < bars.size(); ++i) {
        double cx = left + slot * (static_cast<double>(i) + 0.5);
        double y = y_of(bars[i].mean);
        out += "<rect x=\"" + num(cx - bar_w / 2) + "\" y=\"" + num(y) + "\" width=\"" +
               num(bar_w) + "\" height=\"" + num(top + plot_h - y) + "\" fill=\"" +
               kPalette[i % 8] + "\"/>\n";
        if (bars[i].ci > 0.0)
            whisker(out, cx, y_of(bars[i].mean + bars[i].ci), y_of(bars[i].mean - bars[i].ci),
                    bar_w * 0.2);
        text(out, cx, top + plot_h + 16, bars[i].label, 11, "middle");
        text(out, cx, y - 6, fmt_fixed(bars[i].mean, 2), 10, "middle");
    }
    out += "</svg>\n";
    return out;
}

inline std::string render_rank_chart(const std::vector<RankSeries>& series,
                                     const std::string& title) {
    using namespace svgdetail;
    const double width = 800, height = 500;
    const double left = 80, right = 180, top = 50, bottom = 70;
    const double plot_w = width - left - right, plot_h = height - top - bottom;

    double hi = 1.0;
    for (const auto& s : series)
        for (int r = 0; r < 4; ++r)
            hi = std::max(hi, s.means[static_cast<std::size_t>(r)] + s.ci[static_cast<std::size_t>(r)]);
    auto tick_vals = ticks(hi * 1.05);
    double y_max = tick_vals.back();
    auto y_of = [&](double v) { return top + plot_h * (1.0 - v / y_max); };
    auto x_of = [&](int rank) { return left + plot_w * (static_cast<double>(rank) / 3.0); };

    std::string out = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(width) +
                      "\" height=\"" + num(height) + "\" viewBox=\"0 0 " + num(width) + " " +
                      num(height) + "\">\n";
    out += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    text(out, width / 2, 28, title, 16, "middle");

    for (double tv : tick_vals) {
        double y = y_of(tv);
        line(out, left, y, width - right, y, "#dddddd");
        text(out, left - 8, y + 4, fmt_double(tv), 11, "end");
    }
    line(out, left, top, left, top + plot_h, "#333333");
    line(out, left, top + plot_h, width - right, top + plot_h, "#333333");
    for (int r = 0; r < 4; ++r)
        text(out, x_of(r), top + plot_h + 20, "rank " + std::to_string(r + 1), 11, "middle");
    text(out, left + plot_w / 2, height - 24, "agents ranked by food collected", 12, "middle");

    for (std::size_t s = 0; s < series.size(); ++s) {
        const char* color = kPalette[s % 8];
        std::string pts;
        for (int r = 0; r < 4; ++r) {
            pts += (r ? " " : "") + num(x_of(r)) + "," +
                   num(y_of(series[s].means[static_cast<std::size_t>(r)]));
        }
        out += "<polyline points=\"" + pts + "\" fill=\"none\" stroke=\"" + color +
               "\" stroke-width=\"2\"/>\n";
        for (int r = 0; r < 4; ++r) {
            double m = series[s].means[static_cast<std::size_t>(r)];
            double ci = series[s].ci[static_cast<std::size_t>(r)];
            out += "<circle cx=\"" + num(x_of(r)) + "\" cy=\"" + num(y_of(m)) +
                   "\" r=\"3\" fill=\"" + color + "\"/>\n";
            if (ci > 0.0) whisker(out, x_of(r), y_of(m + ci), y_of(m - ci), 4.0);
        }
        double ly = top + 16 + 18 * static_cast<double>(s);
        line(out, width - right + 10, ly - 4, width - right + 34, ly - 4, color, 2.0);
        text(out, width - right + 40, ly, series[s].label, 11, "start");
    }
    out += "</svg>\n";
    return out;
}

} // namespace forage
