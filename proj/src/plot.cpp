#include "pacer/plot.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include <fmt/format.h>

namespace pacer {

namespace {

constexpr double kWidth = 900, kPanel = 260, kMarginL = 70, kMarginR = 20, kMarginT = 30,
                 kGap = 60;

struct Axis {
    double lo, hi;
    double map(double v, double a, double b) const {
        return hi > lo ? a + (v - lo) / (hi - lo) * (b - a) : a;
    }
};

double nice_step(double range) {
    if (!(range > 0)) return 1.0;
    const double raw = range / 5.0;
    const double mag = std::pow(10.0, std::floor(std::log10(raw)));
    for (double m : {1.0, 2.0, 5.0, 10.0})
        if (raw <= m * mag) return m * mag;
    return 10.0 * mag;
}

std::string polyline(const std::vector<double>& xs, const std::vector<double>& ys, Axis ax,
                     Axis ay, double top, const char* color) {
    std::string pts;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double x = ax.map(xs[i], kMarginL, kWidth - kMarginR);
        const double y = ay.map(ys[i], top + kPanel, top);
        pts += fmt::format("{:.2f},{:.2f} ", x, y);
    }
    return fmt::format(
        "<polyline fill=\"none\" stroke=\"{}\" stroke-width=\"1.5\" points=\"{}\"/>\n", color,
        pts);
}

std::string panel(const char* label, const std::vector<const std::vector<double>*>& xs,
                  const std::vector<const std::vector<double>*>& ys, Axis ax, double top) {
    double lo = 0.0, hi = 0.0;
    for (const auto* y : ys)
        for (double v : *y) hi = std::max(hi, v);
    hi = hi > 0 ? hi * 1.05 : 1.0;
    const Axis ay{lo, hi};
    std::string out = fmt::format(
        "<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"none\" stroke=\"#444\"/>\n",
        kMarginL, top, kWidth - kMarginL - kMarginR, kPanel);
    const double step = nice_step(hi - lo);
    for (double v = 0.0; v <= hi; v += step) {
        const double y = ay.map(v, top + kPanel, top);
        out += fmt::format(
            "<line x1=\"{}\" y1=\"{:.2f}\" x2=\"{}\" y2=\"{:.2f}\" stroke=\"#ddd\"/>\n"
            "<text x=\"{}\" y=\"{:.2f}\" font-size=\"11\" text-anchor=\"end\">{:g}</text>\n",
            kMarginL, y, kWidth - kMarginR, y, kMarginL - 6, y + 4, v);
    }
    out += fmt::format(
        "<text x=\"16\" y=\"{:.2f}\" font-size=\"13\" transform=\"rotate(-90 16 {:.2f})\" "
        "text-anchor=\"middle\">{}</text>\n",
        top + kPanel / 2, top + kPanel / 2, label);
    const char* colors[] = {"#1f77b4", "#ff7f0e"};
    for (std::size_t i = 0; i < xs.size(); ++i) out += polyline(*xs[i], *ys[i], ax, ay, top, colors[i]);
    return out;
}

}  // namespace

std::string render_plan_svg(const PlotSeries& plan, const std::optional<PlotSeries>& baseline) {
    double x_hi = 0.0;
    for (double d : plan.distance) x_hi = std::max(x_hi, d);
    if (baseline)
        for (double d : baseline->distance) x_hi = std::max(x_hi, d);
    const Axis ax{0.0, x_hi > 0 ? x_hi : 1.0};

    std::vector<const std::vector<double>*> xs{&plan.distance}, p{&plan.power},
        v{&plan.velocity};
    if (baseline) {
        xs.push_back(&baseline->distance);
        p.push_back(&baseline->power);
        v.push_back(&baseline->velocity);
    }
    const double height = kMarginT + 2 * kPanel + kGap + 50;
    std::string out = fmt::format(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{}\" height=\"{}\" "
        "font-family=\"sans-serif\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n",
        kWidth, height);
    out += panel("power (W)", xs, p, ax, kMarginT);
    out += panel("velocity (m/s)", xs, v, ax, kMarginT + kPanel + kGap);

    const double axis_y = kMarginT + 2 * kPanel + kGap;
    const double step = nice_step(ax.hi);
    for (double d = 0.0; d <= ax.hi + 1e-9; d += step) {
        const double x = ax.map(d, kMarginL, kWidth - kMarginR);
        out += fmt::format(
            "<text x=\"{:.2f}\" y=\"{}\" font-size=\"11\" text-anchor=\"middle\">{:g}</text>\n", x,
            axis_y + 16, d);
    }
    out += fmt::format(
        "<text x=\"{}\" y=\"{}\" font-size=\"13\" text-anchor=\"middle\">distance (m)</text>\n",
        (kMarginL + kWidth - kMarginR) / 2, axis_y + 36);
    out += fmt::format("<text x=\"{}\" y=\"18\" font-size=\"12\" fill=\"#1f77b4\">plan</text>\n",
                       kMarginL);
    if (baseline)
        out += fmt::format(
            "<text x=\"{}\" y=\"18\" font-size=\"12\" fill=\"#ff7f0e\">baseline</text>\n",
            kMarginL + 50);
    out += "</svg>\n";
    return out;
}

}  // namespace pacer
