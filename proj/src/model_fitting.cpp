#include "pacer/model_fitting.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>
#include <string>

namespace pacer {

namespace {

constexpr double kAllOutWindow = 180.0;
constexpr double kCpWindow = 30.0;
constexpr double kCp4Duration = 240.0;

template <class F>
double held_integral(const std::vector<TraceSample>& s, double a, double b, F&& f) {
    double sum = 0.0;
    for (std::size_t i = 0; i + 1 < s.size(); ++i) {
        const double lo = std::max(a, s[i].t);
        const double hi = std::min(b, s[i + 1].t);
        if (hi > lo) sum += f(s[i].p) * (hi - lo);
    }
    return sum;
}

FitDiagnostics diagnostics(std::span<const double> y, std::span<const double> fitted) {
    FitDiagnostics d;
    d.n_points = y.size();
    double mean = 0.0;
    for (double v : y) mean += v;
    mean /= static_cast<double>(y.size());
    double ss_res = 0.0, ss_tot = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) {
        const double r = y[i] - fitted[i];
        ss_res += r * r;
        ss_tot += (y[i] - mean) * (y[i] - mean);
    }
    d.residual_rms = std::sqrt(ss_res / static_cast<double>(y.size()));
    if (ss_tot > 0.0)
        d.r_squared = std::clamp(1.0 - ss_res / ss_tot, 0.0, 1.0);
    else
        d.r_squared = ss_res == 0.0 ? 1.0 : 0.0;
    return d;
}

}  // namespace

PowerTrace::PowerTrace(std::vector<TraceSample> samples) : samples_(std::move(samples)) {
    if (samples_.size() < 2) throw std::invalid_argument("power trace: fewer than 2 samples");
    for (std::size_t i = 0; i < samples_.size(); ++i) {
        const auto& s = samples_[i];
        if (!std::isfinite(s.t) || !std::isfinite(s.p))
            throw std::invalid_argument("power trace: non-finite sample " + std::to_string(i));
        if (s.p < 0.0)
            throw std::invalid_argument("power trace: negative power at sample " +
                                        std::to_string(i));
        if (i > 0 && !(s.t > samples_[i - 1].t))
            throw std::invalid_argument("power trace: timestamps not increasing at sample " +
                                        std::to_string(i));
    }
}

double PowerTrace::integral(double a, double b) const {
    return held_integral(samples_, a, b, [](double p) { return p; });
}

double PowerTrace::area_above(double level, double a, double b) const {
    return held_integral(samples_, a, b, [level](double p) { return std::max(p - level, 0.0); });
}

CpAwc fit_cp_awc(const PowerTrace& trace) {
    if (trace.duration() < kAllOutWindow)
        throw std::invalid_argument("fit_cp_awc: trace shorter than 180 s");
    const double end = trace.t_end();
    CpAwc out;
    out.cp = trace.integral(end - kCpWindow, end) / kCpWindow;
    out.awc = trace.area_above(out.cp, end - kAllOutWindow, end);
    return out;
}

double cp4_power(double cp, double awc) {
    if (cp < 0.0 || awc < 0.0) throw std::invalid_argument("cp4_power: negative input");
    return cp + awc / kCp4Duration;
}

RecoveredEnergy recovered_energy(double e_fatigue, double e_final, double awc) {
    RecoveredEnergy r;
    r.w_rec = e_fatigue + e_final - awc;
    r.negative = r.w_rec < 0.0;
    return r;
}

RecoveredEnergy recovered_energy(const IntervalTestRecord& rec, double cp, double awc) {
    if (!(rec.recovery_duration > 0.0))
        throw std::invalid_argument("recovered_energy: recovery duration must be positive");
    if (!(rec.recovery_power < cp))
        throw std::invalid_argument("recovered_energy: recovery power not below cp");
    return recovered_energy(rec.fatigue_seg.area_above(cp), rec.final_mao.area_above(cp), awc);
}

double adjusted_power(double w_rec, double t_rec, double cp) {
    if (!(t_rec > 0.0)) throw std::invalid_argument("adjusted_power: t_rec must be positive");
    return cp - w_rec / t_rec;
}

RecoveryLineFit fit_recovery_line(std::span<const RecoveryPoint> points) {
    if (points.size() < 2) throw std::invalid_argument("fit_recovery_line: need 2 points");
    std::vector<RecoveryPoint> pts(points.begin(), points.end());
    // Fixed summation order makes the fit independent of input order.
    std::sort(pts.begin(), pts.end(), [](const RecoveryPoint& l, const RecoveryPoint& r) {
        return l.p_actual != r.p_actual ? l.p_actual < r.p_actual : l.p_adj < r.p_adj;
    });
    if (pts.front().p_actual == pts.back().p_actual)
        throw std::invalid_argument("fit_recovery_line: all powers identical");

    const double n = static_cast<double>(pts.size());
    double mx = 0.0, my = 0.0;
    for (const auto& q : pts) {
        mx += q.p_actual;
        my += q.p_adj;
    }
    mx /= n;
    my /= n;
    double sxx = 0.0, sxy = 0.0;
    for (const auto& q : pts) {
        sxx += (q.p_actual - mx) * (q.p_actual - mx);
        sxy += (q.p_actual - mx) * (q.p_adj - my);
    }
    RecoveryLineFit fit;
    fit.a = sxy / sxx;
    fit.b = my - fit.a * mx;

    std::vector<double> y, yhat;
    for (const auto& q : pts) {
        y.push_back(q.p_adj);
        yhat.push_back(fit.a * q.p_actual + fit.b);
    }
    fit.diag = diagnostics(y, yhat);
    return fit;
}

std::vector<RecoveryPoint> recovery_points(std::span<const IntervalTestRecord> records,
                                           double cp, double awc, bool include_negative) {
    std::map<double, std::pair<double, int>> by_power;
    for (const auto& rec : records) {
        const auto r = recovered_energy(rec, cp, awc);
        if (r.negative && !include_negative) continue;
        auto& acc = by_power[rec.recovery_power];
        acc.first += adjusted_power(r.w_rec, rec.recovery_duration, cp);
        acc.second += 1;
    }
    std::vector<RecoveryPoint> out;
    for (const auto& [p, acc] : by_power) out.push_back({p, acc.first / acc.second});
    return out;
}

MaxPowerFit fit_max_power_curve(const PowerTrace& trace, double cp, double awc) {
    const auto& s = trace.samples();
    std::size_t peak = 0;
    for (std::size_t i = 1; i < s.size(); ++i)
        if (s[i].p > s[peak].p) peak = i;
    if (s.size() - peak < 2)
        throw std::invalid_argument("fit_max_power_curve: fewer than 2 samples after the peak");

    std::vector<double> w, y;
    double remaining = awc;
    for (std::size_t i = peak; i < s.size(); ++i) {
        if (i > peak) remaining -= std::max(s[i - 1].p - cp, 0.0) * (s[i].t - s[i - 1].t);
        w.push_back(remaining);
        y.push_back(s[i].p - cp);
    }

    // Least squares through the origin on columns (z^2, z) with z = w / scale,
    // solved by Gram-Schmidt QR.
    double scale = 0.0;
    for (double v : w) scale = std::max(scale, std::abs(v));
    if (scale == 0.0) throw std::invalid_argument("fit_max_power_curve: no spread in energy");
    const std::size_t n = w.size();
    std::vector<double> c1(n), c2(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double z = w[i] / scale;
        c1[i] = z * z;
        c2[i] = z;
    }
    auto dot = [n](const std::vector<double>& a, const std::vector<double>& b) {
        double acc = 0.0;
        for (std::size_t i = 0; i < n; ++i) acc += a[i] * b[i];
        return acc;
    };
    const double r11 = std::sqrt(dot(c1, c1));
    const double norm2 = std::sqrt(dot(c2, c2));
    if (r11 == 0.0) throw std::invalid_argument("fit_max_power_curve: no spread in energy");
    std::vector<double> q1(n), q2(n);
    for (std::size_t i = 0; i < n; ++i) q1[i] = c1[i] / r11;
    const double r12 = dot(q1, c2);
    for (std::size_t i = 0; i < n; ++i) q2[i] = c2[i] - r12 * q1[i];
    const double r22 = std::sqrt(dot(q2, q2));
    if (!(r22 > 1e-10 * norm2))
        throw std::invalid_argument("fit_max_power_curve: no spread in energy");
    for (std::size_t i = 0; i < n; ++i) q2[i] /= r22;

    const double g1 = dot(q1, y);
    const double g2 = dot(q2, y);
    const double k2 = g2 / r22;
    const double k1 = (g1 - r12 * k2) / r11;

    MaxPowerFit fit;
    fit.a1 = k1 / (scale * scale);
    fit.a2 = k2 / scale;
    std::vector<double> yhat(n);
    for (std::size_t i = 0; i < n; ++i) yhat[i] = fit.a1 * w[i] * w[i] + fit.a2 * w[i];
    fit.diag = diagnostics(y, yhat);
    return fit;
}

}  // namespace pacer
