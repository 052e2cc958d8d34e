#include "pacer/rider_model.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace pacer {

namespace {

double curve(double w, const RiderModel::Params& p) {
    return p.mp_a1 * w * w + p.mp_a2 * w + p.cp;
}

template <class F>
void for_each_joule(double awc, F&& f) {
    const auto n = static_cast<long>(std::floor(awc));
    for (long i = 0; i <= n; ++i) f(static_cast<double>(i));
    if (static_cast<double>(n) != awc) f(awc);
}

}  // namespace

RiderModel::RiderModel(const Params& p) : p_(p) {
    if (!(p.cp > 0.0) || !std::isfinite(p.cp))
        throw std::invalid_argument("rider model: cp must be positive");
    if (!(p.awc > 0.0) || !std::isfinite(p.awc))
        throw std::invalid_argument("rider model: awc must be positive");
    if (!(p.vmax > 0.0) || !std::isfinite(p.vmax))
        throw std::invalid_argument("rider model: vmax must be positive");
    if (!std::isfinite(p.rec_a) || !std::isfinite(p.rec_b) || !std::isfinite(p.mp_a1) ||
        !std::isfinite(p.mp_a2))
        throw std::invalid_argument("rider model: non-finite coefficient");

    bool ok = true;
    double bad_w = 0.0;
    for_each_joule(p.awc, [&](double w) {
        if (ok && curve(w, p) < p.cp) {
            ok = false;
            bad_w = w;
        }
    });
    if (!ok)
        throw std::invalid_argument("rider model: max power falls below cp at w=" +
                                    std::to_string(bad_w) + " J");
}

bool RiderModel::max_power_nondecreasing() const {
    bool ok = true;
    double prev = curve(0.0, p_);
    for_each_joule(p_.awc, [&](double w) {
        const double cur = curve(w, p_);
        if (cur < prev) ok = false;
        prev = cur;
    });
    return ok;
}

double dw_fatigue(double p, double dt, const RiderModel& m) {
    if (p < m.cp()) throw std::invalid_argument("dw_fatigue: power below cp");
    if (dt < 0.0) throw std::invalid_argument("dw_fatigue: negative dt");
    return -(p - m.cp()) * dt;
}

double dw_recovery(double p, double dt, const RiderModel& m) {
    if (p >= m.cp()) throw std::invalid_argument("dw_recovery: power not below cp");
    if (dt < 0.0) throw std::invalid_argument("dw_recovery: negative dt");
    return (m.cp() - m.adjusted_power(p)) * dt;
}

double energy_rate(double p, const RiderModel& m) {
    if (p > m.cp()) return -(p - m.cp());
    if (p < m.cp()) return m.cp() - m.adjusted_power(p);
    return 0.0;
}

EnergyState advance_energy(EnergyState s, double p, double dt, const RiderModel& m) {
    double dw = 0.0;
    if (p > m.cp())
        dw = dw_fatigue(p, dt, m);
    else if (p < m.cp())
        dw = dw_recovery(p, dt, m);
    s.w = std::clamp(s.w + dw, 0.0, m.awc());
    return s;
}

double max_power(double w, const RiderModel& m) {
    if (!(w >= 0.0 && w <= m.awc()))
        throw std::invalid_argument("max_power: w outside [0, awc]");
    return curve(w, m.params());
}

double time_to_exhaustion(double p, const RiderModel& m) {
    if (!(p > m.cp())) throw std::invalid_argument("time_to_exhaustion: power not above cp");
    return m.awc() / (p - m.cp());
}

}  // namespace pacer
