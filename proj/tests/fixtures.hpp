#pragma once
// Shared builders for tests and the acceptance binary.

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "oracle.hpp"
#include "pacer/course.hpp"
#include "pacer/dp_solver.hpp"
#include "pacer/physics.hpp"
#include "pacer/rider_model.hpp"

namespace fixtures {

inline pacer::RiderModel rider_of(const oracle::Instance& in) {
    return pacer::RiderModel({in.cp, in.awc, in.a, in.b, in.a1, in.a2, in.v_max});
}

inline pacer::PhysicsParams physics_of(const oracle::Instance& in) {
    pacer::PhysicsParams p;
    p.m_t = in.m;
    p.g = in.g;
    p.mu = in.mu;
    p.cd_a = in.cd_a;
    p.rho = in.rho;
    p.lab_mode = in.lab;
    return p;
}

inline pacer::CourseProfile course_of(const oracle::Instance& in) {
    std::vector<pacer::CourseInterval> iv;
    double e = 0.0;
    for (double th : in.theta) {
        iv.push_back({th, e});
        e += in.dx * std::tan(th);
    }
    return pacer::CourseProfile(in.dx, iv);
}

inline pacer::SolverConfig config_of(const oracle::Instance& in, int n_w) {
    pacer::SolverConfig c;
    c.dx = in.dx;
    c.n_v = in.n_v;
    c.n_w = n_w;
    c.v_min = in.v_min;
    c.v_max = in.v_max;
    c.v0 = std::clamp(in.node(in.start), in.v_min, in.v_max);
    c.w0 = in.w0;
    return c;
}

// Small random instance. With loose = true the tank is huge and the power
// curve steep, so energy and power limits stay out of reach.
inline oracle::Instance random_instance(std::mt19937_64& rng, bool loose) {
    std::uniform_int_distribution<int> stages(1, 6), nodes(2, 6);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    oracle::Instance in;
    const int n = stages(rng);
    for (int i = 0; i < n; ++i) in.theta.push_back(-0.03 + 0.11 * u(rng));
    in.n_v = nodes(rng);
    in.v_min = 1.0 + 2.0 * u(rng);
    in.v_max = in.v_min + 3.0 + 9.0 * u(rng);
    in.start = static_cast<int>(u(rng) * in.n_v) % in.n_v;
    in.lab = u(rng) < 0.5;
    in.mu = 0.002 + 0.006 * u(rng);
    in.m = 65 + 30 * u(rng);
    in.cp = 180 + 120 * u(rng);
    in.a = 0.4 + 0.6 * u(rng);
    in.b = 40 + 80 * u(rng) * in.a;
    in.dx = 100.0;
    if (loose) {
        in.awc = 1e8;
        in.w0 = 0.5e8;
        in.a1 = 0.0;
        in.a2 = 1e-3;
        // Stays below cp for any input so the recovery line never overshoots the tank.
        in.b = std::min(in.b, 0.5 * in.cp);
    } else {
        in.awc = 1500 + 12000 * u(rng);
        in.w0 = in.awc * (0.3 + 0.7 * u(rng));
        in.a1 = 1e-6 * u(rng);
        in.a2 = 0.01 + 0.04 * u(rng);
        in.dx = 60 + 90 * u(rng);
    }
    return in;
}

// Largest cost jump across one energy cell, summed over stages: the error a
// path can pick up from interpolating in W.
inline double cell_error_bound(const pacer::ValueTables& t) {
    double total = 0.0;
    for (std::size_t s = 0; s < t.n_stages; ++s) {
        double worst = 0.0;
        for (int j = 0; j < t.grid.n_v; ++j)
            for (int k = 0; k + 1 < t.grid.n_w; ++k) {
                const double c0 = t.cost_at(s + 1, j, k), c1 = t.cost_at(s + 1, j, k + 1);
                if (std::isfinite(c0) && std::isfinite(c1)) worst = std::max(worst, std::abs(c1 - c0));
            }
        total += worst;
    }
    return total;
}

// Violations of the power, energy and velocity limits in a plan.
inline int plan_violations(const pacer::PacingPlan& plan, const pacer::RiderModel& m,
                           const pacer::SolverConfig& cfg) {
    int bad = 0;
    const double vtol = 1e-9;
    for (const auto& r : plan.rows) {
        if (r.p < 0.0) ++bad;
        if (r.w < 0.0 || r.w > m.awc() || r.w_next < 0.0 || r.w_next > m.awc()) ++bad;
        else if (r.p > pacer::max_power(r.w, m) + 1e-9) ++bad;
        if (r.v < cfg.v_min - vtol || r.v > cfg.v_max + vtol) ++bad;
        if (r.v_next < cfg.v_min - vtol || r.v_next > cfg.v_max + vtol) ++bad;
    }
    return bad;
}

}  // namespace fixtures
