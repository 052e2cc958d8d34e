#include "pacer/sil_controller.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>
#include <string>

namespace pacer {

EstimatedState estimate_state(const EstimatedState& prev, std::span<const RideSample> samples,
                              const RiderModel& m, int* clamp_events) {
    if (samples.empty()) throw std::invalid_argument("estimate_state: empty batch");
    EstimatedState s = prev;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const auto& c = samples[i];
        if (c.p < 0.0 || c.v < 0.0)
            throw std::invalid_argument("estimate_state: negative power or velocity");
        if (i == 0) continue;
        const auto& a = samples[i - 1];
        const double dt = c.t - a.t;
        if (dt < 0.0) throw std::invalid_argument("estimate_state: time going backwards");
        s.x += 0.5 * (a.v + c.v) * dt;
        const double w = s.w + 0.5 * (energy_rate(a.p, m) + energy_rate(c.p, m)) * dt;
        s.w = std::clamp(w, 0.0, m.awc());
        if (w < 0.0 && clamp_events) ++*clamp_events;
    }
    s.v = samples.back().v;
    return s;
}

std::vector<EstimatedState> reestimate_ride(std::span<const RideSample> samples,
                                            const RiderModel& m, EstimatedState start) {
    std::vector<EstimatedState> out;
    if (samples.empty()) return out;
    start.v = samples.front().v;
    out.push_back(start);
    for (std::size_t i = 1; i < samples.size(); ++i)
        out.push_back(estimate_state(out.back(), samples.subspan(i - 1, 2), m));
    return out;
}

Recommendation recommend_power(const EstimatedState& state, const ValueTables& t,
                               const CourseProfile& course, const RiderModel& m,
                               const PhysicsParams& prm) {
    Recommendation r;
    r.stage = course.stage_at(state.x);
    const double v = std::clamp(state.v, t.grid.v_min, t.grid.v_max);
    const double w = std::clamp(state.w, 0.0, m.awc());
    const Choice c =
        best_transition(t, m, prm, v, w, course[r.stage].theta, t.config.dx, r.stage + 1);
    if (c.v_node < 0) {
        r.power = m.cp();
        return r;
    }
    r.power = c.tr.p;
    r.v_node = c.v_node;
    r.feasible = true;
    return r;
}

void RiderBehavior::validate() const {
    if (!(power_noise_sd >= 0.0)) throw std::invalid_argument("behavior: noise sd must be >= 0");
    if (!(response_lag >= 0.0)) throw std::invalid_argument("behavior: lag must be >= 0");
}

SimResult simulate_ride(const CourseProfile& course, const RiderModel& m,
                        const PhysicsParams& prm, const ValueTables& t,
                        const RiderBehavior& behavior, const SimOptions& opt) {
    check_fingerprints(t, course, m, prm);
    behavior.validate();
    if (!(opt.tick > 0.0)) throw std::invalid_argument("simulate_ride: tick must be positive");

    const double length = course.total_length();
    const double v_min = t.grid.v_min, v_max = t.grid.v_max;
    const double max_time = opt.max_time > 0.0 ? opt.max_time : 2.0 * length / v_min + 600.0;
    const int substeps = static_cast<int>(std::ceil(opt.tick / kMaxPhysicsStep - 1e-12));
    const double h = opt.tick / substeps;

    std::mt19937_64 rng(behavior.seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    const double lag_gain =
        behavior.response_lag > 0.0 ? 1.0 - std::exp(-opt.tick / behavior.response_lag) : 1.0;
    double noise = 0.0;

    SimResult res;
    EstimatedState state{0.0, t.config.start_velocity(), t.config.start_energy(m)};
    double time = 0.0;
    std::size_t next_stage_mark = 0;
    std::vector<RideSample> batch;

    while (time < max_time) {
        double p_cmd = m.cp();
        if (opt.policy == ControlPolicy::follow_tables) {
            const auto rec = recommend_power(state, t, course, m, prm);
            if (!rec.feasible) {
                res.infeasible = true;
                res.infeasible_stage = rec.stage;
                break;
            }
            p_cmd = rec.power;
        }
        while (next_stage_mark < course.size() &&
               static_cast<double>(next_stage_mark) * course.dx() <= state.x) {
            res.stage_power.push_back(p_cmd);
            ++next_stage_mark;
        }

        if (behavior.power_noise_sd > 0.0)
            noise += lag_gain * (behavior.power_noise_sd * gauss(rng) - noise);
        double p = std::max(0.0, p_cmd + behavior.power_bias + noise);
        const double p_limit = max_power(state.w, m);
        if (p > p_limit) {
            p = p_limit;
            ++res.power_caps;
        }

        batch.clear();
        batch.push_back({time, p, state.v, std::nullopt});
        double x = state.x, v = state.v;
        bool done = false;
        for (int i = 0; i < substeps; ++i) {
            const double theta = course[course.stage_at(x)].theta;
            const double v_new = std::min(accelerate(v, p, theta, prm, h, v_min), v_max);
            const double step = 0.5 * (v + v_new) * h;
            if (x + step >= length) {
                const double f = (length - x) / step;
                batch.push_back({time + f * h, p, v + f * (v_new - v), std::nullopt});
                time += f * h;
                done = true;
                break;
            }
            x += step;
            v = v_new;
            time += h;
            batch.push_back({time, p, v, std::nullopt});
        }
        state = estimate_state(state, batch, m, &res.energy_clamps);
        if (done) state.x = length;
        res.log.push_back({time, state.x, state.v, p_cmd, p, state.w});
        if (done) {
            res.finished = true;
            res.achieved_time = time;
            break;
        }
    }
    if (!res.finished) res.achieved_time = time;
    return res;
}

}  // namespace pacer
