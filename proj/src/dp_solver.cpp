#include "pacer/dp_solver.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <stdexcept>
#include <string>

#include <omp.h>

#include "pacer/errors.hpp"
#include "pacer/fnv.hpp"

namespace pacer {

void SolverConfig::validate() const {
    if (n_v < 2 || n_w < 2) throw std::invalid_argument("solver: need at least 2 nodes per axis");
    if (!(v_min > 0.0) || !(v_max > v_min))
        throw std::invalid_argument("solver: need 0 < v_min < v_max");
    if (!(dx > 0.0)) throw std::invalid_argument("solver: dx must be positive");
    if (!(tie_epsilon >= 0.0)) throw std::invalid_argument("solver: negative tie epsilon");
    if (v0 && !(*v0 >= v_min && *v0 <= v_max))
        throw std::invalid_argument("solver: v0 outside [v_min, v_max]");
}

SolverConfig SolverConfig::resolved(const RiderModel& m) const {
    SolverConfig out = *this;
    out.v0 = start_velocity();
    out.w0 = start_energy(m);
    if (!(*out.w0 >= 0.0 && *out.w0 <= m.awc()))
        throw std::invalid_argument("solver: w0 outside [0, awc]");
    return out;
}

std::uint64_t SolverConfig::fingerprint(const RiderModel& m) const {
    Fnv1a h;
    h.str("config");
    h.f64(dx);
    h.u64(static_cast<std::uint64_t>(n_v));
    h.u64(static_cast<std::uint64_t>(n_w));
    h.f64(v_min);
    h.f64(v_max);
    h.f64(tie_epsilon);
    h.f64(start_velocity());
    h.f64(start_energy(m));
    return h.value();
}

std::uint64_t rider_fingerprint(const RiderModel& m) {
    const auto& p = m.params();
    Fnv1a h;
    h.str("rider");
    for (double v : {p.cp, p.awc, p.rec_a, p.rec_b, p.mp_a1, p.mp_a2, p.vmax}) h.f64(v);
    return h.value();
}

TableFingerprints make_fingerprints(const SolverConfig& cfg, const RiderModel& m,
                                    const PhysicsParams& prm, const CourseProfile& course) {
    TableFingerprints f;
    f.config = cfg.fingerprint(m);
    f.rider = rider_fingerprint(m);
    f.physics = prm.fingerprint();
    f.course = course.fingerprint();
    Fnv1a h;
    for (auto v : {f.config, f.rider, f.physics, f.course}) h.u64(v);
    f.combined = h.value();
    return f;
}

StateGrid::StateGrid(const SolverConfig& cfg, double awc_)
    : v_min(cfg.v_min), v_max(cfg.v_max), n_v(cfg.n_v), awc(awc_), n_w(cfg.n_w) {}

double StateGrid::velocity(int j) const {
    if (j == n_v - 1) return v_max;
    return v_min + (v_max - v_min) * j / (n_v - 1);
}

double StateGrid::energy(int k) const {
    if (k == n_w - 1) return awc;
    return awc * k / (n_w - 1);
}

int StateGrid::nearest_velocity(double v) const {
    const double u = (v - v_min) / (v_max - v_min) * (n_v - 1);
    return std::clamp(static_cast<int>(std::lround(u)), 0, n_v - 1);
}

Transition transition_from_demand(double p_req, double dt, double w_i, const RiderModel& m) {
    Transition tr;
    tr.p_req = p_req;
    tr.dt = dt;
    const double cp = m.cp();
    if (p_req > cp) {
        tr.p = p_req;
        tr.w_next = w_i - (p_req - cp) * dt;
        tr.feasible = p_req <= max_power(w_i, m) && tr.w_next >= 0.0;
    } else if (p_req == cp) {
        tr.p = cp;
        tr.w_next = w_i;
        tr.feasible = true;
    } else {
        // Below cp; a negative demand means braking with the rider at rest.
        tr.p = std::max(p_req, 0.0);
        tr.w_next = std::min(m.awc(), w_i + (cp - m.adjusted_power(tr.p)) * dt);
        tr.feasible = tr.w_next >= 0.0;
    }
    return tr;
}

Transition transition(double v_i, double w_i, double v_next, double theta,
                      const RiderModel& m, const PhysicsParams& prm, double dx) {
    const double p_req = required_power(v_i, v_next, theta, prm, dx);
    return transition_from_demand(p_req, 2.0 * dx / (v_i + v_next), w_i, m);
}

double interpolate_cost(std::span<const double> row, double w_step, double w) {
    const auto n = static_cast<long>(row.size());
    const double u = w / w_step;
    const long k = std::lround(u);
    if (std::abs(u - static_cast<double>(k)) <= 1e-9 && k >= 0 && k < n) return row[k];
    if (u <= 0.0) return row.front();
    if (u >= static_cast<double>(n - 1)) return row.back();
    const long k0 = static_cast<long>(std::floor(u));
    const double f = u - static_cast<double>(k0);
    const double c0 = row[k0], c1 = row[k0 + 1];
    if (c0 == kInfeasible || c1 == kInfeasible) return kInfeasible;
    const double v = c0 + f * (c1 - c0);
    return std::clamp(v, std::min(c0, c1), std::max(c0, c1));
}

int solver_threads_from_env() {
    if (const char* s = std::getenv("PACER_THREADS")) {
        char* end = nullptr;
        const long n = std::strtol(s, &end, 10);
        if (end != s && n > 0) return static_cast<int>(n);
    }
    return omp_get_max_threads();
}

namespace {

ValueTables prepare(const CourseProfile& course, const RiderModel& m, const PhysicsParams& prm,
                    const SolverConfig& cfg) {
    cfg.validate();
    prm.validate();
    if (course.size() == 0) throw std::invalid_argument("solver: course has no intervals");
    if (course.dx() != cfg.dx)
        throw std::invalid_argument("solver: course dx differs from solver dx");
    ValueTables t;
    t.config = cfg.resolved(m);
    t.grid = StateGrid(t.config, m.awc());
    t.n_stages = course.size();
    const std::size_t layer = static_cast<std::size_t>(cfg.n_v) * cfg.n_w;
    t.cost.assign((t.n_stages + 1) * layer, kInfeasible);
    t.policy.assign(t.n_stages * layer, -1);
    std::fill(t.cost.begin() + static_cast<long>(t.n_stages * layer), t.cost.end(), 0.0);
    t.fingerprints = make_fingerprints(t.config, m, prm, course);
    return t;
}

struct NodeResult {
    double cost = kInfeasible;
    int arg = -1;
};

// Cost is the exact minimum; the policy is the lowest node scoring within eps
// of it. Keeping the cost exact keeps it monotone in W.
NodeResult pick(const std::vector<double>& scores, double eps) {
    NodeResult r;
    for (double c : scores) r.cost = std::min(r.cost, c);
    if (r.cost == kInfeasible) return r;
    for (std::size_t i = 0; i < scores.size(); ++i)
        if (scores[i] <= r.cost + eps) {
            r.arg = static_cast<int>(i);
            break;
        }
    return r;
}

}  // namespace

ValueTables solve_backward(const CourseProfile& course, const RiderModel& m,
                           const PhysicsParams& prm, const SolverConfig& cfg, int threads) {
    ValueTables t = prepare(course, m, prm, cfg);
    const int nt = threads > 0 ? threads : solver_threads_from_env();
    const int n_v = t.grid.n_v, n_w = t.grid.n_w;
    const double dx = cfg.dx, eps = cfg.tie_epsilon, w_step = t.grid.w_step();

    std::vector<double> demand(static_cast<std::size_t>(n_v) * n_v);
    std::vector<double> duration(demand.size());
    std::vector<double> velocity(n_v), energy(n_w);
    for (int j = 0; j < n_v; ++j) velocity[j] = t.grid.velocity(j);
    for (int k = 0; k < n_w; ++k) energy[k] = t.grid.energy(k);

    for (std::size_t s = t.n_stages; s-- > 0;) {
        const double theta = course[s].theta;
        for (int j = 0; j < n_v; ++j)
            for (int jn = 0; jn < n_v; ++jn) {
                demand[j * n_v + jn] = required_power(velocity[j], velocity[jn], theta, prm, dx);
                duration[j * n_v + jn] = 2.0 * dx / (velocity[j] + velocity[jn]);
            }

        const long nodes = static_cast<long>(n_v) * n_w;
#pragma omp parallel num_threads(nt)
        {
            std::vector<double> scores(n_v);
#pragma omp for schedule(static)
            for (long node = 0; node < nodes; ++node) {
                const int j = static_cast<int>(node / n_w);
                const int k = static_cast<int>(node % n_w);
                for (int jn = 0; jn < n_v; ++jn) {
                    const auto tr = transition_from_demand(demand[j * n_v + jn],
                                                           duration[j * n_v + jn], energy[k], m);
                    scores[jn] = tr.feasible ? tr.dt + interpolate_cost(t.cost_row(s + 1, jn),
                                                                        w_step, tr.w_next)
                                             : kInfeasible;
                }
                const NodeResult best = pick(scores, eps);
                t.cost[t.index(s, j, k)] = best.cost;
                t.policy[t.index(s, j, k)] = best.arg;
            }
        }
    }
    return t;
}

ValueTables solve_backward_serial(const CourseProfile& course, const RiderModel& m,
                                  const PhysicsParams& prm, const SolverConfig& cfg) {
    ValueTables t = prepare(course, m, prm, cfg);
    const double w_step = t.grid.w_step();
    std::vector<double> scores(t.grid.n_v);
    for (std::size_t s = t.n_stages; s-- > 0;) {
        for (int j = 0; j < t.grid.n_v; ++j) {
            for (int k = 0; k < t.grid.n_w; ++k) {
                for (int jn = 0; jn < t.grid.n_v; ++jn) {
                    const auto tr = transition(t.grid.velocity(j), t.grid.energy(k),
                                               t.grid.velocity(jn), course[s].theta, m, prm,
                                               cfg.dx);
                    scores[jn] = tr.feasible ? tr.dt + interpolate_cost(t.cost_row(s + 1, jn),
                                                                        w_step, tr.w_next)
                                             : kInfeasible;
                }
                const NodeResult best = pick(scores, cfg.tie_epsilon);
                t.cost[t.index(s, j, k)] = best.cost;
                t.policy[t.index(s, j, k)] = best.arg;
            }
        }
    }
    return t;
}

namespace {

Choice score(const ValueTables& t, const RiderModel& m, const PhysicsParams& prm, double v,
             double w, double theta, double dx, std::size_t next_stage, int jn) {
    Choice c;
    c.v_node = jn;
    c.tr = transition(v, w, t.grid.velocity(jn), theta, m, prm, dx);
    if (c.tr.feasible)
        c.score = c.tr.dt +
                  interpolate_cost(t.cost_row(next_stage, jn), t.grid.w_step(), c.tr.w_next);
    return c;
}

// Same rule as the backward pass: lowest node within eps of the best score.
Choice select(const std::vector<Choice>& cands, double eps) {
    double lo = kInfeasible;
    for (const auto& c : cands) lo = std::min(lo, c.score);
    Choice best;
    if (lo == kInfeasible) return best;
    for (const auto& c : cands)
        if (c.score <= lo + eps && (best.v_node < 0 || c.v_node < best.v_node)) best = c;
    return best;
}

}  // namespace

Choice best_transition(const ValueTables& t, const RiderModel& m, const PhysicsParams& prm,
                       double v, double w, double theta, double dx, std::size_t next_stage) {
    std::vector<Choice> cands;
    cands.reserve(t.grid.n_v);
    for (int jn = 0; jn < t.grid.n_v; ++jn)
        cands.push_back(score(t, m, prm, v, w, theta, dx, next_stage, jn));
    return select(cands, t.config.tie_epsilon);
}

void check_fingerprints(const ValueTables& t, const CourseProfile& course, const RiderModel& m,
                        const PhysicsParams& prm) {
    const auto f = make_fingerprints(t.config, m, prm, course);
    if (f.course != t.fingerprints.course)
        throw FingerprintError("value tables were solved for a different course");
    if (f.rider != t.fingerprints.rider)
        throw FingerprintError("value tables were solved for a different rider model");
    if (f.physics != t.fingerprints.physics)
        throw FingerprintError("value tables were solved for different physics parameters");
    if (f.config != t.fingerprints.config || f.combined != t.fingerprints.combined)
        throw FingerprintError("value tables metadata does not match");
}

namespace {

// Walks forward as long as any transition is feasible and returns the stage
// where none is.
int first_infeasible_stage(const ValueTables& t, const CourseProfile& course,
                           const RiderModel& m, const PhysicsParams& prm, double v, double w) {
    for (std::size_t s = 0; s < t.n_stages; ++s) {
        const Choice c = best_transition(t, m, prm, v, w, course[s].theta, t.config.dx, s + 1);
        if (c.v_node >= 0) {
            v = t.grid.velocity(c.v_node);
            w = c.tr.w_next;
            continue;
        }
        int pick = -1;
        Transition tr;
        for (int jn = 0; jn < t.grid.n_v; ++jn) {
            const auto cand = transition(v, w, t.grid.velocity(jn), course[s].theta, m, prm,
                                         t.config.dx);
            if (cand.feasible && (pick < 0 || cand.w_next > tr.w_next)) {
                pick = jn;
                tr = cand;
            }
        }
        if (pick < 0) return static_cast<int>(s);
        v = t.grid.velocity(pick);
        w = tr.w_next;
    }
    return static_cast<int>(t.n_stages);
}

}  // namespace

PacingPlan extract_plan(const ValueTables& t, const CourseProfile& course, const RiderModel& m,
                        const PhysicsParams& prm) {
    check_fingerprints(t, course, m, prm);
    const double dx = t.config.dx;
    const double eps = t.config.tie_epsilon;
    const double w_step = t.grid.w_step();
    int j = t.grid.nearest_velocity(t.config.start_velocity());
    double w = t.config.start_energy(m);

    if (interpolate_cost(t.cost_row(0, j), w_step, w) == kInfeasible) {
        const int s = first_infeasible_stage(t, course, m, prm, t.grid.velocity(j), w);
        throw InfeasibleError("start state is infeasible; no feasible continuation at stage " +
                                  std::to_string(s),
                              s);
    }

    PacingPlan plan;
    double elapsed = 0.0;
    for (std::size_t s = 0; s < t.n_stages; ++s) {
        const double v = t.grid.velocity(j);
        const double theta = course[s].theta;
        const double u = w / w_step;
        int k0 = static_cast<int>(std::floor(u));
        int k1 = k0 + 1;
        const long kr = std::lround(u);
        if (std::abs(u - static_cast<double>(kr)) <= 1e-9) k0 = k1 = static_cast<int>(kr);
        k0 = std::clamp(k0, 0, t.grid.n_w - 1);
        k1 = std::clamp(k1, 0, t.grid.n_w - 1);

        std::vector<Choice> cands;
        for (int k : {k0, k1}) {
            const int jn = t.policy_at(s, j, k);
            if (jn >= 0) cands.push_back(score(t, m, prm, v, w, theta, dx, s + 1, jn));
        }
        Choice best = select(cands, eps);
        if (best.score == kInfeasible)
            best = best_transition(t, m, prm, v, w, theta, dx, s + 1);
        if (best.v_node < 0 || best.score == kInfeasible)
            throw InfeasibleError("no feasible transition at stage " + std::to_string(s),
                                  static_cast<int>(s));

        PlanRow row;
        row.x = static_cast<double>(s) * dx;
        row.v = v;
        row.v_next = t.grid.velocity(best.v_node);
        row.p = best.tr.p;
        row.w = w;
        row.w_next = best.tr.w_next;
        row.dt = best.tr.dt;
        elapsed += best.tr.dt;
        row.t_elapsed = elapsed;
        plan.rows.push_back(row);

        j = best.v_node;
        w = best.tr.w_next;
    }
    plan.total_time = elapsed;
    return plan;
}

}  // namespace pacer
