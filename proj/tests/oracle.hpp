#pragma once
// Exhaustive path enumeration over velocity nodes, written against the model
// equations directly and sharing no code with the solver.

#include <cmath>
#include <limits>
#include <vector>

namespace oracle {

struct Instance {
    std::vector<double> theta;  // one per stage
    double dx = 100.0;
    int n_v = 4;
    double v_min = 1.0, v_max = 10.0;
    int start = 0;  // velocity node
    double w0 = 0.0;
    // rider
    double cp = 234, awc = 9758, a = 1, b = 0, a1 = 0, a2 = 0.05;
    // physics
    double m = 80, g = 9.81, mu = 0.004, cd_a = 0.3, rho = 1.225;
    bool lab = true;

    double node(int j) const { return v_min + j * (v_max - v_min) / (n_v - 1); }
};

struct Result {
    double time = std::numeric_limits<double>::infinity();
    std::vector<int> path;  // velocity nodes, start included
    bool binds = false;     // some enumerated step hit an energy or power limit
};

namespace detail {

struct Step {
    bool ok;
    bool bound;
    double w;
    double dt;
};

inline Step step(const Instance& in, double va, double vb, double theta, double w) {
    const double vbar = 0.5 * (va + vb);
    const double drag = in.lab ? 0.0 : 0.5 * in.cd_a * in.rho * vbar * vbar;
    const double force = in.m * (vb * vb - va * va) / (2 * in.dx) +
                         in.m * in.g * (std::sin(theta) + in.mu * std::cos(theta)) + drag;
    const double p = force * vbar;
    const double dt = in.dx / vbar;
    if (p > in.cp) {
        const double pmax = in.cp + in.a1 * w * w + in.a2 * w;
        const double wn = w - (p - in.cp) * dt;
        if (p > pmax || wn < 0) return {false, true, wn, dt};
        return {true, false, wn, dt};
    }
    if (p == in.cp) return {true, false, w, dt};
    const double pr = p < 0 ? 0.0 : p;
    double wn = w + (in.cp - (in.a * pr + in.b)) * dt;
    bool bound = false;
    if (wn > in.awc) {
        wn = in.awc;
        bound = true;
    }
    if (wn < 0) return {false, true, wn, dt};
    return {true, bound, wn, dt};
}

inline void dfs(const Instance& in, std::size_t s, int j, double w, double t,
                std::vector<int>& path, Result& best) {
    if (s == in.theta.size()) {
        if (t < best.time) {
            best.time = t;
            best.path = path;
        }
        return;
    }
    for (int k = 0; k < in.n_v; ++k) {
        const Step st = step(in, in.node(j), in.node(k), in.theta[s], w);
        if (st.bound) best.binds = true;
        if (!st.ok) continue;
        path.push_back(k);
        dfs(in, s + 1, k, st.w, t + st.dt, path, best);
        path.pop_back();
    }
}

}  // namespace detail

inline Result solve(const Instance& in) {
    Result r;
    std::vector<int> path{in.start};
    detail::dfs(in, 0, in.start, in.w0, 0.0, path, r);
    return r;
}

}  // namespace oracle
