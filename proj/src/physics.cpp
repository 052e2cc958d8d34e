#include "pacer/physics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "pacer/fnv.hpp"

namespace pacer {

void PhysicsParams::validate() const {
    if (!(m_t > 0.0)) throw std::invalid_argument("physics: mass must be positive");
    if (!(g > 0.0)) throw std::invalid_argument("physics: gravity must be positive");
    if (!(mu >= 0.0)) throw std::invalid_argument("physics: rolling resistance must be >= 0");
    if (!(cd_a >= 0.0)) throw std::invalid_argument("physics: drag area must be >= 0");
    if (!(rho > 0.0)) throw std::invalid_argument("physics: air density must be positive");
}

std::uint64_t PhysicsParams::fingerprint() const {
    Fnv1a h;
    h.str("physics");
    h.f64(m_t);
    h.f64(g);
    h.f64(mu);
    h.f64(cd_a);
    h.f64(rho);
    h.u64(lab_mode ? 1 : 0);
    return h.value();
}

double grade_force(double theta, const PhysicsParams& prm) {
    return prm.m_t * prm.g * (std::sin(theta) + prm.mu * std::cos(theta));
}

double drag_force(double v, const PhysicsParams& prm) {
    return prm.lab_mode ? 0.0 : 0.5 * prm.cd_a * prm.rho * v * v;
}

double required_power(double v_i, double v_next, double theta, const PhysicsParams& prm,
                      double dx) {
    if (!(v_i > 0.0) || !(v_next > 0.0))
        throw std::invalid_argument("required_power: velocities must be positive");
    if (!(dx > 0.0)) throw std::invalid_argument("required_power: dx must be positive");
    const double v_mean = 0.5 * (v_next + v_i);
    const double inertial = prm.m_t * (v_next * v_next - v_i * v_i) / (2.0 * dx);
    return (inertial + grade_force(theta, prm) + drag_force(v_mean, prm)) * v_mean;
}

double accelerate(double v, double p, double theta, const PhysicsParams& prm, double dt,
                  double v_floor) {
    if (!(v > 0.0)) throw std::invalid_argument("accelerate: velocity must be positive");
    if (!(dt > 0.0)) throw std::invalid_argument("accelerate: dt must be positive");

    const double resist = grade_force(theta, prm);
    auto accel = [&](double u) {
        u = std::max(u, v_floor);
        return (p / u - resist - drag_force(u, prm)) / prm.m_t;
    };
    const int steps = static_cast<int>(std::ceil(dt / kMaxPhysicsStep - 1e-12));
    const double h = dt / steps;
    for (int i = 0; i < steps; ++i) {
        const double k1 = accel(v);
        const double k2 = accel(v + 0.5 * h * k1);
        const double k3 = accel(v + 0.5 * h * k2);
        const double k4 = accel(v + h * k3);
        v = std::max(v + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4), v_floor);
    }
    return v;
}

}  // namespace pacer
