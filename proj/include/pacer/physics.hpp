#pragma once

#include <cstdint>

namespace pacer {

struct PhysicsParams {
    double m_t = 80.0;     // total mass, kg
    double g = 9.81;       // m/s^2
    double mu = 0.004;     // rolling resistance coefficient
    double cd_a = 0.3;     // drag area, m^2
    double rho = 1.225;    // air density, kg/m^3
    bool lab_mode = false; // stationary trainer: no aerodynamic drag

    // Throws std::invalid_argument unless m_t > 0, mu >= 0, cd_a >= 0, rho > 0.
    void validate() const;
    std::uint64_t fingerprint() const;
};

constexpr double kDefaultVMin = 0.5;        // m/s
constexpr double kMaxPhysicsStep = 0.05;    // s

// Gravity plus rolling resistance along the road, N.
double grade_force(double theta, const PhysicsParams& prm);
// Aerodynamic drag at speed v, N; zero in lab mode.
double drag_force(double v, const PhysicsParams& prm);

// Average power needed to go from v_i to v_next over dx on slope theta,
// evaluated at the mean velocity of the interval.
double required_power(double v_i, double v_next, double theta, const PhysicsParams& prm,
                      double dx);

// Integrates m dv/dt = p/v - resistive forces for dt seconds with RK4
// sub-steps no longer than kMaxPhysicsStep. Speed is floored at v_floor.
double accelerate(double v, double p, double theta, const PhysicsParams& prm, double dt,
                  double v_floor = kDefaultVMin);

}  // namespace pacer
