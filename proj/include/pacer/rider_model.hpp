#pragma once

namespace pacer {

// Physiological parameter set of a rider: critical power, anaerobic work
// capacity, the linear recovery line and the quadratic maximum-power curve.
// All quantities are SI.
class RiderModel {
public:
    struct Params {
        double cp = 0.0;     // W
        double awc = 0.0;    // J
        double rec_a = 1.0;  // adjusted power slope
        double rec_b = 0.0;  // W
        double mp_a1 = 0.0;  // W/J^2
        double mp_a2 = 0.0;  // W/J
        double vmax = 16.0;  // m/s
    };

    // Throws std::invalid_argument unless cp, awc, vmax are positive and the
    // maximum-power curve stays at or above cp on a 1 J grid over [0, awc].
    explicit RiderModel(const Params& p);

    double cp() const { return p_.cp; }
    double awc() const { return p_.awc; }
    double rec_a() const { return p_.rec_a; }
    double rec_b() const { return p_.rec_b; }
    double mp_a1() const { return p_.mp_a1; }
    double mp_a2() const { return p_.mp_a2; }
    double vmax() const { return p_.vmax; }
    const Params& params() const { return p_; }

    // Effective power implied by recovery at applied power p (below cp).
    double adjusted_power(double p) const { return p_.rec_a * p + p_.rec_b; }

    // True when max_power is non-decreasing on [0, awc], sampled on a 1 J grid.
    bool max_power_nondecreasing() const;

private:
    Params p_;
};

// Remaining anaerobic energy, 0 <= w <= awc of the owning model.
struct EnergyState {
    double w = 0.0;
};

// Energy change while riding above (or at) cp: -(p - cp) dt.
double dw_fatigue(double p, double dt, const RiderModel& m);

// Energy change while riding strictly below cp: (cp - (a p + b)) dt. Not
// clamped; may be negative when the recovery line lies above cp.
double dw_recovery(double p, double dt, const RiderModel& m);

// Branch-switching rate dW/dt at applied power p; zero at p == cp.
double energy_rate(double p, const RiderModel& m);

// Applies the switching model for dt and saturates the result to [0, awc].
EnergyState advance_energy(EnergyState s, double p, double dt, const RiderModel& m);

// a1 w^2 + a2 w + cp, for w in [0, awc].
double max_power(double w, const RiderModel& m);

// awc / (p - cp), for p > cp.
double time_to_exhaustion(double p, const RiderModel& m);

}  // namespace pacer
