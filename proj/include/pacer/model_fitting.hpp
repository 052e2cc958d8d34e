#pragma once

#include <optional>
#include <span>
#include <vector>

namespace pacer {

struct TraceSample {
    double t = 0.0;  // s
    double p = 0.0;  // W
    std::optional<double> smo2;  // percent, carried but never modelled
};

// Timestamped power samples. Each sample's power is held until the next
// timestamp; the final sample only closes the last interval.
class PowerTrace {
public:
    // Throws std::invalid_argument on fewer than 2 samples, non-increasing
    // timestamps or negative power.
    explicit PowerTrace(std::vector<TraceSample> samples);

    const std::vector<TraceSample>& samples() const { return samples_; }
    std::size_t size() const { return samples_.size(); }
    double t_begin() const { return samples_.front().t; }
    double t_end() const { return samples_.back().t; }
    double duration() const { return t_end() - t_begin(); }

    // Integral of p over [a, b].
    double integral(double a, double b) const;
    // Integral of max(p - level, 0) over [a, b].
    double area_above(double level, double a, double b) const;
    double area_above(double level) const { return area_above(level, t_begin(), t_end()); }

private:
    std::vector<TraceSample> samples_;
};

struct FitDiagnostics {
    double residual_rms = 0.0;
    std::size_t n_points = 0;
    double r_squared = 0.0;
};

struct CpAwc {
    double cp = 0.0;   // W
    double awc = 0.0;  // J
};

// 3-minute all-out test: cp is the mean of the last 30 s, awc the area above
// cp over the final 180 s.
CpAwc fit_cp_awc(const PowerTrace& trace);

// Power sustainable for exactly four minutes from a full tank.
double cp4_power(double cp, double awc);

struct IntervalTestRecord {
    PowerTrace fatigue_seg;     // two minutes at CP4
    double recovery_power;      // W
    double recovery_duration;   // s
    PowerTrace final_mao;       // closing all-out effort
};

struct RecoveredEnergy {
    double w_rec = 0.0;     // J
    bool negative = false;  // measurement noise exceeded the recovered amount
};

RecoveredEnergy recovered_energy(double e_fatigue, double e_final, double awc);
RecoveredEnergy recovered_energy(const IntervalTestRecord& rec, double cp, double awc);

// cp - w_rec / t_rec.
double adjusted_power(double w_rec, double t_rec, double cp);

struct RecoveryPoint {
    double p_actual = 0.0;
    double p_adj = 0.0;
};

struct RecoveryLineFit {
    double a = 0.0;
    double b = 0.0;
    FitDiagnostics diag;
};

// Ordinary least squares p_adj = a p + b.
RecoveryLineFit fit_recovery_line(std::span<const RecoveryPoint> points);

// One point per distinct recovery power: the unweighted mean adjusted power
// over that power's tests. Tests with negative recovered energy are dropped
// unless include_negative is set.
std::vector<RecoveryPoint> recovery_points(std::span<const IntervalTestRecord> records,
                                           double cp, double awc,
                                           bool include_negative = false);

struct MaxPowerFit {
    double a1 = 0.0;
    double a2 = 0.0;
    FitDiagnostics diag;
};

// Fits p - cp = a1 w^2 + a2 w over the samples from the global power maximum
// onward, where w is the energy left in the tank. The tank is full at the
// peak sample.
MaxPowerFit fit_max_power_curve(const PowerTrace& trace, double cp, double awc);

}  // namespace pacer
