#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "pacer/dp_solver.hpp"

namespace pacer {

struct RideSample {
    double t = 0.0;  // s
    double p = 0.0;  // W
    double v = 0.0;  // m/s
    std::optional<double> smo2;
};

struct EstimatedState {
    double x = 0.0;  // m
    double v = 0.0;  // m/s
    double w = 0.0;  // J
};

// Dead reckoning over one batch of samples. The batch starts at the previous
// state's time: x advances by the trapezoid of v, v is the last sample's, w
// follows the switching model sample by sample (trapezoid in t) and is
// saturated to [0, awc]. A full tank is the recovery limit; drawing below
// empty is counted into clamp_events.
EstimatedState estimate_state(const EstimatedState& prev, std::span<const RideSample> samples,
                              const RiderModel& m, int* clamp_events = nullptr);

// Running estimate after every sample of a recorded ride.
std::vector<EstimatedState> reestimate_ride(std::span<const RideSample> samples,
                                            const RiderModel& m, EstimatedState start);

struct Recommendation {
    double power = 0.0;     // W
    int v_node = -1;        // target velocity node
    std::size_t stage = 0;
    bool feasible = false;  // false: no feasible transition, hold cp
};

// Table lookup from a continuous state: every next-velocity node is scored by
// the transition time plus the interpolated cost-to-go of the next stage.
Recommendation recommend_power(const EstimatedState& state, const ValueTables& t,
                               const CourseProfile& course, const RiderModel& m,
                               const PhysicsParams& prm);

struct RiderBehavior {
    double power_bias = 0.0;      // W
    double power_noise_sd = 0.0;  // W
    double response_lag = 0.0;    // s, time constant of the noise filter
    std::uint64_t seed = 0;

    void validate() const;
};

enum class ControlPolicy { follow_tables, hold_cp };

struct SimOptions {
    ControlPolicy policy = ControlPolicy::follow_tables;
    double tick = 1.0;       // s between recommendations
    double max_time = 0.0;   // s; 0 picks a bound from course length and v_min
};

struct RideLogRow {
    double t = 0.0;
    double x = 0.0;
    double v = 0.0;
    double p_cmd = 0.0;
    double p_applied = 0.0;
    double w = 0.0;
};

struct SimResult {
    std::vector<RideLogRow> log;
    std::vector<double> stage_power;  // recommendation on entering each stage
    double achieved_time = 0.0;
    bool finished = false;
    bool infeasible = false;
    std::size_t infeasible_stage = 0;
    int energy_clamps = 0;
    int power_caps = 0;  // applied power limited by max_power(w)
};

// Closed loop: recommendation -> rider response -> physics -> state estimate.
// Throws FingerprintError when the tables do not match the inputs.
SimResult simulate_ride(const CourseProfile& course, const RiderModel& m,
                        const PhysicsParams& prm, const ValueTables& t,
                        const RiderBehavior& behavior, const SimOptions& opt = {});

}  // namespace pacer
