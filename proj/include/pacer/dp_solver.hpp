#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <vector>

#include "pacer/course.hpp"
#include "pacer/physics.hpp"
#include "pacer/rider_model.hpp"

namespace pacer {

constexpr double kInfeasible = std::numeric_limits<double>::infinity();

struct SolverConfig {
    double dx = 100.0;            // m
    int n_v = 32;
    int n_w = 100;
    double v_min = kDefaultVMin;  // m/s
    double v_max = 16.0;          // m/s
    double tie_epsilon = 1e-12;   // s
    std::optional<double> v0;     // defaults to v_min
    std::optional<double> w0;     // defaults to awc

    void validate() const;
    double start_velocity() const { return v0.value_or(v_min); }
    double start_energy(const RiderModel& m) const { return w0.value_or(m.awc()); }
    // Copy with v0 and w0 filled in.
    SolverConfig resolved(const RiderModel& m) const;
    std::uint64_t fingerprint(const RiderModel& m) const;
};

std::uint64_t rider_fingerprint(const RiderModel& m);

// Uniform velocity nodes on [v_min, v_max] and energy nodes on [0, awc].
struct StateGrid {
    double v_min = 0.0, v_max = 0.0;
    int n_v = 0;
    double awc = 0.0;
    int n_w = 0;

    StateGrid() = default;
    StateGrid(const SolverConfig& cfg, double awc);

    double velocity(int j) const;
    double energy(int k) const;
    double w_step() const { return awc / (n_w - 1); }
    int nearest_velocity(double v) const;
};

struct Transition {
    double w_next = 0.0;  // J
    double p = 0.0;       // rider power, W
    double p_req = 0.0;   // physics demand, W (negative means braking)
    double dt = 0.0;      // s
    bool feasible = false;
};

// One distance step from (v_i, w_i) to v_next. The rider supplies exactly the
// required power; the switching energy model moves w.
Transition transition(double v_i, double w_i, double v_next, double theta,
                      const RiderModel& m, const PhysicsParams& prm, double dx);

// Energy bookkeeping of a transition whose demand and duration are known.
Transition transition_from_demand(double p_req, double dt, double w_i, const RiderModel& m);

struct TableFingerprints {
    std::uint64_t config = 0;
    std::uint64_t rider = 0;
    std::uint64_t physics = 0;
    std::uint64_t course = 0;
    std::uint64_t combined = 0;

    bool operator==(const TableFingerprints&) const = default;
};

TableFingerprints make_fingerprints(const SolverConfig& cfg, const RiderModel& m,
                                    const PhysicsParams& prm, const CourseProfile& course);

// Backward DP results: cost_to_go over (stage, v node, w node) with stage
// n_stages the finish line, and the argmin next-velocity node per state.
struct ValueTables {
    SolverConfig config;  // resolved
    StateGrid grid;
    std::size_t n_stages = 0;
    std::vector<double> cost;           // (n_stages + 1) * n_v * n_w
    std::vector<std::int32_t> policy;   // n_stages * n_v * n_w, -1 where infeasible
    TableFingerprints fingerprints;

    std::size_t index(std::size_t stage, int j, int k) const {
        return (stage * grid.n_v + j) * grid.n_w + k;
    }
    double cost_at(std::size_t stage, int j, int k) const { return cost[index(stage, j, k)]; }
    int policy_at(std::size_t stage, int j, int k) const { return policy[index(stage, j, k)]; }
    std::span<const double> cost_row(std::size_t stage, int j) const {
        return {cost.data() + index(stage, j, 0), static_cast<std::size_t>(grid.n_w)};
    }
};

// Linear interpolation of a cost row at energy w, clamped to the bracketing
// values. A bracket with an infeasible node is infeasible unless w sits on
// the feasible node.
double interpolate_cost(std::span<const double> row, double w_step, double w);

// Worker count from PACER_THREADS (0 or unset = OpenMP default).
int solver_threads_from_env();

// threads <= 0 uses solver_threads_from_env().
ValueTables solve_backward(const CourseProfile& course, const RiderModel& m,
                           const PhysicsParams& prm, const SolverConfig& cfg, int threads = 0);

// Single-threaded reference implementation; bitwise identical output.
ValueTables solve_backward_serial(const CourseProfile& course, const RiderModel& m,
                                  const PhysicsParams& prm, const SolverConfig& cfg);

struct Choice {
    int v_node = -1;
    Transition tr;
    double score = kInfeasible;  // dt + cost-to-go after the step
};

// Best next-velocity node from a continuous state over a step of length dx on
// slope theta, scored against the cost row of next_stage. Ties within
// tie_epsilon go to the lower node.
Choice best_transition(const ValueTables& t, const RiderModel& m, const PhysicsParams& prm,
                       double v, double w, double theta, double dx, std::size_t next_stage);

struct PlanRow {
    double x = 0.0;        // interval start, m
    double v = 0.0;        // speed at interval start, m/s
    double v_next = 0.0;   // speed at interval end, m/s
    double p = 0.0;        // rider power over the interval, W
    double w = 0.0;        // energy at interval start, J
    double w_next = 0.0;   // energy at interval end, J
    double dt = 0.0;       // s
    double t_elapsed = 0.0;  // at interval end, s
};

struct PacingPlan {
    std::vector<PlanRow> rows;
    double total_time = 0.0;
};

// Throws FingerprintError if the tables were solved for other inputs.
void check_fingerprints(const ValueTables& t, const CourseProfile& course, const RiderModel& m,
                        const PhysicsParams& prm);

// Forward rollout from (v0, w0). At each stage the stored policies of the two
// energy nodes bracketing w are compared and the cheaper one is taken, with w
// propagated exactly. Throws InfeasibleError when the start is infeasible.
PacingPlan extract_plan(const ValueTables& t, const CourseProfile& course, const RiderModel& m,
                        const PhysicsParams& prm);

}  // namespace pacer
