#include "pacer/cli.hpp"

#include <chrono>
#include <filesystem>
#include <optional>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <json.hpp>

#include "pacer/dp_solver.hpp"
#include "pacer/errors.hpp"
#include "pacer/io.hpp"
#include "pacer/model_fitting.hpp"
#include "pacer/plot.hpp"
#include "pacer/sil_controller.hpp"
#include "pacer/table_io.hpp"

namespace pacer {

namespace {

std::string clock_time(double seconds) {
    const auto total = static_cast<long>(std::lround(seconds));
    return fmt::format("{}:{:02d}", total / 60, total % 60);
}

std::string fmt_diag(const FitDiagnostics& d) {
    return fmt::format("residual_rms {}\nr_squared {}\nn_points {}\n", d.residual_rms,
                       d.r_squared, d.n_points);
}

// Record of one invocation, written next to the outputs.
struct RunManifest {
    std::string subcommand;
    std::vector<std::pair<std::string, std::string>> inputs;
    std::vector<std::pair<std::string, std::string>> overrides;
    fs::path output_dir;

    void write() const {
        nlohmann::ordered_json j;
        j["subcommand"] = subcommand;
        j["tool_version"] = kVersion;
        for (const auto& [k, v] : inputs) j["inputs"][k] = v;
        j["overrides"] = nlohmann::ordered_json::object();
        for (const auto& [k, v] : overrides) j["overrides"][k] = v;
        write_text(output_dir / "run_manifest.json", j.dump(2) + "\n");
    }
};

struct Options {
    std::string out_dir = ".";

    std::string trace, manifest, course, rider, tables, plan, baseline, replay, svg_out;
    std::optional<double> cp, awc, dx, vmax, vmin, v0, w0;
    int nv = 32, nw = 100, smooth = 1;
    bool lab_mode = false, summary = false, include_negative = false;
    double noise_sd = 0.0, bias = 0.0, lag = 0.0;
    std::uint64_t seed = 0;
    std::string policy = "tables";
};

void prepare_output(const Options& o) {
    std::error_code ec;
    fs::create_directories(o.out_dir, ec);
    if (ec || !fs::is_directory(o.out_dir))
        throw CLI::ValidationError("--output-dir", "cannot create " + o.out_dir);
}

int cmd_fit_cp(const Options& o, std::ostream& out) {
    prepare_output(o);
    const auto trace = read_power_trace(o.trace);
    CpAwc fit;
    try {
        fit = fit_cp_awc(trace);
    } catch (const std::invalid_argument& e) {
        throw InputError(o.trace + ": " + e.what());
    }
    out << fmt::format("cp_w {}\nawc_j {}\ncp4_w {}\n", fit.cp, fit.awc, cp4_power(fit.cp, fit.awc));
    nlohmann::ordered_json j;
    j["cp_w"] = fit.cp;
    j["awc_j"] = fit.awc;
    write_text(fs::path(o.out_dir) / "rider_fit.json", j.dump(2) + "\n");
    RunManifest{"fit-cp", {{"trace", o.trace}}, {}, o.out_dir}.write();
    return kExitOk;
}

int cmd_fit_recovery(const Options& o, std::ostream& out) {
    const auto man = load_interval_manifest(o.manifest);
    const auto cp = o.cp ? o.cp : man.cp;
    const auto awc = o.awc ? o.awc : man.awc;
    if (!cp || !awc)
        throw InputError(o.manifest + ": cp_w and awc_j must be given in the manifest or as flags");
    for (std::size_t i = 0; i < man.tests.size(); ++i) {
        const auto& rec = man.tests[i];
        if (!(rec.recovery_power < *cp))
            throw InputError(fmt::format("{}: test {}: recovery power {} W is not below cp",
                                         o.manifest, i, rec.recovery_power));
        const auto r = recovered_energy(rec, *cp, *awc);
        out << fmt::format("test {} power_w {} duration_s {} w_rec_j {} p_adj_w {}{}\n", i,
                           rec.recovery_power, rec.recovery_duration, r.w_rec,
                           adjusted_power(r.w_rec, rec.recovery_duration, *cp),
                           r.negative ? " NEGATIVE" : "");
    }
    const auto pts = recovery_points(man.tests, *cp, *awc, o.include_negative);
    RecoveryLineFit fit;
    try {
        fit = fit_recovery_line(pts);
    } catch (const std::invalid_argument& e) {
        throw InputError(o.manifest + ": " + e.what());
    }
    out << fmt::format("rec_a {}\nrec_b {}\n", fit.a, fit.b) << fmt_diag(fit.diag);
    return kExitOk;
}

int cmd_fit_maxpower(const Options& o, std::ostream& out) {
    const auto trace = read_power_trace(o.trace);
    MaxPowerFit fit;
    try {
        fit = fit_max_power_curve(trace, *o.cp, *o.awc);
    } catch (const std::invalid_argument& e) {
        throw InputError(o.trace + ": " + e.what());
    }
    out << fmt::format("mp_a1 {}\nmp_a2 {}\n", fit.a1, fit.a2) << fmt_diag(fit.diag);
    return kExitOk;
}

RiderConfig rider_with_overrides(const Options& o) {
    auto rc = load_rider_config(o.rider);
    if (o.lab_mode) rc.physics.lab_mode = true;
    return rc;
}

int cmd_plan(const Options& o, std::ostream& out) {
    prepare_output(o);
    const auto rc = rider_with_overrides(o);
    SolverConfig cfg;
    cfg.dx = o.dx.value_or(100.0);
    cfg.n_v = o.nv;
    cfg.n_w = o.nw;
    cfg.v_max = o.vmax.value_or(rc.model.vmax());
    if (o.vmin) cfg.v_min = *o.vmin;
    cfg.v0 = o.v0;
    cfg.w0 = o.w0;
    try {
        cfg.validate();
        cfg.resolved(rc.model);
    } catch (const std::invalid_argument& e) {
        throw CLI::ValidationError("plan", e.what());
    }
    const auto course = load_course(o.course, cfg.dx, o.smooth);

    const auto t0 = std::chrono::steady_clock::now();
    const auto tables = solve_backward(course, rc.model, rc.physics, cfg);
    const double solve_s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    const fs::path dir = o.out_dir;
    write_text(dir / "profile.csv", profile_csv(course));
    export_tables(tables, dir / "tables.bin");
    const auto plan = extract_plan(tables, course, rc.model, rc.physics);
    write_text(dir / "plan.csv", plan_csv(plan));

    RunManifest man{"plan", {{"course", o.course}, {"rider", o.rider}}, {}, dir};
    man.overrides = {{"dx", fmt::format("{}", cfg.dx)},
                     {"nv", std::to_string(cfg.n_v)},
                     {"nw", std::to_string(cfg.n_w)},
                     {"vmax", fmt::format("{}", cfg.v_max)},
                     {"vmin", fmt::format("{}", cfg.v_min)},
                     {"lab_mode", rc.physics.lab_mode ? "true" : "false"}};
    man.write();

    out << fmt::format("total_time_s {}\ntotal_time {}\nrows {}\n", plan.total_time,
                       clock_time(plan.total_time), plan.rows.size());
    if (o.summary)
        out << fmt::format("stages {}\ngrid {}x{}\nthreads {}\nsolve_seconds {:.3f}\n",
                           tables.n_stages, cfg.n_v, cfg.n_w, solver_threads_from_env(), solve_s);
    return kExitOk;
}

int cmd_simulate(const Options& o, std::ostream& out) {
    prepare_output(o);
    const auto rc = rider_with_overrides(o);
    const auto tables = import_tables(o.tables);
    const auto course = load_course(o.course, tables.config.dx, o.smooth);
    check_fingerprints(tables, course, rc.model, rc.physics);
    const fs::path dir = o.out_dir;

    if (!o.replay.empty()) {
        const auto samples = read_ride_samples(o.replay);
        EstimatedState start{0.0, 0.0, tables.config.start_energy(rc.model)};
        const auto states = reestimate_ride(samples, rc.model, start);
        std::string csv =
            "time_s,distance_m,velocity_mps,power_w,remaining_energy_j,recommended_power_w\n";
        for (std::size_t i = 0; i < samples.size(); ++i) {
            auto s = states[i];
            s.x = std::min(s.x, course.total_length());
            const auto rec = recommend_power(s, tables, course, rc.model, rc.physics);
            csv += fmt::format("{},{},{},{},{},{}\n", samples[i].t, s.x, s.v, samples[i].p, s.w,
                               rec.power);
        }
        write_text(dir / "replay.csv", csv);
        RunManifest{"simulate",
                    {{"tables", o.tables}, {"rider", o.rider}, {"course", o.course},
                     {"replay", o.replay}},
                    {},
                    dir}
            .write();
        out << fmt::format("samples {}\nfinal_energy_j {}\n", samples.size(), states.back().w);
        return kExitOk;
    }

    RiderBehavior beh{o.bias, o.noise_sd, o.lag, o.seed};
    SimOptions opt;
    if (o.policy == "hold-cp")
        opt.policy = ControlPolicy::hold_cp;
    else if (o.policy != "tables")
        throw CLI::ValidationError("--policy", "expected 'tables' or 'hold-cp'");
    SimResult res;
    try {
        res = simulate_ride(course, rc.model, rc.physics, tables, beh, opt);
    } catch (const std::invalid_argument& e) {
        throw CLI::ValidationError("simulate", e.what());
    }
    write_text(dir / "ride_log.csv", ride_log_csv(res.log));
    RunManifest man{"simulate", {{"tables", o.tables}, {"rider", o.rider}, {"course", o.course}},
                    {}, dir};
    man.overrides = {{"noise_sd", fmt::format("{}", o.noise_sd)},
                     {"seed", std::to_string(o.seed)},
                     {"bias", fmt::format("{}", o.bias)},
                     {"lag", fmt::format("{}", o.lag)},
                     {"policy", o.policy}};
    man.write();

    out << fmt::format("achieved_time_s {}\nachieved_time {}\nfinished {}\nenergy_clamps {}\n"
                       "power_caps {}\n",
                       res.achieved_time, clock_time(res.achieved_time), res.finished,
                       res.energy_clamps, res.power_caps);
    if (res.infeasible) {
        out << fmt::format("infeasible_stage {}\n", res.infeasible_stage);
        return kExitInfeasible;
    }
    return kExitOk;
}

int cmd_export_plot(const Options& o, std::ostream& out) {
    const auto plan = read_plan_series(o.plan);
    std::optional<PlotSeries> base;
    if (!o.baseline.empty()) base = read_ride_log_series(o.baseline);
    fs::path target = o.svg_out.empty() ? fs::path(o.out_dir) / "plot.svg" : fs::path(o.svg_out);
    if (target.has_parent_path()) {
        std::error_code ec;
        fs::create_directories(target.parent_path(), ec);
    }
    write_text(target, render_plan_svg(plan, base));
    out << "wrote " << target.string() << "\n";
    return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Time-trial pacing: rider model fitting, DP pacing plans, closed-loop simulation",
                 "pacer"};
    app.set_version_flag("--version", kVersion);
    app.require_subcommand(1);
    Options o;
    app.add_option("-o,--output-dir", o.out_dir, "Directory for output files");

    auto* fit_cp = app.add_subcommand("fit-cp", "Critical power and AWC from a 3-min all-out trace");
    fit_cp->add_option("trace", o.trace, "CSV time_s,power_w[,smo2_pct]")
        ->required()
        ->check(CLI::ExistingFile);

    auto* fit_rec = app.add_subcommand("fit-recovery", "Recovery line from interval tests");
    fit_rec->add_option("manifest", o.manifest, "Interval test manifest (JSON)")
        ->required()
        ->check(CLI::ExistingFile);
    fit_rec->add_option("--cp", o.cp, "Critical power, W");
    fit_rec->add_option("--awc", o.awc, "Anaerobic work capacity, J");
    fit_rec->add_flag("--include-negative", o.include_negative,
                      "Keep tests with negative recovered energy");

    auto* fit_mp = app.add_subcommand("fit-maxpower", "Maximum-power curve from a 3-min all-out");
    fit_mp->add_option("trace", o.trace)->required()->check(CLI::ExistingFile);
    fit_mp->add_option("--cp", o.cp, "Critical power, W")->required();
    fit_mp->add_option("--awc", o.awc, "Anaerobic work capacity, J")->required();

    auto* plan = app.add_subcommand("plan", "Solve the pacing problem over a course");
    plan->add_option("--course", o.course, "Course CSV or GPX")->required()->check(CLI::ExistingFile);
    plan->add_option("--rider", o.rider, "Rider config JSON")->required()->check(CLI::ExistingFile);
    plan->add_flag("--lab-mode", o.lab_mode, "Omit aerodynamic drag");
    plan->add_option("--dx", o.dx, "Stage length, m (default 100)");
    plan->add_option("--nv", o.nv, "Velocity nodes");
    plan->add_option("--nw", o.nw, "Energy nodes");
    plan->add_option("--vmax", o.vmax, "Maximum velocity, m/s (default from rider)");
    plan->add_option("--vmin", o.vmin, "Minimum velocity, m/s");
    plan->add_option("--v0", o.v0, "Initial velocity, m/s");
    plan->add_option("--w0", o.w0, "Initial energy, J");
    plan->add_option("--smooth", o.smooth, "Elevation moving-average window (odd)");
    plan->add_flag("--summary", o.summary, "Report solver timing and grid");

    auto* sim = app.add_subcommand("simulate", "Closed-loop ride against saved tables");
    sim->add_option("--tables", o.tables)->required()->check(CLI::ExistingFile);
    sim->add_option("--rider", o.rider)->required()->check(CLI::ExistingFile);
    sim->add_option("--course", o.course)->required()->check(CLI::ExistingFile);
    sim->add_flag("--lab-mode", o.lab_mode);
    sim->add_option("--noise-sd", o.noise_sd, "Rider power noise, W");
    sim->add_option("--seed", o.seed);
    sim->add_option("--bias", o.bias, "Rider power bias, W");
    sim->add_option("--lag", o.lag, "Noise filter time constant, s");
    sim->add_option("--policy", o.policy, "tables | hold-cp");
    sim->add_option("--smooth", o.smooth);
    sim->add_option("--replay", o.replay, "Recorded ride CSV to re-estimate")
        ->check(CLI::ExistingFile);

    auto* plot = app.add_subcommand("export-plot", "SVG of power and velocity against distance");
    plot->add_option("--plan", o.plan)->required()->check(CLI::ExistingFile);
    plot->add_option("--baseline", o.baseline, "Ride log CSV")->check(CLI::ExistingFile);
    plot->add_option("--out", o.svg_out, "SVG path (default <output-dir>/plot.svg)");

    std::vector<std::string> rev(args.rbegin(), args.rend());
    try {
        app.parse(rev);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::CallForVersion&) {
        out << kVersion << "\n";
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n" << app.help();
        return kExitUsage;
    }

    try {
        if (fit_cp->parsed()) return cmd_fit_cp(o, out);
        if (fit_rec->parsed()) return cmd_fit_recovery(o, out);
        if (fit_mp->parsed()) return cmd_fit_maxpower(o, out);
        if (plan->parsed()) return cmd_plan(o, out);
        if (sim->parsed()) return cmd_simulate(o, out);
        if (plot->parsed()) return cmd_export_plot(o, out);
    } catch (const CLI::ValidationError& e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const InputError& e) {
        err << "error: " << e.what() << "\n";
        return kExitInput;
    } catch (const InfeasibleError& e) {
        err << "error: infeasible: " << e.what() << "\n";
        return kExitInfeasible;
    } catch (const FingerprintError& e) {
        err << "error: " << e.what() << "\n";
        return kExitFingerprint;
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << "\n";
        return kExitInput;
    }
    return kExitUsage;
}

}  // namespace pacer
