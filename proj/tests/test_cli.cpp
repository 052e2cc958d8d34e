#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <sstream>

#include <fmt/format.h>

#include "pacer/cli.hpp"
#include "pacer/io.hpp"

using namespace pacer;

namespace {

struct Run {
    int code;
    std::string out, err;
};

Run run(const std::vector<std::string>& args) {
    std::ostringstream out, err;
    const int code = run_cli(args, out, err);
    return {code, out.str(), err.str()};
}

double field(const std::string& text, const std::string& key) {
    std::istringstream in(text);
    std::string k;
    std::string v;
    while (in >> k) {
        std::getline(in, v);
        if (k == key) return std::stod(v);
    }
    FAIL("missing " << key);
    return NAN;
}

struct Workspace {
    fs::path dir;
    explicit Workspace(const char* name) : dir(fs::temp_directory_path() / name) {
        fs::remove_all(dir);
        fs::create_directories(dir);
        std::string trace = "time_s,power_w\n";
        for (int i = 0; i <= 180; ++i) trace += fmt(i) + "," + (i < 60 ? "600" : "234") + "\n";
        write_text(dir / "trace.csv", trace);
        write_text(dir / "flat.csv", "distance_m,elevation_m\n0,0\n10300,0\n");
        write_text(dir / "hills.csv",
                   "distance_m,elevation_m\n0,0\n800,0\n3800,180\n4800,160\n7300,160\n10300,310\n");
        write_text(dir / "rider.json",
                   R"({"cp_w": 234, "awc_j": 9758, "rec_a": 0.6, "rec_b": 110,
                       "mp_a1": 1.8e-6, "mp_a2": 0.03, "mass_kg": 80, "crr": 0.004,
                       "cda_m2": 0.3})");
    }
    ~Workspace() { fs::remove_all(dir); }
    std::string operator/(const char* f) const { return (dir / f).string(); }
    static std::string fmt(int i) { return std::to_string(i); }
};

}  // namespace

TEST_CASE("fit-cp") {
    Workspace ws("pacer_cli_fit");
    const auto r = run({"-o", ws / "out", "fit-cp", ws / "trace.csv"});
    CHECK(r.code == 0);
    CHECK(field(r.out, "cp_w") == 234);
    CHECK(field(r.out, "awc_j") == 21960);
    CHECK(fs::exists(ws.dir / "out" / "rider_fit.json"));
    CHECK(fs::exists(ws.dir / "out" / "run_manifest.json"));
}

TEST_CASE("usage and input errors") {
    Workspace ws("pacer_cli_err");
    CHECK(run({"plan", "--bogus"}).code == 2);
    CHECK(run({}).code == 2);
    const auto bad = run({"fit-cp", ws / "trace.csv", "--frobnicate"});
    CHECK(bad.code == 2);
    CHECK(bad.err.find("Usage") != std::string::npos);
    CHECK(run({"--help"}).code == 0);

    write_text(ws.dir / "broken.csv", "time_s,power_w\n0,100\n1,abc\n");
    const auto parse = run({"-o", ws / "o", "fit-cp", ws / "broken.csv"});
    CHECK(parse.code == 3);
    CHECK(parse.err.find("broken.csv:3") != std::string::npos);

    write_text(ws.dir / "short.csv", "time_s,power_w\n0,100\n10,100\n");
    CHECK(run({"-o", ws / "o", "fit-cp", ws / "short.csv"}).code == 3);

    write_text(ws.dir / "rider_bad.json", R"({"cp_w": 234})");
    CHECK(run({"-o", ws / "o", "plan", "--course", ws / "flat.csv", "--rider",
               ws / "rider_bad.json"})
              .code == 3);
}

TEST_CASE("plan, simulate and plot") {
    Workspace ws("pacer_cli_plan");
    const auto p = run({"-o", ws / "a", "plan", "--course", ws / "flat.csv", "--rider",
                        ws / "rider.json", "--lab-mode", "--summary"});
    REQUIRE(p.code == 0);
    CHECK(field(p.out, "rows") == 103);
    const double total = field(p.out, "total_time_s");
    CHECK(std::isfinite(total));
    CHECK(total > 0);
    CHECK(field(p.out, "solve_seconds") < 60);
    CHECK(read_plan_series(ws.dir / "a" / "plan.csv").distance.size() == 103);

    // Same inputs, same bytes.
    REQUIRE(run({"-o", ws / "b", "plan", "--course", ws / "flat.csv", "--rider",
                 ws / "rider.json", "--lab-mode"})
                .code == 0);
    for (const char* f : {"plan.csv", "tables.bin", "profile.csv"})
        CHECK(read_text(ws.dir / "a" / f) == read_text(ws.dir / "b" / f));

    const auto s = run({"-o", ws / "a", "simulate", "--tables", ws / "a/tables.bin", "--rider",
                        ws / "rider.json", "--course", ws / "flat.csv", "--lab-mode",
                        "--noise-sd", "0"});
    REQUIRE(s.code == 0);
    CHECK(std::abs(field(s.out, "achieved_time_s") - total) <= 0.02 * total);
    CHECK(fs::exists(ws.dir / "a" / "ride_log.csv"));

    const auto s2 = run({"-o", ws / "c", "simulate", "--tables", ws / "a/tables.bin", "--rider",
                         ws / "rider.json", "--course", ws / "flat.csv", "--lab-mode",
                         "--noise-sd", "10", "--seed", "5"});
    const auto s3 = run({"-o", ws / "d", "simulate", "--tables", ws / "a/tables.bin", "--rider",
                         ws / "rider.json", "--course", ws / "flat.csv", "--lab-mode",
                         "--noise-sd", "10", "--seed", "5"});
    CHECK(s2.out == s3.out);
    CHECK(read_text(ws.dir / "c" / "ride_log.csv") == read_text(ws.dir / "d" / "ride_log.csv"));

    // Tables belong to the flat course.
    CHECK(run({"-o", ws / "e", "simulate", "--tables", ws / "a/tables.bin", "--rider",
               ws / "rider.json", "--course", ws / "hills.csv", "--lab-mode"})
              .code == 5);
    // Without --lab-mode the physics differ.
    CHECK(run({"-o", ws / "e", "simulate", "--tables", ws / "a/tables.bin", "--rider",
               ws / "rider.json", "--course", ws / "flat.csv"})
              .code == 5);

    const auto plot = run({"-o", ws / "a", "export-plot", "--plan", ws / "a/plan.csv",
                           "--baseline", ws / "a/ride_log.csv"});
    CHECK(plot.code == 0);
    const auto svg = read_text(ws.dir / "a" / "plot.svg");
    CHECK(svg.rfind("<svg", 0) == 0);
    CHECK(svg.find("</svg>") != std::string::npos);
}

TEST_CASE("infeasible start exits 4") {
    Workspace ws("pacer_cli_inf");
    write_text(ws.dir / "wall.csv", "distance_m,elevation_m\n0,0\n100,120\n200,120\n");
    const auto r = run({"-o", ws / "o", "plan", "--course", ws / "wall.csv", "--rider",
                        ws / "rider.json", "--w0", "0"});
    CHECK(r.code == 4);
    CHECK(r.err.find("stage 0") != std::string::npos);
}

TEST_CASE("fit-recovery and fit-maxpower") {
    Workspace ws("pacer_cli_rec");
    // fatigue 120 s at cp + awc/240 drains half the tank; the final efforts
    // give W_rec = 60 (final - cp) - awc/2 on a recovery line a = 0.5, b = 60.
    auto hold = [](double watts, int secs) {
        std::string s = "time_s,power_w\n";
        for (int i = 0; i <= secs; ++i) s += std::to_string(i) + "," + std::to_string(watts) + "\n";
        return s;
    };
    write_text(ws.dir / "fatigue.csv", hold(234 + 9758.0 / 240, 120));
    std::string tests;
    int n = 0;
    for (double p : {80.0, 150.0, 190.0}) {
        const double w_rec = (234 - (0.5 * p + 60)) * 120;
        const auto name = "final" + std::to_string(n++) + ".csv";
        write_text(ws.dir / name, hold(234 + (w_rec + 4879) / 60, 60));
        if (!tests.empty()) tests += ",";
        tests += R"({"fatigue": "fatigue.csv", "final": ")" + name +
                 R"(", "recovery_power_w": )" + std::to_string(p) +
                 R"(, "recovery_duration_s": 120})";
    }
    write_text(ws.dir / "manifest.json",
               R"({"cp_w": 234, "awc_j": 9758, "tests": [)" + tests + "]}");
    const auto r = run({"fit-recovery", ws / "manifest.json"});
    REQUIRE(r.code == 0);
    CHECK(field(r.out, "rec_a") == doctest::Approx(0.5).epsilon(1e-6));
    CHECK(field(r.out, "rec_b") == doctest::Approx(60).epsilon(1e-6));
    CHECK(field(r.out, "residual_rms") < 1e-4);

    write_text(ws.dir / "bad_manifest.json", R"({"tests": []})");
    CHECK(run({"fit-recovery", ws / "bad_manifest.json"}).code == 3);

    std::string mao = "time_s,power_w\n";
    double w = 9758;
    for (int i = 0; i <= 1800; ++i) {
        const double ex = 1.8e-6 * w * w + 0.03 * w;
        mao += std::to_string(i / 10.0) + "," + fmt::format("{}", 234 + ex) + "\n";
        w -= ex * 0.1;
    }
    write_text(ws.dir / "mao.csv", mao);
    const auto mp = run({"fit-maxpower", ws / "mao.csv", "--cp", "234", "--awc", "9758"});
    REQUIRE(mp.code == 0);
    CHECK(field(mp.out, "mp_a1") == doctest::Approx(1.8e-6).epsilon(1e-6));
    CHECK(field(mp.out, "mp_a2") == doctest::Approx(0.03).epsilon(1e-6));
    CHECK(run({"fit-maxpower", ws / "mao.csv", "--cp", "234"}).code == 2);
}
