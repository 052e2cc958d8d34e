#include "pacer/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include <fmt/format.h>
#include <json.hpp>

#include "pacer/errors.hpp"

namespace pacer {

namespace {

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split(const std::string& line) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const auto pos = line.find(',', start);
        out.push_back(trim(std::string_view(line).substr(start, pos - start)));
        if (pos == std::string::npos) break;
        start = pos + 1;
    }
    return out;
}

bool parse_double(const std::string& s, double& out) {
    const char* b = s.data();
    const char* e = b + s.size();
    if (b != e && *b == '+') ++b;
    const auto r = std::from_chars(b, e, out);
    return r.ec == std::errc() && r.ptr == e && b != e;
}

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

}  // namespace

std::string read_text(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError(path.string() + ": cannot open");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw InputError(path.string() + ": cannot open for writing");
    out << text;
    if (!out) throw InputError(path.string() + ": write failed");
}

CsvTable parse_csv(const std::string& text, const std::string& name,
                   const std::vector<std::string>& required,
                   const std::vector<std::string>& optional) {
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    std::vector<std::string> header;
    while (std::getline(in, line)) {
        ++lineno;
        if (!trim(line).empty()) {
            header = split(line);
            break;
        }
    }
    if (header.empty()) throw InputError(name + ": empty file, expected a header row");

    std::vector<int> index;
    auto find = [&](const std::string& col) {
        for (std::size_t i = 0; i < header.size(); ++i)
            if (header[i] == col) return static_cast<int>(i);
        return -1;
    };
    CsvTable t;
    for (const auto& col : required) {
        const int i = find(col);
        if (i < 0) throw InputError(name + ": missing column '" + col + "'");
        index.push_back(i);
        t.columns.push_back(col);
    }
    for (const auto& col : optional) {
        index.push_back(find(col));
        t.columns.push_back(col);
    }

    while (std::getline(in, line)) {
        ++lineno;
        if (trim(line).empty()) continue;
        const auto fields = split(line);
        if (fields.size() != header.size())
            throw InputError(fmt::format("{}:{}: expected {} fields, found {}", name, lineno,
                                         header.size(), fields.size()));
        std::vector<double> row;
        for (std::size_t c = 0; c < index.size(); ++c) {
            if (index[c] < 0 || (c >= required.size() && fields[index[c]].empty())) {
                row.push_back(kNaN);
                continue;
            }
            double v = 0.0;
            if (!parse_double(fields[index[c]], v) || !std::isfinite(v))
                throw InputError(fmt::format("{}:{}: bad number '{}' in column '{}'", name,
                                             lineno, fields[index[c]], t.columns[c]));
            row.push_back(v);
        }
        t.rows.push_back(std::move(row));
        t.lines.push_back(lineno);
    }
    return t;
}

CsvTable read_csv(const fs::path& path, const std::vector<std::string>& required,
                  const std::vector<std::string>& optional) {
    return parse_csv(read_text(path), path.string(), required, optional);
}

PowerTrace read_power_trace(const fs::path& path) {
    const auto t = read_csv(path, {"time_s", "power_w"}, {"smo2_pct"});
    std::vector<TraceSample> s;
    for (std::size_t i = 0; i < t.rows.size(); ++i) {
        const auto& r = t.rows[i];
        if (i > 0 && !(r[0] > t.rows[i - 1][0]))
            throw InputError(fmt::format("{}:{}: timestamps not increasing", path.string(),
                                         t.lines[i]));
        if (r[1] < 0.0)
            throw InputError(fmt::format("{}:{}: negative power", path.string(), t.lines[i]));
        s.push_back({r[0], r[1], std::isnan(r[2]) ? std::nullopt : std::optional(r[2])});
    }
    if (s.size() < 2) throw InputError(path.string() + ": fewer than 2 samples");
    return PowerTrace(std::move(s));
}

std::vector<ElevationPoint> read_course_points(const fs::path& path) {
    const auto t = read_csv(path, {"distance_m", "elevation_m"});
    std::vector<ElevationPoint> pts;
    for (std::size_t i = 0; i < t.rows.size(); ++i) {
        if (i == 0 && t.rows[i][0] != 0.0)
            throw InputError(fmt::format("{}:{}: distance must start at 0", path.string(),
                                         t.lines[i]));
        if (i > 0 && !(t.rows[i][0] > t.rows[i - 1][0]))
            throw InputError(fmt::format("{}:{}: distance not increasing", path.string(),
                                         t.lines[i]));
        pts.push_back({t.rows[i][0], t.rows[i][1]});
    }
    if (pts.size() < 2) throw InputError(path.string() + ": fewer than 2 course points");
    return pts;
}

CourseProfile load_course(const fs::path& path, double dx, int smooth_window) {
    auto ext = path.extension().string();
    for (auto& ch : ext) ch = static_cast<char>(std::tolower(ch));
    try {
        if (ext == ".gpx") return load_gpx(read_text(path), dx, smooth_window);
        return load_profile(smooth_elevation(read_course_points(path), smooth_window), dx);
    } catch (const std::invalid_argument& e) {
        throw InputError(path.string() + ": " + e.what());
    } catch (const InputError& e) {
        const std::string msg = e.what();
        if (msg.rfind(path.string(), 0) == 0) throw;
        throw InputError(path.string() + ": " + msg);
    }
}

std::string profile_csv(const CourseProfile& c) {
    std::string out = "interval_index,theta_rad,elevation_m\n";
    for (std::size_t i = 0; i < c.size(); ++i)
        out += fmt::format("{},{},{}\n", i, c[i].theta, c[i].elevation_start);
    return out;
}

CourseProfile read_profile_csv(const fs::path& path, double dx) {
    const auto t = read_csv(path, {"interval_index", "theta_rad", "elevation_m"});
    std::vector<CourseInterval> iv;
    for (std::size_t i = 0; i < t.rows.size(); ++i) {
        if (t.rows[i][0] != static_cast<double>(i))
            throw InputError(fmt::format("{}:{}: interval index out of sequence", path.string(),
                                         t.lines[i]));
        iv.push_back({t.rows[i][1], t.rows[i][2]});
    }
    try {
        return CourseProfile(dx, std::move(iv));
    } catch (const std::invalid_argument& e) {
        throw InputError(path.string() + ": " + e.what());
    }
}

std::string course_points_csv(const std::vector<ElevationPoint>& pts) {
    std::string out = "distance_m,elevation_m\n";
    for (const auto& p : pts) out += fmt::format("{},{}\n", p.distance, p.elevation);
    return out;
}

RiderConfig parse_rider_config(const std::string& json_text, const std::string& name) {
    using nlohmann::json;
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw InputError(name + ": " + e.what());
    }
    if (!j.is_object()) throw InputError(name + ": expected a JSON object");
    auto num = [&](const char* key, std::optional<double> def) -> double {
        if (!j.contains(key)) {
            if (def) return *def;
            throw InputError(name + ": missing key '" + key + "'");
        }
        if (!j[key].is_number()) throw InputError(name + ": key '" + key + "' is not a number");
        return j[key].get<double>();
    };
    RiderModel::Params p;
    p.cp = num("cp_w", std::nullopt);
    p.awc = num("awc_j", std::nullopt);
    p.rec_a = num("rec_a", std::nullopt);
    p.rec_b = num("rec_b", std::nullopt);
    p.mp_a1 = num("mp_a1", std::nullopt);
    p.mp_a2 = num("mp_a2", std::nullopt);
    p.vmax = num("vmax_mps", 16.0);

    PhysicsParams prm;
    prm.m_t = num("mass_kg", std::nullopt);
    prm.g = num("g", 9.81);
    prm.mu = num("crr", std::nullopt);
    prm.cd_a = num("cda_m2", std::nullopt);
    prm.rho = num("rho_kgm3", 1.225);
    if (j.contains("lab_mode")) {
        if (!j["lab_mode"].is_boolean())
            throw InputError(name + ": key 'lab_mode' is not a boolean");
        prm.lab_mode = j["lab_mode"].get<bool>();
    }
    try {
        prm.validate();
        return RiderConfig{RiderModel(p), prm};
    } catch (const std::invalid_argument& e) {
        throw InputError(name + ": " + e.what());
    }
}

RiderConfig load_rider_config(const fs::path& path) {
    return parse_rider_config(read_text(path), path.string());
}

std::string rider_config_json(const RiderConfig& cfg) {
    nlohmann::ordered_json j;
    const auto& p = cfg.model.params();
    j["cp_w"] = p.cp;
    j["awc_j"] = p.awc;
    j["rec_a"] = p.rec_a;
    j["rec_b"] = p.rec_b;
    j["mp_a1"] = p.mp_a1;
    j["mp_a2"] = p.mp_a2;
    j["vmax_mps"] = p.vmax;
    j["mass_kg"] = cfg.physics.m_t;
    j["g"] = cfg.physics.g;
    j["crr"] = cfg.physics.mu;
    j["cda_m2"] = cfg.physics.cd_a;
    j["rho_kgm3"] = cfg.physics.rho;
    j["lab_mode"] = cfg.physics.lab_mode;
    return j.dump(2) + "\n";
}

IntervalManifest load_interval_manifest(const fs::path& path) {
    using nlohmann::json;
    const std::string name = path.string();
    json j;
    try {
        j = json::parse(read_text(path));
    } catch (const json::parse_error& e) {
        throw InputError(name + ": " + e.what());
    }
    IntervalManifest m;
    try {
        if (j.contains("cp_w")) m.cp = j.at("cp_w").get<double>();
        if (j.contains("awc_j")) m.awc = j.at("awc_j").get<double>();
        const auto& tests = j.at("tests");
        if (!tests.is_array() || tests.empty())
            throw InputError(name + ": 'tests' must be a non-empty array");
        const auto base = path.parent_path();
        for (std::size_t i = 0; i < tests.size(); ++i) {
            const auto& t = tests[i];
            const double power = t.at("recovery_power_w").get<double>();
            const double duration = t.at("recovery_duration_s").get<double>();
            if (!(duration > 0.0))
                throw InputError(fmt::format("{}: test {}: recovery duration must be positive",
                                             name, i));
            m.tests.push_back({read_power_trace(base / t.at("fatigue").get<std::string>()),
                               power, duration,
                               read_power_trace(base / t.at("final").get<std::string>())});
        }
    } catch (const json::exception& e) {
        throw InputError(name + ": " + e.what());
    } catch (const std::invalid_argument& e) {
        throw InputError(name + ": " + e.what());
    }
    return m;
}

std::string plan_csv(const PacingPlan& plan) {
    std::string out =
        "distance_m,target_power_w,velocity_mps,remaining_energy_j,elapsed_time_s\n";
    for (const auto& r : plan.rows)
        out += fmt::format("{},{},{},{},{}\n", r.x, r.p, r.v, r.w, r.t_elapsed);
    return out;
}

PlotSeries read_plan_series(const fs::path& path) {
    const auto t = read_csv(path, {"distance_m", "target_power_w", "velocity_mps"});
    PlotSeries s;
    for (const auto& r : t.rows) {
        s.distance.push_back(r[0]);
        s.power.push_back(r[1]);
        s.velocity.push_back(r[2]);
    }
    return s;
}

std::string ride_log_csv(const std::vector<RideLogRow>& log) {
    std::string out =
        "time_s,distance_m,velocity_mps,power_cmd_w,power_applied_w,remaining_energy_j\n";
    for (const auto& r : log)
        out += fmt::format("{},{},{},{},{},{}\n", r.t, r.x, r.v, r.p_cmd, r.p_applied, r.w);
    return out;
}

PlotSeries read_ride_log_series(const fs::path& path) {
    const auto t = read_csv(path, {"distance_m", "velocity_mps", "power_applied_w"});
    PlotSeries s;
    for (const auto& r : t.rows) {
        s.distance.push_back(r[0]);
        s.velocity.push_back(r[1]);
        s.power.push_back(r[2]);
    }
    return s;
}

std::vector<RideSample> read_ride_samples(const fs::path& path) {
    const auto t = read_csv(path, {"time_s", "power_w", "velocity_mps"}, {"smo2_pct"});
    std::vector<RideSample> out;
    for (std::size_t i = 0; i < t.rows.size(); ++i) {
        const auto& r = t.rows[i];
        if (i > 0 && r[0] < t.rows[i - 1][0])
            throw InputError(fmt::format("{}:{}: time going backwards", path.string(),
                                         t.lines[i]));
        if (r[1] < 0.0 || r[2] < 0.0)
            throw InputError(fmt::format("{}:{}: negative power or velocity", path.string(),
                                         t.lines[i]));
        out.push_back({r[0], r[1], r[2], std::isnan(r[3]) ? std::nullopt : std::optional(r[3])});
    }
    if (out.empty()) throw InputError(path.string() + ": no samples");
    return out;
}

}  // namespace pacer
