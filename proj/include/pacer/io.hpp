#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "pacer/course.hpp"
#include "pacer/dp_solver.hpp"
#include "pacer/model_fitting.hpp"
#include "pacer/physics.hpp"
#include "pacer/rider_model.hpp"
#include "pacer/sil_controller.hpp"

namespace pacer {

namespace fs = std::filesystem;

// Numeric CSV with a header row. Required columns must be present; optional
// ones are filled with NaN when absent. Errors name the file and line.
struct CsvTable {
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;
    std::vector<int> lines;  // source line of each row
};
CsvTable parse_csv(const std::string& text, const std::string& name,
                   const std::vector<std::string>& required,
                   const std::vector<std::string>& optional = {});
CsvTable read_csv(const fs::path& path, const std::vector<std::string>& required,
                  const std::vector<std::string>& optional = {});
std::string read_text(const fs::path& path);
void write_text(const fs::path& path, const std::string& text);

PowerTrace read_power_trace(const fs::path& path);
std::vector<ElevationPoint> read_course_points(const fs::path& path);
// .gpx by extension, course CSV otherwise.
CourseProfile load_course(const fs::path& path, double dx, int smooth_window = 1);

std::string profile_csv(const CourseProfile& c);
CourseProfile read_profile_csv(const fs::path& path, double dx);
std::string course_points_csv(const std::vector<ElevationPoint>& pts);

struct RiderConfig {
    RiderModel model;
    PhysicsParams physics;
};
RiderConfig parse_rider_config(const std::string& json_text, const std::string& name);
RiderConfig load_rider_config(const fs::path& path);
std::string rider_config_json(const RiderConfig& cfg);

struct IntervalManifest {
    std::optional<double> cp;
    std::optional<double> awc;
    std::vector<IntervalTestRecord> tests;
};
// Segment paths are resolved relative to the manifest's directory.
IntervalManifest load_interval_manifest(const fs::path& path);

std::string plan_csv(const PacingPlan& plan);
struct PlotSeries {
    std::vector<double> distance, power, velocity;
};
PlotSeries read_plan_series(const fs::path& path);

std::string ride_log_csv(const std::vector<RideLogRow>& log);
PlotSeries read_ride_log_series(const fs::path& path);

std::vector<RideSample> read_ride_samples(const fs::path& path);

}  // namespace pacer
