#pragma once

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

namespace pacer {

struct ElevationPoint {
    double distance = 0.0;   // m from start
    double elevation = 0.0;  // m
};

struct CourseInterval {
    double theta = 0.0;            // slope angle, rad, positive uphill
    double elevation_start = 0.0;  // m
};

// Fixed-step course: interval i spans [i dx, (i+1) dx].
class CourseProfile {
public:
    // Throws std::invalid_argument on dx <= 0, no intervals or |theta| >= pi/2.
    CourseProfile(double dx, std::vector<CourseInterval> intervals);

    double dx() const { return dx_; }
    std::size_t size() const { return intervals_.size(); }
    double total_length() const { return dx_ * static_cast<double>(intervals_.size()); }
    const std::vector<CourseInterval>& intervals() const { return intervals_; }
    const CourseInterval& operator[](std::size_t i) const { return intervals_[i]; }

    // Interval containing distance x; the end of the course maps to the last one.
    std::size_t stage_at(double x) const;
    double elevation_end() const;

    // Grid points (i dx, elevation) for i = 0..size().
    std::vector<ElevationPoint> grid_points() const;

    // FNV-1a over dx and the bit patterns of every interval.
    std::uint64_t fingerprint() const;

private:
    double dx_;
    std::vector<CourseInterval> intervals_;
};

// Resamples elevation onto a dx grid by linear interpolation. Distances must
// start at 0 and increase strictly; a trailing partial interval is padded to
// a full dx by extending the final grade.
CourseProfile load_profile(std::span<const ElevationPoint> points, double dx);

struct GeoPoint {
    double lat = 0.0;  // deg
    double lon = 0.0;  // deg
    double ele = 0.0;  // m
};

constexpr double kEarthRadius = 6371000.0;

// Great-circle distance on a sphere of radius kEarthRadius.
double haversine(const GeoPoint& a, const GeoPoint& b);

// Trackpoints (trkpt with lat/lon and ele) of a GPX document, in order.
std::vector<GeoPoint> parse_gpx(std::string_view xml);

// Cumulative distance along the track. Consecutive points at the same
// position are merged; a zero-length track is rejected.
std::vector<ElevationPoint> track_distances(std::span<const GeoPoint> track);

CourseProfile load_gpx(std::string_view xml, double dx, int smooth_window = 1);

// Centered moving average of elevation over an odd window of samples.
std::vector<ElevationPoint> smooth_elevation(std::span<const ElevationPoint> points, int window);

}  // namespace pacer
