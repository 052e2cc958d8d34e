#include "pacer/course.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <string>

#include <boost/property_tree/ptree.hpp>
#include <boost/property_tree/xml_parser.hpp>

#include "pacer/errors.hpp"
#include "pacer/fnv.hpp"

namespace pacer {

CourseProfile::CourseProfile(double dx, std::vector<CourseInterval> intervals)
    : dx_(dx), intervals_(std::move(intervals)) {
    if (!(dx_ > 0.0) || !std::isfinite(dx_))
        throw std::invalid_argument("course: dx must be positive");
    if (intervals_.empty()) throw std::invalid_argument("course: no intervals");
    for (const auto& iv : intervals_)
        if (!(std::abs(iv.theta) < std::numbers::pi / 2) || !std::isfinite(iv.elevation_start))
            throw std::invalid_argument("course: slope out of range");
}

std::size_t CourseProfile::stage_at(double x) const {
    if (!(x > 0.0)) return 0;
    const auto i = static_cast<std::size_t>(std::floor(x / dx_));
    return std::min(i, intervals_.size() - 1);
}

double CourseProfile::elevation_end() const {
    const auto& last = intervals_.back();
    return last.elevation_start + dx_ * std::tan(last.theta);
}

std::vector<ElevationPoint> CourseProfile::grid_points() const {
    std::vector<ElevationPoint> out;
    out.reserve(intervals_.size() + 1);
    for (std::size_t i = 0; i < intervals_.size(); ++i)
        out.push_back({static_cast<double>(i) * dx_, intervals_[i].elevation_start});
    out.push_back({static_cast<double>(intervals_.size()) * dx_, elevation_end()});
    return out;
}

std::uint64_t CourseProfile::fingerprint() const {
    Fnv1a h;
    h.str("course");
    h.f64(dx_);
    h.u64(intervals_.size());
    for (const auto& iv : intervals_) {
        h.f64(iv.theta);
        h.f64(iv.elevation_start);
    }
    return h.value();
}

CourseProfile load_profile(std::span<const ElevationPoint> points, double dx) {
    if (points.size() < 2) throw std::invalid_argument("course: need at least 2 points");
    if (!(dx > 0.0)) throw std::invalid_argument("course: dx must be positive");
    if (points.front().distance != 0.0)
        throw std::invalid_argument("course: distance must start at 0");
    for (std::size_t i = 1; i < points.size(); ++i)
        if (!(points[i].distance > points[i - 1].distance))
            throw std::invalid_argument("course: distance not increasing at point " +
                                        std::to_string(i));

    const double length = points.back().distance;
    const auto n = std::max<long>(1, static_cast<long>(std::ceil(length / dx - 1e-9)));
    const auto& p1 = points[points.size() - 2];
    const auto& p2 = points.back();
    const double final_grade = (p2.elevation - p1.elevation) / (p2.distance - p1.distance);

    std::vector<double> elev(static_cast<std::size_t>(n) + 1);
    std::size_t k = 0;
    for (long i = 0; i <= n; ++i) {
        const double x = static_cast<double>(i) * dx;
        if (x > length) {
            elev[i] = p2.elevation + (x - length) * final_grade;
            continue;
        }
        while (k + 1 < points.size() - 1 && points[k + 1].distance <= x) ++k;
        const auto& a = points[k];
        const auto& b = points[k + 1];
        if (x == a.distance)
            elev[i] = a.elevation;
        else if (x == b.distance)
            elev[i] = b.elevation;
        else
            elev[i] = a.elevation + (b.elevation - a.elevation) * (x - a.distance) /
                                        (b.distance - a.distance);
    }

    std::vector<CourseInterval> iv(static_cast<std::size_t>(n));
    for (long i = 0; i < n; ++i) {
        iv[i].theta = std::atan((elev[i + 1] - elev[i]) / dx);
        iv[i].elevation_start = elev[i];
    }
    return CourseProfile(dx, std::move(iv));
}

double haversine(const GeoPoint& a, const GeoPoint& b) {
    constexpr double deg = std::numbers::pi / 180.0;
    const double phi1 = a.lat * deg, phi2 = b.lat * deg;
    const double dphi = (b.lat - a.lat) * deg;
    const double dlam = (b.lon - a.lon) * deg;
    const double s1 = std::sin(dphi / 2), s2 = std::sin(dlam / 2);
    const double h = s1 * s1 + std::cos(phi1) * std::cos(phi2) * s2 * s2;
    return 2.0 * kEarthRadius * std::asin(std::min(1.0, std::sqrt(h)));
}

std::vector<GeoPoint> parse_gpx(std::string_view xml) {
    namespace pt = boost::property_tree;
    pt::ptree doc;
    try {
        std::istringstream in{std::string(xml)};
        pt::read_xml(in, doc);
    } catch (const pt::xml_parser_error& e) {
        throw InputError(std::string("gpx: ") + e.what());
    }
    const auto gpx = doc.get_child_optional("gpx");
    if (!gpx) throw InputError("gpx: missing <gpx> root");

    std::vector<GeoPoint> out;
    for (const auto& [tag, trk] : *gpx) {
        if (tag != "trk") continue;
        for (const auto& [stag, seg] : trk) {
            if (stag != "trkseg") continue;
            for (const auto& [ptag, node] : seg) {
                if (ptag != "trkpt") continue;
                const auto lat = node.get_optional<double>("<xmlattr>.lat");
                const auto lon = node.get_optional<double>("<xmlattr>.lon");
                const auto ele = node.get_optional<double>("ele");
                if (!lat || !lon)
                    throw InputError("gpx: trackpoint " + std::to_string(out.size()) +
                                     " lacks lat/lon");
                if (!ele)
                    throw InputError("gpx: trackpoint " + std::to_string(out.size()) +
                                     " lacks <ele>");
                out.push_back({*lat, *lon, *ele});
            }
        }
    }
    if (out.size() < 2) throw InputError("gpx: fewer than 2 trackpoints");
    return out;
}

std::vector<ElevationPoint> track_distances(std::span<const GeoPoint> track) {
    if (track.size() < 2) throw std::invalid_argument("track: fewer than 2 points");
    std::vector<ElevationPoint> out{{0.0, track.front().ele}};
    double dist = 0.0;
    for (std::size_t i = 1; i < track.size(); ++i) {
        const double d = haversine(track[i - 1], track[i]);
        if (d == 0.0) continue;
        dist += d;
        out.push_back({dist, track[i].ele});
    }
    if (out.size() < 2) throw InputError("track: zero length");
    return out;
}

std::vector<ElevationPoint> smooth_elevation(std::span<const ElevationPoint> points, int window) {
    std::vector<ElevationPoint> out(points.begin(), points.end());
    if (window <= 1) return out;
    if (window % 2 == 0) throw std::invalid_argument("smoothing window must be odd");
    const long half = window / 2;
    const long n = static_cast<long>(points.size());
    for (long i = 0; i < n; ++i) {
        const long lo = std::max(0L, i - half), hi = std::min(n - 1, i + half);
        double sum = 0.0;
        for (long j = lo; j <= hi; ++j) sum += points[j].elevation;
        out[i].elevation = sum / static_cast<double>(hi - lo + 1);
    }
    return out;
}

CourseProfile load_gpx(std::string_view xml, double dx, int smooth_window) {
    const auto track = parse_gpx(xml);
    const auto pts = smooth_elevation(track_distances(track), smooth_window);
    return load_profile(pts, dx);
}

}  // namespace pacer
