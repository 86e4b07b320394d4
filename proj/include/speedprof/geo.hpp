#pragma once

#include <cmath>
#include <numbers>

namespace speedprof {

inline constexpr double kEarthRadiusM = 6'371'000.0;

struct GeoPoint {
    double lat = 0.0; ///< degrees, WGS-84
    double lon = 0.0; ///< degrees, WGS-84

    bool valid() const noexcept {
        return std::isfinite(lat) && std::isfinite(lon) && lat >= -90.0 && lat <= 90.0 && lon >= -180.0 &&
               lon <= 180.0;
    }
    friend bool operator==(const GeoPoint&, const GeoPoint&) = default;
};

inline constexpr double deg2rad(double d) noexcept { return d * std::numbers::pi / 180.0; }
inline constexpr double rad2deg(double r) noexcept { return r * 180.0 / std::numbers::pi; }

/// Great-circle distance in meters on a sphere of radius kEarthRadiusM.
inline double haversine_distance(const GeoPoint& a, const GeoPoint& b) noexcept {
    const double dlat = deg2rad(b.lat - a.lat);
    const double dlon = deg2rad(b.lon - a.lon);
    const double s1 = std::sin(dlat / 2.0);
    const double s2 = std::sin(dlon / 2.0);
    double h = s1 * s1 + std::cos(deg2rad(a.lat)) * std::cos(deg2rad(b.lat)) * s2 * s2;
    if (h > 1.0) h = 1.0;
    return 2.0 * kEarthRadiusM * std::asin(std::sqrt(h));
}

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    friend Vec2 operator-(Vec2 a, Vec2 b) noexcept { return {a.x - b.x, a.y - b.y}; }
    friend Vec2 operator+(Vec2 a, Vec2 b) noexcept { return {a.x + b.x, a.y + b.y}; }
    friend Vec2 operator*(double s, Vec2 a) noexcept { return {s * a.x, s * a.y}; }
};

inline double dot(Vec2 a, Vec2 b) noexcept { return a.x * b.x + a.y * b.y; }
inline double cross(Vec2 a, Vec2 b) noexcept { return a.x * b.y - a.y * b.x; }
inline double norm(Vec2 a) noexcept { return std::hypot(a.x, a.y); }

/// Local equirectangular projection in meters around a fixed origin. Good to
/// well under a meter over the few-kilometre extent of a single route.
class PlanarFrame {
public:
    PlanarFrame() = default;
    explicit PlanarFrame(GeoPoint origin) : origin_(origin), cos_lat_(std::cos(deg2rad(origin.lat))) {}

    Vec2 to_plane(const GeoPoint& p) const noexcept {
        return {kEarthRadiusM * deg2rad(p.lon - origin_.lon) * cos_lat_, kEarthRadiusM * deg2rad(p.lat - origin_.lat)};
    }

    GeoPoint to_geo(Vec2 v) const noexcept {
        return {origin_.lat + rad2deg(v.y / kEarthRadiusM), origin_.lon + rad2deg(v.x / (kEarthRadiusM * cos_lat_))};
    }

    const GeoPoint& origin() const noexcept { return origin_; }

private:
    GeoPoint origin_{};
    double cos_lat_ = 1.0;
};

/// Signed Menger curvature (1/m) through three planar points; positive for a
/// left turn. Collinear triples give exactly 0.
inline double menger_curvature(Vec2 p0, Vec2 p1, Vec2 p2) noexcept {
    const Vec2 u = p1 - p0;
    const Vec2 v = p2 - p1;
    const double a = norm(u);
    const double b = norm(v);
    const double c = norm(p2 - p0);
    if (a == 0.0 || b == 0.0 || c == 0.0) return 0.0;
    const double cr = cross(u, v);
    if (std::abs(cr) <= 1e-10 * a * b) return 0.0;
    return 2.0 * cr / (a * b * c);
}

} // namespace speedprof
