#pragma once

// Route geometry: shape points resampled into equally spaced standard
// points, each carrying the geometric attributes used as model inputs.

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "speedprof/error.hpp"
#include "speedprof/geo.hpp"
#include "speedprof/text_io.hpp"

namespace speedprof {

inline constexpr double kDefaultSpacingM = 100.0;

struct ShapePoint {
    GeoPoint position;
    double altitude_m = 0.0;
    int lanes = 1;
    double speed_limit_mps = 1.0;
    std::string tmc_code;
};

struct StandardPoint {
    std::size_t index = 0;
    GeoPoint position;
    double arc_position_m = 0.0;
    double dist_to_upstream_shape_m = 0.0;
    double curvature_per_m = 0.0;
    double altitude_m = 0.0;
    int lanes = 1;
    double speed_limit_mps = 1.0;
    std::string tmc_code;
};

struct Projection {
    double arc_position_m = 0.0;
    double lateral_offset_m = 0.0;
};

namespace detail {

/// Polyline with cumulative arc lengths (haversine per segment) and planar
/// vertex coordinates in a frame anchored at the first vertex.
struct Polyline {
    PlanarFrame frame;
    std::vector<Vec2> plane;
    std::vector<double> arc; ///< arc[i] = distance from vertex 0 to vertex i

    template <class GetPos>
    Polyline(std::size_t n, GetPos&& pos) {
        if (n == 0) return;
        frame = PlanarFrame(pos(0));
        plane.reserve(n);
        arc.reserve(n);
        for (std::size_t i = 0; i < n; ++i) {
            plane.push_back(frame.to_plane(pos(i)));
            arc.push_back(i == 0 ? 0.0 : arc.back() + haversine_distance(pos(i - 1), pos(i)));
        }
    }

    double length() const noexcept { return arc.empty() ? 0.0 : arc.back(); }

    /// Index j of the last vertex with arc[j] <= s.
    std::size_t upstream_vertex(double s) const noexcept {
        const auto it = std::upper_bound(arc.begin(), arc.end(), s + 1e-9);
        return it == arc.begin() ? 0 : static_cast<std::size_t>(it - arc.begin()) - 1;
    }

    double curvature_at(double s) const noexcept {
        const std::size_t n = plane.size();
        if (n < 3) return 0.0;
        std::size_t best = 1;
        double best_d = std::numeric_limits<double>::infinity();
        for (std::size_t j = 1; j + 1 < n; ++j) {
            const double d = std::abs(arc[j] - s);
            if (d < best_d) {
                best_d = d;
                best = j;
            }
        }
        return menger_curvature(plane[best - 1], plane[best], plane[best + 1]);
    }

    Projection project(Vec2 p) const noexcept {
        Projection best{0.0, std::numeric_limits<double>::infinity()};
        if (plane.size() == 1) return {0.0, norm(p - plane[0])};
        for (std::size_t i = 0; i + 1 < plane.size(); ++i) {
            const Vec2 d = plane[i + 1] - plane[i];
            const double len2 = dot(d, d);
            double t = len2 > 0.0 ? dot(p - plane[i], d) / len2 : 0.0;
            t = std::clamp(t, 0.0, 1.0);
            const double off = norm(p - (plane[i] + t * d));
            if (off < best.lateral_offset_m) {
                best.lateral_offset_m = off;
                best.arc_position_m = arc[i] + t * (arc[i + 1] - arc[i]);
            }
        }
        return best;
    }
};

inline std::vector<ShapePoint> drop_consecutive_duplicates(std::span<const ShapePoint> pts) {
    std::vector<ShapePoint> out;
    out.reserve(pts.size());
    for (const auto& p : pts) {
        if (out.empty() || !(out.back().position == p.position)) out.push_back(p);
    }
    return out;
}

} // namespace detail

class Route;
Route build_route(std::span<const ShapePoint> shape_points, double spacing_m = kDefaultSpacingM);

/// Immutable route. Standard point i sits at arc position i * spacing, plus
/// a terminal point at the exact route end when the length is not a multiple
/// of the spacing.
class Route {
public:
    const std::vector<ShapePoint>& shape_points() const noexcept { return shapes_; }
    const std::vector<StandardPoint>& standard_points() const noexcept { return points_; }
    const StandardPoint& operator[](std::size_t i) const { return points_.at(i); }
    std::size_t size() const noexcept { return points_.size(); }
    /// Highest standard point index (the route has last_index()+1 points).
    std::size_t last_index() const noexcept { return points_.size() - 1; }
    double spacing_m() const noexcept { return spacing_; }
    double length_m() const noexcept { return line_.length(); }
    const PlanarFrame& frame() const noexcept { return line_.frame; }

    Projection project_point(const GeoPoint& p) const noexcept { return line_.project(line_.frame.to_plane(p)); }

    /// Interpolated geographic position at an arc position (clamped to the route).
    GeoPoint position_at(double arc_m) const noexcept {
        arc_m = std::clamp(arc_m, 0.0, length_m());
        const std::size_t j = std::min(line_.upstream_vertex(arc_m), shapes_.size() - 2);
        const double seg = line_.arc[j + 1] - line_.arc[j];
        const double f = seg > 0.0 ? (arc_m - line_.arc[j]) / seg : 0.0;
        const auto& a = shapes_[j].position;
        const auto& b = shapes_[j + 1].position;
        return {a.lat + f * (b.lat - a.lat), a.lon + f * (b.lon - a.lon)};
    }

    /// Heading in degrees clockwise from north of the segment containing arc_m.
    double heading_at(double arc_m) const noexcept {
        arc_m = std::clamp(arc_m, 0.0, length_m());
        const std::size_t j = std::min(line_.upstream_vertex(arc_m), shapes_.size() - 2);
        const Vec2 d = line_.plane[j + 1] - line_.plane[j];
        double h = rad2deg(std::atan2(d.x, d.y));
        if (h < 0.0) h += 360.0;
        return h;
    }

    /// Copy of this route with the covering TMC code of every standard point replaced.
    Route with_tmc_codes(const std::vector<std::string>& codes) const {
        if (codes.size() != points_.size())
            throw ConfigError("tmc code list has " + std::to_string(codes.size()) + " entries, route has " +
                              std::to_string(points_.size()) + " standard points");
        Route r = *this;
        for (std::size_t i = 0; i < codes.size(); ++i) r.points_[i].tmc_code = codes[i];
        return r;
    }

private:
    friend Route build_route(std::span<const ShapePoint>, double);

    Route(std::vector<ShapePoint> shapes, detail::Polyline line, double spacing)
        : shapes_(std::move(shapes)), line_(std::move(line)), spacing_(spacing) {}

    std::vector<ShapePoint> shapes_;
    detail::Polyline line_;
    std::vector<StandardPoint> points_;
    double spacing_ = kDefaultSpacingM;
};

/// Signed curvature (1/m) at an arc position: Menger curvature of the interior
/// vertex nearest to the position and its two neighbours.
inline double curvature_at(std::span<const ShapePoint> shape_points, double arc_position_m) {
    const auto pts = detail::drop_consecutive_duplicates(shape_points);
    const detail::Polyline line(pts.size(), [&](std::size_t i) { return pts[i].position; });
    return line.curvature_at(arc_position_m);
}

inline Projection project_point(const Route& route, const GeoPoint& p) { return route.project_point(p); }

inline Route build_route(std::span<const ShapePoint> shape_points, double spacing_m) {
    if (!(spacing_m > 0.0) || !std::isfinite(spacing_m))
        throw ConfigError("standard point spacing must be positive", "route.invalid_spacing");
    for (std::size_t i = 0; i < shape_points.size(); ++i) {
        const auto& s = shape_points[i];
        if (!s.position.valid() || s.lanes < 1 || !(s.speed_limit_mps > 0.0) || !std::isfinite(s.altitude_m))
            throw ConfigError("invalid shape point " + std::to_string(i), "route.invalid_shape_point");
    }
    auto pts = detail::drop_consecutive_duplicates(shape_points);
    if (pts.size() < 2) throw DegenerateRoute("route needs at least 2 distinct shape points");

    detail::Polyline line(pts.size(), [&](std::size_t i) { return pts[i].position; });
    const double length = line.length();
    if (!(length > 0.0)) throw DegenerateRoute("route has zero length");
    if (length < spacing_m)
        throw DegenerateRoute("route length " + text::num(length) + " m is shorter than spacing " +
                              text::num(spacing_m) + " m");

    const auto full = static_cast<std::size_t>(std::floor(length / spacing_m + 1e-9));
    std::vector<double> arcs;
    arcs.reserve(full + 2);
    for (std::size_t i = 0; i <= full; ++i) arcs.push_back(std::min(static_cast<double>(i) * spacing_m, length));
    if (length - arcs.back() > 1e-6 * spacing_m) arcs.push_back(length);
    else arcs.back() = length;

    Route route(pts, line, spacing_m);
    route.points_.reserve(arcs.size());
    for (std::size_t i = 0; i < arcs.size(); ++i) {
        const double s = arcs[i];
        const std::size_t up = line.upstream_vertex(s);
        const std::size_t seg = std::min(up, pts.size() - 2);
        const double seg_len = line.arc[seg + 1] - line.arc[seg];
        const double f = seg_len > 0.0 ? std::clamp((s - line.arc[seg]) / seg_len, 0.0, 1.0) : 0.0;
        const auto& a = pts[seg];
        const auto& b = pts[seg + 1];

        StandardPoint sp;
        sp.index = i;
        sp.position = i == 0 ? a.position
                             : GeoPoint{a.position.lat + f * (b.position.lat - a.position.lat),
                                        a.position.lon + f * (b.position.lon - a.position.lon)};
        sp.arc_position_m = s;
        sp.dist_to_upstream_shape_m = std::max(0.0, s - line.arc[up]);
        sp.curvature_per_m = line.curvature_at(s);
        sp.altitude_m = a.altitude_m + f * (b.altitude_m - a.altitude_m);
        sp.lanes = pts[up].lanes;
        sp.speed_limit_mps = pts[up].speed_limit_mps;
        sp.tmc_code = pts[up].tmc_code;
        route.points_.push_back(std::move(sp));
    }
    return route;
}

// ---------------------------------------------------------------------------
// Route geometry file: header `lat,lon,altitude_m,lanes,speed_limit_mps,tmc_code`

inline const std::vector<std::string_view>& route_file_header() {
    static const std::vector<std::string_view> h{"lat", "lon", "altitude_m", "lanes", "speed_limit_mps", "tmc_code"};
    return h;
}

inline std::vector<ShapePoint> parse_shape_points(std::string_view content, const std::string& name = "<route>") {
    text::LineReader reader(content);
    std::string_view line;
    if (!reader.next_nonblank(line) || !text::header_matches(line, route_file_header()))
        throw ParseError(name, reader.line_no(), std::string(line), "bad route header");
    std::vector<ShapePoint> out;
    std::vector<std::string_view> f;
    while (reader.next_nonblank(line)) {
        text::split(line, ',', f);
        ShapePoint p;
        std::int64_t lanes = 0;
        if (f.size() != 6 || !text::parse_double(f[0], p.position.lat) || !text::parse_double(f[1], p.position.lon) ||
            !text::parse_double(f[2], p.altitude_m) || !text::parse_int(f[3], lanes) ||
            !text::parse_double(f[4], p.speed_limit_mps))
            throw ParseError(name, reader.line_no(), std::string(line), "malformed shape point");
        if (!p.position.valid() || lanes < 1 || !(p.speed_limit_mps > 0.0))
            throw ParseError(name, reader.line_no(), std::string(line), "shape point out of range");
        p.lanes = static_cast<int>(lanes);
        p.tmc_code = std::string(f[5]);
        out.push_back(std::move(p));
    }
    return out;
}

inline std::vector<ShapePoint> read_shape_points(const std::filesystem::path& path) {
    return parse_shape_points(text::read_file(path), path.string());
}

inline std::string format_shape_points(std::span<const ShapePoint> pts) {
    std::string out = "lat,lon,altitude_m,lanes,speed_limit_mps,tmc_code\n";
    for (const auto& p : pts) {
        out += fmt::format("{},{},{},{},{},{}\n", p.position.lat, p.position.lon, p.altitude_m, p.lanes,
                           p.speed_limit_mps, p.tmc_code);
    }
    return out;
}

} // namespace speedprof
