#pragma once

// Fixture builders shared by the unit and acceptance tests.

#include <array>
#include <bit>
#include <cmath>
#include <filesystem>
#include <numbers>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "speedprof/speedprof.hpp"

namespace fixture {

using namespace speedprof;

inline constexpr double kR = 6'371'000.0;

/// Degrees of longitude per metre along the equator (exact for haversine).
inline double equator_deg(double metres) { return metres / kR * 180.0 / std::numbers::pi; }

/// Point `east_m` east and `north_m` north of `origin` (small offsets,
/// equirectangular; independent of the library's planar frame).
inline GeoPoint offset(GeoPoint origin, double east_m, double north_m) {
    const double lat = origin.lat + north_m / kR * 180.0 / std::numbers::pi;
    const double lon = origin.lon + east_m / (kR * std::cos(origin.lat * std::numbers::pi / 180.0)) * 180.0 / std::numbers::pi;
    return {lat, lon};
}

inline ShapePoint shape(GeoPoint p, double limit = 30.0, int lanes = 2, double alt = 0.0, std::string code = {}) {
    return {p, alt, lanes, limit, std::move(code)};
}

/// Straight eastbound polyline on the equator with `n_shape` evenly placed vertices.
inline std::vector<ShapePoint> straight_shapes(double length_m, int n_shape = 2, double limit = 30.0) {
    std::vector<ShapePoint> pts;
    for (int i = 0; i < n_shape; ++i)
        pts.push_back(shape({0.0, equator_deg(length_m * i / (n_shape - 1))}, limit));
    return pts;
}

inline Route straight_route(double length_m, double spacing = 100.0, int n_shape = 2) {
    return build_route(straight_shapes(length_m, n_shape), spacing);
}

/// Route whose standard points all carry the given codes, split evenly.
inline Route coded_route(const Route& r, const std::vector<std::string>& codes) {
    std::vector<std::string> pc;
    for (std::size_t i = 0; i < r.size(); ++i) pc.push_back(codes[i * codes.size() / r.size()]);
    return r.with_tmc_codes(pc);
}

/// History with one observation per `period` for each code; speed from `f(code_index, t)`.
template <class F>
TmcHistory make_history(const std::vector<std::string>& codes, Timestamp t0, Timestamp period, int n, F f) {
    std::vector<TmcObservation> recs;
    for (std::size_t c = 0; c < codes.size(); ++c)
        for (int i = 0; i < n; ++i) {
            const Timestamp t = t0 + i * period;
            recs.push_back({codes[c], t, f(c, t), 30.0});
        }
    return TmcHistory::from_records(std::move(recs));
}

inline TmcHistory constant_history(const std::vector<std::string>& codes, double speed, Timestamp t0 = 0,
                                   int n = 100) {
    return make_history(codes, t0, 60, n, [speed](std::size_t, Timestamp) { return speed; });
}

/// Trip log driving `route` at speed v(arc) sampled every `dt` seconds,
/// positions exactly on the route.
template <class V>
TripLog drive_exact(const Route& route, V v, double dt = 1.0, std::string id = "t", Timestamp start = 0) {
    TripLog log{std::move(id), start, {}};
    double s = 0.0, t = 0.0;
    const double L = route.length_m();
    while (true) {
        log.samples.push_back({t, route.position_at(s), v(s), route.heading_at(s), 0.0});
        if (s >= L) break;
        // midpoint step
        const double vm = std::max(0.5, v(s + 0.5 * dt * std::max(0.5, v(s))));
        s = std::min(L, s + vm * dt);
        t += dt;
    }
    return log;
}

// ---------------------------------------------------------------------------
// Minimum set cover oracle for section layouts along a straight equator route.

struct CoverLayout {
    Route route;
    std::vector<TmcSection> sections;
    std::vector<std::vector<bool>> cov; ///< oracle coverage [section][point]
};

/// Equator-local planar coordinates: x east, y north, metres.
inline std::pair<double, double> equator_xy(GeoPoint g) {
    const double k = kR * std::numbers::pi / 180.0;
    return {g.lon * k, g.lat * k};
}

inline double oracle_distance(GeoPoint p, const std::vector<GeoPoint>& line) {
    const auto [px, py] = equator_xy(p);
    double best = 1e300;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const auto [ax, ay] = equator_xy(line[i]);
        best = std::min(best, std::hypot(px - ax, py - ay));
        if (i + 1 == line.size()) break;
        const auto [bx, by] = equator_xy(line[i + 1]);
        const double dx = bx - ax, dy = by - ay, l2 = dx * dx + dy * dy;
        if (l2 == 0.0) continue;
        const double t = ((px - ax) * dx + (py - ay) * dy) / l2;
        if (t <= 0.0 || t >= 1.0) continue;
        best = std::min(best, std::hypot(px - (ax + t * dx), py - (ay + t * dy)));
    }
    return best;
}

/// Random layout of up to `max_sections` sections (some on the route, some
/// parallel inside or outside the corridor, some leaving and rejoining it).
/// Layouts with a point within 0.5 m of the corridor edge are redrawn.
inline CoverLayout random_cover_layout(std::mt19937_64& rng, int max_sections, double corridor = 30.0) {
    const double L = 1000.0 + 100.0 * static_cast<double>(rng() % 11);
    auto route = straight_route(L, 100.0);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    while (true) {
        CoverLayout out{route, {}, {}};
        const int n = 1 + static_cast<int>(rng() % static_cast<unsigned>(max_sections));
        // most layouts start with a chain of overlapping sections along the route
        const bool tiled = rng() % 4 != 0;
        double cursor = -50.0;
        for (int s = 0; s < n; ++s) {
            double a = u(rng) * L * 0.9 - 0.1 * L;
            double b = a + 100.0 + u(rng) * L * 0.6;
            double lateral = std::array<double, 4>{0.0, 0.0, 12.0, 200.0}[rng() % 4];
            if (tiled && cursor < L + 50.0) {
                a = cursor - u(rng) * 150.0;
                b = a + 300.0 + u(rng) * L * 0.5;
                cursor = b;
                lateral = rng() % 2 ? 0.0 : 12.0;
            }
            const auto at = [&](double x, double y) { return GeoPoint{equator_deg(y), equator_deg(x)}; };
            TmcSection sec;
            sec.code = "S" + std::to_string(s);
            if (rng() % 5 == 0 && b - a > 400.0) {
                // detour: leaves the corridor between c and d
                const double c = a + (b - a) * 0.3, d = a + (b - a) * 0.7;
                sec.geometry = {at(a, lateral), at(c, lateral), at(c, 300.0), at(d, 300.0), at(d, lateral), at(b, lateral)};
            } else {
                sec.geometry = {at(a, lateral), at((a + b) / 2, lateral), at(b, lateral)};
            }
            out.sections.push_back(std::move(sec));
        }
        bool ambiguous = false;
        for (const auto& sec : out.sections) {
            std::vector<bool> c(route.size());
            for (std::size_t i = 0; i < route.size(); ++i) {
                const double d = oracle_distance(route[i].position, sec.geometry);
                ambiguous = ambiguous || std::abs(d - corridor) < 0.5;
                c[i] = d <= corridor;
            }
            out.cov.push_back(std::move(c));
        }
        if (!ambiguous) return out;
    }
}

/// Size of the smallest subset of sections covering every point; nullopt when
/// no subset does. Exhaustive over all 2^n subsets.
inline std::optional<std::size_t> brute_force_min_cover(const std::vector<std::vector<bool>>& cov, std::size_t points) {
    const std::size_t n = cov.size();
    std::optional<std::size_t> best;
    for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
        const auto k = static_cast<std::size_t>(std::popcount(mask));
        if (best && k >= *best) continue;
        bool all = true;
        for (std::size_t i = 0; i < points && all; ++i) {
            bool hit = false;
            for (std::size_t s = 0; s < n && !hit; ++s) hit = ((mask >> s) & 1u) && cov[s][i];
            all = hit;
        }
        if (all) best = k;
    }
    return best;
}

/// Checks a mapping against the oracle; returns an empty string when it is a
/// valid minimum cover, otherwise a description of the first problem.
inline std::string check_min_cover(const CoverLayout& lay, const TmcMapping& m, std::size_t min_size) {
    if (m.codes.size() != min_size)
        return "cover size " + std::to_string(m.codes.size()) + " vs minimum " + std::to_string(min_size);
    if (m.point_codes.size() != lay.route.size()) return "point_codes length";
    std::vector<std::string> codes = m.codes;
    std::sort(codes.begin(), codes.end());
    if (std::adjacent_find(codes.begin(), codes.end()) != codes.end()) return "repeated code";
    for (std::size_t i = 0; i < lay.route.size(); ++i) {
        const auto& pc = m.point_codes[i];
        if (std::find(m.codes.begin(), m.codes.end(), pc) == m.codes.end()) return "point code not chosen";
        const auto s = static_cast<std::size_t>(std::stoi(pc.substr(1)));
        if (!lay.cov[s][i]) return "point " + std::to_string(i) + " assigned to non-covering " + pc;
    }
    return {};
}

/// Unique scratch directory under the system temp dir, removed on destruction.
class TempDir {
public:
    explicit TempDir(const std::string& tag) {
        static int counter = 0;
        std::random_device rd;
        path_ = std::filesystem::temp_directory_path() /
                ("speedprof_" + tag + "_" + std::to_string(rd()) + "_" + std::to_string(counter++));
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;
    const std::filesystem::path& path() const { return path_; }
    std::filesystem::path operator/(const std::string& s) const { return path_ / s; }

private:
    std::filesystem::path path_;
};

} // namespace fixture
