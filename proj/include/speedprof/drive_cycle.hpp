#pragma once

// GPS trip logs: parsing, matching against the route, and reduction to a
// velocity profile with one speed per standard point.

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "speedprof/error.hpp"
#include "speedprof/route.hpp"
#include "speedprof/text_io.hpp"
#include "speedprof/time.hpp"

namespace speedprof {

struct TripSample {
    double t_rel_s = 0.0;
    GeoPoint position;
    double speed_mps = 0.0;
    double heading_deg = 0.0;
    double altitude_m = 0.0;
};

struct TripLog {
    std::string trip_id;
    Timestamp start = 0;
    std::vector<TripSample> samples;
};

/// Driver speed at every standard point, index-aligned with the route.
struct VelocityProfile {
    std::string trip_id;
    Timestamp start = 0;
    std::vector<double> speeds_mps;
};

// ---------------------------------------------------------------------------
// Trip log file:
//   trip_id,start_datetime_iso8601
//   <id>,<YYYY-MM-DDTHH:MM:SSZ>
//   t_rel_s,lat,lon,speed_mps,heading_deg,altitude_m
//   <samples...>

inline TripLog parse_trip_log(std::string_view content, const std::string& name = "<trip>") {
    text::LineReader reader(content);
    std::string_view line;
    if (!reader.next_nonblank(line) || !text::header_matches(line, {"trip_id", "start_datetime_iso8601"}))
        throw ParseError(name, reader.line_no(), std::string(line), "bad trip metadata header");
    if (!reader.next_nonblank(line)) throw ParseError(name, reader.line_no(), "", "missing trip metadata");
    TripLog trip;
    {
        const auto f = text::split(line, ',');
        if (f.size() != 2 || f[0].empty() || !parse_iso8601(f[1], trip.start))
            throw ParseError(name, reader.line_no(), std::string(line), "bad trip metadata");
        trip.trip_id = std::string(f[0]);
    }
    if (!reader.next_nonblank(line) ||
        !text::header_matches(line, {"t_rel_s", "lat", "lon", "speed_mps", "heading_deg", "altitude_m"}))
        throw ParseError(name, reader.line_no(), std::string(line), "bad sample header");

    std::vector<std::string_view> f;
    while (reader.next_nonblank(line)) {
        text::split(line, ',', f);
        TripSample s;
        if (f.size() != 6 || !text::parse_double(f[0], s.t_rel_s) || !text::parse_double(f[1], s.position.lat) ||
            !text::parse_double(f[2], s.position.lon) || !text::parse_double(f[3], s.speed_mps) ||
            !text::parse_double(f[4], s.heading_deg) || !text::parse_double(f[5], s.altitude_m))
            throw ParseError(name, reader.line_no(), std::string(line), "malformed trip sample");
        if (!s.position.valid() || !(s.speed_mps >= 0.0) || !std::isfinite(s.t_rel_s))
            throw ParseError(name, reader.line_no(), std::string(line), "trip sample out of range");
        if (!trip.samples.empty() && !(s.t_rel_s > trip.samples.back().t_rel_s))
            throw NonMonotonicTime(reader.line_no());
        trip.samples.push_back(s);
    }
    if (trip.samples.empty()) throw ParseError(name, reader.line_no(), "", "trip has no samples");
    return trip;
}

inline TripLog read_trip_log(const std::filesystem::path& path) {
    return parse_trip_log(text::read_file(path), path.string());
}

inline std::string format_trip_log(const TripLog& trip) {
    std::string out = "trip_id,start_datetime_iso8601\n";
    out += trip.trip_id + "," + format_iso8601(trip.start) + "\n";
    out += "t_rel_s,lat,lon,speed_mps,heading_deg,altitude_m\n";
    for (const auto& s : trip.samples)
        out += fmt::format("{},{},{},{},{},{}\n", s.t_rel_s, s.position.lat, s.position.lon, s.speed_mps,
                           s.heading_deg, s.altitude_m);
    return out;
}

// ---------------------------------------------------------------------------
// Matching

struct MatchOptions {
    double max_offset_m = 50.0;
    double min_coverage = 0.95;
    /// Backward jitter (m) tolerated before a sample counts as a backward jump.
    double backtrack_tolerance_m = 5.0;
    /// Reject when more than this fraction of on-route samples jump backwards.
    double max_discard_fraction = 0.10;
};

struct MatchVerdict {
    bool accepted = false;
    double coverage = 0.0;           ///< fraction of standard points with a sample within max_offset_m
    double discarded_fraction = 0.0; ///< backward-jumping on-route samples / on-route samples
    std::string reason;
};

struct MatchedSample {
    double arc_m = 0.0;
    double speed_mps = 0.0;
};

namespace detail {

struct MatchWork {
    MatchVerdict verdict;
    std::vector<MatchedSample> kept; ///< on-route, forward-moving samples sorted by arc
};

inline MatchWork match_trip(const TripLog& trip, const Route& route, const MatchOptions& opt) {
    MatchWork w;
    std::vector<Vec2> plane;
    plane.reserve(trip.samples.size());
    for (const auto& s : trip.samples) plane.push_back(route.frame().to_plane(s.position));

    std::size_t covered = 0;
    for (const auto& sp : route.standard_points()) {
        const Vec2 q = route.frame().to_plane(sp.position);
        for (const auto& p : plane) {
            if (norm(p - q) <= opt.max_offset_m) {
                ++covered;
                break;
            }
        }
    }
    w.verdict.coverage = static_cast<double>(covered) / static_cast<double>(route.size());

    std::size_t on_route = 0;
    std::size_t discarded = 0;
    double last_arc = -1e300;
    for (std::size_t i = 0; i < trip.samples.size(); ++i) {
        const auto pr = route.project_point(trip.samples[i].position);
        if (pr.lateral_offset_m > opt.max_offset_m) continue;
        ++on_route;
        if (pr.arc_position_m < last_arc - opt.backtrack_tolerance_m) {
            ++discarded;
            continue;
        }
        last_arc = std::max(last_arc, pr.arc_position_m);
        w.kept.push_back({pr.arc_position_m, trip.samples[i].speed_mps});
    }
    std::stable_sort(w.kept.begin(), w.kept.end(),
                     [](const MatchedSample& a, const MatchedSample& b) { return a.arc_m < b.arc_m; });
    w.verdict.discarded_fraction = on_route ? static_cast<double>(discarded) / static_cast<double>(on_route) : 0.0;

    if (w.kept.size() < 2) w.verdict.reason = "fewer than 2 samples on route";
    else if (w.verdict.coverage < opt.min_coverage) w.verdict.reason = "coverage " + text::num(w.verdict.coverage) + " below " + text::num(opt.min_coverage);
    else if (w.verdict.discarded_fraction > opt.max_discard_fraction) w.verdict.reason = "arc positions not monotonic";
    else w.verdict.accepted = true;
    return w;
}

} // namespace detail

inline MatchVerdict match_trip_to_route(const TripLog& trip, const Route& route, const MatchOptions& opt = {}) {
    return detail::match_trip(trip, route, opt).verdict;
}

/// Profile from matched samples (sorted by arc). Interpolates linearly between
/// the bracketing samples when they lie within twice the typical sample
/// spacing; otherwise the point is a gap and is filled from neighbouring
/// standard points.
inline std::vector<double> profile_from_samples(std::span<const MatchedSample> kept, const Route& route) {
    std::vector<double> deltas;
    for (std::size_t i = 1; i < kept.size(); ++i) {
        const double d = kept[i].arc_m - kept[i - 1].arc_m;
        if (d > 0.0) deltas.push_back(d);
    }
    double h = route.spacing_m();
    if (!deltas.empty()) {
        auto mid = deltas.begin() + static_cast<std::ptrdiff_t>(deltas.size() / 2);
        std::nth_element(deltas.begin(), mid, deltas.end());
        h = *mid;
    }
    const double reach = 2.0 * h;

    const std::size_t n = route.size();
    std::vector<double> v(n, 0.0);
    std::vector<bool> valid(n, false);
    for (std::size_t i = 0; i < n; ++i) {
        const double a = route[i].arc_position_m;
        const auto hi = std::lower_bound(kept.begin(), kept.end(), a,
                                         [](const MatchedSample& s, double x) { return s.arc_m < x; });
        if (hi != kept.end() && hi->arc_m == a) {
            v[i] = hi->speed_mps;
            valid[i] = true;
        } else if (hi != kept.end() && hi != kept.begin()) {
            const auto lo = std::prev(hi);
            const double gap = hi->arc_m - lo->arc_m;
            if (gap <= reach) {
                const double f = (a - lo->arc_m) / gap;
                v[i] = lo->speed_mps + f * (hi->speed_mps - lo->speed_mps);
                valid[i] = true;
            }
        } else if (hi != kept.end()) {
            if (hi->arc_m - a <= reach) {
                v[i] = hi->speed_mps;
                valid[i] = true;
            }
        } else if (!kept.empty() && a - kept.back().arc_m <= reach) {
            v[i] = kept.back().speed_mps;
            valid[i] = true;
        }
    }

    std::size_t first = n;
    std::size_t last = 0;
    for (std::size_t i = 0; i < n; ++i) {
        if (!valid[i]) continue;
        first = std::min(first, i);
        last = i;
    }
    if (first == n) throw UnmatchedTrip("no standard point has a nearby sample");
    for (std::size_t i = 0; i < first; ++i) v[i] = v[first];
    for (std::size_t i = last + 1; i < n; ++i) v[i] = v[last];
    std::size_t prev = first;
    for (std::size_t i = first + 1; i <= last; ++i) {
        if (!valid[i]) continue;
        if (i > prev + 1) {
            const double a0 = route[prev].arc_position_m;
            const double a1 = route[i].arc_position_m;
            for (std::size_t j = prev + 1; j < i; ++j) {
                const double f = (route[j].arc_position_m - a0) / (a1 - a0);
                v[j] = v[prev] + f * (v[i] - v[prev]);
            }
        }
        prev = i;
    }
    return v;
}

inline VelocityProfile extract_velocity_profile(const TripLog& trip, const Route& route, const MatchOptions& opt = {}) {
    const auto w = detail::match_trip(trip, route, opt);
    if (!w.verdict.accepted) throw UnmatchedTrip("trip " + trip.trip_id + " rejected: " + w.verdict.reason);
    return {trip.trip_id, trip.start, profile_from_samples(w.kept, route)};
}

// ---------------------------------------------------------------------------
// Profile table: header `trip_id,start_datetime_iso8601,sp_index,speed_mps`

inline std::string format_profiles(std::span<const VelocityProfile> profiles) {
    std::string out = "trip_id,start_datetime_iso8601,sp_index,speed_mps\n";
    for (const auto& p : profiles)
        for (std::size_t i = 0; i < p.speeds_mps.size(); ++i)
            out += fmt::format("{},{},{},{}\n", p.trip_id, format_iso8601(p.start), i, p.speeds_mps[i]);
    return out;
}

inline std::vector<VelocityProfile> parse_profiles(std::string_view content, const std::string& name = "<profiles>") {
    text::LineReader reader(content);
    std::string_view line;
    if (!reader.next_nonblank(line) ||
        !text::header_matches(line, {"trip_id", "start_datetime_iso8601", "sp_index", "speed_mps"}))
        throw ParseError(name, reader.line_no(), std::string(line), "bad profile header");
    std::vector<VelocityProfile> out;
    std::vector<std::string_view> f;
    while (reader.next_nonblank(line)) {
        text::split(line, ',', f);
        Timestamp start = 0;
        std::int64_t idx = 0;
        double v = 0.0;
        if (f.size() != 4 || !parse_iso8601(f[1], start) || !text::parse_int(f[2], idx) || !text::parse_double(f[3], v))
            throw ParseError(name, reader.line_no(), std::string(line), "malformed profile row");
        if (out.empty() || out.back().trip_id != f[0]) out.push_back({std::string(f[0]), start, {}});
        if (static_cast<std::size_t>(idx) != out.back().speeds_mps.size())
            throw ParseError(name, reader.line_no(), std::string(line), "profile indices not consecutive");
        out.back().speeds_mps.push_back(v);
    }
    return out;
}

} // namespace speedprof
