#pragma once

// Deterministic synthetic world: a curved route, TMC sections partitioning
// it, diurnal section traffic with random congestion dips, and trips by a
// driver persona whose speed is an affine function of traffic and curvature.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <numbers>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "speedprof/drive_cycle.hpp"
#include "speedprof/error.hpp"
#include "speedprof/route.hpp"
#include "speedprof/time.hpp"
#include "speedprof/tmc.hpp"

namespace speedprof::synth {

struct WorldParams {
    std::uint64_t seed = 42;
    double route_length_m = 5000.0;
    int n_sections = 5;
    int n_shape_points = 26;
    double spacing_m = kDefaultSpacingM;
    double origin_lat = 42.2808;
    double origin_lon = -83.7430;
    double turn_sigma_deg = 20.0;     ///< heading change std dev per shape point
    double diurnal_amplitude = 0.35;  ///< peak fractional slowdown
    double diurnal_phase_h = 17.0;    ///< hour of day of the peak slowdown
    double congestion_rate_per_day = 2.0;
    double congestion_depth = 0.3;    ///< fractional slowdown at the bottom of a dip
    double congestion_duration_s = 1800.0;
    double tmc_sample_period_s = kDefaultTmcPeriodS;
    int history_days = 7;
    Timestamp history_start = 1709510400; ///< 2024-03-04T00:00:00Z

    void validate() const {
        const auto bad = [](const std::string& w) { throw InvalidParams(w); };
        if (!(route_length_m > 0.0)) bad("route_length_m must be > 0");
        if (n_sections < 1) bad("n_sections must be >= 1");
        if (n_shape_points < 2) bad("n_shape_points must be >= 2");
        if (n_sections > n_shape_points) bad("n_sections must not exceed n_shape_points");
        if (!(spacing_m > 0.0) || spacing_m > route_length_m) bad("spacing_m must be in (0, route_length_m]");
        if (!(turn_sigma_deg >= 0.0)) bad("turn_sigma_deg must be >= 0");
        if (!(diurnal_amplitude >= 0.0 && diurnal_amplitude < 1.0)) bad("diurnal_amplitude must be in [0,1)");
        if (!(congestion_rate_per_day >= 0.0)) bad("congestion_rate_per_day must be >= 0");
        if (!(congestion_depth >= 0.0 && congestion_depth < 1.0)) bad("congestion_depth must be in [0,1)");
        if (!(congestion_duration_s > 0.0)) bad("congestion_duration_s must be > 0");
        if (!(tmc_sample_period_s >= 1.0)) bad("tmc_sample_period_s must be >= 1");
        if (history_days < 1) bad("history_days must be >= 1");
        if (!GeoPoint{origin_lat, origin_lon}.valid()) bad("origin out of range");
    }
};

struct DriverPersona {
    double speed_ratio = 1.10;          ///< multiplier on traffic speed
    double curvature_sensitivity = 8.0; ///< m/s slowdown per unit of |curvature| * 100 m
    double noise_sigma_mps = 0.5;
    double reaction_lag_s = 30.0;

    void validate() const {
        if (!(speed_ratio > 0.0)) throw InvalidParams("speed_ratio must be > 0");
        if (!(curvature_sensitivity >= 0.0)) throw InvalidParams("curvature_sensitivity must be >= 0");
        if (!(noise_sigma_mps >= 0.0)) throw InvalidParams("noise_sigma_mps must be >= 0");
        if (!(reaction_lag_s >= 0.0)) throw InvalidParams("reaction_lag_s must be >= 0");
    }
};

struct TripParams {
    double gps_noise_m = 1.5;
    double sample_period_s = 1.0;
    double earliest_hour = 6.0;
    double latest_hour = 20.0;
    double min_speed_mps = 1.0;

    void validate() const {
        if (!(gps_noise_m >= 0.0)) throw InvalidParams("gps_noise_m must be >= 0");
        if (!(sample_period_s > 0.0)) throw InvalidParams("sample_period_s must be > 0");
        if (!(earliest_hour >= 0.0 && latest_hour <= 24.0 && earliest_hour < latest_hour))
            throw InvalidParams("trip hours must satisfy 0 <= earliest < latest <= 24");
        if (!(min_speed_mps > 0.0)) throw InvalidParams("min_speed_mps must be > 0");
    }
};

/// Seed of a named random stream derived from a master seed.
inline std::uint64_t stream_seed(std::uint64_t master, std::string_view name, std::uint64_t index = 0) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (char c : name) h = (h ^ static_cast<unsigned char>(c)) * 0x100000001b3ull;
    std::uint64_t z = master ^ h;
    z += 0x9E3779B97F4A7C15ull * (index + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

struct CongestionEvent {
    double center_s = 0.0; ///< seconds since history start
};

struct SectionTraffic {
    std::string code;
    double freeflow_mps = 0.0;
    double diurnal_scale = 1.0;
    std::vector<CongestionEvent> events;
};

struct World {
    WorldParams params;
    std::vector<ShapePoint> shape_points;
    std::vector<TmcSection> sections;
    std::vector<SectionTraffic> traffic;
    Route route;          ///< standard points carry the mapped TMC code
    TmcHistory history;

    Timestamp history_end() const {
        return params.history_start + static_cast<Timestamp>(params.history_days) * 86400;
    }
};

inline double round3(double v) { return std::round(v * 1000.0) / 1000.0; }

/// Section speed at time t before rounding.
inline double traffic_speed(const WorldParams& p, const SectionTraffic& s, Timestamp t) {
    const double since = static_cast<double>(t - p.history_start);
    const double hour = std::fmod(since / 3600.0, 24.0);
    const double g = 0.5 * (1.0 + std::cos(2.0 * std::numbers::pi * (hour - p.diurnal_phase_h) / 24.0));
    double factor = 1.0 - std::min(0.95, p.diurnal_amplitude * s.diurnal_scale) * g;
    for (const auto& e : s.events) {
        const double x = (since - e.center_s) / (0.5 * p.congestion_duration_s);
        if (std::abs(x) < 1.0) factor *= 1.0 - p.congestion_depth * 0.5 * (1.0 + std::cos(std::numbers::pi * x));
    }
    return s.freeflow_mps * factor;
}

inline World generate_world(const WorldParams& params) {
    params.validate();
    std::vector<ShapePoint> shape_points;
    std::vector<TmcSection> sections;
    std::vector<SectionTraffic> traffic;

    // geometry
    std::mt19937_64 geo_rng(stream_seed(params.seed, "world"));
    std::normal_distribution<double> turn(0.0, params.turn_sigma_deg);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const PlanarFrame frame({params.origin_lat, params.origin_lon});
    const double seg = params.route_length_m / (params.n_shape_points - 1);
    double heading = unit(geo_rng) * 360.0;
    Vec2 cur{0.0, 0.0};
    std::vector<GeoPoint> verts{frame.to_geo(cur)};
    for (int i = 1; i < params.n_shape_points; ++i) {
        if (i > 1) heading += std::clamp(turn(geo_rng), -3.0 * params.turn_sigma_deg, 3.0 * params.turn_sigma_deg);
        cur = cur + seg * Vec2{std::sin(deg2rad(heading)), std::cos(deg2rad(heading))};
        verts.push_back(frame.to_geo(cur));
    }
    const double alt_phase = unit(geo_rng) * 2.0 * std::numbers::pi;

    // stretch the last segment so the geodesic length is a whole number of
    // spacings; otherwise a terminal standard point lands a hair after the
    // previous one
    {
        const auto polyline_length = [&]() {
            double len = 0.0;
            for (std::size_t i = 1; i < verts.size(); ++i) len += haversine_distance(verts[i - 1], verts[i]);
            return len;
        };
        const double target = std::max(1.0, std::round(polyline_length() / params.spacing_m)) * params.spacing_m;
        const Vec2 a = frame.to_plane(verts[verts.size() - 2]);
        for (int it = 0; it < 4; ++it) {
            const Vec2 b = frame.to_plane(verts.back());
            const double last = haversine_distance(verts[verts.size() - 2], verts.back());
            const double scale = (last + target - polyline_length()) / last;
            verts.back() = frame.to_geo(a + scale * (b - a));
        }
    }

    // sections: even partition of the polyline arc length
    const detail::Polyline line(verts.size(), [&](std::size_t i) { return verts[i]; });
    const double length = line.length();
    const std::vector<double> limits{24.6, 26.8, 29.1, 31.3};
    std::vector<double> bounds;
    for (int s = 0; s <= params.n_sections; ++s) bounds.push_back(length * s / params.n_sections);
    bounds.back() = length;

    struct SectionAttrs {
        double limit;
        int lanes;
    };
    std::vector<SectionAttrs> attrs;
    for (int s = 0; s < params.n_sections; ++s) {
        SectionTraffic t;
        t.code = fmt::format("1{:02}P{:05}", params.seed % 100, 10001 + s);
        const SectionAttrs a{limits[static_cast<std::size_t>(unit(geo_rng) * limits.size()) % limits.size()],
                             2 + static_cast<int>(unit(geo_rng) * 3.0) % 3};
        attrs.push_back(a);
        t.freeflow_mps = round3(a.limit * (0.95 + 0.1 * unit(geo_rng)));
        t.diurnal_scale = 0.7 + 0.6 * unit(geo_rng);
        traffic.push_back(std::move(t));
    }
    const auto section_of = [&](double arc) {
        const auto it = std::upper_bound(bounds.begin() + 1, bounds.end() - 1, arc + 1e-9);
        return static_cast<std::size_t>(it - (bounds.begin() + 1));
    };

    for (std::size_t i = 0; i < verts.size(); ++i) {
        const auto s = section_of(line.arc[i]);
        ShapePoint sp;
        sp.position = verts[i];
        sp.altitude_m = std::round((260.0 + 12.0 * std::sin(line.arc[i] / 900.0 + alt_phase)) * 100.0) / 100.0;
        sp.lanes = attrs[s].lanes;
        sp.speed_limit_mps = attrs[s].limit;
        sp.tmc_code = traffic[s].code;
        shape_points.push_back(std::move(sp));
    }
    // round-trip the shape points through their text form so the in-memory
    // world equals what a reader of the route file sees
    shape_points = parse_shape_points(format_shape_points(shape_points));
    const Route raw = build_route(shape_points, params.spacing_m);

    for (int s = 0; s < params.n_sections; ++s) {
        TmcSection sec;
        sec.code = traffic[static_cast<std::size_t>(s)].code;
        sec.start_arc_m = bounds[static_cast<std::size_t>(s)];
        sec.end_arc_m = bounds[static_cast<std::size_t>(s) + 1];
        sec.geometry.push_back(raw.position_at(sec.start_arc_m));
        for (std::size_t i = 0; i < verts.size(); ++i)
            if (line.arc[i] > sec.start_arc_m && line.arc[i] < sec.end_arc_m) sec.geometry.push_back(verts[i]);
        sec.geometry.push_back(raw.position_at(sec.end_arc_m));
        sections.push_back(std::move(sec));
    }
    {
        auto parsed = parse_section_table(format_section_table(sections));
        for (std::size_t s = 0; s < parsed.size(); ++s) sections[s].geometry = std::move(parsed[s].geometry);
    }
    Route route = raw.with_tmc_codes(map_route_to_tmc(raw, sections).point_codes);

    // traffic
    std::mt19937_64 traffic_rng(stream_seed(params.seed, "traffic"));
    const double horizon = params.history_days * 86400.0;
    for (auto& t : traffic) {
        if (params.congestion_rate_per_day > 0.0) {
            std::exponential_distribution<double> gap(params.congestion_rate_per_day / 86400.0);
            for (double c = gap(traffic_rng); c < horizon; c += gap(traffic_rng)) t.events.push_back({c});
        }
    }
    std::vector<TmcObservation> recs;
    const auto step = static_cast<Timestamp>(std::llround(params.tmc_sample_period_s));
    const Timestamp end = params.history_start + static_cast<Timestamp>(params.history_days) * 86400;
    for (Timestamp ts = params.history_start; ts < end; ts += step)
        for (const auto& t : traffic)
            recs.push_back({t.code, ts, round3(traffic_speed(params, t, ts)), t.freeflow_mps});
    auto history = TmcHistory::from_records(std::move(recs));
    return World{params, std::move(shape_points), std::move(sections), std::move(traffic), std::move(route),
                 std::move(history)};
}

// ---------------------------------------------------------------------------
// Trips

struct GeneratedTrip {
    TripLog log;
    VelocityProfile truth;
};

/// Driver speed at every standard point for a trip starting at `start`.
/// Speeds follow the persona's affine rule applied to the TMC speed seen
/// reaction_lag_s before arriving at each point.
inline std::vector<double> persona_profile(const World& world, const DriverPersona& persona, Timestamp start,
                                           std::mt19937_64& rng, double min_speed = 1.0) {
    std::normal_distribution<double> noise(0.0, 1.0);
    const auto& pts = world.route.standard_points();
    std::vector<double> v(pts.size());
    double arrival = 0.0;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        if (i > 0) arrival += (pts[i].arc_position_m - pts[i - 1].arc_position_m) / v[i - 1];
        const auto t = start + static_cast<Timestamp>(std::floor(arrival - persona.reaction_lag_s));
        const double traffic = sample_tmc(world.history, pts[i].tmc_code, t);
        const double eps = persona.noise_sigma_mps > 0.0 ? persona.noise_sigma_mps * noise(rng) : 0.0;
        v[i] = std::max(min_speed, persona.speed_ratio * traffic -
                                       persona.curvature_sensitivity * std::abs(pts[i].curvature_per_m) * 100.0 + eps);
    }
    return v;
}

/// Drives the route along a speed profile (linear in arc between standard
/// points) and samples a GPS log at the given period.
inline TripLog drive(const World& world, std::span<const double> profile, const std::string& trip_id, Timestamp start,
                     const TripParams& tp, std::mt19937_64& rng) {
    const Route& route = world.route;
    const auto& pts = route.standard_points();
    const auto speed_at = [&](double s) {
        const auto it = std::upper_bound(pts.begin(), pts.end(), s,
                                         [](double x, const StandardPoint& p) { return x < p.arc_position_m; });
        if (it == pts.begin()) return profile.front();
        if (it == pts.end()) return profile.back();
        const auto i = static_cast<std::size_t>(it - pts.begin());
        const double f = (s - pts[i - 1].arc_position_m) / (pts[i].arc_position_m - pts[i - 1].arc_position_m);
        return profile[i - 1] + f * (profile[i] - profile[i - 1]);
    };
    const auto& sh = route.shape_points();
    const detail::Polyline line(sh.size(), [&](std::size_t i) { return sh[i].position; });
    const auto altitude_at = [&](double s) {
        const std::size_t j = std::min(line.upstream_vertex(s), sh.size() - 2);
        const double seg = line.arc[j + 1] - line.arc[j];
        const double f = seg > 0.0 ? (s - line.arc[j]) / seg : 0.0;
        return sh[j].altitude_m + f * (sh[j + 1].altitude_m - sh[j].altitude_m);
    };
    std::normal_distribution<double> gps(0.0, 1.0);
    const auto sample = [&](double t, double s) {
        TripSample smp;
        smp.t_rel_s = t;
        Vec2 p = route.frame().to_plane(route.position_at(s));
        if (tp.gps_noise_m > 0.0) p = p + tp.gps_noise_m * Vec2{gps(rng), gps(rng)};
        smp.position = route.frame().to_geo(p);
        smp.speed_mps = speed_at(s);
        smp.heading_deg = route.heading_at(s);
        smp.altitude_m = std::round(altitude_at(s) * 100.0) / 100.0;
        return smp;
    };

    TripLog log{trip_id, start, {}};
    const double length = route.length_m();
    constexpr int kSubsteps = 20;
    double s = 0.0;
    double t = 0.0;
    log.samples.push_back(sample(0.0, 0.0));
    while (true) {
        double s_next = s;
        const double h = tp.sample_period_s / kSubsteps;
        for (int k = 0; k < kSubsteps && s_next < length; ++k) {
            const double v1 = speed_at(s_next);
            const double v2 = speed_at(std::min(length, s_next + 0.5 * h * v1));
            s_next += h * v2;
        }
        if (s_next >= length) {
            const double remaining = length - s;
            const double dt = std::max(1e-3, remaining / std::max(tp.min_speed_mps, speed_at(s)));
            log.samples.push_back(sample(t + std::min(dt, tp.sample_period_s), length));
            break;
        }
        s = s_next;
        t += tp.sample_period_s;
        log.samples.push_back(sample(t, s));
    }
    // text round trip so in-memory logs equal what readers of the files see
    return parse_trip_log(format_trip_log(log));
}

inline std::vector<GeneratedTrip> generate_trips(const World& world, const DriverPersona& persona, int count,
                                                 std::uint64_t seed, const TripParams& tp = {}) {
    persona.validate();
    tp.validate();
    if (count < 0) throw InvalidParams("trip count must be >= 0");
    std::vector<GeneratedTrip> out;
    const int usable_days = std::max(1, world.params.history_days - 1);
    for (int i = 0; i < count; ++i) {
        std::mt19937_64 rng(stream_seed(seed, "trips", static_cast<std::uint64_t>(i)));
        std::uniform_int_distribution<int> day(0, usable_days - 1);
        std::uniform_real_distribution<double> hour(tp.earliest_hour, tp.latest_hour);
        const int d = world.params.history_days > 1 ? 1 + day(rng) : 0;
        const Timestamp start =
            world.params.history_start + d * 86400 + static_cast<Timestamp>(std::floor(hour(rng) * 3600.0));
        const std::string id = fmt::format("trip_{:03}", i);
        auto profile = persona_profile(world, persona, start, rng, tp.min_speed_mps);
        for (auto& v : profile) v = round3(v);
        auto log = drive(world, profile, id, start, tp, rng);
        out.push_back({std::move(log), {id, start, std::move(profile)}});
    }
    return out;
}

// ---------------------------------------------------------------------------
// Files

inline std::string day_file_name(Timestamp day_start) {
    const auto iso = format_iso8601(day_start);
    return "tmc_" + iso.substr(0, 4) + iso.substr(5, 2) + iso.substr(8, 2) + ".csv";
}

/// route.csv, sections.csv and one TMC history file per day under tmc/.
inline void write_world(const World& w, const std::filesystem::path& dir) {
    text::write_file(dir / "route.csv", format_shape_points(w.shape_points));
    text::write_file(dir / "sections.csv", format_section_table(w.sections));
    for (int d = 0; d < w.params.history_days; ++d) {
        const Timestamp lo = w.params.history_start + static_cast<Timestamp>(d) * 86400;
        const Timestamp hi = lo + 86400;
        std::vector<TmcObservation> day;
        for (const auto& [code, g] : w.history.groups())
            for (const auto& o : g)
                if (o.timestamp >= lo && o.timestamp < hi) day.push_back(o);
        std::stable_sort(day.begin(), day.end(),
                         [](const TmcObservation& a, const TmcObservation& b) { return a.timestamp < b.timestamp; });
        text::write_file(dir / "tmc" / day_file_name(lo), format_observations(day));
    }
}

/// trips/<id>.csv plus truth/profiles.csv with the exact profiles driven.
inline void write_trips(std::span<const GeneratedTrip> trips, const std::filesystem::path& dir) {
    std::vector<VelocityProfile> truth;
    for (const auto& t : trips) {
        text::write_file(dir / "trips" / (t.log.trip_id + ".csv"), format_trip_log(t.log));
        truth.push_back(t.truth);
    }
    text::write_file(dir / "truth" / "profiles.csv", format_profiles(truth));
}

inline void to_json(nlohmann::json& j, const WorldParams& p) {
    j = {{"seed", p.seed},
         {"route_length_m", p.route_length_m},
         {"n_sections", p.n_sections},
         {"n_shape_points", p.n_shape_points},
         {"spacing_m", p.spacing_m},
         {"origin_lat", p.origin_lat},
         {"origin_lon", p.origin_lon},
         {"turn_sigma_deg", p.turn_sigma_deg},
         {"diurnal_amplitude", p.diurnal_amplitude},
         {"diurnal_phase_h", p.diurnal_phase_h},
         {"congestion_rate_per_day", p.congestion_rate_per_day},
         {"congestion_depth", p.congestion_depth},
         {"congestion_duration_s", p.congestion_duration_s},
         {"tmc_sample_period_s", p.tmc_sample_period_s},
         {"history_days", p.history_days},
         {"history_start", format_iso8601(p.history_start)}};
}

inline void from_json(const nlohmann::json& j, WorldParams& p) {
    p.seed = j.value("seed", p.seed);
    p.route_length_m = j.value("route_length_m", p.route_length_m);
    p.n_sections = j.value("n_sections", p.n_sections);
    p.n_shape_points = j.value("n_shape_points", p.n_shape_points);
    p.spacing_m = j.value("spacing_m", p.spacing_m);
    p.origin_lat = j.value("origin_lat", p.origin_lat);
    p.origin_lon = j.value("origin_lon", p.origin_lon);
    p.turn_sigma_deg = j.value("turn_sigma_deg", p.turn_sigma_deg);
    p.diurnal_amplitude = j.value("diurnal_amplitude", p.diurnal_amplitude);
    p.diurnal_phase_h = j.value("diurnal_phase_h", p.diurnal_phase_h);
    p.congestion_rate_per_day = j.value("congestion_rate_per_day", p.congestion_rate_per_day);
    p.congestion_depth = j.value("congestion_depth", p.congestion_depth);
    p.congestion_duration_s = j.value("congestion_duration_s", p.congestion_duration_s);
    p.tmc_sample_period_s = j.value("tmc_sample_period_s", p.tmc_sample_period_s);
    p.history_days = j.value("history_days", p.history_days);
    if (j.contains("history_start")) {
        if (!parse_iso8601(j.at("history_start").get<std::string>(), p.history_start))
            throw InvalidParams("history_start must be ISO-8601 UTC");
    }
    p.validate();
}

inline void to_json(nlohmann::json& j, const DriverPersona& p) {
    j = {{"speed_ratio", p.speed_ratio},
         {"curvature_sensitivity", p.curvature_sensitivity},
         {"noise_sigma_mps", p.noise_sigma_mps},
         {"reaction_lag_s", p.reaction_lag_s}};
}

inline void from_json(const nlohmann::json& j, DriverPersona& p) {
    p.speed_ratio = j.value("speed_ratio", p.speed_ratio);
    p.curvature_sensitivity = j.value("curvature_sensitivity", p.curvature_sensitivity);
    p.noise_sigma_mps = j.value("noise_sigma_mps", p.noise_sigma_mps);
    p.reaction_lag_s = j.value("reaction_lag_s", p.reaction_lag_s);
    p.validate();
}

inline void to_json(nlohmann::json& j, const TripParams& p) {
    j = {{"gps_noise_m", p.gps_noise_m},
         {"sample_period_s", p.sample_period_s},
         {"earliest_hour", p.earliest_hour},
         {"latest_hour", p.latest_hour},
         {"min_speed_mps", p.min_speed_mps}};
}

inline void from_json(const nlohmann::json& j, TripParams& p) {
    p.gps_noise_m = j.value("gps_noise_m", p.gps_noise_m);
    p.sample_period_s = j.value("sample_period_s", p.sample_period_s);
    p.earliest_hour = j.value("earliest_hour", p.earliest_hour);
    p.latest_hour = j.value("latest_hour", p.latest_hour);
    p.min_speed_mps = j.value("min_speed_mps", p.min_speed_mps);
    p.validate();
}

} // namespace speedprof::synth
