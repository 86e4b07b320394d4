#include <gtest/gtest.h>

#include "support.hpp"

using namespace speedprof;
using namespace fixture;

namespace {

const char* kTripHead = "trip_id,start_datetime_iso8601\nT1,2024-03-05T08:00:00Z\nt_rel_s,lat,lon,speed_mps,heading_deg,altitude_m\n";

} // namespace

TEST(TripLogFile, ParsesThreeSamples) {
    const auto log = parse_trip_log(std::string(kTripHead) + "0,0,0,10,90,5\n1,0,0.0001,10.5,90,5\n2,0,0.0002,11,90,5\n");
    EXPECT_EQ(log.trip_id, "T1");
    EXPECT_EQ(log.start, 1709625600);
    ASSERT_EQ(log.samples.size(), 3u);
    EXPECT_EQ(log.samples[2].speed_mps, 11.0);
    EXPECT_EQ(log.samples[1].position.lon, 0.0001);
}

TEST(TripLogFile, RepeatedTimeIsNonMonotonic) {
    try {
        parse_trip_log(std::string(kTripHead) + "0,0,0,10,90,5\n5,0,0.0001,10,90,5\n5,0,0.0002,10,90,5\n");
        FAIL();
    } catch (const NonMonotonicTime& e) {
        EXPECT_EQ(e.error_class(), "trip.non_monotonic_time");
    }
}

TEST(TripLogFile, HeaderOnlyIsParseError) {
    EXPECT_THROW(parse_trip_log(kTripHead), ParseError);
    EXPECT_THROW(parse_trip_log(""), ParseError);
    EXPECT_THROW(parse_trip_log(std::string(kTripHead) + "0,0,0,-1,90,5\n"), ParseError);
}

TEST(TripLogFile, RoundTrip) {
    const auto r = straight_route(1000.0);
    const auto log = drive_exact(r, [](double s) { return 10.0 + s / 97.0; }, 0.7, "abc", 1709625600);
    const auto back = parse_trip_log(format_trip_log(log));
    EXPECT_EQ(back.trip_id, log.trip_id);
    EXPECT_EQ(back.start, log.start);
    ASSERT_EQ(back.samples.size(), log.samples.size());
    for (std::size_t i = 0; i < log.samples.size(); ++i) {
        EXPECT_EQ(back.samples[i].t_rel_s, log.samples[i].t_rel_s);
        EXPECT_EQ(back.samples[i].position.lat, log.samples[i].position.lat);
        EXPECT_EQ(back.samples[i].position.lon, log.samples[i].position.lon);
        EXPECT_EQ(back.samples[i].speed_mps, log.samples[i].speed_mps);
    }
}

TEST(MatchTrip, ExactTripAccepted) {
    const auto r = straight_route(2000.0);
    const auto v = match_trip_to_route(drive_exact(r, [](double) { return 25.0; }), r);
    EXPECT_TRUE(v.accepted);
    EXPECT_EQ(v.coverage, 1.0);
    EXPECT_EQ(v.discarded_fraction, 0.0);
}

TEST(MatchTrip, ParallelRoadRejected) {
    const auto r = straight_route(2000.0);
    auto log = drive_exact(r, [](double) { return 25.0; });
    for (auto& s : log.samples) s.position = offset(s.position, 0.0, 200.0);
    const auto v = match_trip_to_route(log, r);
    EXPECT_FALSE(v.accepted);
    EXPECT_EQ(v.coverage, 0.0);
}

TEST(MatchTrip, HalfRouteRejected) {
    const auto r = straight_route(2000.0);
    auto log = drive_exact(r, [](double) { return 25.0; });
    std::erase_if(log.samples, [&](const TripSample& s) { return r.project_point(s.position).arc_position_m > 1000.0; });
    const auto v = match_trip_to_route(log, r);
    EXPECT_FALSE(v.accepted);
    // points 0..10 of 21 are within 50 m of a sample
    EXPECT_NEAR(v.coverage, 11.0 / 21.0, 1e-12);
    EXPECT_THROW(extract_velocity_profile(log, r), UnmatchedTrip);
}

TEST(MatchTrip, BacktrackingRejected) {
    const auto r = straight_route(2000.0);
    auto log = drive_exact(r, [](double) { return 10.0; });
    // every fourth sample jumps 100 m back
    for (std::size_t i = 3; i < log.samples.size(); i += 4) {
        const double a = r.project_point(log.samples[i].position).arc_position_m;
        log.samples[i].position = r.position_at(std::max(0.0, a - 100.0));
    }
    const auto v = match_trip_to_route(log, r);
    EXPECT_FALSE(v.accepted);
    EXPECT_GT(v.discarded_fraction, 0.10);
}

TEST(MatchTrip, SmallJitterTolerated) {
    const auto r = straight_route(2000.0);
    auto log = drive_exact(r, [](double) { return 10.0; });
    std::mt19937_64 rng(5);
    std::normal_distribution<double> n(0.0, 1.5);
    for (auto& s : log.samples) s.position = offset(s.position, n(rng), n(rng));
    EXPECT_TRUE(match_trip_to_route(log, r).accepted);
}

TEST(Profile, ConstantSpeed) {
    const auto r = straight_route(3000.0);
    const auto p = extract_velocity_profile(drive_exact(r, [](double) { return 30.0; }), r);
    ASSERT_EQ(p.speeds_mps.size(), r.size());
    for (double v : p.speeds_mps) EXPECT_NEAR(v, 30.0, 1e-9);
}

TEST(Profile, LinearRamp) {
    const auto r = straight_route(3000.0);
    const double L = r.length_m();
    const auto p = extract_velocity_profile(drive_exact(r, [L](double s) { return 30.0 * s / L; }, 1.0), r);
    ASSERT_EQ(p.speeds_mps.size(), r.size());
    for (std::size_t i = 0; i < r.size(); ++i) EXPECT_NEAR(p.speeds_mps[i], 30.0 * r[i].arc_position_m / L, 0.1) << i;
}

TEST(Profile, DropoutIsInterpolatedAcrossGap) {
    const auto r = straight_route(3000.0);
    const auto field = [](double s) { return 20.0 + 5.0 * std::sin(s / 300.0); };
    auto log = drive_exact(r, field, 4.0);
    // remove three samples in the middle
    const std::size_t mid = log.samples.size() / 2;
    log.samples.erase(log.samples.begin() + static_cast<std::ptrdiff_t>(mid),
                      log.samples.begin() + static_cast<std::ptrdiff_t>(mid + 3));
    const auto p = extract_velocity_profile(log, r);

    std::vector<double> arcs;
    for (const auto& s : log.samples) arcs.push_back(r.project_point(s.position).arc_position_m);
    std::vector<double> gaps;
    for (std::size_t i = 1; i < arcs.size(); ++i) gaps.push_back(arcs[i] - arcs[i - 1]);
    std::vector<double> sorted = gaps;
    std::nth_element(sorted.begin(), sorted.begin() + static_cast<std::ptrdiff_t>(sorted.size() / 2), sorted.end());
    const double median = sorted[sorted.size() / 2];

    std::vector<bool> is_gap(r.size(), false);
    std::vector<double> bracket(r.size(), 0.0);
    for (std::size_t i = 0; i < r.size(); ++i) {
        const double a = r[i].arc_position_m;
        const auto hi = std::lower_bound(arcs.begin(), arcs.end(), a);
        if (hi == arcs.begin() || hi == arcs.end() || *hi == a) continue;
        bracket[i] = *hi - *(hi - 1);
        is_gap[i] = bracket[i] > 2.0 * median;
    }
    int n_gap = 0;
    for (std::size_t i = 0; i < r.size(); ++i) {
        if (!is_gap[i]) {
            // linear interpolation error bound h^2/8 * max|f''|
            const double bound = bracket[i] * bracket[i] / 8.0 * 5.0 / (300.0 * 300.0) + 1e-9;
            EXPECT_NEAR(p.speeds_mps[i], field(r[i].arc_position_m), bound) << i;
            continue;
        }
        ++n_gap;
        std::size_t lo = i, hi = i;
        while (is_gap[lo]) --lo;
        while (is_gap[hi]) ++hi;
        const double f = (r[i].arc_position_m - r[lo].arc_position_m) / (r[hi].arc_position_m - r[lo].arc_position_m);
        EXPECT_NEAR(p.speeds_mps[i], p.speeds_mps[lo] + f * (p.speeds_mps[hi] - p.speeds_mps[lo]), 1e-9) << i;
    }
    EXPECT_GE(n_gap, 1);
}

TEST(Profile, LengthAndSignOnNoisySyntheticTrips) {
    const auto w = synth::generate_world({});
    const auto trips = synth::generate_trips(w, {}, 6, 5);
    for (const auto& t : trips) {
        const auto p = extract_velocity_profile(t.log, w.route);
        ASSERT_EQ(p.speeds_mps.size(), w.route.size());
        for (double v : p.speeds_mps) EXPECT_GE(v, 0.0);
        EXPECT_EQ(p.trip_id, t.log.trip_id);
        EXPECT_EQ(p.start, t.log.start);
    }
}

TEST(ProfilesFile, RoundTrip) {
    std::vector<VelocityProfile> ps{{"a", 1709625600, {1.5, 2.25, 3.125}}, {"b", 1709625660, {0.1, 0.2, 0.30000000000000004}}};
    const auto back = parse_profiles(format_profiles(ps));
    ASSERT_EQ(back.size(), 2u);
    for (std::size_t i = 0; i < 2; ++i) {
        EXPECT_EQ(back[i].trip_id, ps[i].trip_id);
        EXPECT_EQ(back[i].start, ps[i].start);
        EXPECT_EQ(back[i].speeds_mps, ps[i].speeds_mps);
    }
}
