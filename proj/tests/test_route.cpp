#include <gtest/gtest.h>

#include "support.hpp"

using namespace speedprof;
using namespace fixture;

namespace {

std::vector<ShapePoint> random_walk_shapes(std::mt19937_64& rng, int n, double seg_lo, double seg_hi, double turn_deg) {
    std::uniform_real_distribution<double> seg(seg_lo, seg_hi);
    std::normal_distribution<double> turn(0.0, turn_deg);
    std::uniform_real_distribution<double> lat0(-60.0, 60.0), lon0(-170.0, 170.0);
    GeoPoint p{lat0(rng), lon0(rng)};
    double heading = std::uniform_real_distribution<double>(0.0, 360.0)(rng);
    double east = 0.0, north = 0.0;
    const GeoPoint origin = p;
    std::vector<ShapePoint> pts{shape(origin)};
    for (int i = 1; i < n; ++i) {
        heading += turn(rng);
        const double d = seg(rng);
        east += d * std::sin(heading * std::numbers::pi / 180.0);
        north += d * std::cos(heading * std::numbers::pi / 180.0);
        pts.push_back(shape(offset(origin, east, north), 20.0 + i));
    }
    return pts;
}

} // namespace

TEST(Haversine, IdentityIsZero) {
    EXPECT_EQ(haversine_distance({12.5, -45.25}, {12.5, -45.25}), 0.0);
}

TEST(Haversine, OneDegreeOfLongitudeOnEquator) {
    EXPECT_NEAR(haversine_distance({0, 0}, {0, 1}), 111194.9, 1.0);
    EXPECT_NEAR(haversine_distance({0, 0}, {0, 1}), kR * std::numbers::pi / 180.0, 1e-6);
}

TEST(Haversine, QuarterMeridian) {
    EXPECT_NEAR(haversine_distance({0, 0}, {90, 0}), 10007543.0, 10.0);
}

TEST(Haversine, SymmetricAndTriangleInequality) {
    std::mt19937_64 rng(101);
    std::uniform_real_distribution<double> lat(-90, 90), lon(-180, 180);
    for (int i = 0; i < 2000; ++i) {
        const GeoPoint a{lat(rng), lon(rng)}, b{lat(rng), lon(rng)}, c{lat(rng), lon(rng)};
        const double ab = haversine_distance(a, b);
        EXPECT_GE(ab, 0.0);
        EXPECT_NEAR(ab, haversine_distance(b, a), 1e-6);
        EXPECT_LE(ab, haversine_distance(a, c) + haversine_distance(c, b) + 1e-6);
        EXPECT_LE(ab, std::numbers::pi * kR + 1e-6);
    }
}

TEST(BuildRoute, StraightKilometre) {
    const auto r = straight_route(1000.0, 100.0);
    ASSERT_EQ(r.size(), 11u);
    EXPECT_EQ(r.last_index(), 10u);
    for (std::size_t i = 0; i < r.size(); ++i) {
        EXPECT_EQ(r[i].index, i);
        EXPECT_NEAR(r[i].arc_position_m, 100.0 * static_cast<double>(i), 1e-6);
        EXPECT_EQ(r[i].curvature_per_m, 0.0);
    }
    EXPECT_NEAR(r.length_m(), 1000.0, 1e-6);
}

TEST(BuildRoute, SpacingLongerThanRouteIsDegenerate) {
    EXPECT_THROW(straight_route(80.0, 100.0), DegenerateRoute);
}

TEST(BuildRoute, SinglePointAndDuplicatesAreDegenerate) {
    const auto p = shape({0, 0});
    std::vector<ShapePoint> one{p};
    EXPECT_THROW(build_route(one, 100.0), DegenerateRoute);
    std::vector<ShapePoint> dup{p, p, p};
    EXPECT_THROW(build_route(dup, 100.0), DegenerateRoute);
}

TEST(BuildRoute, InvalidInputsAreConfigErrors) {
    auto pts = straight_shapes(1000.0);
    EXPECT_THROW(build_route(pts, 0.0), ConfigError);
    EXPECT_THROW(build_route(pts, -5.0), ConfigError);
    pts[0].lanes = 0;
    EXPECT_THROW(build_route(pts, 100.0), ConfigError);
    pts = straight_shapes(1000.0);
    pts[1].position.lat = 91.0;
    EXPECT_THROW(build_route(pts, 100.0), ConfigError);
}

TEST(BuildRoute, LShapeCornerPoint) {
    const GeoPoint a{0, 0}, corner{0, equator_deg(500)};
    const GeoPoint end{equator_deg(500), equator_deg(500)};
    std::vector<ShapePoint> pts{shape(a), shape(corner), shape(end)};
    const auto r = build_route(pts, 250.0);
    ASSERT_EQ(r.size(), 5u);
    EXPECT_NEAR(r[2].arc_position_m, 500.0, 1e-6);
    EXPECT_LT(haversine_distance(r[2].position, corner), 0.01);
    EXPECT_NEAR(r[2].dist_to_upstream_shape_m, 0.0, 1e-6);
    EXPECT_NEAR(r[1].dist_to_upstream_shape_m, 250.0, 1e-6);
    EXPECT_NEAR(r[3].dist_to_upstream_shape_m, 250.0, 1e-6);
}

TEST(BuildRoute, TerminalPointForShortRemainder) {
    const auto r = straight_route(1050.0, 100.0);
    ASSERT_EQ(r.size(), 12u);
    EXPECT_NEAR(r[11].arc_position_m, 1050.0, 1e-6);
    EXPECT_NEAR(r[11].arc_position_m - r[10].arc_position_m, 50.0, 1e-6);
}

TEST(BuildRoute, AttributesComeFromUpstreamShapePoint) {
    std::vector<ShapePoint> pts{shape({0, 0}, 20.0, 1, 100.0), shape({0, equator_deg(450)}, 30.0, 3, 200.0),
                                shape({0, equator_deg(1000)}, 25.0, 2, 200.0)};
    const auto r = build_route(pts, 100.0);
    for (std::size_t i = 0; i < r.size(); ++i) {
        // a point exactly on a vertex takes that vertex's attributes
        const double a = r[i].arc_position_m;
        const int upstream = a >= 1000.0 - 1e-9 ? 2 : a >= 450.0 - 1e-9 ? 1 : 0;
        EXPECT_EQ(r[i].speed_limit_mps, pts[upstream].speed_limit_mps) << i;
        EXPECT_EQ(r[i].lanes, pts[upstream].lanes) << i;
    }
    // altitude is interpolated along the arc
    EXPECT_NEAR(r[2].altitude_m, 100.0 + 100.0 * 200.0 / 450.0, 1e-6);
    EXPECT_NEAR(r[5].altitude_m, 200.0, 1e-6);
}

TEST(BuildRoute, InvariantsOnRandomRoutes) {
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 200; ++trial) {
        const auto pts = random_walk_shapes(rng, 2 + static_cast<int>(rng() % 30), 20.0, 400.0, 25.0);
        const double spacing = std::uniform_real_distribution<double>(10.0, 150.0)(rng);
        Route r = [&] {
            try {
                return build_route(pts, spacing);
            } catch (const DegenerateRoute&) {
                return straight_route(1000.0);
            }
        }();
        ASSERT_GE(r.size(), 2u);
        EXPECT_EQ(r.size(), r.last_index() + 1);
        for (std::size_t i = 1; i < r.size(); ++i) {
            const double d = r[i].arc_position_m - r[i - 1].arc_position_m;
            EXPECT_GT(d, 0.0);
            if (i + 1 < r.size()) EXPECT_NEAR(d, r.spacing_m(), 1e-6 * r.spacing_m());
            else EXPECT_LE(d, r.spacing_m() * (1.0 + 1e-6));
        }
        for (const auto& sp : r.standard_points()) EXPECT_GE(sp.dist_to_upstream_shape_m, 0.0);
        EXPECT_NEAR(r.standard_points().back().arc_position_m, r.length_m(), 1e-6 * r.length_m());
    }
}

TEST(Curvature, CollinearIsZero) {
    const auto pts = straight_shapes(1000.0, 6);
    for (double s : {0.0, 150.0, 500.0, 999.0}) EXPECT_EQ(curvature_at(pts, s), 0.0);
}

TEST(Curvature, ThreePointsOnCircle) {
    const GeoPoint c{0.0, 0.0};
    std::vector<ShapePoint> pts;
    for (double deg : {0.0, 40.0, 80.0}) {
        const double a = deg * std::numbers::pi / 180.0;
        pts.push_back(shape(offset(c, 100.0 * std::cos(a), 100.0 * std::sin(a))));
    }
    const double arc_mid = haversine_distance(pts[0].position, pts[1].position);
    EXPECT_NEAR(std::abs(curvature_at(pts, arc_mid)), 0.01, 1e-6);
    // counter-clockwise travel turns left: positive
    EXPECT_GT(curvature_at(pts, arc_mid), 0.0);
    std::reverse(pts.begin(), pts.end());
    EXPECT_LT(curvature_at(pts, arc_mid), 0.0);
}

TEST(Projection, OnRoutePoint) {
    const auto r = straight_route(1000.0);
    const auto pr = project_point(r, r[3].position);
    EXPECT_NEAR(pr.arc_position_m, r[3].arc_position_m, 0.1);
    EXPECT_NEAR(pr.lateral_offset_m, 0.0, 0.1);
}

TEST(Projection, PerpendicularOffset) {
    const auto r = straight_route(1000.0);
    const auto pr = project_point(r, offset({0, equator_deg(500)}, 0.0, 50.0));
    EXPECT_NEAR(pr.arc_position_m, 500.0, 0.5);
    EXPECT_NEAR(pr.lateral_offset_m, 50.0, 0.5);
}

TEST(Projection, BeyondEndClamps) {
    const auto r = straight_route(1000.0);
    const GeoPoint beyond{0.0, equator_deg(1200)};
    const auto pr = project_point(r, beyond);
    EXPECT_NEAR(pr.arc_position_m, r.length_m(), 1e-6);
    EXPECT_NEAR(pr.lateral_offset_m, 200.0, 0.5);
}

TEST(Projection, IdentityOnRandomRoutes) {
    std::mt19937_64 rng(8);
    for (int trial = 0; trial < 100; ++trial) {
        const auto pts = random_walk_shapes(rng, 3 + static_cast<int>(rng() % 20), 80.0, 300.0, 15.0);
        const auto r = build_route(pts, 50.0);
        for (const auto& sp : r.standard_points()) {
            const auto pr = project_point(r, sp.position);
            EXPECT_LT(pr.lateral_offset_m, 0.1);
            EXPECT_NEAR(pr.arc_position_m, sp.arc_position_m, 0.5);
        }
    }
}

TEST(RouteFile, RoundTrip) {
    std::mt19937_64 rng(9);
    auto pts = random_walk_shapes(rng, 12, 50.0, 200.0, 20.0);
    for (std::size_t i = 0; i < pts.size(); ++i) {
        pts[i].altitude_m = 250.0 + 0.125 * static_cast<double>(i);
        pts[i].tmc_code = "C" + std::to_string(i / 4);
    }
    const auto back = parse_shape_points(format_shape_points(pts));
    ASSERT_EQ(back.size(), pts.size());
    for (std::size_t i = 0; i < pts.size(); ++i) {
        EXPECT_EQ(back[i].position.lat, pts[i].position.lat);
        EXPECT_EQ(back[i].position.lon, pts[i].position.lon);
        EXPECT_EQ(back[i].altitude_m, pts[i].altitude_m);
        EXPECT_EQ(back[i].lanes, pts[i].lanes);
        EXPECT_EQ(back[i].speed_limit_mps, pts[i].speed_limit_mps);
        EXPECT_EQ(back[i].tmc_code, pts[i].tmc_code);
    }
}

TEST(RouteFile, MalformedInputs) {
    EXPECT_THROW(parse_shape_points("lat,lon\n1,2\n"), ParseError);
    EXPECT_THROW(parse_shape_points("lat,lon,altitude_m,lanes,speed_limit_mps,tmc_code\n1,x,0,1,20,A\n"), ParseError);
    try {
        parse_shape_points("lat,lon,altitude_m,lanes,speed_limit_mps,tmc_code\n0,0,0,1,20,A\n0,0,0,1,20\n", "r.csv");
        FAIL();
    } catch (const ParseError& e) {
        EXPECT_EQ(e.line(), 3u);
        EXPECT_EQ(e.file(), "r.csv");
        EXPECT_EQ(e.error_class(), "io.parse_error");
    }
}

TEST(Time, Iso8601RoundTrip) {
    Timestamp t = 0;
    ASSERT_TRUE(parse_iso8601("2024-03-04T00:00:00Z", t));
    EXPECT_EQ(t, 1709510400);
    EXPECT_EQ(format_iso8601(1709510400 + 3661), "2024-03-04T01:01:01Z");
    ASSERT_TRUE(parse_iso8601("1970-01-01T00:00:00Z", t));
    EXPECT_EQ(t, 0);
    EXPECT_FALSE(parse_iso8601("2024-13-01T00:00:00Z", t));
    EXPECT_FALSE(parse_iso8601("yesterday", t));
    std::mt19937_64 rng(3);
    for (int i = 0; i < 1000; ++i) {
        const Timestamp x = static_cast<Timestamp>(rng() % 4000000000ull);
        Timestamp y = -1;
        ASSERT_TRUE(parse_iso8601(format_iso8601(x), y));
        EXPECT_EQ(x, y);
    }
}
