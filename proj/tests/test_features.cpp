#include <gtest/gtest.h>

#include "support.hpp"

using namespace speedprof;
using namespace fixture;

namespace {

struct Fixture {
    Route route;
    TmcHistory history;
    std::vector<std::string> codes{"C0", "C1", "C2"};
    Timestamp start = 100000;

    static Route make_route(const std::vector<std::string>& codes) {
        std::vector<ShapePoint> pts;
        const double xs[] = {0, 230, 480, 700, 1000};
        for (int i = 0; i < 5; ++i) pts.push_back(shape({equator_deg(i % 2 ? 40.0 : 0.0), equator_deg(xs[i])}, 20.0 + i, 1 + i, 3.0 * i));
        return coded_route(build_route(pts, 100.0), codes);
    }

    Fixture() : route(make_route({"C0", "C1", "C2"})) {
        // code c at time t: 10 + c + t/6000, unique per (code, sample time)
        history = make_history(codes, 0, 60, 4000,
                               [](std::size_t c, Timestamp t) { return 10.0 + static_cast<double>(c) + static_cast<double>(t) / 6000.0; });
    }
    double tmc(std::size_t idx, Timestamp t) const {
        const auto c = static_cast<std::size_t>(route[idx].tmc_code[1] - '0');
        const Timestamp held = (t / 60) * 60;
        return 10.0 + static_cast<double>(c) + static_cast<double>(held) / 6000.0;
    }
};

std::size_t clampi(long i, std::size_t n) { return static_cast<std::size_t>(std::clamp<long>(i, 0, static_cast<long>(n) - 1)); }

} // namespace

TEST(InputDimension, Examples) {
    EXPECT_EQ(input_dimension(FeatureConfig(0, 1, 0, 1)), 9u);
    EXPECT_EQ(input_dimension(FeatureConfig(0, 1, 1, 2)), 13u);
    EXPECT_EQ(input_dimension(FeatureConfig(5, 5, 10, 10)), 161u);
    EXPECT_EQ(input_dimension(FeatureConfig(2, 2, 2, 3)), 33u);
}

TEST(InputDimension, InvalidConfigs) {
    EXPECT_THROW(FeatureConfig(6, 1, 0, 1), ConfigError);
    EXPECT_THROW(FeatureConfig(0, 0, 0, 1), ConfigError);
    EXPECT_THROW(FeatureConfig(0, 1, -1, 1), ConfigError);
    EXPECT_THROW(FeatureConfig(0, 1, 0, 0), ConfigError);
}

TEST(AssembleInput, LayoutMatchesIndependentOracle) {
    const Fixture fx;
    const auto& r = fx.route;
    std::vector<double> profile;
    for (std::size_t i = 0; i < r.size(); ++i) profile.push_back(5.0 + 0.25 * static_cast<double>(i));
    std::mt19937_64 rng(3);
    for (int trial = 0; trial < 200; ++trial) {
        const FeatureConfig c(static_cast<int>(rng() % 6), 1 + static_cast<int>(rng() % 4), static_cast<int>(rng() % 5),
                              1 + static_cast<int>(rng() % 6));
        const std::size_t sp = rng() % r.size();
        const auto fv = assemble_input(r, fx.history, profile, fx.start, sp, c);
        ASSERT_EQ(fv.values.size(), input_dimension(c));
        std::vector<double> want;
        for (int j = 0; j <= c.lookahead_n; ++j) {
            const auto& p = r[clampi(static_cast<long>(sp) + j, r.size())];
            want.insert(want.end(), {p.dist_to_upstream_shape_m, p.curvature_per_m, p.altitude_m,
                                     static_cast<double>(p.lanes), p.speed_limit_mps});
        }
        for (int j = 0; j <= c.tmc_m; ++j)
            for (int o = -c.tmc_k; o <= c.tmc_k; ++o)
                want.push_back(fx.tmc(clampi(static_cast<long>(sp) + o, r.size()), fx.start - 60 * j));
        for (int q = 1; q <= c.history_r; ++q) {
            const long idx = static_cast<long>(sp) - q;
            want.push_back(idx >= 0 ? profile[static_cast<std::size_t>(idx)]
                                    : (sp > 0 ? profile[0] : fx.tmc(0, fx.start)));
        }
        ASSERT_EQ(fv.values.size(), want.size());
        for (std::size_t d = 0; d < want.size(); ++d) EXPECT_NEAR(fv.values[d], want[d], 1e-12) << "trial " << trial << " d " << d;
    }
}

TEST(AssembleInput, NoTargetLeak) {
    const Fixture fx;
    const FeatureConfig c(2, 2, 2, 3);
    std::vector<double> a(fx.route.size(), 7.0), b = a;
    const std::size_t sp = 5;
    for (std::size_t i = sp; i < b.size(); ++i) b[i] = 99.0 + static_cast<double>(i);
    EXPECT_EQ(assemble_input(fx.route, fx.history, a, fx.start, sp, c).values,
              assemble_input(fx.route, fx.history, b, fx.start, sp, c).values);
    // a prefix of exactly sp entries suffices
    EXPECT_EQ(assemble_input(fx.route, fx.history, std::span<const double>(a).first(sp), fx.start, sp, c).values,
              assemble_input(fx.route, fx.history, a, fx.start, sp, c).values);
    EXPECT_THROW(assemble_input(fx.route, fx.history, std::span<const double>(a).first(2), fx.start, sp, c), ConfigError);
}

TEST(AssembleInput, FirstPointPadsWithTripStartTmc) {
    const Fixture fx;
    const FeatureConfig c(0, 1, 0, 3);
    const auto fv = assemble_input(fx.route, fx.history, {}, fx.start, 0, c);
    const double pad = fx.tmc(0, fx.start);
    for (int q = 0; q < 3; ++q) EXPECT_EQ(fv.values[fv.values.size() - 1 - static_cast<std::size_t>(q)], pad);
    // sp=1: one real entry then padding with the first speed
    const std::vector<double> prof{12.5};
    const auto fv1 = assemble_input(fx.route, fx.history, prof, fx.start, 1, c);
    const auto tail = std::vector<double>(fv1.values.end() - 3, fv1.values.end());
    EXPECT_EQ(tail, (std::vector<double>{12.5, 12.5, 12.5}));
}

TEST(AssembleInput, ConstantWorldGivesConstantTmcBlock) {
    const auto r = coded_route(straight_route(1500.0), {"A", "B"});
    const auto h = constant_history({"A", "B"}, 17.5, 0, 500);
    const FeatureConfig c(1, 3, 4, 2);
    std::vector<double> prof(r.size(), 1.0);
    for (std::size_t sp = 0; sp < r.size(); ++sp) {
        const auto fv = assemble_input(r, h, prof, 20000, sp, c);
        for (std::size_t d = 10; d < 10 + 7 * 5; ++d) EXPECT_EQ(fv.values[d], 17.5);
    }
}

TEST(AssembleInput, EndOfRouteReplicatesLastPoint) {
    const Fixture fx;
    const FeatureConfig c(2, 1, 0, 1);
    const std::size_t last = fx.route.last_index();
    std::vector<double> prof(fx.route.size(), 3.0);
    const auto fv = assemble_input(fx.route, fx.history, prof, fx.start, last, c);
    for (int j = 1; j <= 2; ++j)
        for (std::size_t f = 0; f < 5; ++f) EXPECT_EQ(fv.values[5 * static_cast<std::size_t>(j) + f], fv.values[f]);
}

TEST(AssembleInput, BadIndexAndMissingCode) {
    const Fixture fx;
    const FeatureConfig c(0, 1, 0, 1);
    EXPECT_THROW(assemble_input(fx.route, fx.history, {}, fx.start, fx.route.size(), c), InvalidIndex);
    const auto h = constant_history({"C0", "C1"}, 10.0);
    std::vector<double> prof(fx.route.size(), 1.0);
    EXPECT_THROW(assemble_input(fx.route, h, prof, fx.start, fx.route.last_index(), c), NoData);
}

TEST(AssembleTrip, OneRowPerPointWithTargets) {
    const Fixture fx;
    std::vector<double> prof;
    for (std::size_t i = 0; i < fx.route.size(); ++i) prof.push_back(static_cast<double>(i));
    const auto rows = assemble_trip(fx.route, fx.history, prof, fx.start, FeatureConfig{});
    ASSERT_EQ(rows.size(), fx.route.size());
    for (std::size_t i = 0; i < rows.size(); ++i) EXPECT_EQ(rows[i].target, prof[i]);
    prof.pop_back();
    EXPECT_THROW(assemble_trip(fx.route, fx.history, prof, fx.start, FeatureConfig{}), ConfigError);
}

TEST(Normalizer, MapsRangeOntoInnerBand) {
    const std::vector<std::vector<double>> train{{0.0, 5.0, 10.0}, {10.0, 5.0, 20.0}};
    const auto n = fit_normalizer(train);
    EXPECT_NEAR(n.apply(0, 5.0), 0.5, 1e-15);
    EXPECT_NEAR(n.apply(0, 0.0), 0.1, 1e-15);
    EXPECT_NEAR(n.apply(0, 10.0), 0.9, 1e-15);
    EXPECT_EQ(n.apply(1, 5.0), 0.5);
    EXPECT_EQ(n.apply(1, 123.0), 0.5);
    EXPECT_EQ(n.apply(0, 1000.0), 1.0);
    EXPECT_EQ(n.apply(0, -1000.0), 0.0);
    EXPECT_THROW(n.apply(std::vector<double>{1.0}), DimensionMismatch);
    EXPECT_THROW(fit_normalizer(std::vector<std::vector<double>>{}), EmptyTrainingSet);
}

TEST(Normalizer, InvertIsIdentityInsideRange) {
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> u(-50.0, 50.0);
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<std::vector<double>> train(10, std::vector<double>(4));
        for (auto& v : train)
            for (auto& x : v) x = u(rng);
        const auto n = fit_normalizer(train);
        for (const auto& v : train) {
            const auto back = n.invert(n.apply(v));
            for (std::size_t d = 0; d < v.size(); ++d) EXPECT_NEAR(back[d], v[d], 1e-9);
        }
    }
}

TEST(Dataset, BitExactRoundTrip) {
    TempDir dir("dataset");
    Dataset ds;
    ds.config = FeatureConfig(0, 1, 0, 1);
    ds.trips = {{"t1", 1709625600}, {"t2", 1709629200}};
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> u(-1e3, 1e3);
    std::vector<std::vector<double>> vals;
    for (int i = 0; i < 30; ++i) {
        DatasetRow r{i < 15 ? "t1" : "t2", static_cast<std::size_t>(i % 15), u(rng), {}};
        for (int d = 0; d < 9; ++d) r.values.push_back(u(rng) / 7.0);
        vals.push_back(r.values);
        ds.rows.push_back(std::move(r));
    }
    ds.input_norm = fit_normalizer(vals);
    ds.target_norm = Normalizer({1.0 / 3.0}, {29.0});
    write_dataset(ds, dir / "d.csv");
    const auto back = read_dataset(dir / "d.csv");
    EXPECT_EQ(back.config, ds.config);
    EXPECT_EQ(back.trips, ds.trips);
    EXPECT_TRUE(back.input_norm == ds.input_norm);
    EXPECT_TRUE(back.target_norm == ds.target_norm);
    ASSERT_EQ(back.rows.size(), ds.rows.size());
    for (std::size_t i = 0; i < ds.rows.size(); ++i) {
        EXPECT_EQ(back.rows[i].trip_id, ds.rows[i].trip_id);
        EXPECT_EQ(back.rows[i].sp_index, ds.rows[i].sp_index);
        EXPECT_EQ(back.rows[i].target_mps, ds.rows[i].target_mps);
        EXPECT_EQ(back.rows[i].values, ds.rows[i].values);
    }
}

TEST(Dataset, MissingSidecarAndBadHeader) {
    TempDir dir("dataset_bad");
    text::write_file(dir / "d.csv", "trip_id,sp_index,target_mps\n");
    EXPECT_THROW(read_dataset(dir / "d.csv"), MissingInput);
    Dataset ds;
    ds.config = FeatureConfig(0, 1, 0, 1);
    ds.input_norm = Normalizer(std::vector<double>(9, 0.0), std::vector<double>(9, 1.0));
    ds.target_norm = Normalizer({0.0}, {1.0});
    write_dataset(ds, dir / "e.csv");
    text::write_file(dir / "e.csv", "trip_id,sp_index,target_mps,v_0\n");
    EXPECT_THROW(read_dataset(dir / "e.csv"), ParseError);
}
