#pragma once

// Model input assembly. A feature vector is three blocks in fixed order:
//   geometric  5*(n+1)         (D_SP, curvature, altitude, lanes, speed limit) for SP_i..SP_{i+n}
//   TMC        (2k+1)*(m+1)    section speed around SP_i, at trip start and m earlier samples
//   history    r               driver speed at SP_{i-1}..SP_{i-r}
// The driver speed at SP_i itself is the target and never part of the input.

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "speedprof/error.hpp"
#include "speedprof/route.hpp"
#include "speedprof/text_io.hpp"
#include "speedprof/time.hpp"
#include "speedprof/tmc.hpp"

namespace speedprof {

inline constexpr int kMaxLookahead = 5;
inline constexpr std::size_t kGeometricFields = 5;

struct FeatureConfig {
    int lookahead_n = 2;
    int tmc_k = 2;
    int tmc_m = 2;
    int history_r = 3;
    double tmc_sample_period_s = kDefaultTmcPeriodS;

    FeatureConfig() = default;
    FeatureConfig(int n, int k, int m, int r, double period_s = kDefaultTmcPeriodS)
        : lookahead_n(n), tmc_k(k), tmc_m(m), history_r(r), tmc_sample_period_s(period_s) {
        validate();
    }

    void validate() const {
        if (lookahead_n < 0 || lookahead_n > kMaxLookahead)
            throw ConfigError("lookahead_n must be in [0,5]", "features.invalid_config");
        if (tmc_k < 1) throw ConfigError("tmc_k must be >= 1", "features.invalid_config");
        if (tmc_m < 0) throw ConfigError("tmc_m must be >= 0", "features.invalid_config");
        if (history_r < 1) throw ConfigError("history_r must be >= 1", "features.invalid_config");
        if (!(tmc_sample_period_s > 0.0)) throw ConfigError("tmc_sample_period_s must be > 0", "features.invalid_config");
    }

    friend bool operator==(const FeatureConfig&, const FeatureConfig&) = default;
};

inline void to_json(nlohmann::json& j, const FeatureConfig& c) {
    j = {{"lookahead_n", c.lookahead_n},
         {"tmc_k", c.tmc_k},
         {"tmc_m", c.tmc_m},
         {"history_r", c.history_r},
         {"tmc_sample_period_s", c.tmc_sample_period_s}};
}

inline void from_json(const nlohmann::json& j, FeatureConfig& c) {
    FeatureConfig d;
    c = FeatureConfig(j.value("lookahead_n", d.lookahead_n), j.value("tmc_k", d.tmc_k), j.value("tmc_m", d.tmc_m),
                      j.value("history_r", d.history_r), j.value("tmc_sample_period_s", d.tmc_sample_period_s));
}

inline std::size_t input_dimension(const FeatureConfig& c) {
    c.validate();
    const auto n = static_cast<std::size_t>(c.lookahead_n);
    const auto k = static_cast<std::size_t>(c.tmc_k);
    const auto m = static_cast<std::size_t>(c.tmc_m);
    return kGeometricFields * (n + 1) + (2 * k + 1) * (m + 1) + static_cast<std::size_t>(c.history_r);
}

struct FeatureVector {
    std::vector<double> values;
    double target = std::numeric_limits<double>::quiet_NaN();
};

/// Speed used for driver-history slots before the first standard point when
/// no earlier driver speed exists: the TMC speed at SP_0 at trip start.
inline double trip_start_speed(const Route& route, const TmcHistory& history, Timestamp trip_start) {
    return sample_tmc(history, route[0].tmc_code, trip_start);
}

/// Input vector for standard point `sp_index`. `profile_prefix` holds the
/// driver speeds for indices < sp_index (extra trailing entries are ignored).
/// Out-of-range neighbours replicate the nearest valid standard point.
inline FeatureVector assemble_input(const Route& route, const TmcHistory& history,
                                    std::span<const double> profile_prefix, Timestamp trip_start,
                                    std::size_t sp_index, const FeatureConfig& config) {
    config.validate();
    if (sp_index >= route.size()) throw InvalidIndex(sp_index);
    const auto last = static_cast<std::ptrdiff_t>(route.last_index());
    const auto clamp_idx = [last](std::ptrdiff_t i) { return static_cast<std::size_t>(std::clamp<std::ptrdiff_t>(i, 0, last)); };
    const auto sp = static_cast<std::ptrdiff_t>(sp_index);

    FeatureVector fv;
    fv.values.reserve(input_dimension(config));

    for (int j = 0; j <= config.lookahead_n; ++j) {
        const auto& p = route[clamp_idx(sp + j)];
        fv.values.push_back(p.dist_to_upstream_shape_m);
        fv.values.push_back(p.curvature_per_m);
        fv.values.push_back(p.altitude_m);
        fv.values.push_back(static_cast<double>(p.lanes));
        fv.values.push_back(p.speed_limit_mps);
    }

    for (int j = 0; j <= config.tmc_m; ++j) {
        const auto t = trip_start - static_cast<Timestamp>(std::llround(j * config.tmc_sample_period_s));
        for (int off = -config.tmc_k; off <= config.tmc_k; ++off) {
            const auto idx = clamp_idx(sp + off);
            const auto& code = route[idx].tmc_code;
            if (!history.contains(code)) throw NoData(code, idx);
            fv.values.push_back(sample_tmc(history, code, t));
        }
    }

    if (profile_prefix.size() < sp_index)
        throw ConfigError("profile prefix shorter than standard point index", "features.short_prefix");
    const double pad = sp_index > 0 ? profile_prefix[0] : trip_start_speed(route, history, trip_start);
    for (int q = 1; q <= config.history_r; ++q) {
        const auto idx = sp - q;
        fv.values.push_back(idx >= 0 ? profile_prefix[static_cast<std::size_t>(idx)] : pad);
    }
    return fv;
}

/// One vector per standard point of a recorded trip, target = actual speed.
inline std::vector<FeatureVector> assemble_trip(const Route& route, const TmcHistory& history,
                                                std::span<const double> profile, Timestamp trip_start,
                                                const FeatureConfig& config) {
    if (profile.size() != route.size())
        throw ConfigError("profile length does not match route", "features.profile_length");
    std::vector<FeatureVector> out;
    out.reserve(profile.size());
    for (std::size_t i = 0; i < profile.size(); ++i) {
        auto fv = assemble_input(route, history, profile.first(i), trip_start, i, config);
        fv.target = profile[i];
        out.push_back(std::move(fv));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Normalization

/// Per-dimension affine map of the training range onto [0.1, 0.9]. Constant
/// dimensions map to 0.5; unseen values are clamped to [0, 1].
class Normalizer {
public:
    static constexpr double kLow = 0.1;
    static constexpr double kHigh = 0.9;

    Normalizer() = default;
    Normalizer(std::vector<double> mins, std::vector<double> maxs) : min_(std::move(mins)), max_(std::move(maxs)) {
        if (min_.size() != max_.size()) throw ConfigError("normalizer min/max size mismatch", "features.bad_normalizer");
        for (std::size_t i = 0; i < min_.size(); ++i)
            if (!(max_[i] >= min_[i])) throw ConfigError("normalizer max < min", "features.bad_normalizer");
    }

    std::size_t dimension() const noexcept { return min_.size(); }
    const std::vector<double>& mins() const noexcept { return min_; }
    const std::vector<double>& maxs() const noexcept { return max_; }

    double apply(std::size_t d, double v) const {
        const double lo = min_[d];
        const double hi = max_[d];
        if (!(hi > lo)) return 0.5;
        return std::clamp(kLow + (kHigh - kLow) * (v - lo) / (hi - lo), 0.0, 1.0);
    }

    double invert(std::size_t d, double y) const {
        const double lo = min_[d];
        const double hi = max_[d];
        if (!(hi > lo)) return lo;
        return lo + (y - kLow) * (hi - lo) / (kHigh - kLow);
    }

    std::vector<double> apply(std::span<const double> v) const {
        if (v.size() != dimension()) throw DimensionMismatch(dimension(), v.size());
        std::vector<double> out(v.size());
        for (std::size_t i = 0; i < v.size(); ++i) out[i] = apply(i, v[i]);
        return out;
    }

    std::vector<double> invert(std::span<const double> v) const {
        if (v.size() != dimension()) throw DimensionMismatch(dimension(), v.size());
        std::vector<double> out(v.size());
        for (std::size_t i = 0; i < v.size(); ++i) out[i] = invert(i, v[i]);
        return out;
    }

    friend bool operator==(const Normalizer&, const Normalizer&) = default;

private:
    std::vector<double> min_;
    std::vector<double> max_;
};

template <class Range>
Normalizer fit_normalizer(const Range& training_vectors) {
    auto it = std::begin(training_vectors);
    if (it == std::end(training_vectors)) throw EmptyTrainingSet();
    std::vector<double> lo(it->begin(), it->end());
    std::vector<double> hi = lo;
    for (; it != std::end(training_vectors); ++it) {
        if (it->size() != lo.size()) throw DimensionMismatch(lo.size(), it->size());
        std::size_t d = 0;
        for (double v : *it) {
            lo[d] = std::min(lo[d], v);
            hi[d] = std::max(hi[d], v);
            ++d;
        }
    }
    return Normalizer(std::move(lo), std::move(hi));
}

inline std::vector<double> apply_normalizer(const Normalizer& norm, std::span<const double> v) { return norm.apply(v); }

inline void to_json(nlohmann::json& j, const Normalizer& n) { j = {{"min", n.mins()}, {"max", n.maxs()}}; }
inline void from_json(const nlohmann::json& j, Normalizer& n) {
    n = Normalizer(j.at("min").get<std::vector<double>>(), j.at("max").get<std::vector<double>>());
}

// ---------------------------------------------------------------------------
// Dataset: `<file>.csv` with rows `trip_id,sp_index,target_mps,v_0..v_{d-1}`
// (raw, unnormalized values) plus a `<file>.csv.json` sidecar holding the
// feature config, normalizers and trip start times.

struct DatasetRow {
    std::string trip_id;
    std::size_t sp_index = 0;
    double target_mps = 0.0;
    std::vector<double> values;
};

struct TripRef {
    std::string trip_id;
    Timestamp start = 0;
    friend bool operator==(const TripRef&, const TripRef&) = default;
};

struct Dataset {
    FeatureConfig config;
    std::vector<TripRef> trips;
    std::vector<DatasetRow> rows;
    Normalizer input_norm;
    Normalizer target_norm;

    std::size_t dimension() const { return input_dimension(config); }
};

inline std::filesystem::path sidecar_path(const std::filesystem::path& csv) {
    return std::filesystem::path(csv.string() + ".json");
}

inline std::string format_dataset_csv(const Dataset& ds) {
    const std::size_t d = ds.dimension();
    std::string out = "trip_id,sp_index,target_mps";
    for (std::size_t i = 0; i < d; ++i) out += fmt::format(",v_{}", i);
    out += '\n';
    for (const auto& r : ds.rows) {
        if (r.values.size() != d) throw DimensionMismatch(d, r.values.size());
        out += fmt::format("{},{},{}", r.trip_id, r.sp_index, r.target_mps);
        for (double v : r.values) {
            out += ',';
            out += text::num(v);
        }
        out += '\n';
    }
    return out;
}

inline nlohmann::json dataset_sidecar(const Dataset& ds) {
    nlohmann::json trips = nlohmann::json::array();
    for (const auto& t : ds.trips) trips.push_back({{"trip_id", t.trip_id}, {"start_utc_s", t.start}});
    return {{"feature_config", ds.config},
            {"dimension", ds.dimension()},
            {"input_normalizer", ds.input_norm},
            {"target_normalizer", ds.target_norm},
            {"trips", trips}};
}

inline void write_dataset(const Dataset& ds, const std::filesystem::path& csv) {
    text::write_file(csv, format_dataset_csv(ds));
    text::write_file(sidecar_path(csv), dataset_sidecar(ds).dump(2) + "\n");
}

inline Dataset read_dataset(const std::filesystem::path& csv) {
    const auto side_path = sidecar_path(csv);
    Dataset ds;
    {
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(text::read_file(side_path));
            ds.config = j.at("feature_config").get<FeatureConfig>();
            ds.input_norm = j.at("input_normalizer").get<Normalizer>();
            ds.target_norm = j.at("target_normalizer").get<Normalizer>();
            for (const auto& t : j.at("trips")) ds.trips.push_back({t.at("trip_id"), t.at("start_utc_s")});
        } catch (const nlohmann::json::exception& e) {
            throw ParseError(side_path.string(), 0, "", e.what());
        }
    }
    const std::size_t d = ds.dimension();
    const std::string content = text::read_file(csv);
    text::LineReader reader(content);
    std::string_view line;
    if (!reader.next_nonblank(line)) throw ParseError(csv.string(), 1, "", "empty dataset");
    {
        const auto h = text::split(line, ',');
        if (h.size() != 3 + d || h[0] != "trip_id" || h[1] != "sp_index" || h[2] != "target_mps")
            throw ParseError(csv.string(), reader.line_no(), std::string(line), "dataset header does not match sidecar");
    }
    std::vector<std::string_view> f;
    while (reader.next_nonblank(line)) {
        text::split(line, ',', f);
        DatasetRow r;
        std::int64_t idx = 0;
        if (f.size() != 3 + d || !text::parse_int(f[1], idx) || idx < 0 || !text::parse_double(f[2], r.target_mps))
            throw ParseError(csv.string(), reader.line_no(), std::string(line), "malformed dataset row");
        r.trip_id = std::string(f[0]);
        r.sp_index = static_cast<std::size_t>(idx);
        r.values.resize(d);
        for (std::size_t i = 0; i < d; ++i)
            if (!text::parse_double(f[3 + i], r.values[i]))
                throw ParseError(csv.string(), reader.line_no(), std::string(line), "bad value");
        ds.rows.push_back(std::move(r));
    }
    return ds;
}

} // namespace speedprof
