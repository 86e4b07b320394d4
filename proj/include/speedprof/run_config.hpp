#pragma once

// Run configuration shared by the command-line subcommands: one JSON document,
// dotted `key=value` overrides, and loaders for the inputs it references.

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "speedprof/drive_cycle.hpp"
#include "speedprof/error.hpp"
#include "speedprof/experiments.hpp"
#include "speedprof/features.hpp"
#include "speedprof/route.hpp"
#include "speedprof/synth.hpp"
#include "speedprof/text_io.hpp"
#include "speedprof/tmc.hpp"

namespace speedprof {

struct InputPaths {
    std::optional<std::filesystem::path> route;       ///< shape-point CSV
    std::optional<std::filesystem::path> sections;    ///< TMC section table
    std::optional<std::filesystem::path> tmc_archive; ///< directory of history files
    std::optional<std::filesystem::path> history;     ///< single extracted history file (wins over the archive)
    std::optional<std::filesystem::path> trips;       ///< directory of trip logs
};

struct SynthConfig {
    synth::WorldParams world;
    synth::DriverPersona persona;
    synth::TripParams trips;
    int trip_count = 21;
    std::uint64_t trip_seed = 99;
};

struct RunConfig {
    std::filesystem::path base_dir = "."; ///< relative paths resolve against this
    InputPaths paths;
    double spacing_m = kDefaultSpacingM;
    double corridor_m = kDefaultCorridorM;
    FeatureConfig features;
    std::vector<std::size_t> encoder_sizes{24, 12};
    std::size_t head_hidden = 8;
    experiments::TrainingOptions training;
    experiments::SweepGrid grid;
    experiments::SplitStrategy split;
    bool closed_loop = true;
    std::uint64_t master_seed = 7;
    SynthConfig synth;

    std::filesystem::path resolve(const std::filesystem::path& p) const {
        return p.is_absolute() ? p : base_dir / p;
    }
    /// Resolved path of a required input; throws when unset or absent.
    std::filesystem::path require(const std::optional<std::filesystem::path>& p, const char* key) const {
        if (!p) throw ConfigError(fmt::format("config key paths.{} is required for this command", key));
        auto r = resolve(*p);
        if (!std::filesystem::exists(r)) throw MissingInput(r.string());
        return r;
    }
};

namespace detail {

inline nlohmann::json path_json(const std::optional<std::filesystem::path>& p) {
    return p ? nlohmann::json(p->generic_string()) : nlohmann::json(nullptr);
}

inline std::optional<std::filesystem::path> path_from(const nlohmann::json& j) {
    if (j.is_null()) return std::nullopt;
    if (!j.is_string()) throw ConfigError("path values must be strings or null");
    return std::filesystem::path(j.get<std::string>());
}

inline const char* split_name(experiments::SplitKind k) {
    return k == experiments::SplitKind::leave_one_out ? "leave_one_out" : "random_fraction";
}

inline experiments::SplitKind split_from(const std::string& s) {
    if (s == "leave_one_out") return experiments::SplitKind::leave_one_out;
    if (s == "random_fraction") return experiments::SplitKind::random_fraction;
    throw ConfigError("split.kind must be leave_one_out or random_fraction");
}

/// Rejects keys of `user` that do not exist in `defaults`. Arrays and
/// null-valued defaults are leaves.
inline void check_known_keys(const nlohmann::json& user, const nlohmann::json& defaults, const std::string& prefix) {
    if (!user.is_object()) return;
    if (!defaults.is_object()) throw ConfigError(fmt::format("config key {} is not an object", prefix));
    for (const auto& [k, v] : user.items()) {
        const std::string key = prefix.empty() ? k : prefix + "." + k;
        if (!defaults.contains(k)) throw ConfigError(fmt::format("unknown config key {}", key));
        if (v.is_object()) check_known_keys(v, defaults.at(k), key);
    }
}

} // namespace detail

inline nlohmann::json to_json(const RunConfig& c) {
    return {
        {"paths",
         {{"route", detail::path_json(c.paths.route)},
          {"sections", detail::path_json(c.paths.sections)},
          {"tmc_archive", detail::path_json(c.paths.tmc_archive)},
          {"history", detail::path_json(c.paths.history)},
          {"trips", detail::path_json(c.paths.trips)}}},
        {"spacing_m", c.spacing_m},
        {"corridor_m", c.corridor_m},
        {"features", c.features},
        {"model", {{"encoder_sizes", c.encoder_sizes}, {"head_hidden", c.head_hidden}}},
        {"training",
         {{"pretrain", c.training.pretrain},
          {"supervised", c.training.supervised},
          {"fine_tune_encoder", c.training.fine_tune_encoder}}},
        {"sweep",
         {{"grid", c.grid},
          {"split", {{"kind", detail::split_name(c.split.kind)}, {"test_fraction", c.split.test_fraction}}},
          {"closed_loop", c.closed_loop}}},
        {"master_seed", c.master_seed},
        {"synth",
         {{"world", c.synth.world},
          {"persona", c.synth.persona},
          {"trips", c.synth.trips},
          {"trip_count", c.synth.trip_count},
          {"trip_seed", c.synth.trip_seed}}},
    };
}

/// Sets `dotted.key` in `doc`. The value is read as JSON when it parses,
/// otherwise as a plain string.
inline void apply_override(nlohmann::json& doc, std::string_view assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string_view::npos || eq == 0)
        throw ConfigError(fmt::format("override '{}' is not key=value", assignment));
    const std::string key(text::trim(assignment.substr(0, eq)));
    const std::string raw(text::trim(assignment.substr(eq + 1)));
    nlohmann::json value = nlohmann::json::parse(raw, nullptr, false);
    if (value.is_discarded()) value = raw;
    nlohmann::json* node = &doc;
    std::size_t start = 0;
    while (true) {
        const auto dot = key.find('.', start);
        const std::string part = key.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
        if (part.empty()) throw ConfigError(fmt::format("bad override key '{}'", key));
        if (!node->is_object()) {
            if (!node->is_null()) throw ConfigError(fmt::format("override key '{}' descends into a non-object", key));
            *node = nlohmann::json::object();
        }
        node = &(*node)[part];
        if (dot == std::string::npos) break;
        start = dot + 1;
    }
    *node = std::move(value);
}

inline RunConfig run_config_from_json(const nlohmann::json& user, const std::filesystem::path& base_dir = ".") {
    if (!user.is_object()) throw ConfigError("config document must be a JSON object");
    const RunConfig defaults;
    nlohmann::json doc = to_json(defaults);
    detail::check_known_keys(user, doc, "");
    doc.merge_patch(user);

    RunConfig c;
    c.base_dir = base_dir;
    try {
        const auto& p = doc.at("paths");
        c.paths.route = detail::path_from(p.value("route", nlohmann::json()));
        c.paths.sections = detail::path_from(p.value("sections", nlohmann::json()));
        c.paths.tmc_archive = detail::path_from(p.value("tmc_archive", nlohmann::json()));
        c.paths.history = detail::path_from(p.value("history", nlohmann::json()));
        c.paths.trips = detail::path_from(p.value("trips", nlohmann::json()));
        c.spacing_m = doc.at("spacing_m").get<double>();
        c.corridor_m = doc.at("corridor_m").get<double>();
        if (!(c.spacing_m > 0.0)) throw ConfigError("spacing_m must be > 0");
        if (!(c.corridor_m > 0.0)) throw ConfigError("corridor_m must be > 0");
        c.features = doc.at("features").get<FeatureConfig>();
        c.encoder_sizes = doc.at("model").at("encoder_sizes").get<std::vector<std::size_t>>();
        c.head_hidden = doc.at("model").at("head_hidden").get<std::size_t>();
        if (c.encoder_sizes.empty() || c.head_hidden == 0 ||
            std::find(c.encoder_sizes.begin(), c.encoder_sizes.end(), 0u) != c.encoder_sizes.end())
            throw ConfigError("model sizes must be non-empty and positive", "nn.invalid_architecture");
        const auto& t = doc.at("training");
        c.training.pretrain = t.at("pretrain").get<nn::TrainHyperparams>();
        c.training.supervised = t.at("supervised").get<nn::TrainHyperparams>();
        c.training.fine_tune_encoder = t.at("fine_tune_encoder").get<bool>();
        const auto& s = doc.at("sweep");
        c.grid = s.at("grid").get<experiments::SweepGrid>();
        c.split.kind = detail::split_from(s.at("split").at("kind").get<std::string>());
        c.split.test_fraction = s.at("split").at("test_fraction").get<double>();
        c.closed_loop = s.at("closed_loop").get<bool>();
        c.master_seed = doc.at("master_seed").get<std::uint64_t>();
        const auto& y = doc.at("synth");
        c.synth.world = y.at("world").get<synth::WorldParams>();
        c.synth.persona = y.at("persona").get<synth::DriverPersona>();
        c.synth.trips = y.at("trips").get<synth::TripParams>();
        c.synth.trip_count = y.at("trip_count").get<int>();
        c.synth.trip_seed = y.at("trip_seed").get<std::uint64_t>();
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(fmt::format("config: {}", e.what()));
    } catch (const InvalidParams& e) {
        throw ConfigError(e.what(), e.error_class());
    }
    return c;
}

/// Reads a config file (or starts from defaults when `path` is empty) and
/// applies the overrides in order.
inline RunConfig load_run_config(const std::filesystem::path& path, std::span<const std::string> overrides = {}) {
    nlohmann::json doc = nlohmann::json::object();
    std::filesystem::path base = ".";
    if (!path.empty()) {
        const std::string content = text::read_file(path);
        doc = nlohmann::json::parse(content, nullptr, false);
        if (doc.is_discarded()) throw ConfigError(fmt::format("{} is not valid JSON", path.string()), "config.parse_error");
        base = path.parent_path().empty() ? std::filesystem::path(".") : path.parent_path();
    }
    for (const auto& o : overrides) apply_override(doc, o);
    return run_config_from_json(doc, base);
}

// ---------------------------------------------------------------------------
// Input loaders

/// Route from paths.route, with TMC codes mapped from paths.sections when set.
inline Route load_route(const RunConfig& c) {
    const auto pts = read_shape_points(c.require(c.paths.route, "route"));
    auto route = build_route(pts, c.spacing_m);
    if (c.paths.sections) {
        const auto sections = read_section_table(c.require(c.paths.sections, "sections"));
        const auto mapping = map_route_to_tmc(route, sections, c.corridor_m);
        route = route.with_tmc_codes(mapping.point_codes);
    }
    return route;
}

inline std::vector<std::string> route_codes(const Route& route) {
    std::vector<std::string> codes;
    for (const auto& sp : route.standard_points())
        if (std::find(codes.begin(), codes.end(), sp.tmc_code) == codes.end()) codes.push_back(sp.tmc_code);
    return codes;
}

/// History for the route's codes from paths.history, else from paths.tmc_archive.
inline ExtractResult load_history(const RunConfig& c, const Route& route) {
    const auto codes = route_codes(route);
    if (c.paths.history) {
        const auto p = c.require(c.paths.history, "history");
        std::vector<TmcObservation> recs;
        parse_history_file(text::read_file(p), p.string(), codes, recs);
        ExtractResult r{TmcHistory::from_records(std::move(recs)), {}};
        for (const auto& code : codes)
            if (!r.history.contains(code)) r.missing_codes.push_back(code);
        return r;
    }
    if (c.paths.tmc_archive) {
        const auto files = list_archive(c.require(c.paths.tmc_archive, "tmc_archive"));
        return extract_tmc_history(codes, files);
    }
    throw ConfigError("config needs paths.history or paths.tmc_archive");
}

struct LoadedTrips {
    std::vector<VelocityProfile> profiles;
    std::vector<std::string> rejected; ///< "trip_id: reason"
};

/// Profiles of every `*.csv` trip log under paths.trips in file-name order.
/// Trips failing the route match are skipped and listed in `rejected`.
inline LoadedTrips load_trip_profiles(const RunConfig& c, const Route& route) {
    const auto dir = c.require(c.paths.trips, "trips");
    if (!std::filesystem::is_directory(dir)) throw ConfigError("paths.trips must be a directory");
    std::vector<std::filesystem::path> files;
    for (const auto& e : std::filesystem::directory_iterator(dir))
        if (e.is_regular_file() && e.path().extension() == ".csv") files.push_back(e.path());
    std::sort(files.begin(), files.end());
    LoadedTrips out;
    for (const auto& f : files) {
        const auto log = read_trip_log(f);
        try {
            out.profiles.push_back(extract_velocity_profile(log, route));
        } catch (const UnmatchedTrip& e) {
            out.rejected.push_back(e.what());
        }
    }
    return out;
}

} // namespace speedprof
