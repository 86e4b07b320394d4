// speedprof: command-line driver for the speed-profile pipeline.
//
// Logs go to stderr; stdout carries only the --json summary. Exit codes:
// 0 success, 1 runtime failure, 2 usage or configuration error.

#include <cstdio>
#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "speedprof/speedprof.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace speedprof;

namespace {

bool g_quiet = false;

template <typename... Args>
void note(fmt::format_string<Args...> f, Args&&... args) {
    if (g_quiet) return;
    fmt::print(stderr, "{}\n", fmt::format(f, std::forward<Args>(args)...));
}

/// Removes whatever a failed command left behind: paths that did not exist
/// before, new entries under pre-existing directories, and pre-existing files
/// that were rewritten.
class OutputGuard {
public:
    OutputGuard() = default;
    OutputGuard(const OutputGuard&) = delete;
    OutputGuard& operator=(const OutputGuard&) = delete;
    ~OutputGuard() {
        if (!committed_) rollback();
    }

    void file(const fs::path& p) {
        Entry e{p, fs::exists(p), false, {}, {}};
        if (e.existed) e.mtime = fs::last_write_time(p);
        entries_.push_back(std::move(e));
    }
    void dir(const fs::path& p) {
        Entry e{p, fs::exists(p), true, {}, {}};
        if (e.existed && fs::is_directory(p))
            for (const auto& x : fs::recursive_directory_iterator(p)) e.before.insert(x.path());
        entries_.push_back(std::move(e));
    }
    void commit() { committed_ = true; }

private:
    struct Entry {
        fs::path path;
        bool existed;
        bool is_dir;
        fs::file_time_type mtime;
        std::set<fs::path> before;
    };

    void rollback() noexcept {
        std::error_code ec;
        for (auto it = entries_.rbegin(); it != entries_.rend(); ++it) {
            const auto& e = *it;
            if (!e.existed) {
                fs::remove_all(e.path, ec);
            } else if (e.is_dir) {
                std::vector<fs::path> added;
                for (auto x = fs::recursive_directory_iterator(e.path, ec); !ec && x != fs::recursive_directory_iterator();
                     x.increment(ec))
                    if (!e.before.count(x->path())) added.push_back(x->path());
                for (const auto& a : added) fs::remove_all(a, ec);
            } else if (fs::exists(e.path, ec) && fs::last_write_time(e.path, ec) != e.mtime) {
                fs::remove(e.path, ec);
            }
        }
    }

    std::vector<Entry> entries_;
    bool committed_ = false;
};

Timestamp parse_trip_start(const std::string& s) {
    Timestamp t = 0;
    if (parse_iso8601(s, t)) return t;
    std::int64_t v = 0;
    if (text::parse_int(s, v)) return v;
    throw ConfigError(fmt::format("--trip-start '{}' is neither ISO 8601 UTC nor epoch seconds", s));
}

void warn_missing(const ExtractResult& r) {
    for (const auto& c : r.missing_codes) note("warning: no history records for TMC code {}", c);
}

// ---------------------------------------------------------------------------
// Subcommands

struct Common {
    std::string config;
    std::vector<std::string> sets;
    RunConfig load() const { return load_run_config(config, sets); }
};

void add_config_flags(CLI::App* sub, Common& c, bool required) {
    auto* opt = sub->add_option("--config", c.config, "run configuration JSON; relative paths resolve against its directory");
    if (required) opt->required();
    sub->add_option("--set", c.sets, "override a config value, e.g. --set features.history_r=4 (repeatable)")
        ->allow_extra_args(false)
        ->take_all();
}

json cmd_synth_world(const Common& c, const fs::path& out) {
    const RunConfig cfg = c.load();
    OutputGuard guard;
    guard.dir(out);
    note("generating world (seed {}) and {} trips", cfg.synth.world.seed, cfg.synth.trip_count);
    const auto world = synth::generate_world(cfg.synth.world);
    const auto trips = synth::generate_trips(world, cfg.synth.persona, cfg.synth.trip_count, cfg.synth.trip_seed,
                                             cfg.synth.trips);
    synth::write_world(world, out);
    synth::write_trips(trips, out);

    RunConfig gen = cfg;
    gen.paths = {"route.csv", "sections.csv", "tmc", std::nullopt, "trips"};
    gen.spacing_m = cfg.synth.world.spacing_m;
    const auto& f = cfg.features;
    gen.grid.lookahead = {f.lookahead_n};
    gen.grid.tmc_k = {f.tmc_k};
    gen.grid.tmc_m = {f.tmc_m};
    gen.grid.history_r = {f.history_r};
    gen.grid.tmc_sample_period_s = f.tmc_sample_period_s;
    gen.grid.encoder_options = {cfg.encoder_sizes};
    gen.grid.head_hidden_options = {cfg.head_hidden};
    text::write_file(out / "config.json", to_json(gen).dump(2) + "\n");
    guard.commit();
    note("wrote {} standard points, {} sections, {} trips to {}", world.route.size(), world.sections.size(),
         trips.size(), out.string());
    return {{"out", out.string()},
            {"standard_points", world.route.size()},
            {"sections", world.sections.size()},
            {"trips", trips.size()},
            {"config", (out / "config.json").string()}};
}

json cmd_extract_tmc(const fs::path& route_p, const fs::path& sections_p, const fs::path& archive, const fs::path& out,
                     double spacing, double corridor) {
    for (const auto& p : {route_p, sections_p, archive})
        if (!fs::exists(p)) throw MissingInput(p.string());
    auto route = build_route(read_shape_points(route_p), spacing);
    const auto sections = read_section_table(sections_p);
    const auto mapping = map_route_to_tmc(route, sections, corridor);
    route = route.with_tmc_codes(mapping.point_codes);
    const auto files = list_archive(archive);
    note("mapped route to {} TMC sections; scanning {} archive files", mapping.codes.size(), files.size());
    const auto res = extract_tmc_history(mapping.codes, files);
    warn_missing(res);
    OutputGuard guard;
    guard.file(out);
    text::write_file(out, format_history(res.history));
    guard.commit();
    return {{"out", out.string()},
            {"codes", mapping.codes},
            {"records", res.history.record_count()},
            {"missing_codes", res.missing_codes}};
}

json cmd_build_dataset(const Common& c, const fs::path& out) {
    const RunConfig cfg = c.load();
    const auto route = load_route(cfg);
    const auto hist = load_history(cfg, route);
    warn_missing(hist);
    const auto trips = load_trip_profiles(cfg, route);
    for (const auto& r : trips.rejected) note("warning: skipped {}", r);
    if (trips.profiles.empty()) throw EmptyTrainingSet();

    Dataset ds;
    ds.config = cfg.features;
    std::vector<std::vector<double>> targets;
    for (const auto& p : trips.profiles) {
        ds.trips.push_back({p.trip_id, p.start});
        const auto fvs = assemble_trip(route, hist.history, p.speeds_mps, p.start, cfg.features);
        for (std::size_t i = 0; i < fvs.size(); ++i) {
            ds.rows.push_back({p.trip_id, i, fvs[i].target, fvs[i].values});
            targets.push_back({fvs[i].target});
        }
    }
    std::vector<std::vector<double>> values;
    values.reserve(ds.rows.size());
    for (const auto& r : ds.rows) values.push_back(r.values);
    ds.input_norm = fit_normalizer(values);
    ds.target_norm = fit_normalizer(targets);

    OutputGuard guard;
    guard.file(out);
    guard.file(sidecar_path(out));
    write_dataset(ds, out);
    guard.commit();
    note("dataset: {} trips, {} rows, dimension {}", ds.trips.size(), ds.rows.size(), ds.dimension());
    return {{"out", out.string()},
            {"trips", ds.trips.size()},
            {"rejected_trips", trips.rejected},
            {"rows", ds.rows.size()},
            {"dimension", ds.dimension()}};
}

json cmd_train(const Common& c, const fs::path& dataset, const fs::path& model_out) {
    const RunConfig cfg = c.load();
    const auto ds = read_dataset(dataset);
    experiments::TrainingSet ts;
    for (const auto& r : ds.rows) {
        ts.inputs.push_back(r.values);
        ts.targets.push_back(r.target_mps);
    }
    note("training {} on {} rows", nn::describe({ds.dimension(), cfg.encoder_sizes, cfg.head_hidden}), ts.inputs.size());
    experiments::TrainingDiagnostics diag;
    const auto model =
        experiments::train_model(ts, ds.config, cfg.encoder_sizes, cfg.head_hidden, cfg.training, cfg.master_seed, &diag);
    OutputGuard guard;
    guard.file(model_out);
    nn::write_model(model, model_out);
    guard.commit();
    const double final_loss = diag.supervised_loss.empty() ? 0.0 : diag.supervised_loss.back();
    note("final training loss {:.6g} (normalized units)", final_loss);
    return {{"model", model_out.string()},
            {"architecture", nn::describe(model.net.architecture())},
            {"pretrain_initial_mse", diag.pretrain_initial_mse},
            {"pretrain_final_mse", diag.pretrain_final_mse},
            {"final_loss", final_loss}};
}

json cmd_predict(const Common& c, const fs::path& model_p, const std::string& start_s, const std::string& trip_id,
                 const fs::path& out) {
    const Timestamp start = parse_trip_start(start_s);
    const RunConfig cfg = c.load();
    if (!fs::exists(model_p)) throw MissingInput(model_p.string());
    const auto model = nn::read_model(model_p);
    const auto route = load_route(cfg);
    const auto hist = load_history(cfg, route);
    warn_missing(hist);
    const VelocityProfile p{trip_id, start, experiments::predict_profile(model, route, hist.history, start)};
    OutputGuard guard;
    guard.file(out);
    text::write_file(out, format_profiles(std::span<const VelocityProfile>(&p, 1)));
    guard.commit();
    note("predicted {} standard points for a trip starting {}", p.speeds_mps.size(), format_iso8601(start));
    return {{"out", out.string()}, {"trip_start", format_iso8601(start)}, {"points", p.speeds_mps.size()}};
}

json cmd_sweep(const Common& c, const fs::path& out, unsigned workers) {
    const RunConfig cfg = c.load();
    const auto route = load_route(cfg);
    const auto hist = load_history(cfg, route);
    warn_missing(hist);
    const auto trips = load_trip_profiles(cfg, route);
    for (const auto& r : trips.rejected) note("warning: skipped {}", r);

    experiments::SweepOptions opt;
    opt.training = cfg.training;
    opt.split = cfg.split;
    opt.master_seed = cfg.master_seed;
    opt.workers = workers;
    opt.closed_loop = cfg.closed_loop;
    note("sweeping {} configurations over {} trips", cfg.grid.size(), trips.profiles.size());
    const auto report = experiments::run_sweep(cfg.grid, trips.profiles, route, hist.history, opt);

    OutputGuard guard;
    guard.dir(out);
    experiments::write_sweep(report, out);
    guard.commit();
    json j{{"out", out.string()}, {"configs", report.configs.size()}, {"rows", report.row_count()}};
    if (const auto b = report.best()) {
        const auto& best = report.configs[*b];
        j["best"] = {{"config_id", best.config_id}, {"key", best.point.key()}, {"mean_rmse_mps", best.learned.mean_rmse}};
        note("best config {} ({}): mean RMSE {:.4f} m/s", best.config_id, best.point.key(), best.learned.mean_rmse);
        for (const auto& bl : best.baselines) note("  {}: {:.4f} m/s", bl.name, bl.mean_rmse);
    }
    return j;
}

/// Rows of a CSV file with a header, as maps from column name to text.
std::vector<std::map<std::string, std::string>> read_csv(const fs::path& p) {
    const std::string content = text::read_file(p);
    text::LineReader reader(content);
    std::string_view line;
    std::vector<std::map<std::string, std::string>> rows;
    if (!reader.next_nonblank(line)) return rows;
    std::vector<std::string> header;
    for (auto h : text::split(line, ',')) header.emplace_back(h);
    std::vector<std::string_view> f;
    while (reader.next_nonblank(line)) {
        text::split(line, ',', f);
        if (f.size() != header.size()) throw ParseError(p.string(), reader.line_no(), std::string(line), "column count");
        auto& row = rows.emplace_back();
        for (std::size_t i = 0; i < f.size(); ++i) row[header[i]] = std::string(f[i]);
    }
    return rows;
}

std::string format_table(const std::vector<std::map<std::string, std::string>>& rows,
                         const std::vector<std::string>& cols) {
    std::vector<std::size_t> width;
    for (const auto& c : cols) width.push_back(c.size());
    const auto cell = [](const std::map<std::string, std::string>& r, const std::string& c) {
        const auto it = r.find(c);
        if (it == r.end()) return std::string();
        double v = 0.0;
        if (c.find("rmse") != std::string::npos && text::parse_double(it->second, v)) return fmt::format("{:.4f}", v);
        return it->second;
    };
    for (const auto& r : rows)
        for (std::size_t i = 0; i < cols.size(); ++i) width[i] = std::max(width[i], cell(r, cols[i]).size());
    std::string out;
    const auto emit = [&](const auto& get) {
        for (std::size_t i = 0; i < cols.size(); ++i) out += fmt::format("{}{:<{}}", i ? "  " : "", get(i), width[i]);
        while (!out.empty() && out.back() == ' ') out.pop_back();
        out += '\n';
    };
    emit([&](std::size_t i) { return cols[i]; });
    emit([&](std::size_t i) { return std::string(width[i], '-'); });
    for (const auto& r : rows) emit([&](std::size_t i) { return cell(r, cols[i]); });
    return out;
}

json cmd_report(const fs::path& in, bool plots) {
    const auto summary_p = in / "summary.csv";
    if (!fs::exists(summary_p)) throw MissingInput(summary_p.string());
    const auto summary = read_csv(summary_p);
    OutputGuard guard;
    guard.file(in / "summary_table.txt");
    text::write_file(in / "summary_table.txt",
                     format_table(summary, {"rank", "config_id", "kind", "n", "k", "m", "r", "arch", "mean_rmse_mps",
                                            "pooled_rmse_mps", "trips", "status"}));
    std::size_t n_plots = 0;
    if (plots) {
        const auto pred_p = in / "predictions.csv";
        if (!fs::exists(pred_p)) throw MissingInput(pred_p.string());
        guard.dir(in / "plots");
        std::map<std::string, std::vector<std::map<std::string, std::string>>> by_trip;
        for (auto& r : read_csv(pred_p)) by_trip[r["trip_id"]].push_back(std::move(r));
        static const std::vector<std::pair<std::string, std::string>> cols{
            {"actual_mps", "black"},          {"learned_mps", "#d62728"},   {"tmc_direct_mps", "#1f77b4"},
            {"average_speed_mps", "#2ca02c"}, {"posted_speed_mps", "#9467bd"}};
        for (const auto& [trip, rows] : by_trip) {
            std::vector<experiments::Series> series;
            for (const auto& [col, color] : cols) {
                experiments::Series s{col.substr(0, col.size() - 4), color, {}};
                for (const auto& r : rows) {
                    double v = std::numeric_limits<double>::quiet_NaN();
                    text::parse_double(r.at(col), v);
                    s.values.push_back(v);
                }
                series.push_back(std::move(s));
            }
            const auto& cfg_id = rows.front().at("config_id");
            text::write_file(in / "plots" / (trip + ".svg"),
                             experiments::render_profile_svg(fmt::format("{} (config {})", trip, cfg_id), series));
            ++n_plots;
        }
    }
    guard.commit();
    note("wrote {} and {} plots", (in / "summary_table.txt").string(), n_plots);
    json rows = json::array();
    for (const auto& r : summary) rows.push_back(r);
    return {{"summary_table", (in / "summary_table.txt").string()}, {"plots", n_plots}, {"rows", rows}};
}

std::string one_line(std::string s) {
    for (auto& ch : s)
        if (ch == '\n' || ch == '\r') ch = ' ';
    return s;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Driver speed-profile prediction from TMC traffic data"};
    app.require_subcommand(1);
    app.fallthrough();
    bool json_out = false;
    app.add_flag("--json", json_out, "print a machine-readable JSON summary on stdout");
    app.add_flag("-q,--quiet", g_quiet, "suppress progress messages on stderr");

    Common c_synth, c_dataset, c_train, c_predict, c_sweep;
    fs::path out_synth, out_extract, out_dataset, out_predict, out_sweep, in_report;
    fs::path route_p, sections_p, archive_p, dataset_p, model_out, model_p;
    double spacing = kDefaultSpacingM, corridor = kDefaultCorridorM;
    std::string trip_start, trip_id = "predicted";
    unsigned workers = 0;
    bool plots = false;

    auto* synth_cmd = app.add_subcommand("synth-world", "generate a synthetic route, TMC archive and GPS trips");
    add_config_flags(synth_cmd, c_synth, false);
    synth_cmd->add_option("--out", out_synth, "output directory (also receives config.json)")->required();

    auto* extract_cmd = app.add_subcommand("extract-tmc", "map a route to TMC sections and extract their history");
    extract_cmd->add_option("--route", route_p, "shape-point CSV")->required();
    extract_cmd->add_option("--sections", sections_p, "TMC section table CSV")->required();
    extract_cmd->add_option("--archive", archive_p, "directory of TMC history files")->required();
    extract_cmd->add_option("--out", out_extract, "extracted history CSV")->required();
    extract_cmd->add_option("--spacing", spacing, "standard-point spacing in metres")->capture_default_str();
    extract_cmd->add_option("--corridor", corridor, "section-to-route matching corridor in metres")->capture_default_str();

    auto* dataset_cmd = app.add_subcommand("build-dataset", "turn trip logs into feature vectors");
    add_config_flags(dataset_cmd, c_dataset, true);
    dataset_cmd->add_option("--out", out_dataset, "dataset CSV (a .json sidecar is written next to it)")->required();

    auto* train_cmd = app.add_subcommand("train", "pretrain and fine-tune one network on a dataset");
    add_config_flags(train_cmd, c_train, false);
    train_cmd->add_option("--dataset", dataset_p, "dataset CSV from build-dataset")->required();
    train_cmd->add_option("--model-out", model_out, "model JSON to write")->required();

    auto* predict_cmd = app.add_subcommand("predict", "predict the full speed profile for a trip start time");
    add_config_flags(predict_cmd, c_predict, true);
    predict_cmd->add_option("--model", model_p, "model JSON from train")->required();
    predict_cmd->add_option("--trip-start", trip_start, "trip start, ISO 8601 UTC or epoch seconds")->required();
    predict_cmd->add_option("--trip-id", trip_id, "trip id written in the output")->capture_default_str();
    predict_cmd->add_option("--out", out_predict, "profile CSV to write")->required();

    auto* sweep_cmd = app.add_subcommand("sweep", "cross-validated grid sweep with baseline comparison");
    add_config_flags(sweep_cmd, c_sweep, true);
    sweep_cmd->add_option("--out", out_sweep, "report directory")->required();
    sweep_cmd->add_option("--workers", workers, "worker threads (0 = available parallelism)")->capture_default_str();

    auto* report_cmd = app.add_subcommand("report", "summary table and profile plots for a sweep directory");
    report_cmd->add_option("--in", in_report, "sweep output directory")->required();
    report_cmd->add_flag("--plots", plots, "write plots/<trip_id>.svg from predictions.csv");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        fmt::print(stderr, "error: usage: {}\n", one_line(e.what()));
        return 2;
    }

    try {
        json summary;
        if (*synth_cmd) summary = cmd_synth_world(c_synth, out_synth);
        else if (*extract_cmd) summary = cmd_extract_tmc(route_p, sections_p, archive_p, out_extract, spacing, corridor);
        else if (*dataset_cmd) summary = cmd_build_dataset(c_dataset, out_dataset);
        else if (*train_cmd) summary = cmd_train(c_train, dataset_p, model_out);
        else if (*predict_cmd) summary = cmd_predict(c_predict, model_p, trip_start, trip_id, out_predict);
        else if (*sweep_cmd) summary = cmd_sweep(c_sweep, out_sweep, workers);
        else if (*report_cmd) summary = cmd_report(in_report, plots);
        if (json_out) fmt::print("{}\n", summary.dump());
        return 0;
    } catch (const speedprof::Error& e) {
        fmt::print(stderr, "error: {}: {}\n", e.error_class(), one_line(e.what()));
        const bool usage = dynamic_cast<const ConfigError*>(&e) || dynamic_cast<const MissingInput*>(&e) ||
                           dynamic_cast<const InvalidParams*>(&e);
        return usage ? 2 : 1;
    } catch (const std::exception& e) {
        fmt::print(stderr, "error: runtime: {}\n", one_line(e.what()));
        return 1;
    }
}
