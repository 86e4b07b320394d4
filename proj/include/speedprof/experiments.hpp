#pragma once

// Evaluation harness: RMSE, the three non-learned baselines, trip splits,
// closed-loop profile prediction and the hyperparameter sweep.

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <mutex>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <thread>
#include <vector>

#include <nlohmann/json.hpp>

#include "speedprof/drive_cycle.hpp"
#include "speedprof/error.hpp"
#include "speedprof/features.hpp"
#include "speedprof/neuralnet.hpp"
#include "speedprof/route.hpp"
#include "speedprof/synth.hpp"
#include "speedprof/text_io.hpp"
#include "speedprof/tmc.hpp"

namespace speedprof::experiments {

inline double rmse(std::span<const double> predicted, std::span<const double> actual) {
    if (predicted.size() != actual.size()) throw LengthMismatch(predicted.size(), actual.size());
    if (predicted.empty()) throw EmptyInput();
    double acc = 0.0;
    for (std::size_t i = 0; i < predicted.size(); ++i) {
        const double e = actual[i] - predicted[i];
        acc += e * e;
    }
    return std::sqrt(acc / static_cast<double>(predicted.size()));
}

/// RMSE over indices >= first.
inline double rmse_from(std::span<const double> predicted, std::span<const double> actual, std::size_t first) {
    if (predicted.size() != actual.size()) throw LengthMismatch(predicted.size(), actual.size());
    if (first >= predicted.size()) throw EmptyInput();
    return rmse(predicted.subspan(first), actual.subspan(first));
}

// ---------------------------------------------------------------------------
// Baselines

inline VelocityProfile baseline_tmc_direct(const Route& route, const TmcHistory& history, Timestamp trip_start) {
    VelocityProfile p{"tmc_direct", trip_start, {}};
    p.speeds_mps.reserve(route.size());
    for (const auto& sp : route.standard_points()) {
        if (!history.contains(sp.tmc_code)) throw NoData(sp.tmc_code, sp.index);
        p.speeds_mps.push_back(sample_tmc(history, sp.tmc_code, trip_start));
    }
    return p;
}

inline VelocityProfile baseline_average_speed(const Route& route, const TmcHistory& history) {
    VelocityProfile p{"average_speed", 0, {}};
    p.speeds_mps.reserve(route.size());
    for (const auto& sp : route.standard_points()) {
        const auto obs = history.observations(sp.tmc_code);
        if (obs.empty()) throw NoData(sp.tmc_code, sp.index);
        double sum = 0.0;
        for (const auto& o : obs) sum += o.current_speed_mps;
        p.speeds_mps.push_back(sum / static_cast<double>(obs.size()));
    }
    return p;
}

inline VelocityProfile baseline_posted_speed(const Route& route) {
    VelocityProfile p{"posted_speed", 0, {}};
    p.speeds_mps.reserve(route.size());
    for (const auto& sp : route.standard_points()) p.speeds_mps.push_back(sp.speed_limit_mps);
    return p;
}

// ---------------------------------------------------------------------------
// Splits

enum class SplitKind { leave_one_out, random_fraction };

struct SplitStrategy {
    SplitKind kind = SplitKind::leave_one_out;
    double test_fraction = 0.2;
};

struct Fold {
    std::vector<std::size_t> train;
    std::vector<std::size_t> test;
};

inline std::vector<Fold> split_trips(std::size_t n_trips, const SplitStrategy& strategy, std::uint64_t seed) {
    if (n_trips < 2) throw TooFewTrips(n_trips);
    std::vector<Fold> folds;
    if (strategy.kind == SplitKind::leave_one_out) {
        for (std::size_t t = 0; t < n_trips; ++t) {
            Fold f;
            f.test.push_back(t);
            for (std::size_t i = 0; i < n_trips; ++i)
                if (i != t) f.train.push_back(i);
            folds.push_back(std::move(f));
        }
        return folds;
    }
    if (!(strategy.test_fraction > 0.0 && strategy.test_fraction < 1.0))
        throw ConfigError("test_fraction must be in (0,1)", "experiments.invalid_split");
    std::vector<std::size_t> order(n_trips);
    for (std::size_t i = 0; i < n_trips; ++i) order[i] = i;
    std::mt19937_64 rng(seed);
    for (std::size_t i = n_trips; i > 1; --i) std::swap(order[i - 1], order[rng() % i]);
    auto n_test = static_cast<std::size_t>(std::llround(strategy.test_fraction * static_cast<double>(n_trips)));
    n_test = std::clamp<std::size_t>(n_test, 1, n_trips - 1);
    Fold f;
    f.test.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_test));
    f.train.assign(order.begin() + static_cast<std::ptrdiff_t>(n_test), order.end());
    std::sort(f.test.begin(), f.test.end());
    std::sort(f.train.begin(), f.train.end());
    folds.push_back(std::move(f));
    return folds;
}

// ---------------------------------------------------------------------------
// Training and prediction

struct TrainingSet {
    std::vector<std::vector<double>> inputs; ///< raw feature values
    std::vector<double> targets;             ///< m/s
};

inline TrainingSet build_training_set(const Route& route, const TmcHistory& history,
                                      std::span<const VelocityProfile> trips, const FeatureConfig& config) {
    TrainingSet ts;
    for (const auto& trip : trips) {
        for (auto& fv : assemble_trip(route, history, trip.speeds_mps, trip.start, config)) {
            ts.targets.push_back(fv.target);
            ts.inputs.push_back(std::move(fv.values));
        }
    }
    return ts;
}

struct TrainingOptions {
    nn::TrainHyperparams pretrain = nn::default_pretrain_hyperparams();
    nn::TrainHyperparams supervised = nn::default_supervised_hyperparams();
    bool fine_tune_encoder = true;
};

struct TrainingDiagnostics {
    std::vector<double> pretrain_initial_mse;
    std::vector<double> pretrain_final_mse;
    std::vector<double> supervised_loss;
};

/// Fits normalizers on the training set, pretrains the encoder stack, then
/// trains the regression head (and optionally fine-tunes the encoders).
inline nn::TrainedModel train_model(const TrainingSet& ts, const FeatureConfig& config,
                                    std::span<const std::size_t> encoder_sizes, std::size_t head_hidden,
                                    const TrainingOptions& opt, std::uint64_t seed,
                                    TrainingDiagnostics* diag = nullptr) {
    if (ts.inputs.empty()) throw EmptyTrainingSet();
    nn::TrainedModel m;
    m.features = config;
    m.input_norm = fit_normalizer(ts.inputs);
    std::vector<std::vector<double>> t1;
    t1.reserve(ts.targets.size());
    for (double v : ts.targets) t1.push_back({v});
    m.target_norm = fit_normalizer(t1);

    std::vector<std::vector<double>> x;
    x.reserve(ts.inputs.size());
    for (const auto& v : ts.inputs) x.push_back(m.input_norm.apply(v));
    std::vector<double> y;
    y.reserve(ts.targets.size());
    for (double v : ts.targets) y.push_back(m.target_norm.apply(0, v));

    const nn::Architecture arch{input_dimension(config), {encoder_sizes.begin(), encoder_sizes.end()}, head_hidden};
    auto net = nn::init_network(arch, synth::stream_seed(seed, "init"));

    auto pre_hp = opt.pretrain;
    pre_hp.seed = synth::stream_seed(seed, "pretrain");
    auto pre = nn::pretrain_sae(x, encoder_sizes, pre_hp);
    net.encoder_layers = std::move(pre.encoders);

    auto sup_hp = opt.supervised;
    sup_hp.seed = synth::stream_seed(seed, "supervised");
    auto trained = nn::train_predictor(std::move(net), x, y, sup_hp, opt.fine_tune_encoder);
    m.net = std::move(trained.net);
    if (diag) {
        for (const auto& l : pre.layers) {
            diag->pretrain_initial_mse.push_back(l.initial_mse);
            diag->pretrain_final_mse.push_back(l.final_mse);
        }
        diag->supervised_loss = std::move(trained.loss_curve);
    }
    return m;
}

/// Full-route prediction for a trip starting at trip_start. In closed loop the
/// driver-history inputs are the model's own earlier predictions; with
/// `teacher` set they come from that recorded profile instead.
inline std::vector<double> predict_profile(const nn::TrainedModel& model, const Route& route, const TmcHistory& history,
                                           Timestamp trip_start, std::span<const double> teacher = {}) {
    if (!teacher.empty() && teacher.size() != route.size()) throw LengthMismatch(teacher.size(), route.size());
    std::vector<double> pred;
    pred.reserve(route.size());
    for (std::size_t i = 0; i < route.size(); ++i) {
        const std::span<const double> prefix = teacher.empty() ? std::span<const double>(pred) : teacher;
        const auto fv = assemble_input(route, history, prefix.first(i), trip_start, i, model.features);
        pred.push_back(std::max(0.0, model.predict_mps(fv.values)));
    }
    return pred;
}

struct EvalOptions {
    bool closed_loop = true;
};

struct Evaluation {
    std::vector<double> predicted;
    double rmse = 0.0;
    std::size_t q = 0; ///< scored points (indices >= r)
};

inline Evaluation evaluate_model(const nn::TrainedModel& model, const Route& route, const TmcHistory& history,
                                 const VelocityProfile& trip, const EvalOptions& opt = {}) {
    if (trip.speeds_mps.size() != route.size()) throw LengthMismatch(trip.speeds_mps.size(), route.size());
    Evaluation ev;
    ev.predicted = predict_profile(model, route, history, trip.start,
                                   opt.closed_loop ? std::span<const double>{} : std::span<const double>(trip.speeds_mps));
    const auto first = static_cast<std::size_t>(model.features.history_r);
    ev.rmse = rmse_from(ev.predicted, trip.speeds_mps, first);
    ev.q = route.size() - first;
    return ev;
}

// ---------------------------------------------------------------------------
// Sweep

struct GridPoint {
    FeatureConfig features;
    std::vector<std::size_t> encoder_sizes;
    std::size_t head_hidden = 8;

    std::string arch_string() const {
        return nn::describe({input_dimension(features), encoder_sizes, head_hidden});
    }
    std::string key() const {
        return fmt::format("n{}k{}m{}r{}p{}|{}", features.lookahead_n, features.tmc_k, features.tmc_m,
                           features.history_r, features.tmc_sample_period_s, arch_string());
    }
};

struct SweepGrid {
    std::vector<int> lookahead{0, 1, 2, 3, 4, 5};
    std::vector<int> tmc_k{1, 2, 3, 4, 5};
    std::vector<int> tmc_m{0, 1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
    std::vector<int> history_r{1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
    std::vector<std::vector<std::size_t>> encoder_options{{24, 12}};
    std::vector<std::size_t> head_hidden_options{8};
    double tmc_sample_period_s = kDefaultTmcPeriodS;
    /// Allow values outside the published ranges.
    bool allow_out_of_range = false;

    std::size_t feature_config_count() const {
        return lookahead.size() * tmc_k.size() * tmc_m.size() * history_r.size();
    }
    std::size_t size() const { return feature_config_count() * encoder_options.size() * head_hidden_options.size(); }

    void validate() const {
        if (lookahead.empty() || tmc_k.empty() || tmc_m.empty() || history_r.empty() || encoder_options.empty() ||
            head_hidden_options.empty())
            throw ConfigError("every sweep axis needs at least one value", "experiments.invalid_grid");
        if (allow_out_of_range) return;
        const auto check = [](const std::vector<int>& v, int lo, int hi, const char* name) {
            for (int x : v)
                if (x < lo || x > hi)
                    throw ConfigError(fmt::format("{} value {} outside [{},{}]", name, x, lo, hi), "experiments.invalid_grid");
        };
        check(lookahead, 0, 5, "lookahead");
        check(tmc_k, 1, 5, "k");
        check(tmc_m, 0, 10, "m");
        check(history_r, 1, 10, "r");
    }

    /// Grid points in config-id order (n, k, m, r, encoders, head).
    std::vector<GridPoint> expand() const {
        validate();
        std::vector<GridPoint> out;
        out.reserve(size());
        for (int n : lookahead)
            for (int k : tmc_k)
                for (int m : tmc_m)
                    for (int r : history_r)
                        for (const auto& enc : encoder_options)
                            for (auto head : head_hidden_options)
                                out.push_back({FeatureConfig(n, k, m, r, tmc_sample_period_s), enc, head});
        return out;
    }
};

inline void to_json(nlohmann::json& j, const SweepGrid& g) {
    j = {{"lookahead", g.lookahead},
         {"tmc_k", g.tmc_k},
         {"tmc_m", g.tmc_m},
         {"history_r", g.history_r},
         {"encoder_options", g.encoder_options},
         {"head_hidden_options", g.head_hidden_options},
         {"tmc_sample_period_s", g.tmc_sample_period_s},
         {"allow_out_of_range", g.allow_out_of_range}};
}

inline void from_json(const nlohmann::json& j, SweepGrid& g) {
    g.lookahead = j.value("lookahead", g.lookahead);
    g.tmc_k = j.value("tmc_k", g.tmc_k);
    g.tmc_m = j.value("tmc_m", g.tmc_m);
    g.history_r = j.value("history_r", g.history_r);
    g.encoder_options = j.value("encoder_options", g.encoder_options);
    g.head_hidden_options = j.value("head_hidden_options", g.head_hidden_options);
    g.tmc_sample_period_s = j.value("tmc_sample_period_s", g.tmc_sample_period_s);
    g.allow_out_of_range = j.value("allow_out_of_range", g.allow_out_of_range);
    g.validate();
}

struct SweepOptions {
    TrainingOptions training;
    SplitStrategy split;
    std::uint64_t master_seed = 7;
    unsigned workers = 0; ///< 0 = available parallelism
    bool closed_loop = true;
};

struct TripScore {
    std::size_t fold = 0;
    std::string trip_id;
    double rmse = 0.0;
    std::size_t q = 0;
    double sse = 0.0; ///< sum of squared errors over the q points
};

struct ScoreRow {
    std::string name; ///< architecture string or baseline name
    bool learned = false;
    std::vector<TripScore> scores;
    double mean_rmse = std::numeric_limits<double>::quiet_NaN();   ///< mean of per-trip RMSE
    double pooled_rmse = std::numeric_limits<double>::quiet_NaN(); ///< RMSE over all scored points
    std::string error;                                             ///< non-empty when the row failed

    bool failed() const { return !error.empty(); }

    void finalize() {
        if (failed() || scores.empty()) return;
        double sum = 0.0, sse = 0.0;
        std::size_t q = 0;
        for (const auto& s : scores) {
            sum += s.rmse;
            sse += s.sse;
            q += s.q;
        }
        mean_rmse = sum / static_cast<double>(scores.size());
        pooled_rmse = std::sqrt(sse / static_cast<double>(q));
    }
};

inline constexpr std::array<const char*, 3> kBaselineNames{"baseline_tmc_direct", "baseline_average_speed",
                                                           "baseline_posted_speed"};

struct TripPrediction {
    std::size_t fold = 0;
    std::string trip_id;
    std::vector<double> actual;
    std::vector<double> learned;
    std::array<std::vector<double>, 3> baselines;
};

struct ConfigReport {
    std::size_t config_id = 0;
    GridPoint point;
    ScoreRow learned;
    std::array<ScoreRow, 3> baselines;
    std::vector<TripPrediction> predictions;
};

struct RmseReport {
    std::vector<ConfigReport> configs;

    std::size_t row_count() const { return configs.size() * 4; }

    /// Best learned configuration by mean RMSE (failed ones excluded).
    std::optional<std::size_t> best() const {
        std::optional<std::size_t> b;
        for (std::size_t i = 0; i < configs.size(); ++i) {
            const auto& r = configs[i].learned;
            if (r.failed() || !std::isfinite(r.mean_rmse)) continue;
            if (!b || r.mean_rmse < configs[*b].learned.mean_rmse) b = i;
        }
        return b;
    }
};

namespace detail {

struct FoldOutcome {
    std::vector<TripScore> learned;
    std::string learned_error;
    std::array<std::vector<TripScore>, 3> baselines;
    std::array<std::string, 3> baseline_error;
    std::vector<TripPrediction> predictions;
};

inline TripScore score(std::size_t fold, const std::string& id, std::span<const double> pred,
                       std::span<const double> actual, std::size_t first) {
    TripScore s{fold, id, rmse_from(pred, actual, first), actual.size() - first, 0.0};
    for (std::size_t i = first; i < actual.size(); ++i) s.sse += (pred[i] - actual[i]) * (pred[i] - actual[i]);
    return s;
}

inline FoldOutcome run_fold(const GridPoint& gp, const Fold& fold, std::size_t fold_index,
                            std::span<const VelocityProfile> trips, const Route& route, const TmcHistory& history,
                            const SweepOptions& opt, std::uint64_t seed) {
    FoldOutcome out;
    const auto first = static_cast<std::size_t>(gp.features.history_r);
    for (auto t : fold.test) {
        TripPrediction tp;
        tp.fold = fold_index;
        tp.trip_id = trips[t].trip_id;
        tp.actual = trips[t].speeds_mps;
        out.predictions.push_back(std::move(tp));
    }

    try {
        std::vector<VelocityProfile> train;
        for (auto i : fold.train) train.push_back(trips[i]);
        const auto ts = build_training_set(route, history, train, gp.features);
        const auto model = train_model(ts, gp.features, gp.encoder_sizes, gp.head_hidden, opt.training, seed);
        for (std::size_t j = 0; j < fold.test.size(); ++j) {
            const auto& trip = trips[fold.test[j]];
            const auto ev = evaluate_model(model, route, history, trip, {opt.closed_loop});
            out.learned.push_back(score(fold_index, trip.trip_id, ev.predicted, trip.speeds_mps, first));
            out.predictions[j].learned = ev.predicted;
        }
    } catch (const std::exception& e) {
        out.learned_error = e.what();
        out.learned.clear();
    }

    for (std::size_t b = 0; b < 3; ++b) {
        try {
            for (std::size_t j = 0; j < fold.test.size(); ++j) {
                const auto& trip = trips[fold.test[j]];
                std::vector<double> p;
                if (b == 0) p = baseline_tmc_direct(route, history, trip.start).speeds_mps;
                else if (b == 1) p = baseline_average_speed(route, history).speeds_mps;
                else p = baseline_posted_speed(route).speeds_mps;
                out.baselines[b].push_back(score(fold_index, trip.trip_id, p, trip.speeds_mps, first));
                out.predictions[j].baselines[b] = std::move(p);
            }
        } catch (const std::exception& e) {
            out.baseline_error[b] = e.what();
            out.baselines[b].clear();
        }
    }
    return out;
}

} // namespace detail

/// Runs every grid point over every fold. Work is spread over worker threads;
/// seeds derive from the master seed and the grid point's content, so results
/// do not depend on worker count or scheduling. Failures are recorded per
/// grid point and never abort the sweep.
inline RmseReport run_sweep(const SweepGrid& grid, std::span<const VelocityProfile> trips, const Route& route,
                            const TmcHistory& history, const SweepOptions& opt) {
    const auto points = grid.expand();
    for (const auto& t : trips)
        if (t.speeds_mps.size() != route.size()) throw LengthMismatch(t.speeds_mps.size(), route.size());
    const auto folds = split_trips(trips.size(), opt.split, synth::stream_seed(opt.master_seed, "split"));

    const std::size_t n_tasks = points.size() * folds.size();
    std::vector<detail::FoldOutcome> outcomes(n_tasks);
    std::atomic<std::size_t> next{0};
    const auto worker = [&]() {
        for (std::size_t task = next++; task < n_tasks; task = next++) {
            const std::size_t c = task / folds.size();
            const std::size_t f = task % folds.size();
            const auto seed = synth::stream_seed(synth::stream_seed(opt.master_seed, points[c].key()), "fold", f);
            outcomes[task] = detail::run_fold(points[c], folds[f], f, trips, route, history, opt, seed);
        }
    };
    unsigned workers = opt.workers ? opt.workers : std::max(1u, std::thread::hardware_concurrency());
    workers = static_cast<unsigned>(std::min<std::size_t>(workers, std::max<std::size_t>(1, n_tasks)));
    if (workers <= 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (unsigned i = 0; i < workers; ++i) pool.emplace_back(worker);
    }

    RmseReport report;
    for (std::size_t c = 0; c < points.size(); ++c) {
        ConfigReport cr;
        cr.config_id = c;
        cr.point = points[c];
        cr.learned.name = points[c].arch_string();
        cr.learned.learned = true;
        for (std::size_t b = 0; b < 3; ++b) cr.baselines[b].name = kBaselineNames[b];
        for (std::size_t f = 0; f < folds.size(); ++f) {
            auto& o = outcomes[c * folds.size() + f];
            if (!o.learned_error.empty() && cr.learned.error.empty())
                cr.learned.error = fmt::format("fold {}: {}", f, o.learned_error);
            for (auto& s : o.learned) cr.learned.scores.push_back(std::move(s));
            for (std::size_t b = 0; b < 3; ++b) {
                if (!o.baseline_error[b].empty() && cr.baselines[b].error.empty())
                    cr.baselines[b].error = fmt::format("fold {}: {}", f, o.baseline_error[b]);
                for (auto& s : o.baselines[b]) cr.baselines[b].scores.push_back(std::move(s));
            }
            for (auto& p : o.predictions) cr.predictions.push_back(std::move(p));
        }
        cr.learned.finalize();
        for (auto& b : cr.baselines) b.finalize();
        report.configs.push_back(std::move(cr));
    }
    return report;
}

// ---------------------------------------------------------------------------
// Report files

inline std::string format_sweep_report(const RmseReport& report) {
    std::string out = "config_id,n,k,m,r,arch,fold,rmse_mps\n";
    const auto emit = [&](const ConfigReport& c, const ScoreRow& row) {
        const auto& f = c.point.features;
        if (row.failed()) {
            out += fmt::format("{},{},{},{},{},{},all,nan\n", c.config_id, f.lookahead_n, f.tmc_k, f.tmc_m,
                               f.history_r, row.name);
            return;
        }
        for (const auto& s : row.scores)
            out += fmt::format("{},{},{},{},{},{},{},{}\n", c.config_id, f.lookahead_n, f.tmc_k, f.tmc_m, f.history_r,
                               row.name, s.fold, s.rmse);
    };
    for (const auto& c : report.configs) {
        emit(c, c.learned);
        for (const auto& b : c.baselines) emit(c, b);
    }
    return out;
}

/// All rows (learned and baseline) ranked by mean RMSE; failed rows last.
inline std::string format_summary(const RmseReport& report) {
    struct Item {
        const ConfigReport* c;
        const ScoreRow* row;
    };
    std::vector<Item> items;
    for (const auto& c : report.configs) {
        items.push_back({&c, &c.learned});
        for (const auto& b : c.baselines) items.push_back({&c, &b});
    }
    std::stable_sort(items.begin(), items.end(), [](const Item& a, const Item& b) {
        const bool fa = a.row->failed() || !std::isfinite(a.row->mean_rmse);
        const bool fb = b.row->failed() || !std::isfinite(b.row->mean_rmse);
        if (fa != fb) return fb;
        if (fa) return false;
        return a.row->mean_rmse < b.row->mean_rmse;
    });
    std::string out = "rank,config_id,kind,n,k,m,r,arch,mean_rmse_mps,pooled_rmse_mps,trips,status\n";
    for (std::size_t i = 0; i < items.size(); ++i) {
        const auto& c = *items[i].c;
        const auto& r = *items[i].row;
        const auto& f = c.point.features;
        out += fmt::format("{},{},{},{},{},{},{},{},{},{},{},{}\n", i + 1, c.config_id,
                           r.learned ? "learned" : "baseline", f.lookahead_n, f.tmc_k, f.tmc_m, f.history_r, r.name,
                           r.mean_rmse, r.pooled_rmse, r.scores.size(), r.failed() ? "failed" : "ok");
    }
    return out;
}

inline std::string format_predictions(const ConfigReport& c) {
    std::string out =
        "config_id,fold,trip_id,sp_index,actual_mps,learned_mps,tmc_direct_mps,average_speed_mps,posted_speed_mps\n";
    const auto at = [](const std::vector<double>& v, std::size_t i) {
        return i < v.size() ? text::num(v[i]) : std::string("nan");
    };
    for (const auto& p : c.predictions)
        for (std::size_t i = 0; i < p.actual.size(); ++i)
            out += fmt::format("{},{},{},{},{},{},{},{},{}\n", c.config_id, p.fold, p.trip_id, i, p.actual[i],
                               at(p.learned, i), at(p.baselines[0], i), at(p.baselines[1], i), at(p.baselines[2], i));
    return out;
}

/// sweep_report.csv, summary.csv, errors.csv and predictions.csv (best learned config).
inline void write_sweep(const RmseReport& report, const std::filesystem::path& dir) {
    text::write_file(dir / "sweep_report.csv", format_sweep_report(report));
    text::write_file(dir / "summary.csv", format_summary(report));
    std::string errors = "config_id,row,error\n";
    for (const auto& c : report.configs) {
        if (c.learned.failed()) errors += fmt::format("{},{},\"{}\"\n", c.config_id, c.learned.name, c.learned.error);
        for (const auto& b : c.baselines)
            if (b.failed()) errors += fmt::format("{},{},\"{}\"\n", c.config_id, b.name, b.error);
    }
    text::write_file(dir / "errors.csv", errors);
    const auto best = report.best();
    text::write_file(dir / "predictions.csv", best ? format_predictions(report.configs[*best])
                                                   : format_predictions(ConfigReport{}));
}

// ---------------------------------------------------------------------------
// SVG plots

struct Series {
    std::string label;
    std::string color;
    std::vector<double> values;
};

inline std::string render_profile_svg(const std::string& title, const std::vector<Series>& series) {
    constexpr double W = 860, H = 420, ml = 60, mr = 190, mt = 40, mb = 50;
    std::size_t n = 0;
    double ymax = 1.0;
    for (const auto& s : series) {
        n = std::max(n, s.values.size());
        for (double v : s.values)
            if (std::isfinite(v)) ymax = std::max(ymax, v);
    }
    ymax = std::ceil(ymax * 1.1 / 5.0) * 5.0;
    const double pw = W - ml - mr, ph = H - mt - mb;
    const auto X = [&](std::size_t i) { return ml + (n > 1 ? pw * static_cast<double>(i) / static_cast<double>(n - 1) : 0.0); };
    const auto Y = [&](double v) { return mt + ph * (1.0 - v / ymax); };

    std::string out = fmt::format(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{}\" height=\"{}\" font-family=\"sans-serif\" font-size=\"12\">\n"
        "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
        "<text x=\"{}\" y=\"22\" font-size=\"15\">{}</text>\n",
        W, H, ml, title);
    out += fmt::format("<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"black\"/>\n", ml, mt + ph, ml + pw, mt + ph);
    out += fmt::format("<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"black\"/>\n", ml, mt, ml, mt + ph);
    for (double v = 0.0; v <= ymax + 1e-9; v += ymax / 5.0) {
        out += fmt::format("<line x1=\"{:.1f}\" y1=\"{:.1f}\" x2=\"{:.1f}\" y2=\"{:.1f}\" stroke=\"#ddd\"/>\n", ml, Y(v),
                           ml + pw, Y(v));
        out += fmt::format("<text x=\"{:.1f}\" y=\"{:.1f}\" text-anchor=\"end\">{:.0f}</text>\n", ml - 6, Y(v) + 4, v);
    }
    const std::size_t xstep = std::max<std::size_t>(1, n / 10);
    for (std::size_t i = 0; i < n; i += xstep)
        out += fmt::format("<text x=\"{:.1f}\" y=\"{:.1f}\" text-anchor=\"middle\">{}</text>\n", X(i), mt + ph + 18, i);
    out += fmt::format("<text x=\"{:.1f}\" y=\"{:.1f}\" text-anchor=\"middle\">standard point</text>\n", ml + pw / 2, H - 8);
    out += fmt::format("<text x=\"16\" y=\"{:.1f}\" transform=\"rotate(-90 16 {:.1f})\" text-anchor=\"middle\">speed (m/s)</text>\n",
                       mt + ph / 2, mt + ph / 2);
    for (std::size_t s = 0; s < series.size(); ++s) {
        std::string pts;
        for (std::size_t i = 0; i < series[s].values.size(); ++i) {
            if (!std::isfinite(series[s].values[i])) continue;
            pts += fmt::format("{:.1f},{:.1f} ", X(i), Y(series[s].values[i]));
        }
        out += fmt::format("<polyline fill=\"none\" stroke=\"{}\" stroke-width=\"1.6\" points=\"{}\"/>\n", series[s].color, pts);
        const double ly = mt + 14.0 + 18.0 * static_cast<double>(s);
        out += fmt::format("<line x1=\"{:.1f}\" y1=\"{:.1f}\" x2=\"{:.1f}\" y2=\"{:.1f}\" stroke=\"{}\" stroke-width=\"2\"/>\n",
                           ml + pw + 12, ly, ml + pw + 36, ly, series[s].color);
        out += fmt::format("<text x=\"{:.1f}\" y=\"{:.1f}\">{}</text>\n", ml + pw + 42, ly + 4, series[s].label);
    }
    out += "</svg>\n";
    return out;
}

} // namespace speedprof::experiments
