#pragma once

// Dense feed-forward network built from a stack of sigmoid autoencoder
// encoders (greedy layer-wise pretraining) topped by a one-hidden-layer
// regression head with a linear scalar output.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <random>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "speedprof/error.hpp"
#include "speedprof/features.hpp"
#include "speedprof/text_io.hpp"

namespace speedprof::nn {

enum class Activation { sigmoid, linear };

inline double sigmoid(double z) noexcept { return 1.0 / (1.0 + std::exp(-z)); }

inline std::string to_string(Activation a) { return a == Activation::sigmoid ? "sigmoid" : "linear"; }

inline Activation activation_from_string(const std::string& s) {
    if (s == "sigmoid") return Activation::sigmoid;
    if (s == "linear") return Activation::linear;
    throw InvalidArchitecture("unknown activation '" + s + "'");
}

/// Fully connected layer, weights row-major (out x in).
struct LayerWeights {
    std::size_t in = 0;
    std::size_t out = 0;
    std::vector<double> weights;
    std::vector<double> bias;
    Activation activation = Activation::sigmoid;

    LayerWeights() = default;
    LayerWeights(std::size_t in_dim, std::size_t out_dim, Activation act)
        : in(in_dim), out(out_dim), weights(in_dim * out_dim, 0.0), bias(out_dim, 0.0), activation(act) {}

    double& w(std::size_t row, std::size_t col) { return weights[row * in + col]; }
    double w(std::size_t row, std::size_t col) const { return weights[row * in + col]; }

    void forward(std::span<const double> x, std::span<double> y) const noexcept {
        for (std::size_t o = 0; o < out; ++o) {
            const double* row = weights.data() + o * in;
            double z = bias[o];
            for (std::size_t i = 0; i < in; ++i) z += row[i] * x[i];
            y[o] = activation == Activation::sigmoid ? sigmoid(z) : z;
        }
    }

    std::vector<double> forward(std::span<const double> x) const {
        if (x.size() != in) throw DimensionMismatch(in, x.size());
        std::vector<double> y(out);
        forward(x, y);
        return y;
    }

    bool finite() const noexcept {
        for (double v : weights)
            if (!std::isfinite(v)) return false;
        for (double v : bias)
            if (!std::isfinite(v)) return false;
        return true;
    }

    friend bool operator==(const LayerWeights&, const LayerWeights&) = default;
};

struct Architecture {
    std::size_t input_dim = 0;
    std::vector<std::size_t> encoder_sizes;
    std::size_t head_hidden = 0;

    friend bool operator==(const Architecture&, const Architecture&) = default;
};

/// Short textual form used in reports, e.g. "33-24-12|8".
inline std::string describe(const Architecture& a) {
    std::string s = std::to_string(a.input_dim);
    for (auto e : a.encoder_sizes) s += "-" + std::to_string(e);
    return s + "|" + std::to_string(a.head_hidden);
}

struct SaeNetwork {
    std::vector<LayerWeights> encoder_layers; ///< sigmoid
    LayerWeights head_hidden;                 ///< sigmoid
    LayerWeights head_output;                 ///< linear, out_dim 1

    std::size_t input_dim() const noexcept {
        return encoder_layers.empty() ? head_hidden.in : encoder_layers.front().in;
    }

    Architecture architecture() const {
        Architecture a{input_dim(), {}, head_hidden.out};
        for (const auto& l : encoder_layers) a.encoder_sizes.push_back(l.out);
        return a;
    }

    /// All layers bottom to top.
    std::vector<const LayerWeights*> layers() const {
        std::vector<const LayerWeights*> v;
        for (const auto& l : encoder_layers) v.push_back(&l);
        v.push_back(&head_hidden);
        v.push_back(&head_output);
        return v;
    }
    std::vector<LayerWeights*> layers() {
        std::vector<LayerWeights*> v;
        for (auto& l : encoder_layers) v.push_back(&l);
        v.push_back(&head_hidden);
        v.push_back(&head_output);
        return v;
    }

    friend bool operator==(const SaeNetwork&, const SaeNetwork&) = default;
};

struct TrainHyperparams {
    double learning_rate = 0.05;
    std::size_t epochs = 500;
    std::size_t batch_size = 16;
    double l2_lambda = 1e-4;
    std::uint64_t seed = 1;

    void validate() const {
        if (!(learning_rate >= 0.0) || !std::isfinite(learning_rate))
            throw ConfigError("learning_rate must be >= 0", "nn.invalid_hyperparams");
        if (batch_size == 0) throw ConfigError("batch_size must be > 0", "nn.invalid_hyperparams");
        if (!(l2_lambda >= 0.0)) throw ConfigError("l2_lambda must be >= 0", "nn.invalid_hyperparams");
    }
};

inline TrainHyperparams default_pretrain_hyperparams() { return {0.1, 200, 16, 1e-4, 1}; }
inline TrainHyperparams default_supervised_hyperparams() { return {0.05, 500, 16, 1e-4, 1}; }

inline void to_json(nlohmann::json& j, const TrainHyperparams& h) {
    j = {{"learning_rate", h.learning_rate},
         {"epochs", h.epochs},
         {"batch_size", h.batch_size},
         {"l2_lambda", h.l2_lambda},
         {"seed", h.seed}};
}
inline void from_json(const nlohmann::json& j, TrainHyperparams& h) {
    h.learning_rate = j.value("learning_rate", h.learning_rate);
    h.epochs = j.value("epochs", h.epochs);
    h.batch_size = j.value("batch_size", h.batch_size);
    h.l2_lambda = j.value("l2_lambda", h.l2_lambda);
    h.seed = j.value("seed", h.seed);
    h.validate();
}

/// splitmix64 finalizer; used to derive independent seeds from one master seed.
inline std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b = 0) noexcept {
    std::uint64_t z = a + 0x9E3779B97F4A7C15ull * (b + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

/// Glorot-uniform weights, zero biases.
inline void init_layer(LayerWeights& layer, std::mt19937_64& rng) {
    const double s = std::sqrt(6.0 / static_cast<double>(layer.in + layer.out));
    std::uniform_real_distribution<double> dist(-s, s);
    for (auto& w : layer.weights) w = dist(rng);
    std::fill(layer.bias.begin(), layer.bias.end(), 0.0);
}

inline SaeNetwork init_network(const Architecture& arch, std::uint64_t seed) {
    if (arch.input_dim == 0 || arch.head_hidden == 0) throw InvalidArchitecture("layer sizes must be > 0");
    if (arch.encoder_sizes.empty()) throw InvalidArchitecture("need at least one encoder layer");
    for (auto s : arch.encoder_sizes)
        if (s == 0) throw InvalidArchitecture("layer sizes must be > 0");

    std::mt19937_64 rng(seed);
    SaeNetwork net;
    std::size_t prev = arch.input_dim;
    for (auto s : arch.encoder_sizes) {
        net.encoder_layers.emplace_back(prev, s, Activation::sigmoid);
        init_layer(net.encoder_layers.back(), rng);
        prev = s;
    }
    net.head_hidden = LayerWeights(prev, arch.head_hidden, Activation::sigmoid);
    init_layer(net.head_hidden, rng);
    net.head_output = LayerWeights(arch.head_hidden, 1, Activation::linear);
    init_layer(net.head_output, rng);
    return net;
}

/// Encoder stack output for one input.
inline std::vector<double> encode(std::span<const LayerWeights> encoders, std::span<const double> x) {
    std::vector<double> cur(x.begin(), x.end());
    for (const auto& l : encoders) cur = l.forward(cur);
    return cur;
}

/// Predicted (normalized) speed.
inline double forward(const SaeNetwork& net, std::span<const double> x) {
    if (x.size() != net.input_dim()) throw DimensionMismatch(net.input_dim(), x.size());
    auto h = encode(net.encoder_layers, x);
    h = net.head_hidden.forward(h);
    return net.head_output.forward(h)[0];
}

// ---------------------------------------------------------------------------
// Backpropagation over a chain of layers with mean squared error loss:
//   L = 1/(B*D) * sum_b sum_d (y_bd - t_bd)^2  (+ l2/2 * |W|^2 over trainable weights)

namespace detail {

struct Gradients {
    std::vector<std::vector<double>> dw;
    std::vector<std::vector<double>> db;

    explicit Gradients(std::span<LayerWeights* const> layers) {
        for (const auto* l : layers) {
            dw.emplace_back(l->weights.size(), 0.0);
            db.emplace_back(l->bias.size(), 0.0);
        }
    }
    void zero() {
        for (auto& v : dw) std::fill(v.begin(), v.end(), 0.0);
        for (auto& v : db) std::fill(v.begin(), v.end(), 0.0);
    }
};

/// Scratch buffers for one pass through a chain.
class ChainWorkspace {
public:
    explicit ChainWorkspace(std::span<LayerWeights* const> layers) {
        for (const auto* l : layers) {
            acts_.emplace_back(l->out, 0.0);
            deltas_.emplace_back(l->out, 0.0);
        }
    }

    std::span<const double> run(std::span<LayerWeights* const> layers, std::span<const double> x) {
        std::span<const double> cur = x;
        for (std::size_t i = 0; i < layers.size(); ++i) {
            layers[i]->forward(cur, acts_[i]);
            cur = acts_[i];
        }
        return cur;
    }

    /// Forward + backward for one sample; accumulates parameter gradients for
    /// layers with index >= first_trainable. `scale` is dL/d(sq. error).
    /// Returns the sample's sum of squared errors.
    double accumulate(std::span<LayerWeights* const> layers, std::span<const double> x, std::span<const double> target,
                      double scale, std::size_t first_trainable, Gradients& g) {
        const auto y = run(layers, x);
        const std::size_t top = layers.size() - 1;
        double sse = 0.0;
        for (std::size_t d = 0; d < y.size(); ++d) {
            const double e = y[d] - target[d];
            sse += e * e;
            deltas_[top][d] = 2.0 * e * scale;
        }
        for (std::size_t li = top + 1; li-- > first_trainable;) {
            const LayerWeights& L = *layers[li];
            auto& delta = deltas_[li];
            if (L.activation == Activation::sigmoid)
                for (std::size_t o = 0; o < L.out; ++o) delta[o] *= acts_[li][o] * (1.0 - acts_[li][o]);
            const std::span<const double> input = li == 0 ? x : std::span<const double>(acts_[li - 1]);
            auto& dw = g.dw[li];
            auto& db = g.db[li];
            for (std::size_t o = 0; o < L.out; ++o) {
                const double dlt = delta[o];
                db[o] += dlt;
                double* row = dw.data() + o * L.in;
                for (std::size_t i = 0; i < L.in; ++i) row[i] += dlt * input[i];
            }
            if (li > first_trainable) {
                auto& below = deltas_[li - 1];
                std::fill(below.begin(), below.end(), 0.0);
                for (std::size_t o = 0; o < L.out; ++o) {
                    const double dlt = delta[o];
                    const double* row = L.weights.data() + o * L.in;
                    for (std::size_t i = 0; i < L.in; ++i) below[i] += row[i] * dlt;
                }
            }
        }
        return sse;
    }

private:
    std::vector<std::vector<double>> acts_;
    std::vector<std::vector<double>> deltas_;
};

inline double chain_mse(std::span<LayerWeights* const> layers, std::span<const std::vector<double>> inputs,
                        std::span<const std::vector<double>> targets) {
    ChainWorkspace ws(layers);
    double sse = 0.0;
    std::size_t count = 0;
    for (std::size_t s = 0; s < inputs.size(); ++s) {
        const auto y = ws.run(layers, inputs[s]);
        for (std::size_t d = 0; d < y.size(); ++d) {
            const double e = y[d] - targets[s][d];
            sse += e * e;
        }
        count += y.size();
    }
    return count ? sse / static_cast<double>(count) : 0.0;
}

/// Mini-batch gradient descent on the chain; layers below first_trainable
/// stay bit-identical. Returns full-dataset MSE after every epoch.
inline std::vector<double> train_chain(std::span<LayerWeights* const> layers, std::span<const std::vector<double>> inputs,
                                       std::span<const std::vector<double>> targets, const TrainHyperparams& hp,
                                       std::size_t first_trainable) {
    hp.validate();
    std::vector<double> curve;
    if (inputs.empty() || hp.epochs == 0) return curve;
    const std::size_t n = inputs.size();
    const std::size_t out_dim = layers.back()->out;

    std::mt19937_64 rng(hp.seed);
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;

    ChainWorkspace ws(layers);
    Gradients g(layers);
    curve.reserve(hp.epochs);
    for (std::size_t epoch = 0; epoch < hp.epochs; ++epoch) {
        for (std::size_t i = n; i > 1; --i) std::swap(order[i - 1], order[rng() % i]);
        for (std::size_t start = 0; start < n; start += hp.batch_size) {
            const std::size_t stop = std::min(n, start + hp.batch_size);
            const double scale = 1.0 / static_cast<double>((stop - start) * out_dim);
            g.zero();
            for (std::size_t b = start; b < stop; ++b)
                ws.accumulate(layers, inputs[order[b]], targets[order[b]], scale, first_trainable, g);
            for (std::size_t li = first_trainable; li < layers.size(); ++li) {
                auto& L = *layers[li];
                for (std::size_t k = 0; k < L.weights.size(); ++k)
                    L.weights[k] -= hp.learning_rate * (g.dw[li][k] + hp.l2_lambda * L.weights[k]);
                for (std::size_t k = 0; k < L.bias.size(); ++k) L.bias[k] -= hp.learning_rate * g.db[li][k];
            }
        }
        const double loss = chain_mse(layers, inputs, targets);
        if (!std::isfinite(loss)) throw NonFiniteLoss(epoch);
        curve.push_back(loss);
    }
    return curve;
}

inline void check_dims(std::span<const std::vector<double>> data, std::size_t dim) {
    for (const auto& v : data)
        if (v.size() != dim) throw DimensionMismatch(dim, v.size());
}

} // namespace detail

// ---------------------------------------------------------------------------
// Greedy layer-wise pretraining

struct AutoencoderResult {
    LayerWeights encoder;
    double initial_mse = 0.0;
    double final_mse = 0.0;
    std::vector<double> loss_curve;
};

/// Trains a sigmoid encoder/decoder pair (untied weights) to reconstruct
/// `data`; the decoder is discarded.
inline AutoencoderResult train_autoencoder_layer(std::span<const std::vector<double>> data, std::size_t hidden_size,
                                                 const TrainHyperparams& hp) {
    if (data.empty()) throw EmptyTrainingSet();
    if (hidden_size == 0) throw InvalidArchitecture("hidden size must be > 0");
    const std::size_t dim = data.front().size();
    if (dim == 0) throw InvalidArchitecture("input dimension must be > 0");
    detail::check_dims(data, dim);

    std::mt19937_64 rng(mix_seed(hp.seed, 0xAE));
    LayerWeights enc(dim, hidden_size, Activation::sigmoid);
    LayerWeights dec(hidden_size, dim, Activation::sigmoid);
    init_layer(enc, rng);
    init_layer(dec, rng);

    std::array<LayerWeights*, 2> chain{&enc, &dec};
    AutoencoderResult res;
    res.initial_mse = detail::chain_mse(chain, data, data);
    res.loss_curve = detail::train_chain(chain, data, data, hp, 0);
    res.final_mse = res.loss_curve.empty() ? res.initial_mse : res.loss_curve.back();
    res.encoder = std::move(enc);
    return res;
}

struct PretrainResult {
    std::vector<LayerWeights> encoders;
    std::vector<AutoencoderResult> layers; ///< per-layer diagnostics (encoder copies included)
};

/// Trains layer 1 on the data, layer 2 on layer-1 encodings, and so on.
inline PretrainResult pretrain_sae(std::span<const std::vector<double>> data, std::span<const std::size_t> layer_sizes,
                                   const TrainHyperparams& hp) {
    PretrainResult out;
    if (layer_sizes.empty()) return out;
    if (data.empty()) throw EmptyTrainingSet();
    std::vector<std::vector<double>> cur(data.begin(), data.end());
    for (std::size_t l = 0; l < layer_sizes.size(); ++l) {
        TrainHyperparams lhp = hp;
        lhp.seed = mix_seed(hp.seed, l);
        auto r = train_autoencoder_layer(cur, layer_sizes[l], lhp);
        for (auto& v : cur) v = r.encoder.forward(v);
        out.encoders.push_back(r.encoder);
        out.layers.push_back(std::move(r));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Supervised training of the regression head

struct PredictorResult {
    SaeNetwork net;
    std::vector<double> loss_curve;
};

/// Fits the network to normalized targets. The head always trains; encoder
/// layers train only with fine_tune_encoder, otherwise they stay bit-identical.
inline PredictorResult train_predictor(SaeNetwork net, std::span<const std::vector<double>> inputs,
                                       std::span<const double> targets, const TrainHyperparams& hp,
                                       bool fine_tune_encoder) {
    if (inputs.size() != targets.size()) throw LengthMismatch(inputs.size(), targets.size());
    detail::check_dims(inputs, net.input_dim());
    std::vector<std::vector<double>> t;
    t.reserve(targets.size());
    for (double v : targets) t.push_back({v});

    PredictorResult res;
    if (fine_tune_encoder) {
        auto chain = net.layers();
        res.loss_curve = detail::train_chain(chain, inputs, t, hp, 0);
    } else {
        std::vector<std::vector<double>> codes;
        codes.reserve(inputs.size());
        for (const auto& x : inputs) codes.push_back(encode(net.encoder_layers, x));
        std::array<LayerWeights*, 2> head{&net.head_hidden, &net.head_output};
        res.loss_curve = detail::train_chain(head, codes, t, hp, 0);
    }
    res.net = std::move(net);
    return res;
}

// ---------------------------------------------------------------------------
// Gradient check

/// Max relative error between backprop and central finite differences of the
/// single-sample loss (y - target)^2 over every weight and bias.
inline double gradient_check(const SaeNetwork& net, std::span<const double> x, double target, double epsilon) {
    if (!(epsilon > 0.0 && epsilon <= 1e-2)) throw ConfigError("epsilon must be in (0, 1e-2]", "nn.invalid_epsilon");
    if (x.size() != net.input_dim()) throw DimensionMismatch(net.input_dim(), x.size());

    SaeNetwork work = net;
    auto chain = work.layers();
    detail::ChainWorkspace ws(chain);
    detail::Gradients g(chain);
    const std::array<double, 1> t{target};
    ws.accumulate(chain, x, t, 1.0, 0, g);

    // reference loss in extended precision so tiny gradients are not lost to roundoff
    using ld = long double;
    std::vector<std::vector<ld>> W, B;
    for (const auto* l : chain) {
        W.emplace_back(l->weights.begin(), l->weights.end());
        B.emplace_back(l->bias.begin(), l->bias.end());
    }
    std::vector<ld> cur, next;
    const auto loss = [&]() {
        cur.assign(x.begin(), x.end());
        for (std::size_t li = 0; li < chain.size(); ++li) {
            const auto& L = *chain[li];
            next.assign(L.out, 0.0L);
            for (std::size_t o = 0; o < L.out; ++o) {
                ld z = B[li][o];
                for (std::size_t i = 0; i < L.in; ++i) z += W[li][o * L.in + i] * cur[i];
                next[o] = L.activation == Activation::sigmoid ? 1.0L / (1.0L + std::exp(-z)) : z;
            }
            std::swap(cur, next);
        }
        const ld e = cur[0] - static_cast<ld>(target);
        return e * e;
    };
    double worst = 0.0;
    const auto compare = [&](ld& param, double analytic) {
        const ld saved = param;
        param = saved + epsilon;
        const ld up = loss();
        param = saved - epsilon;
        const ld down = loss();
        param = saved;
        const double numeric = static_cast<double>((up - down) / (2.0L * epsilon));
        const double rel = std::abs(analytic - numeric) / std::max({std::abs(analytic), std::abs(numeric), 1e-12});
        worst = std::max(worst, rel);
    };
    for (std::size_t li = 0; li < chain.size(); ++li) {
        for (std::size_t k = 0; k < W[li].size(); ++k) compare(W[li][k], g.dw[li][k]);
        for (std::size_t k = 0; k < B[li].size(); ++k) compare(B[li][k], g.db[li][k]);
    }
    return worst;
}

// ---------------------------------------------------------------------------
// Trained model bundle and its JSON file

struct TrainedModel {
    SaeNetwork net;
    FeatureConfig features;
    Normalizer input_norm;
    Normalizer target_norm;

    /// Speed in m/s for a raw (unnormalized) feature vector.
    double predict_mps(std::span<const double> raw) const {
        const auto x = input_norm.apply(raw);
        return target_norm.invert(0, forward(net, x));
    }
};

inline nlohmann::json layer_to_json(const LayerWeights& l, const std::string& role) {
    return {{"role", role},     {"in", l.in},           {"out", l.out}, {"activation", to_string(l.activation)},
            {"weights", l.weights}, {"bias", l.bias}};
}

inline LayerWeights layer_from_json(const nlohmann::json& j) {
    LayerWeights l(j.at("in").get<std::size_t>(), j.at("out").get<std::size_t>(),
                   activation_from_string(j.at("activation").get<std::string>()));
    l.weights = j.at("weights").get<std::vector<double>>();
    l.bias = j.at("bias").get<std::vector<double>>();
    if (l.weights.size() != l.in * l.out || l.bias.size() != l.out)
        throw InvalidArchitecture("layer weight array sizes do not match declared dimensions");
    if (!l.finite()) throw InvalidArchitecture("non-finite weight in model file");
    return l;
}

inline nlohmann::json model_to_json(const TrainedModel& m) {
    const auto arch = m.net.architecture();
    nlohmann::json layers = nlohmann::json::array();
    for (const auto& l : m.net.encoder_layers) layers.push_back(layer_to_json(l, "encoder"));
    layers.push_back(layer_to_json(m.net.head_hidden, "head_hidden"));
    layers.push_back(layer_to_json(m.net.head_output, "head_output"));
    return {{"format", "speedprof-model"},
            {"version", 1},
            {"architecture",
             {{"input_dim", arch.input_dim}, {"encoder_sizes", arch.encoder_sizes}, {"head_hidden", arch.head_hidden}}},
            {"feature_config", m.features},
            {"input_normalizer", m.input_norm},
            {"target_normalizer", m.target_norm},
            {"layers", layers}};
}

inline TrainedModel model_from_json(const nlohmann::json& j) {
    if (j.value("format", "") != "speedprof-model") throw InvalidArchitecture("not a speedprof model document");
    TrainedModel m;
    m.features = j.at("feature_config").get<FeatureConfig>();
    m.input_norm = j.at("input_normalizer").get<Normalizer>();
    m.target_norm = j.at("target_normalizer").get<Normalizer>();
    for (const auto& lj : j.at("layers")) {
        const auto role = lj.at("role").get<std::string>();
        if (role == "encoder") m.net.encoder_layers.push_back(layer_from_json(lj));
        else if (role == "head_hidden") m.net.head_hidden = layer_from_json(lj);
        else if (role == "head_output") m.net.head_output = layer_from_json(lj);
        else throw InvalidArchitecture("unknown layer role '" + role + "'");
    }
    Architecture declared;
    declared.input_dim = j.at("architecture").at("input_dim").get<std::size_t>();
    declared.encoder_sizes = j.at("architecture").at("encoder_sizes").get<std::vector<std::size_t>>();
    declared.head_hidden = j.at("architecture").at("head_hidden").get<std::size_t>();
    if (!(declared == m.net.architecture())) throw InvalidArchitecture("layer stack does not match declared architecture");
    std::size_t prev = declared.input_dim;
    for (const auto* l : m.net.layers()) {
        if (l->in != prev) throw InvalidArchitecture("inconsistent layer dimensions");
        prev = l->out;
    }
    if (prev != 1) throw InvalidArchitecture("head output must be scalar");
    if (declared.input_dim != input_dimension(m.features) || m.input_norm.dimension() != declared.input_dim)
        throw InvalidArchitecture("feature config does not match network input");
    return m;
}

inline void write_model(const TrainedModel& m, const std::filesystem::path& path) {
    text::write_file(path, model_to_json(m).dump(1) + "\n");
}

inline TrainedModel read_model(const std::filesystem::path& path) {
    try {
        return model_from_json(nlohmann::json::parse(text::read_file(path)));
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(path.string(), 0, "", e.what());
    }
}

} // namespace speedprof::nn
