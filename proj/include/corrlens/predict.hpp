#pragma once

// Name-only correlation predictors: the token-Jaccard baseline and a built-in
// logistic classifier over hashed text features.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "corrlens/error.hpp"
#include "corrlens/naming.hpp"
#include "corrlens/random.hpp"

namespace corrlens {

inline constexpr double kDecisionThreshold = 0.5;
inline constexpr std::string_view kDefaultSeparator = " [SEP] ";

struct Prediction {
    double score = 0.0;
    bool label = false;

    static Prediction from_score(double score, double threshold = kDecisionThreshold) noexcept {
        return {score, score >= threshold};
    }

    friend bool operator==(const Prediction&, const Prediction&) = default;
};

struct LabeledText {
    std::string text;
    bool label = false;
};

// ---------------------------------------------------------------------------
// Baseline

inline double jaccard_similarity(std::string_view name_a, std::string_view name_b) {
    const auto ta = tokenize(name_a);
    const auto tb = tokenize(name_b);
    const std::set<std::string> sa(ta.begin(), ta.end());
    const std::set<std::string> sb(tb.begin(), tb.end());
    if (sa.empty() && sb.empty()) return 0.0;
    std::size_t common = 0;
    for (const auto& t : sa) common += sb.contains(t) ? 1 : 0;
    return static_cast<double>(common) / static_cast<double>(sa.size() + sb.size() - common);
}

// Predicts a correlation when the two token sets overlap by at least one half.
inline Prediction jaccard_baseline(std::string_view name_a, std::string_view name_b) {
    return Prediction::from_score(jaccard_similarity(name_a, name_b));
}

inline std::string encode_pair(std::string_view name_a, std::string_view name_b,
                               std::string_view separator = kDefaultSeparator) {
    std::string out = normalize(name_a);
    out.append(separator);
    out.append(normalize(name_b));
    return out;
}

// ---------------------------------------------------------------------------
// Hashed features

// Sparse feature vector: (index, value) with unique ascending indices.
using SparseVector = std::vector<std::pair<std::uint32_t, double>>;

struct FeatureConfig {
    std::uint32_t dimension = 1u << 18;
    std::size_t min_ngram = 2;
    std::size_t max_ngram = 4;
    std::string separator{kDefaultSeparator};
};

namespace detail {

inline std::vector<std::string> words_of(std::string_view text) {
    std::vector<std::string> out;
    std::size_t i = 0;
    while (i < text.size()) {
        while (i < text.size() && text[i] == ' ') ++i;
        std::size_t j = i;
        while (j < text.size() && text[j] != ' ') ++j;
        if (j > i) out.push_back(ascii_lower(text.substr(i, j - i)));
        i = j;
    }
    return out;
}

}  // namespace detail

// Maps encoded pair text to an L2-normalised sparse vector of hashed
// features: lowercase word tokens, character n-grams of each word (with
// boundary markers) and, when the separator is present, cross-side word pairs.
inline SparseVector featurize_text(std::string_view text, const FeatureConfig& cfg) {
    std::vector<std::uint32_t> hits;
    auto emit = [&](std::string_view kind, std::string_view feature) {
        hits.push_back(static_cast<std::uint32_t>(fnv1a(feature, fnv1a(kind)) % cfg.dimension));
    };

    std::string_view left = text;
    std::string_view right;
    const bool paired = !cfg.separator.empty() && text.find(cfg.separator) != std::string_view::npos;
    if (paired) {
        const auto pos = text.find(cfg.separator);
        left = text.substr(0, pos);
        right = text.substr(pos + cfg.separator.size());
    }
    const auto left_words = detail::words_of(left);
    const auto right_words = detail::words_of(right);

    for (const auto* side : {&left_words, &right_words}) {
        for (const auto& w : *side) {
            emit("w", w);
            const std::string padded = "<" + w + ">";
            for (std::size_t n = cfg.min_ngram; n <= cfg.max_ngram; ++n)
                for (std::size_t i = 0; i + n <= padded.size(); ++i)
                    emit("c", std::string_view(padded).substr(i, n));
        }
    }
    if (paired) {
        for (const auto& a : left_words) {
            for (const auto& b : right_words) {
                const bool ordered = a <= b;
                emit("x", (ordered ? a : b) + '\x1f' + (ordered ? b : a));
            }
        }
    }

    std::sort(hits.begin(), hits.end());
    SparseVector vec;
    for (std::size_t i = 0; i < hits.size();) {
        std::size_t j = i;
        while (j < hits.size() && hits[j] == hits[i]) ++j;
        vec.emplace_back(hits[i], static_cast<double>(j - i));
        i = j;
    }
    double norm = 0.0;
    for (const auto& [_, v] : vec) norm += v * v;
    if (norm > 0.0) {
        norm = std::sqrt(norm);
        for (auto& [_, v] : vec) v /= norm;
    }
    return vec;
}

// ---------------------------------------------------------------------------
// Logistic model

struct TrainingSample {
    SparseVector features;
    double target = 0.0;  // 0 or 1
};

inline double sigmoid(double z) noexcept {
    if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
    const double e = std::exp(z);
    return e / (1.0 + e);
}

// log(1 + exp(z)) without overflow.
inline double softplus(double z) noexcept {
    return z > 0.0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z));
}

inline double dot(std::span<const double> weights, const SparseVector& x) noexcept {
    double s = 0.0;
    for (const auto& [i, v] : x) s += weights[i] * v;
    return s;
}

// Mean log-loss plus (l2 / 2) * |w|^2.
inline double log_loss(std::span<const double> weights, double bias,
                       std::span<const TrainingSample> samples, double l2) {
    double loss = 0.0;
    for (const auto& s : samples) {
        const double z = dot(weights, s.features) + bias;
        // -y log(sigmoid z) - (1-y) log(1 - sigmoid z)
        loss += s.target * softplus(-z) + (1.0 - s.target) * softplus(z);
    }
    if (!samples.empty()) loss /= static_cast<double>(samples.size());
    double reg = 0.0;
    for (double w : weights) reg += w * w;
    return loss + 0.5 * l2 * reg;
}

struct Gradient {
    std::vector<double> weights;
    double bias = 0.0;
};

inline Gradient log_loss_gradient(std::span<const double> weights, double bias,
                                  std::span<const TrainingSample> samples, double l2) {
    Gradient g{std::vector<double>(weights.size(), 0.0), 0.0};
    const double scale = samples.empty() ? 0.0 : 1.0 / static_cast<double>(samples.size());
    for (const auto& s : samples) {
        const double residual = sigmoid(dot(weights, s.features) + bias) - s.target;
        for (const auto& [i, v] : s.features) g.weights[i] += scale * residual * v;
        g.bias += scale * residual;
    }
    for (std::size_t i = 0; i < weights.size(); ++i) g.weights[i] += l2 * weights[i];
    return g;
}

inline constexpr double kAdagradEpsilon = 1e-8;

struct Hyperparams {
    std::size_t epochs = 5;
    double learning_rate = 10.0;
    double l2 = 1e-6;
    std::size_t batch_size = 16;
    std::uint64_t seed = 0;
    double initial_accumulator = 1e-3;  // damps the first steps on rare features
};

struct BuiltinModel {
    FeatureConfig features;
    Hyperparams hyperparams;
    std::vector<double> weights;
    double bias = 0.0;
    std::vector<double> epoch_losses;  // full training-set loss after each epoch

    double score(std::string_view text) const {
        return sigmoid(dot(weights, featurize_text(text, features)) + bias);
    }
};

// Mini-batch AdaGrad on log-loss. The sample order is reshuffled every epoch
// from `hp.seed`. L2 decay is applied only to the weights a batch touches, so
// a step costs O(batch nonzeros) rather than O(dimension).
inline BuiltinModel train_builtin_samples(std::span<const TrainingSample> samples, const Hyperparams& hp,
                                          const FeatureConfig& features = {}) {
    if (samples.empty()) throw ArgumentError("train_builtin: empty training set");
    const bool has_pos = std::any_of(samples.begin(), samples.end(), [](const auto& s) { return s.target > 0.5; });
    const bool has_neg = std::any_of(samples.begin(), samples.end(), [](const auto& s) { return s.target <= 0.5; });
    if (!has_pos || !has_neg) throw ArgumentError("train_builtin: training set must contain both classes");
    if (hp.batch_size == 0) throw ArgumentError("train_builtin: batch_size must be positive");

    BuiltinModel model;
    model.features = features;
    model.hyperparams = hp;
    model.weights.assign(features.dimension, 0.0);

    std::vector<std::size_t> order(samples.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    Rng rng(hp.seed);
    std::vector<double> grad(features.dimension, 0.0);
    std::vector<double> sq_grad(features.dimension, hp.initial_accumulator);  // AdaGrad accumulators
    double bias_sq_grad = hp.initial_accumulator;
    std::vector<std::uint32_t> touched;

    for (std::size_t epoch = 0; epoch < hp.epochs; ++epoch) {
        shuffle(std::span(order), rng);
        for (std::size_t start = 0; start < order.size(); start += hp.batch_size) {
            const std::size_t end = std::min(order.size(), start + hp.batch_size);
            const double scale = 1.0 / static_cast<double>(end - start);
            double bias_grad = 0.0;
            touched.clear();
            for (std::size_t k = start; k < end; ++k) {
                const auto& s = samples[order[k]];
                const double residual = sigmoid(dot(model.weights, s.features) + model.bias) - s.target;
                for (const auto& [i, v] : s.features) {
                    if (grad[i] == 0.0) touched.push_back(i);
                    grad[i] += scale * residual * v;
                }
                bias_grad += scale * residual;
            }
            std::sort(touched.begin(), touched.end());
            touched.erase(std::unique(touched.begin(), touched.end()), touched.end());
            for (auto i : touched) {
                const double g = grad[i] + hp.l2 * model.weights[i];
                sq_grad[i] += g * g;
                model.weights[i] -= hp.learning_rate * g / (std::sqrt(sq_grad[i]) + kAdagradEpsilon);
                grad[i] = 0.0;
            }
            bias_sq_grad += bias_grad * bias_grad;
            model.bias -= hp.learning_rate * bias_grad / (std::sqrt(bias_sq_grad) + kAdagradEpsilon);
        }
        model.epoch_losses.push_back(log_loss(model.weights, model.bias, samples, 0.0));
    }
    for (double w : model.weights)
        if (!std::isfinite(w)) throw Error("train_builtin: weights diverged");
    return model;
}

inline std::vector<TrainingSample> to_samples(std::span<const LabeledText> data, const FeatureConfig& cfg) {
    std::vector<TrainingSample> samples;
    samples.reserve(data.size());
    for (const auto& d : data) samples.push_back({featurize_text(d.text, cfg), d.label ? 1.0 : 0.0});
    return samples;
}

inline BuiltinModel train_builtin(std::span<const LabeledText> data, const Hyperparams& hp = {},
                                  const FeatureConfig& features = {}) {
    const auto samples = to_samples(data, features);
    return train_builtin_samples(samples, hp, features);
}

inline std::vector<Prediction> predict_builtin(const BuiltinModel& model, std::span<const std::string> texts) {
    std::vector<Prediction> out;
    out.reserve(texts.size());
    for (const auto& t : texts) out.push_back(Prediction::from_score(model.score(t)));
    return out;
}

}  // namespace corrlens
