#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "core/embedding.hpp"

namespace isic {

// Affine map plus softmax over frozen embeddings; the only trained component.
// W is row-major |labels| x dim.
struct HeadWeights {
    std::vector<std::string> labels;
    std::size_t dim = 0;
    std::vector<double> W;
    std::vector<double> b;
    std::string provider_id;

    std::size_t class_count() const { return labels.size(); }
};

struct TrainConfig {
    double learning_rate = 0.001;
    int epochs = 30;
    int batch_size = 32;
    double adam_beta1 = 0.9;
    double adam_beta2 = 0.999;
    double adam_epsilon = 1e-8;
    std::uint64_t shuffle_seed = 0;

    void validate() const;  // throws InvalidArgument
};

// Bias-corrected first/second moment accumulators, shaped like (W, b).
struct AdamState {
    std::vector<double> m_w, v_w;
    std::vector<double> m_b, v_b;
    std::uint64_t step = 0;
};

struct TrainHistory {
    std::vector<double> step_losses;          // mean loss of each mini-batch, pre-update
    std::vector<double> epoch_mean_loss;      // exact per-example mean within the epoch
    std::vector<double> epoch_eval_accuracy;  // present when an eval set was given
};

// Zero-initialized weights: the objective is convex, so the start point only
// fixes determinism, and zero makes the initial prediction exactly uniform.
HeadWeights init_head(std::size_t dim, std::vector<std::string> labels);

// softmax(Wx + b), computed with max-logit subtraction.
std::vector<double> forward(const HeadWeights& weights, std::span<const double> x);

// -log(p[true_index]) with p floored at 1e-15.
double cross_entropy(std::span<const double> probabilities, std::size_t true_index);

struct Gradients {
    std::vector<double> dW;  // row-major, same shape as W
    std::vector<double> db;
};

// Closed-form softmax cross-entropy derivative: with e = p - onehot(true),
// db = e and dW = outer(e, x).
Gradients gradients(const HeadWeights& weights, std::span<const double> x, std::size_t true_index);

// One bias-corrected Adam update, applied elementwise to W and b.
void adam_step(HeadWeights& weights, AdamState& state, const Gradients& grads, const TrainConfig& config);

using EmbeddedExample = std::pair<Vec, std::string>;

// Mini-batch training over precomputed embeddings: seeded per-epoch shuffle,
// mean-reduced batch gradients, one Adam step per batch. Deterministic for a
// fixed (data, labels, config). If eval examples are given, argmax accuracy
// on them is recorded after every epoch.
std::pair<HeadWeights, TrainHistory> train_head(const std::vector<EmbeddedExample>& train_examples,
                                                const std::vector<std::string>& labels,
                                                const TrainConfig& config,
                                                const std::vector<EmbeddedExample>* eval_examples = nullptr);

// Full ranking by descending probability, ties by ascending code.
std::vector<std::pair<std::string, double>> rank_labels(const HeadWeights& weights,
                                                        std::span<const double> x);

// Embeds `text` with `provider` and returns the top_n ranked labels. The
// provider must match the weights' provider id.
std::vector<std::pair<std::string, double>> predict(const HeadWeights& weights, EmbeddingProvider& provider,
                                                    const std::string& text, std::size_t top_n);

// Weights bundle schema (version 1): provider id, dim, labels, row-major W,
// b, the training config, and evaluation metrics. Loading validates shapes.
nlohmann::json weights_to_json(const HeadWeights& weights, const TrainConfig& config,
                               const nlohmann::json& metrics);
HeadWeights weights_from_json(const nlohmann::json& j, TrainConfig* config_out = nullptr,
                              nlohmann::json* metrics_out = nullptr);

nlohmann::json train_config_to_json(const TrainConfig& config);
TrainConfig train_config_from_json(const nlohmann::json& j);  // unknown keys rejected

}  // namespace isic
