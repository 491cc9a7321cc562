#pragma once

#include <span>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

namespace isic {

// One-vs-rest counts per class. For every k: tp+tn+fp+fn = n.
struct ConfusionTally {
    std::vector<std::string> labels;
    std::vector<std::size_t> tp, tn, fp, fn;
    std::size_t n = 0;
};

struct ClassMetrics {
    std::vector<std::string> labels;
    std::vector<double> precision, recall, f1;
    std::vector<std::size_t> support;  // tp + fn
};

struct WeightedMetrics {
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
};

struct EvaluationReport {
    double accuracy = 0.0;
    double precision_weighted = 0.0;
    double recall_weighted = 0.0;
    double f1_weighted = 0.0;
    double one_vs_rest_accuracy = 0.0;  // diagnostic; >= accuracy for |K| >= 2
    std::size_t n = 0;
    ClassMetrics per_class;
};

// Tallies one-vs-rest TP/TN/FP/FN per class. Truths and predictions must have
// equal length and every value must appear in `K` (unique labels).
ConfusionTally confusion_tallies(std::span<const std::string> truths,
                                 std::span<const std::string> predictions,
                                 std::span<const std::string> K);

// Fraction of positions where truth == prediction.
double accuracy(std::span<const std::string> truths, std::span<const std::string> predictions);

// sum_k (TP_k + TN_k) / (n * |K|). Summing TN across classes inflates this
// above plain accuracy whenever |K| > 2; kept as a diagnostic.
double one_vs_rest_accuracy(const ConfusionTally& tally);

// Per-class precision / recall / F1 with the 0/0 -> 0 convention.
ClassMetrics per_class_prf(const ConfusionTally& tally);

// Support-weighted means of the per-class metrics. Zero-support classes
// contribute nothing; zero total support is an error.
WeightedMetrics weighted_aggregate(const ClassMetrics& metrics);

EvaluationReport classification_report(std::span<const std::string> truths,
                                       std::span<const std::string> predictions,
                                       std::span<const std::string> K);

// Four headline metrics as percentages with two decimals, one header line and
// one value line.
std::string render_headline(const EvaluationReport& report);

// Headline plus the per-class table.
std::string render_report(const EvaluationReport& report);

nlohmann::json report_to_json(const EvaluationReport& report);
EvaluationReport report_from_json(const nlohmann::json& j);

}  // namespace isic
