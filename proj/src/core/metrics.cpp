#include "core/metrics.hpp"

#include <algorithm>
#include <cstdio>
#include <set>
#include <sstream>
#include <unordered_map>

#include <nlohmann/json.hpp>

#include "core/error.hpp"

namespace isic {

using nlohmann::json;

namespace {

std::unordered_map<std::string, std::size_t> index_labels(std::span<const std::string> K) {
    if (K.empty()) throw Error(ErrorCode::InvalidArgument, "label set K is empty");
    std::unordered_map<std::string, std::size_t> index;
    for (std::size_t i = 0; i < K.size(); ++i) {
        if (!index.emplace(K[i], i).second) {
            throw Error(ErrorCode::InvalidArgument, "duplicate label '" + K[i] + "' in K");
        }
    }
    return index;
}

std::size_t lookup(const std::unordered_map<std::string, std::size_t>& index, const std::string& label,
                   const char* role) {
    auto it = index.find(label);
    if (it == index.end()) {
        throw Error(ErrorCode::InvalidArgument,
                    std::string(role) + " label '" + label + "' is outside K");
    }
    return it->second;
}

std::string percent2(double fraction) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f%%", fraction * 100.0);
    return buf;
}

std::string fixed4(double value) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.4f", value);
    return buf;
}

}  // namespace

ConfusionTally confusion_tallies(std::span<const std::string> truths,
                                 std::span<const std::string> predictions,
                                 std::span<const std::string> K) {
    if (truths.size() != predictions.size()) {
        throw Error(ErrorCode::InvalidArgument,
                    "truths and predictions differ in length (" + std::to_string(truths.size()) + " vs " +
                        std::to_string(predictions.size()) + ")");
    }
    auto index = index_labels(K);
    ConfusionTally tally;
    tally.labels.assign(K.begin(), K.end());
    tally.n = truths.size();
    tally.tp.assign(K.size(), 0);
    tally.tn.assign(K.size(), 0);
    tally.fp.assign(K.size(), 0);
    tally.fn.assign(K.size(), 0);
    for (std::size_t i = 0; i < truths.size(); ++i) {
        std::size_t t = lookup(index, truths[i], "truth");
        std::size_t p = lookup(index, predictions[i], "prediction");
        for (std::size_t k = 0; k < K.size(); ++k) {
            const bool is_truth = (k == t);
            const bool is_pred = (k == p);
            if (is_truth && is_pred) ++tally.tp[k];
            else if (is_truth) ++tally.fn[k];
            else if (is_pred) ++tally.fp[k];
            else ++tally.tn[k];
        }
    }
    return tally;
}

double accuracy(std::span<const std::string> truths, std::span<const std::string> predictions) {
    if (truths.size() != predictions.size()) {
        throw Error(ErrorCode::InvalidArgument, "truths and predictions differ in length");
    }
    if (truths.empty()) throw Error(ErrorCode::InvalidArgument, "accuracy of an empty prediction list");
    std::size_t correct = 0;
    for (std::size_t i = 0; i < truths.size(); ++i) {
        if (truths[i] == predictions[i]) ++correct;
    }
    return static_cast<double>(correct) / static_cast<double>(truths.size());
}

double one_vs_rest_accuracy(const ConfusionTally& tally) {
    if (tally.n == 0) throw Error(ErrorCode::InvalidArgument, "one_vs_rest_accuracy with n = 0");
    std::size_t hits = 0;
    for (std::size_t k = 0; k < tally.labels.size(); ++k) {
        hits += tally.tp[k] + tally.tn[k];
    }
    return static_cast<double>(hits) / static_cast<double>(tally.n * tally.labels.size());
}

ClassMetrics per_class_prf(const ConfusionTally& tally) {
    if (tally.n == 0) throw Error(ErrorCode::InvalidArgument, "per-class metrics with n = 0");
    ClassMetrics m;
    m.labels = tally.labels;
    const std::size_t k_count = tally.labels.size();
    m.precision.resize(k_count);
    m.recall.resize(k_count);
    m.f1.resize(k_count);
    m.support.resize(k_count);
    for (std::size_t k = 0; k < k_count; ++k) {
        const double tp = static_cast<double>(tally.tp[k]);
        const double fp = static_cast<double>(tally.fp[k]);
        const double fn = static_cast<double>(tally.fn[k]);
        m.precision[k] = (tp + fp) > 0.0 ? tp / (tp + fp) : 0.0;
        m.recall[k] = (tp + fn) > 0.0 ? tp / (tp + fn) : 0.0;
        const double pr = m.precision[k] + m.recall[k];
        m.f1[k] = pr > 0.0 ? 2.0 * m.precision[k] * m.recall[k] / pr : 0.0;
        m.support[k] = tally.tp[k] + tally.fn[k];
    }
    return m;
}

WeightedMetrics weighted_aggregate(const ClassMetrics& metrics) {
    double total = 0.0;
    WeightedMetrics w;
    for (std::size_t k = 0; k < metrics.labels.size(); ++k) {
        const double s = static_cast<double>(metrics.support[k]);
        w.precision += metrics.precision[k] * s;
        w.recall += metrics.recall[k] * s;
        w.f1 += metrics.f1[k] * s;
        total += s;
    }
    if (total == 0.0) throw Error(ErrorCode::InvalidArgument, "zero total support");
    w.precision /= total;
    w.recall /= total;
    w.f1 /= total;
    return w;
}

EvaluationReport classification_report(std::span<const std::string> truths,
                                       std::span<const std::string> predictions,
                                       std::span<const std::string> K) {
    if (truths.empty()) throw Error(ErrorCode::InvalidArgument, "empty evaluation input");
    ConfusionTally tally = confusion_tallies(truths, predictions, K);
    EvaluationReport report;
    report.n = tally.n;
    report.accuracy = accuracy(truths, predictions);
    report.one_vs_rest_accuracy = one_vs_rest_accuracy(tally);
    report.per_class = per_class_prf(tally);
    WeightedMetrics w = weighted_aggregate(report.per_class);
    report.precision_weighted = w.precision;
    report.recall_weighted = w.recall;
    report.f1_weighted = w.f1;
    return report;
}

std::string render_headline(const EvaluationReport& report) {
    static const char* headers[4] = {"Accuracy", "Precision weighted", "Recall weighted", "F1 weighted"};
    const std::string values[4] = {percent2(report.accuracy), percent2(report.precision_weighted),
                                   percent2(report.recall_weighted), percent2(report.f1_weighted)};
    std::string line1, line2;
    for (int i = 0; i < 4; ++i) {
        if (i) {
            line1 += "  ";
            line2 += "  ";
        }
        std::size_t width = std::string(headers[i]).size();
        line1 += headers[i];
        line2 += std::string(width - values[i].size(), ' ') + values[i];
    }
    return line1 + "\n" + line2 + "\n";
}

std::string render_report(const EvaluationReport& report) {
    std::ostringstream out;
    out << render_headline(report) << '\n';
    std::size_t label_width = 5;  // "label"
    for (const std::string& label : report.per_class.labels) {
        label_width = std::max(label_width, label.size());
    }
    out << std::string(label_width - 5, ' ') << "label  precision  recall  f1-score  support\n";
    for (std::size_t k = 0; k < report.per_class.labels.size(); ++k) {
        const std::string& label = report.per_class.labels[k];
        out << std::string(label_width - label.size(), ' ') << label;
        out << "     " << fixed4(report.per_class.precision[k]);
        out << "  " << fixed4(report.per_class.recall[k]);
        out << "    " << fixed4(report.per_class.f1[k]);
        std::string s = std::to_string(report.per_class.support[k]);
        out << "  " << std::string(s.size() < 7 ? 7 - s.size() : 0, ' ') << s << '\n';
    }
    out << "\nsamples: " << report.n << "   one-vs-rest accuracy: " << percent2(report.one_vs_rest_accuracy)
        << '\n';
    return out.str();
}

json report_to_json(const EvaluationReport& report) {
    json per_class = json::array();
    for (std::size_t k = 0; k < report.per_class.labels.size(); ++k) {
        per_class.push_back({{"label", report.per_class.labels[k]},
                             {"precision", report.per_class.precision[k]},
                             {"recall", report.per_class.recall[k]},
                             {"f1", report.per_class.f1[k]},
                             {"support", report.per_class.support[k]}});
    }
    return json{{"accuracy", report.accuracy},
                {"precision_weighted", report.precision_weighted},
                {"recall_weighted", report.recall_weighted},
                {"f1_weighted", report.f1_weighted},
                {"one_vs_rest_accuracy", report.one_vs_rest_accuracy},
                {"n", report.n},
                {"per_class", per_class}};
}

EvaluationReport report_from_json(const json& j) {
    EvaluationReport report;
    try {
        report.accuracy = j.at("accuracy").get<double>();
        report.precision_weighted = j.at("precision_weighted").get<double>();
        report.recall_weighted = j.at("recall_weighted").get<double>();
        report.f1_weighted = j.at("f1_weighted").get<double>();
        report.one_vs_rest_accuracy = j.at("one_vs_rest_accuracy").get<double>();
        report.n = j.at("n").get<std::size_t>();
        for (const json& row : j.at("per_class")) {
            report.per_class.labels.push_back(row.at("label").get<std::string>());
            report.per_class.precision.push_back(row.at("precision").get<double>());
            report.per_class.recall.push_back(row.at("recall").get<double>());
            report.per_class.f1.push_back(row.at("f1").get<double>());
            report.per_class.support.push_back(row.at("support").get<std::size_t>());
        }
    } catch (const json::exception& e) {
        throw Error(ErrorCode::Parse, std::string("bad evaluation report: ") + e.what());
    }
    return report;
}

}  // namespace isic
