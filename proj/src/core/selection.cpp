#include "core/selection.hpp"

#include <algorithm>
#include <cstdio>

#include <nlohmann/json.hpp>

#include "core/dataset.hpp"
#include "core/embedding.hpp"
#include "core/error.hpp"
#include "core/taxonomy.hpp"

namespace isic {

using nlohmann::json;

ProviderScore evaluate_provider(EmbeddingProvider& provider, const Taxonomy& taxonomy,
                                const Dataset& eval_set) {
    if (eval_set.empty()) throw Error(ErrorCode::InvalidArgument, "empty evaluation set");
    for (std::size_t i = 0; i < eval_set.examples.size(); ++i) {
        auto level = code_level(eval_set.examples[i].label);
        if (!level || *level != Level::Division) {
            throw Error(ErrorCode::InvalidArgument,
                        "example " + std::to_string(i + 1) + ": label '" + eval_set.examples[i].label +
                            "' is not division-level; coarsen the dataset first");
        }
    }
    LabelSpace space = label_space(eval_set);
    CategoryRepository repo = build_category_repository(taxonomy, space.labels, provider);

    ProviderScore score;
    score.provider_id = provider.id();
    score.evaluated_count = eval_set.size();

    // Chunked embedding so a mid-run provider failure reports progress.
    const std::size_t chunk = 64;
    std::size_t done = 0;
    for (std::size_t begin = 0; begin < eval_set.size(); begin += chunk) {
        std::size_t end = std::min(begin + chunk, eval_set.size());
        std::vector<std::string> texts;
        texts.reserve(end - begin);
        for (std::size_t i = begin; i < end; ++i) texts.push_back(eval_set.examples[i].activity_name);
        std::vector<Vec> vectors;
        try {
            vectors = provider.embed_batch(texts);
        } catch (const Error& e) {
            if (e.code() == ErrorCode::Provider) {
                throw Error(ErrorCode::Provider,
                            "provider '" + provider.id() + "' failed after " + std::to_string(done) + " of " +
                                std::to_string(eval_set.size()) + " evaluations: " + e.what());
            }
            throw;
        }
        for (std::size_t i = begin; i < end; ++i) {
            auto [predicted, sim] = nearest_category(repo, vectors[i - begin]);
            (void)sim;
            if (predicted == eval_set.examples[i].label) ++score.correct;
            ++done;
        }
    }
    score.accuracy = static_cast<double>(score.correct) / static_cast<double>(score.evaluated_count);
    return score;
}

SelectionReport select_model(const std::vector<EmbeddingProvider*>& providers, const Taxonomy& taxonomy,
                             const Dataset& eval_set) {
    if (providers.empty()) throw Error(ErrorCode::InvalidArgument, "empty provider list");
    SelectionReport report;
    report.scores.reserve(providers.size());
    for (EmbeddingProvider* provider : providers) {
        report.scores.push_back(evaluate_provider(*provider, taxonomy, eval_set));
    }
    std::sort(report.scores.begin(), report.scores.end(), [](const ProviderScore& a, const ProviderScore& b) {
        if (a.accuracy != b.accuracy) return a.accuracy > b.accuracy;
        return a.provider_id < b.provider_id;
    });
    report.winner = report.scores.front().provider_id;
    return report;
}

std::string render_selection(const SelectionReport& report) {
    std::size_t name_width = 5;  // "Model"
    for (const ProviderScore& s : report.scores) name_width = std::max(name_width, s.provider_id.size());
    std::string out = "Model" + std::string(name_width - 5, ' ') + "  Accuracy\n";
    for (const ProviderScore& s : report.scores) {
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%.2f%%", s.accuracy * 100.0);
        std::string value(buf);
        out += s.provider_id + std::string(name_width - s.provider_id.size(), ' ');
        out += "  " + std::string(8 - value.size(), ' ') + value + "\n";
    }
    return out;
}

json selection_to_json(const SelectionReport& report) {
    json scores = json::array();
    for (const ProviderScore& s : report.scores) {
        scores.push_back({{"provider_id", s.provider_id},
                          {"accuracy", s.accuracy},
                          {"evaluated_count", s.evaluated_count}});
    }
    return json{{"scores", scores}, {"winner", report.winner}};
}

SelectionReport selection_from_json(const json& j) {
    SelectionReport report;
    try {
        for (const json& row : j.at("scores")) {
            ProviderScore s;
            s.provider_id = row.at("provider_id").get<std::string>();
            s.accuracy = row.at("accuracy").get<double>();
            s.evaluated_count = row.at("evaluated_count").get<std::size_t>();
            s.correct = static_cast<std::size_t>(s.accuracy * static_cast<double>(s.evaluated_count) + 0.5);
            report.scores.push_back(std::move(s));
        }
        report.winner = j.at("winner").get<std::string>();
    } catch (const json::exception& e) {
        throw Error(ErrorCode::Parse, std::string("bad selection report: ") + e.what());
    }
    return report;
}

}  // namespace isic
