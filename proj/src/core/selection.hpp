#pragma once

#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

namespace isic {

class EmbeddingProvider;
class Taxonomy;
struct Dataset;

struct ProviderScore {
    std::string provider_id;
    double accuracy = 0.0;  // correct / evaluated_count, exactly
    std::size_t evaluated_count = 0;
    std::size_t correct = 0;
};

// Scores sorted by accuracy descending, provider id ascending on ties; the
// winner is the first entry.
struct SelectionReport {
    std::vector<ProviderScore> scores;
    std::string winner;
};

// Zero-training cosine classification of `eval_set` (division-level labels):
// a category repository is built from the division descriptions, every
// activity embedding is matched to its nearest category, and accuracy is the
// fraction of exact label matches. The eval set is whatever the caller passes
// (full coarsened corpus or just a train partition).
ProviderScore evaluate_provider(EmbeddingProvider& provider, const Taxonomy& taxonomy,
                                const Dataset& eval_set);

SelectionReport select_model(const std::vector<EmbeddingProvider*>& providers, const Taxonomy& taxonomy,
                             const Dataset& eval_set);

// Two-column text table: provider id, accuracy percent with two decimals.
std::string render_selection(const SelectionReport& report);

nlohmann::json selection_to_json(const SelectionReport& report);
SelectionReport selection_from_json(const nlohmann::json& j);

}  // namespace isic
