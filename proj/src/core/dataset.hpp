#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace isic {

struct LabeledExample {
    std::string activity_name;  // non-empty after trimming
    std::string label;          // syntactically valid ISIC code

    bool operator==(const LabeledExample&) const = default;
};

// Examples in ingestion order; immutable after load.
struct Dataset {
    std::vector<LabeledExample> examples;
    std::string source_path;

    std::size_t size() const { return examples.size(); }
    bool empty() const { return examples.empty(); }
};

// Sorted unique labels with per-label example counts.
struct LabelSpace {
    std::vector<std::string> labels;
    std::vector<std::size_t> supports;

    std::size_t size() const { return labels.size(); }
    // Index of `label`, or throws NotFound.
    std::size_t index_of(std::string_view label) const;
};

// Parses the `activity_name,isic_class` CSV. Activity names are trimmed and
// must be non-empty; labels must be shape-valid ISIC codes. Errors carry the
// offending row number.
Dataset parse_examples(std::string_view csv_text, std::string source_path = "");
Dataset load_examples(const std::string& path);

std::string dataset_to_csv(const Dataset& dataset);

LabelSpace label_space(const Dataset& dataset);  // throws on empty dataset

// Replaces every Group/Class label by its division prefix. Example order and
// activity names are unchanged. Any Section- or Division-level label is an error.
Dataset coarsen_to_division(const Dataset& dataset);

struct SplitIndices {
    std::vector<std::size_t> train;
    std::vector<std::size_t> test;
};

// Seeded stratified split. Per label, floor(support * test_fraction) examples
// go to test, picked by a seeded per-label shuffle; single-example labels stay
// in train. The result is a partition of [0, n) with each side in ascending
// index order. Identical (dataset, fraction, seed) always reproduces the split.
SplitIndices stratified_split_indices(const Dataset& dataset, double test_fraction, std::uint64_t seed);

Dataset subset(const Dataset& dataset, std::span<const std::size_t> indices);

std::pair<Dataset, Dataset> stratified_split(const Dataset& dataset, double test_fraction, std::uint64_t seed);

}  // namespace isic
