#include "core/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <random>
#include <sstream>

#include "core/csv.hpp"
#include "core/error.hpp"
#include "core/hash.hpp"
#include "core/taxonomy.hpp"

namespace isic {

namespace {

// Fisher-Yates with a fixed scheme so splits do not depend on the standard
// library's std::shuffle implementation.
void seeded_shuffle(std::vector<std::size_t>& values, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    for (std::size_t i = values.size(); i > 1; --i) {
        std::size_t j = static_cast<std::size_t>(rng() % i);
        std::swap(values[i - 1], values[j]);
    }
}

}  // namespace

std::size_t LabelSpace::index_of(std::string_view label) const {
    auto it = std::lower_bound(labels.begin(), labels.end(), label);
    if (it == labels.end() || *it != label) {
        throw Error(ErrorCode::NotFound, "label '" + std::string(label) + "' not in label space");
    }
    return static_cast<std::size_t>(it - labels.begin());
}

Dataset parse_examples(std::string_view csv_text, std::string source_path) {
    CsvTable table = parse_csv(csv_text);
    if (table.header.size() != 2 || to_lower(trim(table.header[0])) != "activity_name" ||
        to_lower(trim(table.header[1])) != "isic_class") {
        throw Error(ErrorCode::Parse, "dataset header must be 'activity_name,isic_class'");
    }
    Dataset ds;
    ds.source_path = std::move(source_path);
    ds.examples.reserve(table.records.size());
    for (const CsvRecord& rec : table.records) {
        if (rec.fields.size() != 2) {
            throw Error(ErrorCode::Parse, "row " + std::to_string(rec.row) + ": expected 2 fields, got " +
                                              std::to_string(rec.fields.size()));
        }
        LabeledExample ex;
        ex.activity_name = trim(rec.fields[0]);
        if (ex.activity_name.empty()) {
            throw Error(ErrorCode::Parse, "empty activity name at row " + std::to_string(rec.row));
        }
        ex.label = trim(rec.fields[1]);
        if (!code_level(ex.label)) {
            throw Error(ErrorCode::Parse,
                        "row " + std::to_string(rec.row) + ": malformed ISIC code '" + ex.label + "'");
        }
        ds.examples.push_back(std::move(ex));
    }
    return ds;
}

Dataset load_examples(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::Io, "cannot open dataset file '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_examples(buf.str(), path);
}

std::string dataset_to_csv(const Dataset& dataset) {
    std::string out = "activity_name,isic_class\n";
    for (const LabeledExample& ex : dataset.examples) {
        out += csv_quote(ex.activity_name);
        out += ',';
        out += csv_quote(ex.label);
        out += '\n';
    }
    return out;
}

LabelSpace label_space(const Dataset& dataset) {
    if (dataset.empty()) throw Error(ErrorCode::InvalidArgument, "empty dataset");
    std::map<std::string, std::size_t> counts;
    for (const LabeledExample& ex : dataset.examples) ++counts[ex.label];
    LabelSpace space;
    space.labels.reserve(counts.size());
    space.supports.reserve(counts.size());
    for (const auto& [label, count] : counts) {
        space.labels.push_back(label);
        space.supports.push_back(count);
    }
    return space;
}

Dataset coarsen_to_division(const Dataset& dataset) {
    Dataset out;
    out.source_path = dataset.source_path;
    out.examples.reserve(dataset.size());
    for (std::size_t i = 0; i < dataset.examples.size(); ++i) {
        const LabeledExample& ex = dataset.examples[i];
        auto level = code_level(ex.label);
        if (!level || (*level != Level::Group && *level != Level::Class)) {
            throw Error(ErrorCode::InvalidArgument,
                        "example " + std::to_string(i + 1) + ": label '" + ex.label +
                            "' is not a group or class code; cannot coarsen to division");
        }
        out.examples.push_back({ex.activity_name, division_of(ex.label)});
    }
    return out;
}

SplitIndices stratified_split_indices(const Dataset& dataset, double test_fraction, std::uint64_t seed) {
    if (dataset.empty()) throw Error(ErrorCode::InvalidArgument, "empty dataset");
    if (!(test_fraction > 0.0 && test_fraction < 1.0)) {
        throw Error(ErrorCode::InvalidArgument, "test_fraction must be in (0,1)");
    }
    std::map<std::string, std::vector<std::size_t>> by_label;
    for (std::size_t i = 0; i < dataset.examples.size(); ++i) {
        by_label[dataset.examples[i].label].push_back(i);
    }
    SplitIndices split;
    for (auto& [label, indices] : by_label) {
        const std::size_t support = indices.size();
        // Absolute nudge absorbs binary representation error in fractions like
        // 0.3 so that floor(10 * 0.3) is 3, not 2.
        std::size_t n_test = static_cast<std::size_t>(std::floor(
            static_cast<long double>(support) * static_cast<long double>(test_fraction) + 1e-9L));
        if (support <= 1) n_test = 0;
        seeded_shuffle(indices, seed ^ fnv1a64(label));
        for (std::size_t i = 0; i < indices.size(); ++i) {
            (i < n_test ? split.test : split.train).push_back(indices[i]);
        }
    }
    std::sort(split.train.begin(), split.train.end());
    std::sort(split.test.begin(), split.test.end());
    return split;
}

Dataset subset(const Dataset& dataset, std::span<const std::size_t> indices) {
    Dataset out;
    out.source_path = dataset.source_path;
    out.examples.reserve(indices.size());
    for (std::size_t idx : indices) {
        if (idx >= dataset.examples.size()) {
            throw Error(ErrorCode::InvalidArgument, "subset index out of range");
        }
        out.examples.push_back(dataset.examples[idx]);
    }
    return out;
}

std::pair<Dataset, Dataset> stratified_split(const Dataset& dataset, double test_fraction, std::uint64_t seed) {
    SplitIndices split = stratified_split_indices(dataset, test_fraction, seed);
    return {subset(dataset, split.train), subset(dataset, split.test)};
}

}  // namespace isic
