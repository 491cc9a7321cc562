#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace isic {

// ISIC hierarchy levels. The code shape determines the level uniquely:
// one uppercase letter = Section, 2 digits = Division, 3 = Group, 4 = Class.
enum class Level { Section, Division, Group, Class };

const char* level_name(Level level);

// Level implied by the code's shape, or nullopt for anything else.
// Codes are strings throughout; leading zeros are significant ("0111").
std::optional<Level> code_level(std::string_view code);

// First two digits of a Group or Class code, as a Division code.
// Throws Error(InvalidArgument) for sections, divisions, and malformed codes.
std::string division_of(std::string_view code);

struct TaxonomyNode {
    std::string code;
    Level level = Level::Section;
    std::optional<std::string> parent;  // empty for sections
    std::string description;

    bool operator==(const TaxonomyNode&) const = default;
};

// Immutable after construction; safe for concurrent reads.
class Taxonomy {
public:
    // Parses the `level,code,parent,description` CSV (header required).
    // Validation stops at the first offending row: duplicate codes, shape/level
    // mismatches, missing or non-prefix parents, empty input.
    static Taxonomy parse(std::string_view csv_text);
    static Taxonomy load_file(const std::string& path);

    const TaxonomyNode* find(std::string_view code) const;
    const TaxonomyNode& node(std::string_view code) const;  // throws NotFound
    bool contains(std::string_view code) const { return find(code) != nullptr; }
    std::size_t size() const { return nodes_.size(); }

    // Parent chain from the immediate parent up to the Section (root last).
    std::vector<std::string> ancestors(std::string_view code) const;

    // Node description, verbatim from the source.
    const std::string& describe(std::string_view code) const;

    // Child codes in ascending lexicographic order.
    std::vector<std::string> children(std::string_view code) const;
    std::vector<std::string> codes_at(Level level) const;

    // Deterministic serialization (rows sorted by level then code); parsing
    // the output reproduces an equal Taxonomy.
    std::string to_csv() const;

    bool operator==(const Taxonomy& other) const { return nodes_ == other.nodes_; }

private:
    std::map<std::string, TaxonomyNode> nodes_;
    std::map<std::string, std::vector<std::string>> children_;
};

}  // namespace isic
