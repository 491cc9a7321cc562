#include "core/taxonomy.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <fstream>
#include <sstream>

#include "core/csv.hpp"
#include "core/error.hpp"

namespace isic {

namespace {

bool all_digits(std::string_view s) {
    return !s.empty() &&
           std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isdigit(c) != 0; });
}

std::optional<Level> level_from_name(std::string_view name) {
    std::string lowered = to_lower(name);
    if (lowered == "section") return Level::Section;
    if (lowered == "division") return Level::Division;
    if (lowered == "group") return Level::Group;
    if (lowered == "class") return Level::Class;
    return std::nullopt;
}

std::string row_prefix(std::size_t row) { return "row " + std::to_string(row) + ": "; }

}  // namespace

const char* level_name(Level level) {
    switch (level) {
        case Level::Section: return "section";
        case Level::Division: return "division";
        case Level::Group: return "group";
        case Level::Class: return "class";
    }
    return "?";
}

std::optional<Level> code_level(std::string_view code) {
    if (code.size() == 1 && std::isupper(static_cast<unsigned char>(code[0]))) return Level::Section;
    if (all_digits(code)) {
        switch (code.size()) {
            case 2: return Level::Division;
            case 3: return Level::Group;
            case 4: return Level::Class;
            default: break;
        }
    }
    return std::nullopt;
}

std::string division_of(std::string_view code) {
    auto level = code_level(code);
    if (!level) {
        throw Error(ErrorCode::InvalidArgument, "malformed ISIC code '" + std::string(code) + "'");
    }
    if (*level != Level::Group && *level != Level::Class) {
        throw Error(ErrorCode::InvalidArgument,
                    "code '" + std::string(code) + "' is a " + level_name(*level) +
                        "; only group and class codes have a division prefix");
    }
    return std::string(code.substr(0, 2));
}

Taxonomy Taxonomy::parse(std::string_view csv_text) {
    CsvTable table = parse_csv(csv_text);

    static const std::array<std::string_view, 4> expected = {"level", "code", "parent", "description"};
    if (table.header.size() != expected.size()) {
        throw Error(ErrorCode::Parse, "taxonomy header must be 'level,code,parent,description'");
    }
    for (std::size_t i = 0; i < expected.size(); ++i) {
        if (to_lower(trim(table.header[i])) != expected[i]) {
            throw Error(ErrorCode::Parse, "taxonomy header must be 'level,code,parent,description'");
        }
    }
    if (table.records.empty()) {
        throw Error(ErrorCode::Parse, "empty taxonomy");
    }

    Taxonomy tax;
    std::map<std::string, std::size_t> row_of;  // for error reporting on the second pass
    for (const CsvRecord& rec : table.records) {
        if (rec.fields.size() != 4) {
            throw Error(ErrorCode::Parse, row_prefix(rec.row) + "expected 4 fields, got " +
                                              std::to_string(rec.fields.size()));
        }
        TaxonomyNode node;
        auto declared = level_from_name(trim(rec.fields[0]));
        if (!declared) {
            throw Error(ErrorCode::Parse, row_prefix(rec.row) + "unknown level '" + rec.fields[0] + "'");
        }
        node.code = trim(rec.fields[1]);
        auto shaped = code_level(node.code);
        if (!shaped) {
            throw Error(ErrorCode::Parse, row_prefix(rec.row) + "malformed ISIC code '" + node.code + "'");
        }
        if (*shaped != *declared) {
            throw Error(ErrorCode::Parse, row_prefix(rec.row) + "code '" + node.code + "' has the shape of a " +
                                              level_name(*shaped) + " but is declared " + level_name(*declared));
        }
        node.level = *declared;
        std::string parent = trim(rec.fields[2]);
        if (node.level == Level::Section) {
            if (!parent.empty()) {
                throw Error(ErrorCode::Parse, row_prefix(rec.row) + "section '" + node.code +
                                                  "' must not declare a parent");
            }
        } else {
            if (parent.empty()) {
                throw Error(ErrorCode::Parse, row_prefix(rec.row) + level_name(node.level) + " '" + node.code +
                                                  "' is missing its parent");
            }
            node.parent = parent;
        }
        node.description = rec.fields[3];
        if (tax.nodes_.count(node.code)) {
            throw Error(ErrorCode::Parse, row_prefix(rec.row) + "duplicate code '" + node.code + "'");
        }
        row_of[node.code] = rec.row;
        tax.nodes_.emplace(node.code, std::move(node));
    }

    // Resolve parents once all rows are in; file order does not matter.
    for (const auto& [code, node] : tax.nodes_) {
        if (!node.parent) continue;
        std::size_t row = row_of[code];
        if (node.level == Level::Group || node.level == Level::Class) {
            std::string prefix(code.substr(0, code.size() - 1));
            if (*node.parent != prefix) {
                throw Error(ErrorCode::Parse, row_prefix(row) + "parent of '" + code + "' must be its prefix '" +
                                                  prefix + "', got '" + *node.parent + "'");
            }
        }
        auto it = tax.nodes_.find(*node.parent);
        if (it == tax.nodes_.end()) {
            throw Error(ErrorCode::Parse,
                        row_prefix(row) + "'" + code + "' references unknown parent '" + *node.parent + "'");
        }
        if (static_cast<int>(it->second.level) != static_cast<int>(node.level) - 1) {
            throw Error(ErrorCode::Parse, row_prefix(row) + "parent of '" + code + "' must be one level up (" +
                                              level_name(it->second.level) + " given)");
        }
        tax.children_[*node.parent].push_back(code);
    }
    for (auto& [code, kids] : tax.children_) {
        std::sort(kids.begin(), kids.end());
    }
    return tax;
}

Taxonomy Taxonomy::load_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::Io, "cannot open taxonomy file '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse(buf.str());
}

const TaxonomyNode* Taxonomy::find(std::string_view code) const {
    auto it = nodes_.find(std::string(code));
    return it == nodes_.end() ? nullptr : &it->second;
}

const TaxonomyNode& Taxonomy::node(std::string_view code) const {
    const TaxonomyNode* n = find(code);
    if (!n) throw Error(ErrorCode::NotFound, "unknown code '" + std::string(code) + "'");
    return *n;
}

std::vector<std::string> Taxonomy::ancestors(std::string_view code) const {
    const TaxonomyNode* n = &node(code);
    std::vector<std::string> chain;
    while (n->parent) {
        chain.push_back(*n->parent);
        n = &node(*n->parent);
    }
    return chain;
}

const std::string& Taxonomy::describe(std::string_view code) const { return node(code).description; }

std::vector<std::string> Taxonomy::children(std::string_view code) const {
    node(code);  // validate existence
    auto it = children_.find(std::string(code));
    return it == children_.end() ? std::vector<std::string>{} : it->second;
}

std::vector<std::string> Taxonomy::codes_at(Level level) const {
    std::vector<std::string> out;
    for (const auto& [code, n] : nodes_) {
        if (n.level == level) out.push_back(code);
    }
    return out;
}

std::string Taxonomy::to_csv() const {
    std::vector<const TaxonomyNode*> rows;
    rows.reserve(nodes_.size());
    for (const auto& [code, n] : nodes_) rows.push_back(&n);
    std::sort(rows.begin(), rows.end(), [](const TaxonomyNode* a, const TaxonomyNode* b) {
        if (a->level != b->level) return static_cast<int>(a->level) < static_cast<int>(b->level);
        return a->code < b->code;
    });
    std::string out = "level,code,parent,description\n";
    for (const TaxonomyNode* n : rows) {
        out += level_name(n->level);
        out += ',';
        out += csv_quote(n->code);
        out += ',';
        out += csv_quote(n->parent.value_or(""));
        out += ',';
        out += csv_quote(n->description);
        out += '\n';
    }
    return out;
}

}  // namespace isic
