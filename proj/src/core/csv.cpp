#include "core/csv.hpp"

#include <cctype>

#include "core/error.hpp"

namespace isic {

namespace {

bool needs_quoting(std::string_view field) {
    return field.find_first_of(",\"\r\n") != std::string_view::npos;
}

}  // namespace

CsvTable parse_csv(std::string_view text) {
    CsvTable table;
    std::vector<std::string> fields;
    std::string field;
    bool in_quotes = false;
    bool field_was_quoted = false;
    std::size_t row = 1;

    auto end_field = [&] {
        fields.push_back(std::move(field));
        field.clear();
        field_was_quoted = false;
    };
    auto end_record = [&] {
        end_field();
        if (table.header.empty()) {
            table.header = std::move(fields);
        } else {
            table.records.push_back({row, std::move(fields)});
        }
        fields.clear();
        ++row;
    };

    std::size_t i = 0;
    const std::size_t n = text.size();
    bool any_char = false;
    while (i < n) {
        char c = text[i];
        any_char = true;
        if (in_quotes) {
            if (c == '"') {
                if (i + 1 < n && text[i + 1] == '"') {
                    field += '"';
                    ++i;
                } else {
                    in_quotes = false;
                }
            } else {
                field += c;
            }
        } else if (c == '"') {
            if (!field.empty() || field_was_quoted) {
                throw Error(ErrorCode::Parse, "row " + std::to_string(row) + ": stray quote inside unquoted field");
            }
            in_quotes = true;
            field_was_quoted = true;
        } else if (c == ',') {
            end_field();
        } else if (c == '\n') {
            end_record();
        } else if (c == '\r') {
            // swallow; the following \n (if any) closes the record
            if (i + 1 >= n || text[i + 1] != '\n') {
                end_record();
            }
        } else {
            field += c;
        }
        ++i;
    }
    if (in_quotes) {
        throw Error(ErrorCode::Parse, "row " + std::to_string(row) + ": unterminated quoted field");
    }
    // final record without trailing newline
    if (!field.empty() || field_was_quoted || !fields.empty()) {
        end_record();
    }
    if (!any_char || table.header.empty()) {
        throw Error(ErrorCode::Parse, "missing header row");
    }
    return table;
}

std::string csv_quote(std::string_view field) {
    if (!needs_quoting(field)) return std::string(field);
    std::string out;
    out.reserve(field.size() + 2);
    out += '"';
    for (char c : field) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

std::string trim(std::string_view s) {
    std::size_t b = 0;
    std::size_t e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return std::string(s.substr(b, e - b));
}

std::string to_lower(std::string_view s) {
    std::string out(s);
    for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return out;
}

}  // namespace isic
