#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace isic {

// One parsed CSV record plus its 1-based ordinal in the file (header = record 1).
struct CsvRecord {
    std::size_t row = 0;
    std::vector<std::string> fields;
};

struct CsvTable {
    std::vector<std::string> header;
    std::vector<CsvRecord> records;
};

// RFC 4180 reader: quoted fields, escaped quotes (""), embedded commas and
// newlines, LF or CRLF line endings. The first record is the header.
// Throws Error(Parse) on malformed quoting or a missing header.
CsvTable parse_csv(std::string_view text);

// Quotes `field` only when it contains a comma, quote, or newline.
std::string csv_quote(std::string_view field);

std::string trim(std::string_view s);
std::string to_lower(std::string_view s);

}  // namespace isic
