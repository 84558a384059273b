#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace tabcheck {

/// Raw RFC-4180 table: header plus rows of unparsed cell text.
struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
};

/// Parses RFC-4180 CSV (comma separator, double-quote quoting, CRLF or LF
/// record ends, quoted fields may span lines). A leading UTF-8 BOM and
/// completely empty lines are ignored. Throws LoadError on an unterminated
/// quote or a row whose field count differs from the header.
CsvTable parse_csv(std::string_view text);

std::string read_file(const std::filesystem::path& path);

/// Quotes a field only when it contains a comma, quote, CR or LF.
std::string csv_escape(std::string_view field);

/// Appends one record (terminated by "\n").
void append_csv_row(std::string& out, const std::vector<std::string>& fields);

}  // namespace tabcheck
