#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace poldyn {

// RFC-4180 quoting: fields containing comma, quote, CR or LF are quoted,
// embedded quotes doubled.
std::string csv_escape(std::string_view field);
std::string csv_join(const std::vector<std::string>& fields);

// Parses a full CSV document, including quoted fields with embedded
// newlines. CRLF and LF row terminators are accepted; a trailing terminator
// does not produce an empty row. Throws DataError on unbalanced quotes.
std::vector<std::vector<std::string>> csv_parse(std::string_view text);

std::string read_text_file(const std::string& path);          // throws DataError
void write_text_file(const std::string& path, std::string_view content);

std::vector<std::vector<std::string>> csv_read_file(const std::string& path);

// Doubles in text output are always written with "%.17g" so round-trips are
// bit-exact.
std::string fmt_double(double v);

}  // namespace poldyn
