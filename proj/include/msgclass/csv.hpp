#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace msgclass::csv {

struct Row {
  std::size_t line = 0;  // 1-based line where the record starts
  std::vector<std::string> fields;
};

// RFC 4180 reader: quoted fields may contain separators, doubled quotes and
// newlines. A trailing empty line is not a record. Throws DataError on an
// unterminated quote.
std::vector<Row> parse(std::string_view content, char separator = ',');

// Quotes a field when it contains the separator, a quote, or a line break.
std::string escape(std::string_view field, char separator = ',');
std::string join(const std::vector<std::string>& fields, char separator = ',');

}  // namespace msgclass::csv
