#pragma once

#include <istream>
#include <string>
#include <string_view>
#include <vector>

namespace sgid::csv {

struct Record {
  std::vector<std::string> fields;
  std::size_t line = 0;  // 1-based line on which the record starts
};

/// RFC 4180 reader: comma-separated, double-quoted fields may contain commas,
/// doubled quotes and newlines. CRLF and LF line endings are both accepted.
/// Throws DataError on an unterminated quoted field.
std::vector<Record> read_all(std::istream& in);

/// Quotes a field when it contains a comma, quote, CR or LF.
std::string escape(std::string_view field);

}  // namespace sgid::csv
