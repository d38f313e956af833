#pragma once

#include <string>
#include <vector>

#include "json.hpp"

namespace welfare_order::cli {

using Json = nlohmann::ordered_json;

// Number for JSON output: non-finite values become null.
Json number(double x);

// Canonical text: insertion-ordered keys, two-space indent, floats with 17
// significant digits, trailing newline. Re-parsing and re-printing the output
// reproduces it byte for byte.
std::string canonical_dump(const Json& value);
Json parse_json(const std::string& text);

// Shortest round-trip decimal form; "inf", "-inf" and "nan" otherwise.
std::string csv_number(double x);

class CsvWriter {
 public:
  explicit CsvWriter(std::vector<std::string> header);
  void row(const std::vector<std::string>& cells);
  const std::string& text() const { return text_; }

 private:
  std::size_t columns_;
  std::string text_;
};

void write_file(const std::string& path, const std::string& contents);

}  // namespace welfare_order::cli
