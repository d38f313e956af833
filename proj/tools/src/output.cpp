#include "output.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace welfare_order::cli {
namespace {

void dump(const Json& value, int indent, std::string& out) {
  const std::string pad(static_cast<std::size_t>(indent) * 2, ' ');
  const std::string inner(static_cast<std::size_t>(indent + 1) * 2, ' ');
  switch (value.type()) {
    case Json::value_t::object: {
      if (value.empty()) {
        out += "{}";
        return;
      }
      out += "{\n";
      bool first = true;
      for (const auto& item : value.items()) {
        if (!first) out += ",\n";
        first = false;
        out += inner;
        out += Json(item.key()).dump();
        out += ": ";
        dump(item.value(), indent + 1, out);
      }
      out += "\n" + pad + "}";
      return;
    }
    case Json::value_t::array: {
      if (value.empty()) {
        out += "[]";
        return;
      }
      out += "[\n";
      for (std::size_t j = 0; j < value.size(); ++j) {
        if (j > 0) out += ",\n";
        out += inner;
        dump(value[j], indent + 1, out);
      }
      out += "\n" + pad + "]";
      return;
    }
    case Json::value_t::number_float: {
      double x = value.get<double>();
      if (x == 0.0) x = 0.0;  // "-0" would re-read as the integer 0
      if (!std::isfinite(x)) {
        out += "null";
        return;
      }
      char buffer[32];
      std::snprintf(buffer, sizeof buffer, "%.17g", x);
      out += buffer;
      return;
    }
    default:
      out += value.dump();
  }
}

}  // namespace

Json number(double x) {
  if (!std::isfinite(x)) return Json(nullptr);
  return Json(x);
}

std::string canonical_dump(const Json& value) {
  std::string out;
  dump(value, 0, out);
  out += "\n";
  return out;
}

Json parse_json(const std::string& text) { return Json::parse(text); }

std::string csv_number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buffer[32];
  const auto result = std::to_chars(buffer, buffer + sizeof buffer, x);
  return std::string(buffer, result.ptr);
}

CsvWriter::CsvWriter(std::vector<std::string> header) : columns_(header.size()) {
  row(header);
}

void CsvWriter::row(const std::vector<std::string>& cells) {
  if (cells.size() != columns_) {
    throw std::logic_error("csv row has the wrong number of cells");
  }
  for (std::size_t j = 0; j < cells.size(); ++j) {
    if (j > 0) text_ += ',';
    text_ += cells[j];
  }
  text_ += '\n';
}

void write_file(const std::string& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  out << contents;
  if (!out) throw std::runtime_error("write to '" + path + "' failed");
}

}  // namespace welfare_order::cli
