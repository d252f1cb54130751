#ifndef SIMT_CSV_HPP
#define SIMT_CSV_HPP

#include <fstream>
#include <string>
#include <vector>

#include <fmt/core.h>

#include "simt/common.hpp"

namespace simt {

// Shortest round-trip decimal form; keeps CSV output byte-stable for a
// given sequence of doubles.
inline std::string csv_number(double x) { return fmt::format("{}", x); }

inline std::string csv_quote(const std::string& field) {
  if (field.find_first_of(",\"\n") == std::string::npos) return field;
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

inline void write_csv(const CsvTable& table, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw DataError(fmt::format("cannot write '{}'", path));
  auto emit_row = [&out](const std::vector<std::string>& row) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i > 0) out << ',';
      out << csv_quote(row[i]);
    }
    out << '\n';
  };
  emit_row(table.header);
  for (const auto& row : table.rows) emit_row(row);
}

}  // namespace simt

#endif  // SIMT_CSV_HPP
