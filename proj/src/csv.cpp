#include "detree/csv.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "detree/errors.hpp"

namespace detree {

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(',', start);
    out.push_back(trim(std::string_view(line).substr(start, pos == std::string::npos ? std::string::npos : pos - start)));
    if (pos == std::string::npos) break;
    start = pos + 1;
  }
  return out;
}

bool parse_double(const std::string& cell, double& v) {
  const char* b = cell.data();
  const char* e = b + cell.size();
  if (b != e && *b == '+') ++b;
  const auto [p, ec] = std::from_chars(b, e, v);
  return ec == std::errc() && p == e && std::isfinite(v);
}

}  // namespace

std::vector<std::string> split_list(const std::string& text, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, sep)) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

DataTable parse_csv(std::istream& in, std::span<const std::string> columns) {
  std::string line;
  bool have_header = false;
  while (std::getline(in, line)) {
    if (line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) line.erase(0, 3);
    if (!trim(line).empty()) {
      have_header = true;
      break;
    }
  }
  if (!have_header) throw EmptyInputError("input has no header row");
  const std::vector<std::string> header = split_fields(line);

  std::vector<std::string> names(columns.begin(), columns.end());
  if (names.empty()) names = header;
  std::vector<std::size_t> pick;
  for (const auto& n : names) {
    const auto it = std::find(header.begin(), header.end(), n);
    if (it == header.end()) throw MissingColumnError(n);
    pick.push_back(static_cast<std::size_t>(it - header.begin()));
  }

  std::vector<double> values;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    ++row;
    const std::vector<std::string> cells = split_fields(line);
    if (cells.size() != header.size())
      throw DataError("ragged-row", "row " + std::to_string(row) + " has " + std::to_string(cells.size()) +
                                        " fields, header has " + std::to_string(header.size()));
    for (std::size_t k = 0; k < pick.size(); ++k) {
      double v = 0.0;
      if (!parse_double(cells[pick[k]], v)) throw NonNumericError(row, names[k], cells[pick[k]]);
      values.push_back(v);
    }
  }
  if (row == 0) throw EmptyInputError("input has no data rows");
  return DataTable(std::move(names), std::move(values));
}

DataTable load_csv(const std::string& path, std::span<const std::string> columns) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("unreadable-file", "cannot open '" + path + "'");
  return parse_csv(in, columns);
}

std::string format_double(double v) {
  char buf[64];
  const auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
  if (ec != std::errc()) throw std::logic_error("to_chars failed");
  return std::string(buf, p);
}

void write_csv(std::ostream& out, std::span<const std::string> columns, std::span<const double> row_major) {
  const std::size_t d = columns.size();
  if (d == 0 || row_major.size() % d != 0) throw DimensionError(d, row_major.size());
  for (std::size_t k = 0; k < d; ++k) out << (k ? "," : "") << columns[k];
  out << '\n';
  std::string line;
  for (std::size_t i = 0; i < row_major.size(); i += d) {
    line.clear();
    for (std::size_t k = 0; k < d; ++k) {
      if (k) line += ',';
      line += format_double(row_major[i + k]);
    }
    line += '\n';
    out << line;
  }
}

void write_csv(const std::string& path, std::span<const std::string> columns, std::span<const double> row_major) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("unwritable-file", "cannot write '" + path + "'");
  write_csv(out, columns, row_major);
  if (!out) throw DataError("unwritable-file", "write to '" + path + "' failed");
}

}  // namespace detree
