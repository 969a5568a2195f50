#include "detree/data_table.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "detree/errors.hpp"

namespace detree {

namespace {

// Half-width used when every entry shares one coordinate value.
double degenerate_half_width(double value) { return 0.5e-3 * std::max(std::abs(value), 1.0); }

constexpr double kBoxMargin = 1e-3;

}  // namespace

DataTable::DataTable(std::vector<std::string> columns, std::vector<double> row_major_values) {
  if (columns.empty()) throw EmptyInputError("data table needs at least one column");
  std::set<std::string> seen;
  for (const auto& c : columns) {
    if (!seen.insert(c).second) throw ConfigError("duplicate-column", "duplicate column name '" + c + "'");
  }
  if (row_major_values.empty()) throw EmptyInputError("data table needs at least one row");
  if (row_major_values.size() % columns.size() != 0) {
    throw ConfigError("ragged-rows", "value count is not a multiple of the column count");
  }
  for (std::size_t i = 0; i < row_major_values.size(); ++i) {
    if (!std::isfinite(row_major_values[i])) {
      throw NonNumericError(i / columns.size(), columns[i % columns.size()],
                            std::to_string(row_major_values[i]));
    }
  }
  rows_ = row_major_values.size() / columns.size();
  columns_ = std::make_shared<const std::vector<std::string>>(std::move(columns));
  values_ = std::make_shared<const std::vector<double>>(std::move(row_major_values));
}

std::optional<std::size_t> DataTable::column_index(std::string_view name) const {
  const auto& cols = *columns_;
  for (std::size_t k = 0; k < cols.size(); ++k) {
    if (cols[k] == name) return k;
  }
  return std::nullopt;
}

Box DataTable::bounding_box() const {
  const std::size_t d = dims();
  std::vector<double> lo(d), hi(d);
  for (std::size_t k = 0; k < d; ++k) {
    lo[k] = hi[k] = (*this)(0, k);
  }
  for (std::size_t i = 1; i < rows_; ++i) {
    for (std::size_t k = 0; k < d; ++k) {
      lo[k] = std::min(lo[k], (*this)(i, k));
      hi[k] = std::max(hi[k], (*this)(i, k));
    }
  }
  for (std::size_t k = 0; k < d; ++k) {
    if (!(lo[k] < hi[k])) {
      const double half = degenerate_half_width(lo[k]);
      lo[k] -= half;
      hi[k] += half;
    }
  }
  return Box(std::move(lo), std::move(hi));
}

Box DataTable::default_box() const {
  const Box tight = bounding_box();
  std::vector<double> lo = tight.lo(), hi = tight.hi();
  for (std::size_t k = 0; k < lo.size(); ++k) {
    const double pad = kBoxMargin * (hi[k] - lo[k]);
    lo[k] -= pad;
    hi[k] += pad;
  }
  return Box(std::move(lo), std::move(hi));
}

DataTable DataTable::subset(std::span<const std::size_t> rows) const {
  std::vector<double> v;
  v.reserve(rows.size() * dims());
  for (std::size_t r : rows) {
    if (r >= rows_) throw ConfigError("row-out-of-range", "row index " + std::to_string(r) + " out of range");
    const auto src = row(r);
    v.insert(v.end(), src.begin(), src.end());
  }
  return DataTable(*columns_, std::move(v));
}

DataTable DataTable::select(std::span<const std::string> names) const {
  std::vector<std::size_t> idx;
  for (const auto& n : names) {
    auto k = column_index(n);
    if (!k) throw MissingColumnError(n);
    idx.push_back(*k);
  }
  std::vector<double> v;
  v.reserve(rows_ * idx.size());
  for (std::size_t i = 0; i < rows_; ++i) {
    for (std::size_t k : idx) v.push_back((*this)(i, k));
  }
  return DataTable(std::vector<std::string>(names.begin(), names.end()), std::move(v));
}

}  // namespace detree
