#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "detree/box.hpp"

namespace detree {

/// Immutable N x d sample with named columns, stored row-major.
///
/// Copies share the underlying storage. Every value is finite, there is at
/// least one row and one column, and column names are unique.
class DataTable {
 public:
  DataTable(std::vector<std::string> columns, std::vector<double> row_major_values);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t dims() const noexcept { return columns_->size(); }
  const std::vector<std::string>& columns() const noexcept { return *columns_; }
  std::optional<std::size_t> column_index(std::string_view name) const;

  double operator()(std::size_t row, std::size_t dim) const { return (*values_)[row * dims() + dim]; }
  std::span<const double> row(std::size_t i) const {
    return {values_->data() + i * dims(), dims()};
  }
  std::span<const double> values() const noexcept { return *values_; }

  /// Tight bounding box; degenerate dimensions get a small symmetric width.
  Box bounding_box() const;
  /// Bounding box widened by 0.1% of each range on both sides.
  Box default_box() const;

  /// New table holding the given rows, in order.
  DataTable subset(std::span<const std::size_t> rows) const;
  /// New table holding the named columns, in the given order.
  DataTable select(std::span<const std::string> names) const;

 private:
  std::shared_ptr<const std::vector<std::string>> columns_;
  std::shared_ptr<const std::vector<double>> values_;
  std::size_t rows_ = 0;
};

}  // namespace detree
