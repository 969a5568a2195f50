#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "detree/box.hpp"
#include "detree/kde.hpp"

namespace detree {

/// Densities at bin midpoints of a regular grid, last dimension varying fastest.
struct Grid {
  std::vector<std::string> columns;  // coordinate names followed by "density"
  std::vector<std::size_t> bins;
  double cell_volume = 0.0;
  std::vector<double> values;  // row-major, columns.size() per row

  std::size_t rows() const noexcept { return values.size() / columns.size(); }
  double density(std::size_t row) const { return values[row * columns.size() + columns.size() - 1]; }
  /// Riemann sum of density times cell volume.
  double mass() const;
};

/// Grid over a box of one to three dimensions; throws ConfigError on zero bins.
Grid sample_grid(const DensityFunction& f, const Box& box, std::span<const std::size_t> bins,
                 std::span<const std::string> coordinate_names);

/// "200x200" or "200" (repeated for every dimension).
std::vector<std::size_t> parse_bins(const std::string& text, std::size_t dims);

}  // namespace detree
