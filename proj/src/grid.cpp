#include "detree/grid.hpp"

#include <charconv>

#include "detree/errors.hpp"

namespace detree {

double Grid::mass() const {
  double sum = 0.0;
  for (std::size_t i = 0; i < rows(); ++i) sum += density(i);
  return sum * cell_volume;
}

Grid sample_grid(const DensityFunction& f, const Box& box, std::span<const std::size_t> bins,
                 std::span<const std::string> coordinate_names) {
  const std::size_t d = box.dims();
  if (d < 1 || d > 3) throw ConfigError("grid-dimension", "grid output supports one to three dimensions");
  if (bins.size() != d) throw DimensionError(d, bins.size());
  if (coordinate_names.size() != d) throw DimensionError(d, coordinate_names.size());
  Grid g;
  g.columns.assign(coordinate_names.begin(), coordinate_names.end());
  g.columns.push_back("density");
  g.bins.assign(bins.begin(), bins.end());
  std::size_t rows = 1;
  for (std::size_t b : bins) rows *= b;
  g.values.reserve(rows * (d + 1));
  for_each_cell(box, bins, [&](std::span<const double> x, double vol) {
    g.cell_volume = vol;
    g.values.insert(g.values.end(), x.begin(), x.end());
    g.values.push_back(f(x));
  });
  return g;
}

std::vector<std::size_t> parse_bins(const std::string& text, std::size_t dims) {
  std::vector<std::size_t> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    auto pos = text.find_first_of("xX,", start);
    if (pos == std::string::npos) pos = text.size();
    std::size_t v = 0;
    const char* b = text.data() + start;
    const char* e = text.data() + pos;
    const auto [p, ec] = std::from_chars(b, e, v);
    if (ec != std::errc() || p != e) throw UsageError("bad bin specification '" + text + "'");
    out.push_back(v);
    start = pos + 1;
  }
  if (out.size() == 1 && dims > 1) out.assign(dims, out.front());
  if (out.size() != dims) throw DimensionError(dims, out.size());
  for (std::size_t v : out)
    if (v == 0) throw ConfigError("zero-bins", "bin counts must be positive");
  return out;
}

}  // namespace detree
