#include "detree/kde.hpp"

#include <cmath>
#include <vector>

#include "detree/errors.hpp"

namespace detree {

KdeModel::KdeModel(DataTable data, Bandwidths bw) : data_(std::move(data)), bw_(std::move(bw)) {
  if (bw_.dims() != data_.dims()) throw DimensionError(data_.dims(), bw_.dims());
}

double KdeModel::evaluate(std::span<const double> x) const {
  const std::size_t d = data_.dims();
  if (x.size() != d) throw DimensionError(d, x.size());
  const auto values = data_.values();
  const auto& h = bw_.h;
  double norm = 1.0;
  for (double hk : h) norm *= hk;
  double total = 0.0;
  for (std::size_t i = 0; i < data_.rows(); ++i) {
    const double* row = values.data() + i * d;
    double w = 1.0;
    for (std::size_t k = 0; k < d; ++k) {
      const double t = 1.0 - std::abs(x[k] - row[k]) / h[k];
      if (t <= 0.0) {
        w = 0.0;
        break;
      }
      w *= t;
    }
    total += w;
  }
  return total / (static_cast<double>(data_.rows()) * norm);
}

double kde_evaluate(const KdeModel& model, std::span<const double> x) { return model.evaluate(x); }

void for_each_cell(const Box& box, std::span<const std::size_t> bins,
                   const std::function<void(std::span<const double>, double)>& fn) {
  const std::size_t d = box.dims();
  if (bins.size() != d) throw DimensionError(d, bins.size());
  double cell_volume = 1.0;
  std::vector<double> step(d);
  for (std::size_t k = 0; k < d; ++k) {
    if (bins[k] == 0) throw ConfigError("zero-bins", "grid needs at least one bin per dimension");
    step[k] = box.width(k) / static_cast<double>(bins[k]);
    cell_volume *= step[k];
  }
  std::vector<std::size_t> idx(d, 0);
  std::vector<double> x(d);
  while (true) {
    for (std::size_t k = 0; k < d; ++k) x[k] = box.lo(k) + (static_cast<double>(idx[k]) + 0.5) * step[k];
    fn(x, cell_volume);
    std::size_t k = d;
    while (k-- > 0) {
      if (++idx[k] < bins[k]) break;
      idx[k] = 0;
    }
    if (k == static_cast<std::size_t>(-1)) break;
  }
}

double ise_against(const DensityFunction& f, const DensityFunction& g, const Box& box,
                   std::span<const std::size_t> bins) {
  double total = 0.0;
  for_each_cell(box, bins, [&](std::span<const double> x, double vol) {
    const double diff = f(x) - g(x);
    total += diff * diff * vol;
  });
  return total;
}

}  // namespace detree
