#pragma once

#include <cstddef>
#include <functional>
#include <span>

#include "detree/box.hpp"
#include "detree/crossval.hpp"
#include "detree/data_table.hpp"

namespace detree {

/// Brute-force product triangular-kernel density estimate; every evaluation
/// visits every entry.
class KdeModel {
 public:
  KdeModel(DataTable data, Bandwidths bw);

  const DataTable& data() const noexcept { return data_; }
  const Bandwidths& bandwidths() const noexcept { return bw_; }
  double evaluate(std::span<const double> x) const;

 private:
  DataTable data_;
  Bandwidths bw_;
};

double kde_evaluate(const KdeModel& model, std::span<const double> x);

using DensityFunction = std::function<double(std::span<const double>)>;

/// Midpoint-rule estimate of the integral of (f - g)^2 over the box.
double ise_against(const DensityFunction& f, const DensityFunction& g, const Box& box,
                   std::span<const std::size_t> bins);

/// Calls fn(midpoint, cell_volume) for every cell of a regular grid over the
/// box, last dimension varying fastest.
void for_each_cell(const Box& box, std::span<const std::size_t> bins,
                   const std::function<void(std::span<const double>, double)>& fn);

}  // namespace detree
