#include "detree/box.hpp"

#include <cmath>
#include <string>

#include "detree/errors.hpp"

namespace detree {

Box::Box(std::vector<double> lo, std::vector<double> hi) : lo_(std::move(lo)), hi_(std::move(hi)) {
  if (lo_.size() != hi_.size()) throw DimensionError(lo_.size(), hi_.size());
  if (lo_.empty()) throw ConfigError("invalid-box", "box must have at least one dimension");
  for (std::size_t k = 0; k < lo_.size(); ++k) {
    if (!std::isfinite(lo_[k]) || !std::isfinite(hi_[k]) || !(lo_[k] < hi_[k])) {
      throw ConfigError("invalid-box", "box bounds in dimension " + std::to_string(k) +
                                           " must be finite with lo < hi");
    }
  }
}

double Box::volume() const noexcept {
  double v = 1.0;
  for (std::size_t k = 0; k < lo_.size(); ++k) v *= hi_[k] - lo_[k];
  return v;
}

bool Box::contains(std::span<const double> x) const {
  if (x.size() != dims()) throw DimensionError(dims(), x.size());
  for (std::size_t k = 0; k < lo_.size(); ++k) {
    if (!(x[k] >= lo_[k] && x[k] <= hi_[k])) return false;
  }
  return true;
}

Box Box::lower_part(std::size_t dim, double value) const {
  Box b = *this;
  b.hi_[dim] = value;
  return b;
}

Box Box::upper_part(std::size_t dim, double value) const {
  Box b = *this;
  b.lo_[dim] = value;
  return b;
}

double volume_with_width(const Box& box, std::size_t dim, double width) noexcept {
  double v = 1.0;
  for (std::size_t k = 0; k < box.dims(); ++k) v *= (k == dim) ? width : box.width(k);
  return v;
}

}  // namespace detree
