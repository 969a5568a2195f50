#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace detree {

/// Axis-aligned hyper-rectangle with strictly positive width in every dimension.
class Box {
 public:
  Box() = default;
  Box(std::vector<double> lo, std::vector<double> hi);

  std::size_t dims() const noexcept { return lo_.size(); }
  const std::vector<double>& lo() const noexcept { return lo_; }
  const std::vector<double>& hi() const noexcept { return hi_; }
  double lo(std::size_t k) const { return lo_[k]; }
  double hi(std::size_t k) const { return hi_[k]; }
  double width(std::size_t k) const { return hi_[k] - lo_[k]; }
  double center(std::size_t k) const { return 0.5 * (lo_[k] + hi_[k]); }

  /// Product of widths, accumulated in dimension order.
  double volume() const noexcept;

  /// Closed containment, lo <= x <= hi in every dimension.
  bool contains(std::span<const double> x) const;

  /// Children of a cut at `value` along `dim`: [lo, value) and [value, hi).
  Box lower_part(std::size_t dim, double value) const;
  Box upper_part(std::size_t dim, double value) const;

  friend bool operator==(const Box&, const Box&) = default;

 private:
  std::vector<double> lo_;
  std::vector<double> hi_;
};

/// Volume of a box whose width along `dim` is replaced by `width`.
double volume_with_width(const Box& box, std::size_t dim, double width) noexcept;

}  // namespace detree
