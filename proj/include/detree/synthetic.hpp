#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "detree/data_table.hpp"

namespace detree {

/// One coordinate of a mixture component: uniform on [a, b] or normal with mean a, sigma b.
struct Marginal {
  enum class Kind { Uniform, Normal };
  Kind kind = Kind::Uniform;
  double a = 0.0;
  double b = 1.0;

  static Marginal uniform(double lo, double hi) { return {Kind::Uniform, lo, hi}; }
  static Marginal normal(double mean, double sigma) { return {Kind::Normal, mean, sigma}; }
  double pdf(double x) const;
};

/// Product of independent marginals.
struct Component {
  double weight = 1.0;
  std::vector<Marginal> marginals;
};

struct SyntheticSpec {
  std::vector<std::string> columns;
  std::vector<Component> components;
  std::size_t n = 1000;
  std::uint64_t seed = 1;

  /// Throws ConfigError for bad weights, sigmas, ranges or shapes.
  void validate() const;
  double pdf(std::span<const double> x) const;
};

struct SyntheticSample {
  DataTable data;
  std::vector<std::size_t> component;  // generating component of each row
};

/// Deterministic for a given seed on every platform: mt19937_64 with explicit
/// uniform and Box-Muller transforms; each row picks its component from the weights.
SyntheticSample generate_synthetic(const SyntheticSpec& spec);

/// Named presets: "d0-demo", "mixture-1d", "uniform", "uniform-2d", "bench-2d".
SyntheticSpec synthetic_preset(const std::string& name, std::size_t n, std::uint64_t seed);
std::vector<std::string> synthetic_preset_names();

/// Rows of a d0-demo sample near the mass peak, and rows in the sidebands.
DataTable signal_window(const DataTable& data);
DataTable sideband(const DataTable& data);

}  // namespace detree
