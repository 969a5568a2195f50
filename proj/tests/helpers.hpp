#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "detree/box.hpp"
#include "detree/data_table.hpp"
#include "detree/tree.hpp"

namespace testing_util {

inline double uniform01(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

inline double uniform(std::mt19937_64& rng, double lo, double hi) { return lo + (hi - lo) * uniform01(rng); }

inline std::vector<std::string> default_names(std::size_t d) {
  static const char* base[] = {"x", "y", "z", "w"};
  std::vector<std::string> out;
  for (std::size_t k = 0; k < d; ++k) out.push_back(k < 4 ? base[k] : "c" + std::to_string(k));
  return out;
}

inline detree::DataTable uniform_table(std::size_t n, std::size_t d, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<double> v(n * d);
  for (auto& x : v) x = uniform01(rng);
  return detree::DataTable(default_names(d), std::move(v));
}

inline detree::DataTable column_table(const std::vector<double>& xs, const std::string& name = "x") {
  return detree::DataTable({name}, xs);
}

inline detree::Box unit_box(std::size_t d) {
  return detree::Box(std::vector<double>(d, 0.0), std::vector<double>(d, 1.0));
}

/// Two 1-D leaves [0, 0.5) and [0.5, 1] with the given counts.
inline detree::DensityTree two_leaf_1d(std::uint64_t left, std::uint64_t right) {
  using detree::NodeSpec;
  return detree::DensityTree({"x"}, left + right, unit_box(1),
                             NodeSpec::split(0, 0.5, NodeSpec::leaf(left), NodeSpec::leaf(right)));
}

/// 2 x 2 grid over the unit square: cut x at 0.5, then y at 0.5 on both sides.
inline detree::DensityTree grid_2x2(std::uint64_t a, std::uint64_t b, std::uint64_t c, std::uint64_t d) {
  using detree::NodeSpec;
  return detree::DensityTree(
      {"x", "y"}, a + b + c + d, unit_box(2),
      NodeSpec::split(0, 0.5, NodeSpec::split(1, 0.5, NodeSpec::leaf(a), NodeSpec::leaf(b)),
                      NodeSpec::split(1, 0.5, NodeSpec::leaf(c), NodeSpec::leaf(d))));
}

}  // namespace testing_util
