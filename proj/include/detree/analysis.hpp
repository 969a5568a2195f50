#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "detree/smoothing.hpp"
#include "detree/tree.hpp"

namespace detree {

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
  double length() const noexcept { return hi - lo; }
  friend bool operator==(const Interval&, const Interval&) = default;
};

/// Axis-aligned selection with one closed interval per tree dimension.
class SelectionRegion {
 public:
  explicit SelectionRegion(std::vector<Interval> bounds);
  static SelectionRegion full(const Box& box);

  std::size_t dims() const noexcept { return bounds_.size(); }
  const std::vector<Interval>& bounds() const noexcept { return bounds_; }
  const Interval& operator[](std::size_t k) const { return bounds_[k]; }
  void set(std::size_t k, Interval iv);
  double volume() const noexcept;

  friend bool operator==(const SelectionRegion&, const SelectionRegion&) = default;

 private:
  std::vector<Interval> bounds_;
};

struct YieldConfig {
  double s_infinity = 0.0;
  double b_infinity = 0.0;

  void validate() const;
};

/// (1/N_tot) sum over leaves of N(leaf) * V(leaf & region) / V(leaf).
double integrate_region(const DensityTree& tree, const SelectionRegion& region);

/// S / (1 + S + B) with S = s_infinity * integral(signal), B = b_infinity * integral(background).
double selection_metric(const SelectionRegion& region, const DensityTree& signal, const DensityTree& background,
                        const YieldConfig& yields);

struct SelectionResult {
  SelectionRegion region;
  double metric = 0.0;
};

/// Maximizes the selection metric over regions whose bounds in `dims` are
/// leaf-boundary coordinates of either tree; the other dimensions span the
/// full box. Multi-start coordinate ascent; ties go to the larger region.
SelectionResult optimize_selection(const DensityTree& signal, const DensityTree& background,
                                   const YieldConfig& yields, std::span<const std::string> dims);

/// Sorted distinct leaf boundary coordinates of both trees along one dimension.
std::vector<double> boundary_candidates(const DensityTree& signal, const DensityTree& background, std::size_t dim);

/// Piecewise-constant tree or its smeared version, as used in likelihood ratios.
class DensityModel {
 public:
  DensityModel(DensityTree tree);     // NOLINT(google-explicit-constructor)
  DensityModel(SmearedModel smeared);  // NOLINT(google-explicit-constructor)

  const DensityTree& tree() const noexcept;
  bool smeared() const noexcept { return std::holds_alternative<SmearedModel>(model_); }
  const std::vector<std::string>& columns() const noexcept { return tree().columns(); }
  double evaluate(std::span<const double> x) const;
  /// 1 / (N_tot * V(root box)): one entry spread over the whole box.
  double floor() const noexcept;

 private:
  std::variant<DensityTree, SmearedModel> model_;
};

/// log(f_S(x) / f_B(x)) with each density raised to at least its model floor.
double delta_log_likelihood(const DensityModel& signal, const DensityModel& background, std::span<const double> x);

/// Integral of the estimator along `dim` with the other coordinates of x held fixed.
double conditional_line_integral(const DensityTree& tree, std::size_t dim, std::span<const double> x);

/// Named values of one evaluation row.
struct Record {
  std::vector<std::string> columns;
  std::vector<double> values;

  std::optional<double> get(std::string_view name) const;
};

enum class FactorRole { Numerator, Denominator };

struct LikelihoodFactor {
  DensityModel model;
  FactorRole role = FactorRole::Numerator;
  /// Record column feeding each model column, in model column order; empty
  /// means the record uses the model's own column names.
  std::vector<std::string> inputs;
  /// Model column to normalize over, turning the factor into a conditional density.
  std::optional<std::string> conditional_dim;
};

struct LikelihoodSpec {
  std::vector<LikelihoodFactor> factors;
};

/// LikelihoodSpec bound to a fixed record layout for repeated evaluation.
class LikelihoodEvaluator {
 public:
  LikelihoodEvaluator(const LikelihoodSpec& spec, std::span<const std::string> record_columns);
  double operator()(std::span<const double> record_values) const;

 private:
  struct Bound {
    const LikelihoodFactor* factor;
    std::vector<std::size_t> record_index;
    std::optional<std::size_t> conditional;
  };
  std::vector<Bound> bound_;
  std::size_t width_ = 0;
};

/// Sum of log values of numerator factors minus those of denominator factors.
/// A conditional factor contributes log(f / line integral), floored at
/// 1 / (N_tot * root extent along the conditional dimension).
double composite_log_likelihood(const LikelihoodSpec& spec, const Record& record);

}  // namespace detree
