#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "detree/box.hpp"
#include "detree/data_table.hpp"
#include "detree/growth.hpp"
#include "detree/pruning.hpp"
#include "detree/tree.hpp"

namespace detree {

/// Per-dimension triangular kernel widths, all strictly positive.
struct Bandwidths {
  std::vector<double> h;

  Bandwidths() = default;
  explicit Bandwidths(std::vector<double> widths);
  std::size_t dims() const noexcept { return h.size(); }
};

/// h_k = factor * sigma_k * N^(-1/(d+4)); sigma_k is the sample standard
/// deviation (a degenerate column falls back to 1e-3 of its magnitude, or 1e-3).
Bandwidths silverman_bandwidths(const DataTable& data, double factor = 2.0);

/// Integral over [lo, hi] of max(0, 1 - |z - x| / h) dz.
double overlap_integral(double lo, double hi, double x, double h);

/// Expected number of entries in the box: sum over entries of the product
/// over dimensions of overlap_integral / h_k.
double expected_kernel_count(const Box& box, const DataTable& data, const Bandwidths& bw);

/// Expected kernel count for every node of the tree; leaves are computed
/// from the data and internal nodes as the sum of their children.
std::vector<double> expected_kernel_counts(const DensityTree& tree, const DataTable& data, const Bandwidths& bw);

struct QualityPoint {
  double alpha = 0.0;
  double q = 0.0;
};

struct QualityCurve {
  std::vector<QualityPoint> points;  // ascending alpha
  std::size_t argmax = 0;
};

/// Kernel quality (1/N^2) sum_j (N_j/V_j)(2 Nker_j - N_j) of the pruned tree for
/// each candidate alpha of the profile.
QualityCurve quality_kernel(const DensityTree& tree, const PruneProfile& profile, const DataTable& data,
                            const Bandwidths& bw);

/// Alpha of the highest-quality point; ties go to the larger alpha.
double select_alpha(const QualityCurve& curve);

struct LooOptions {
  std::size_t max_entries = 500;
};

/// Leave-one-out risk for each alpha: the integral of the squared estimate
/// minus (2/N) times the sum of held-out densities. Every retraining uses
/// the same box and stop condition.
std::vector<double> loo_curve(const DataTable& data, const Box& box, const StopCondition& stop, ComplexityKind kind,
                              std::span<const double> alphas, LooOptions options = {});
double loo_risk(const DataTable& data, const Box& box, const StopCondition& stop, ComplexityKind kind, double alpha,
                LooOptions options = {});

/// Integral of the squared pruned estimator, for every alpha.
std::vector<double> squared_integral_curve(const DensityTree& tree, const PruneProfile& profile,
                                           std::span<const double> alphas);

}  // namespace detree
