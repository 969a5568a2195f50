#include "detree/crossval.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "detree/errors.hpp"

namespace detree {

Bandwidths::Bandwidths(std::vector<double> widths) : h(std::move(widths)) {
  if (h.empty()) throw ConfigError("invalid-bandwidth", "bandwidths need at least one dimension");
  for (double v : h) {
    if (!(v > 0.0) || !std::isfinite(v)) throw ConfigError("invalid-bandwidth", "bandwidths must be positive");
  }
}

Bandwidths silverman_bandwidths(const DataTable& data, double factor) {
  if (!(factor > 0.0) || !std::isfinite(factor)) {
    throw ConfigError("invalid-bandwidth", "Silverman factor must be positive");
  }
  const std::size_t d = data.dims();
  const double n = static_cast<double>(data.rows());
  const double scale = factor * std::pow(n, -1.0 / (static_cast<double>(d) + 4.0));
  std::vector<double> h(d);
  for (std::size_t k = 0; k < d; ++k) {
    double mean = 0.0;
    for (std::size_t i = 0; i < data.rows(); ++i) mean += data(i, k);
    mean /= n;
    double ss = 0.0;
    for (std::size_t i = 0; i < data.rows(); ++i) ss += (data(i, k) - mean) * (data(i, k) - mean);
    double sigma = data.rows() > 1 ? std::sqrt(ss / (n - 1.0)) : 0.0;
    if (!(sigma > 0.0)) sigma = 1e-3 * std::max(std::abs(mean), 1.0);
    h[k] = scale * sigma;
  }
  return Bandwidths(std::move(h));
}

double overlap_integral(double lo, double hi, double x, double h) {
  if (!(h > 0.0)) throw ConfigError("invalid-bandwidth", "kernel width must be positive");
  if (!(lo < hi)) return 0.0;
  // Closed form over [max(lo, x-h), min(hi, x+h)], split at the kernel peak so
  // each half is a trapezoid: width times mean height.
  double total = 0.0;
  const double left_edge = x - h;
  const double right_edge = x + h;
  if (lo <= left_edge && right_edge <= hi) return h;
  double a = std::max(lo, left_edge), b = std::min(hi, x);
  if (b > a) total += (b - a) * ((a - left_edge) + (b - left_edge)) / (2.0 * h);
  a = std::max(lo, x);
  b = std::min(hi, right_edge);
  if (b > a) total += (b - a) * ((right_edge - a) + (right_edge - b)) / (2.0 * h);
  return std::clamp(total, 0.0, std::min(h, hi - lo));
}

namespace {

double kernel_mass(const Box& box, std::span<const double> x, const Bandwidths& bw) {
  double mass = 1.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    const double f = overlap_integral(box.lo(k), box.hi(k), x[k], bw.h[k]);
    if (f == 0.0) return 0.0;
    mass *= f / bw.h[k];
  }
  return mass;
}

void check_bandwidths(const Bandwidths& bw, std::size_t dims) {
  if (bw.dims() != dims) {
    throw ConfigError("bandwidth-missing", "need " + std::to_string(dims) + " bandwidths, got " +
                                               std::to_string(bw.dims()));
  }
}

// Sum over the leaves of the pruned tree of a per-node term, for ascending alphas.
std::vector<double> pruned_sum_curve(const DensityTree& tree, const PruneProfile& profile,
                                     std::span<const double> alphas, const std::vector<double>& term) {
  check_profile_matches(tree, profile);
  const std::size_t n = tree.size();
  std::vector<double> below(n, 0.0);
  double total = 0.0;
  for (NodeId i = n; i-- > 0;) {
    const TreeNode& node = tree.node(i);
    below[i] = node.is_leaf() ? term[i] : below[node.left] + below[node.right];
  }
  for (NodeId leaf : tree.leaves()) total += term[leaf];

  std::vector<double> out;
  out.reserve(alphas.size());
  std::size_t step = 0;
  for (double alpha : alphas) {
    while (step < profile.steps.size() && profile.steps[step].alpha <= alpha) {
      const NodeId id = profile.steps[step].node;
      const double delta = term[id] - below[id];
      below[id] = term[id];
      for (NodeId a = tree.node(id).parent; a != kNoNode; a = tree.node(a).parent) below[a] += delta;
      total += delta;
      ++step;
    }
    out.push_back(total);
  }
  return out;
}

std::vector<double> sorted_copy(std::span<const double> alphas) {
  std::vector<double> s(alphas.begin(), alphas.end());
  if (!std::is_sorted(s.begin(), s.end())) throw ConfigError("unsorted-alphas", "alphas must be ascending");
  return s;
}

}  // namespace

double expected_kernel_count(const Box& box, const DataTable& data, const Bandwidths& bw) {
  check_bandwidths(bw, data.dims());
  if (box.dims() != data.dims()) throw DimensionError(data.dims(), box.dims());
  double total = 0.0;
  for (std::size_t i = 0; i < data.rows(); ++i) total += kernel_mass(box, data.row(i), bw);
  return total;
}

std::vector<double> expected_kernel_counts(const DensityTree& tree, const DataTable& data, const Bandwidths& bw) {
  check_bandwidths(bw, tree.dims());
  if (data.dims() != tree.dims()) throw DimensionError(tree.dims(), data.dims());
  std::vector<double> counts(tree.size(), 0.0);
  for (NodeId leaf : tree.leaves()) counts[leaf] = expected_kernel_count(tree.node(leaf).box, data, bw);
  for (NodeId i = tree.size(); i-- > 0;) {
    const TreeNode& n = tree.node(i);
    if (!n.is_leaf()) counts[i] = counts[n.left] + counts[n.right];
  }
  return counts;
}

QualityCurve quality_kernel(const DensityTree& tree, const PruneProfile& profile, const DataTable& data,
                            const Bandwidths& bw) {
  check_bandwidths(bw, tree.dims());
  check_profile_matches(tree, profile);
  const auto kernel_counts = expected_kernel_counts(tree, data, bw);
  const double n_tot = static_cast<double>(tree.n_tot());
  std::vector<double> term(tree.size());
  for (NodeId i = 0; i < tree.size(); ++i) {
    const TreeNode& n = tree.node(i);
    const double count = static_cast<double>(n.count);
    term[i] = (count / n.box.volume()) * (2.0 * kernel_counts[i] - count) / (n_tot * n_tot);
  }
  const auto alphas = profile.candidate_alphas();
  const auto q = pruned_sum_curve(tree, profile, alphas, term);
  QualityCurve curve;
  for (std::size_t i = 0; i < alphas.size(); ++i) curve.points.push_back({alphas[i], q[i]});
  for (std::size_t i = 1; i < curve.points.size(); ++i) {
    if (curve.points[i].q >= curve.points[curve.argmax].q) curve.argmax = i;
  }
  return curve;
}

double select_alpha(const QualityCurve& curve) {
  if (curve.points.empty()) throw ConfigError("empty-curve", "quality curve is empty");
  std::size_t best = 0;
  for (std::size_t i = 1; i < curve.points.size(); ++i) {
    const auto& p = curve.points[i];
    const auto& b = curve.points[best];
    if (p.q > b.q || (p.q == b.q && p.alpha > b.alpha)) best = i;
  }
  return curve.points[best].alpha;
}

std::vector<double> squared_integral_curve(const DensityTree& tree, const PruneProfile& profile,
                                           std::span<const double> alphas) {
  const double n_tot = static_cast<double>(tree.n_tot());
  std::vector<double> term(tree.size());
  for (NodeId i = 0; i < tree.size(); ++i) {
    const TreeNode& n = tree.node(i);
    const double count = static_cast<double>(n.count);
    term[i] = count * count / (n_tot * n_tot * n.box.volume());
  }
  return pruned_sum_curve(tree, profile, sorted_copy(alphas), term);
}

std::vector<double> loo_curve(const DataTable& data, const Box& box, const StopCondition& stop, ComplexityKind kind,
                              std::span<const double> alphas, LooOptions options) {
  const std::size_t n = data.rows();
  if (n > options.max_entries) {
    throw ConfigError("loo-cap", "leave-one-out needs one tree per entry; " + std::to_string(n) +
                                     " entries exceed the cap of " + std::to_string(options.max_entries) +
                                     ", use kernel cross-validation (quality_kernel) instead");
  }
  if (n < 2) throw ConfigError("loo-too-small", "leave-one-out needs at least two entries");
  const auto sorted_alphas = sorted_copy(alphas);

  std::vector<std::size_t> all(n);
  std::iota(all.begin(), all.end(), std::size_t{0});
  const DensityTree full = grow(data, all, box, stop);
  const PruneProfile full_profile = prune_sequence(full, kind);
  const auto squared = squared_integral_curve(full, full_profile, sorted_alphas);

  std::vector<double> held_out(sorted_alphas.size(), 0.0);
  std::vector<std::size_t> rows;
  rows.reserve(n - 1);
  std::vector<NodeId> path;
  for (std::size_t i = 0; i < n; ++i) {
    rows.clear();
    for (std::size_t r = 0; r < n; ++r) {
      if (r != i) rows.push_back(r);
    }
    const DensityTree tree = grow(data, rows, box, stop);
    const PruneProfile profile = prune_sequence(tree, kind);
    std::vector<double> collapse_at(tree.size(), std::numeric_limits<double>::infinity());
    for (const auto& s : profile.steps) collapse_at[s.node] = s.alpha;

    const auto x = data.row(i);
    path.clear();
    for (NodeId id = 0;; ) {
      path.push_back(id);
      const TreeNode& node = tree.node(id);
      if (node.is_leaf()) break;
      id = x[static_cast<std::size_t>(node.split_dim)] < node.split_value ? node.left : node.right;
    }
    for (std::size_t a = 0; a < sorted_alphas.size(); ++a) {
      NodeId owner = path.back();
      for (NodeId id : path) {
        if (collapse_at[id] <= sorted_alphas[a]) {
          owner = id;
          break;
        }
      }
      held_out[a] += tree.node_density(owner);
    }
  }
  std::vector<double> risk(sorted_alphas.size());
  for (std::size_t a = 0; a < risk.size(); ++a) {
    risk[a] = squared[a] - 2.0 / static_cast<double>(n) * held_out[a];
  }
  return risk;
}

double loo_risk(const DataTable& data, const Box& box, const StopCondition& stop, ComplexityKind kind, double alpha,
                LooOptions options) {
  const double a[1] = {alpha};
  return loo_curve(data, box, stop, kind, a, options).front();
}

}  // namespace detree
