#include "detree/growth.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <queue>
#include <string>

#include "detree/errors.hpp"

namespace detree {

std::string_view stop_reason_name(StopReason r) noexcept {
  switch (r) {
    case StopReason::NoCandidates: return "no_candidates";
    case StopReason::MinCount: return "min_count";
    case StopReason::MinWidth: return "min_width";
    case StopReason::NoGain: return "no_gain";
    case StopReason::MaxLeaves: return "max_leaves";
  }
  return "unknown";
}

void StopCondition::validate(std::size_t dims) const {
  if (min_count < 1) throw ConfigError("invalid-stop", "min_count must be at least 1");
  if (!min_widths.empty()) {
    if (min_widths.size() != dims) throw DimensionError(dims, min_widths.size());
    for (double w : min_widths) {
      if (!(w > 0.0) || !std::isfinite(w)) throw ConfigError("invalid-stop", "min_widths must be positive");
    }
  }
  if (max_leaves && *max_leaves < 1) throw ConfigError("invalid-stop", "max_leaves must be at least 1");
}

double replacement_error(std::uint64_t count, double volume, std::uint64_t n_tot) {
  if (!(volume > 0.0)) throw NumericError("non-positive-volume", "replacement error needs a positive volume");
  const double n = static_cast<double>(count);
  const double t = static_cast<double>(n_tot);
  return -(n * n) / (t * t * volume);
}

namespace {

struct ScanOutcome {
  std::optional<SplitCandidate> best;
  bool has_distinct = false;
  bool count_ok = false;
  bool width_ok = false;
};

// Scans the cuts of one dimension given the entries' coordinates in ascending order.
void scan_dimension(std::span<const double> sorted, std::size_t dim, const Box& box, double parent_error,
                    const StopCondition& stop, std::uint64_t n_tot, ScanOutcome& out) {
  const std::size_t n = sorted.size();
  if (n < 2 || !(sorted.front() < sorted.back())) return;
  out.has_distinct = true;
  const std::size_t min_count = static_cast<std::size_t>(stop.min_count);
  if (2 * min_count > n) return;
  const double lo = box.lo(dim);
  const double hi = box.hi(dim);
  const double min_width = stop.min_widths.empty() ? 0.0 : stop.min_widths[dim];
  const std::size_t first = std::max<std::size_t>(1, min_count);
  const std::size_t last = n - min_count;
  for (std::size_t i = first; i <= last; ++i) {
    const double a = sorted[i - 1];
    const double b = sorted[i];
    if (!(a < b)) continue;
    const double cut = std::midpoint(a, b);
    if (!(a < cut && cut < b)) continue;
    out.count_ok = true;
    const double width_lo = cut - lo;
    const double width_hi = hi - cut;
    if (width_lo < min_width || width_hi < min_width) continue;
    out.width_ok = true;
    const double gain = parent_error -
                        replacement_error(i, volume_with_width(box, dim, width_lo), n_tot) -
                        replacement_error(n - i, volume_with_width(box, dim, width_hi), n_tot);
    if (gain > 0.0 && (!out.best || gain > out.best->gain)) out.best = SplitCandidate{dim, cut, gain};
  }
}

StopReason reason_for(const ScanOutcome& s) {
  if (!s.has_distinct) return StopReason::NoCandidates;
  if (!s.count_ok) return StopReason::MinCount;
  if (!s.width_ok) return StopReason::MinWidth;
  return StopReason::NoGain;
}

void check_inside(const DataTable& data, std::span<const std::size_t> rows, const Box& box) {
  if (box.dims() != data.dims()) throw DimensionError(data.dims(), box.dims());
  for (std::size_t r : rows) {
    if (r >= data.rows()) throw ConfigError("row-out-of-range", "row index out of range");
    if (!box.contains(data.row(r))) {
      throw ConfigError("box-excludes-data", "row " + std::to_string(r) + " lies outside the root box");
    }
  }
}

using Index = std::uint32_t;

struct RawNode {
  std::uint64_t count = 0;
  int split_dim = -1;
  double split_value = 0.0;
  std::size_t left = 0, right = 0;
  double gain = 0.0;
  StopReason reason = StopReason::NoGain;
};

struct Pending {
  std::size_t raw = 0;
  Box box;
  std::vector<std::vector<Index>> sorted;  // per dimension, entries ordered by that coordinate
  ScanOutcome scan;
};

class Grower {
 public:
  Grower(const DataTable& data, const StopCondition& stop, std::uint64_t n_tot)
      : data_(data), stop_(stop), n_tot_(n_tot), goes_left_(data.rows(), 0) {}

  void evaluate(Pending& p) {
    const std::size_t n = p.sorted.front().size();
    const double parent_error = replacement_error(n, p.box.volume(), n_tot_);
    p.scan = ScanOutcome{};
    scratch_.resize(n);
    for (std::size_t dim = 0; dim < data_.dims(); ++dim) {
      const auto& order = p.sorted[dim];
      for (std::size_t i = 0; i < n; ++i) scratch_[i] = data_(order[i], dim);
      scan_dimension(scratch_, dim, p.box, parent_error, stop_, n_tot_, p.scan);
    }
  }

  std::pair<Pending, Pending> split(Pending& p) {
    const auto& cut = *p.scan.best;
    for (Index r : p.sorted[cut.dim]) goes_left_[r] = data_(r, cut.dim) < cut.cut ? 1 : 0;
    Pending l, r;
    l.box = p.box.lower_part(cut.dim, cut.cut);
    r.box = p.box.upper_part(cut.dim, cut.cut);
    l.sorted.resize(data_.dims());
    r.sorted.resize(data_.dims());
    for (std::size_t dim = 0; dim < data_.dims(); ++dim) {
      for (Index idx : p.sorted[dim]) (goes_left_[idx] ? l.sorted[dim] : r.sorted[dim]).push_back(idx);
      std::vector<Index>().swap(p.sorted[dim]);
    }
    return {std::move(l), std::move(r)};
  }

 private:
  const DataTable& data_;
  const StopCondition& stop_;
  std::uint64_t n_tot_;
  std::vector<char> goes_left_;
  std::vector<double> scratch_;
};

NodeSpec to_spec(const std::vector<RawNode>& raw, std::size_t id) {
  const RawNode& n = raw[id];
  if (n.split_dim < 0) return NodeSpec::leaf(n.count);
  return NodeSpec::split(n.split_dim, n.split_value, to_spec(raw, n.left), to_spec(raw, n.right));
}

}  // namespace

std::optional<SplitCandidate> best_split(const DataTable& data, std::span<const std::size_t> entries,
                                         const Box& box, const StopCondition& stop, std::uint64_t n_tot) {
  stop.validate(data.dims());
  check_inside(data, entries, box);
  ScanOutcome out;
  const double parent_error = replacement_error(entries.size(), box.volume(), n_tot);
  std::vector<double> values(entries.size());
  for (std::size_t dim = 0; dim < data.dims(); ++dim) {
    for (std::size_t i = 0; i < entries.size(); ++i) values[i] = data(entries[i], dim);
    std::sort(values.begin(), values.end());
    scan_dimension(values, dim, box, parent_error, stop, n_tot, out);
  }
  return out.best;
}

GrowthResult grow_with_report(const DataTable& data, std::span<const std::size_t> rows, const Box& box,
                              const StopCondition& stop) {
  if (rows.empty()) throw EmptyInputError("cannot grow a tree from an empty sample");
  if (data.rows() >= std::numeric_limits<Index>::max()) throw ConfigError("too-many-rows", "sample too large");
  stop.validate(data.dims());
  check_inside(data, rows, box);
  const std::uint64_t n_tot = rows.size();

  Grower grower(data, stop, n_tot);
  std::vector<RawNode> raw;
  std::vector<Pending> pending;

  Pending root;
  root.raw = 0;
  root.box = box;
  root.sorted.resize(data.dims());
  for (std::size_t dim = 0; dim < data.dims(); ++dim) {
    auto& order = root.sorted[dim];
    order.reserve(rows.size());
    for (std::size_t r : rows) order.push_back(static_cast<Index>(r));
    std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) { return data(a, dim) < data(b, dim); });
  }
  raw.push_back(RawNode{n_tot});
  grower.evaluate(root);

  // Best-first by gain so that a max_leaves cap keeps the most useful splits;
  // without a cap the resulting tree does not depend on the order.
  auto worse = [&](std::size_t a, std::size_t b) {
    const double ga = pending[a].scan.best->gain, gb = pending[b].scan.best->gain;
    if (ga != gb) return ga < gb;
    return pending[a].raw > pending[b].raw;
  };
  std::priority_queue<std::size_t, std::vector<std::size_t>, decltype(worse)> queue(worse);
  std::size_t n_leaves = 1;

  auto settle = [&](Pending&& p) {
    if (p.scan.best) {
      pending.push_back(std::move(p));
      queue.push(pending.size() - 1);
    } else {
      raw[p.raw].reason = reason_for(p.scan);
    }
  };
  settle(std::move(root));

  while (!queue.empty()) {
    const std::size_t slot = queue.top();
    queue.pop();
    Pending& p = pending[slot];
    if (stop.max_leaves && n_leaves >= *stop.max_leaves) {
      raw[p.raw].reason = StopReason::MaxLeaves;
      p.sorted.clear();
      continue;
    }
    const SplitCandidate cut = *p.scan.best;
    auto [l, r] = grower.split(p);
    const std::size_t parent = p.raw;
    l.raw = raw.size();
    raw.push_back(RawNode{l.sorted.front().size()});
    r.raw = raw.size();
    raw.push_back(RawNode{r.sorted.front().size()});
    raw[parent].split_dim = static_cast<int>(cut.dim);
    raw[parent].split_value = cut.cut;
    raw[parent].left = l.raw;
    raw[parent].right = r.raw;
    raw[parent].gain = cut.gain;
    ++n_leaves;
    grower.evaluate(l);
    grower.evaluate(r);
    settle(std::move(l));
    settle(std::move(r));
  }

  Provenance prov;
  prov.min_count = stop.min_count;
  prov.min_widths = stop.min_widths;
  prov.max_leaves = stop.max_leaves;
  DensityTree tree(data.columns(), n_tot, box, to_spec(raw, 0), std::move(prov));

  // Map raw creation order onto the tree's pre-order ids.
  GrowthReport report;
  report.n_leaves = tree.n_leaves();
  report.gains.assign(tree.size(), 0.0);
  report.leaf_reasons.assign(tree.size(), StopReason::NoGain);
  std::vector<std::size_t> stack{0};
  NodeId next = 0;
  while (!stack.empty()) {
    const std::size_t id = stack.back();
    stack.pop_back();
    const NodeId out = next++;
    const RawNode& n = raw[id];
    if (n.split_dim >= 0) {
      report.gains[out] = n.gain;
      stack.push_back(n.right);
      stack.push_back(n.left);
    } else {
      report.leaf_reasons[out] = n.reason;
      ++report.stop_histogram[static_cast<std::size_t>(n.reason)];
    }
  }
  return GrowthResult{std::move(tree), std::move(report)};
}

DensityTree grow(const DataTable& data, std::span<const std::size_t> rows, const Box& box,
                 const StopCondition& stop) {
  return grow_with_report(data, rows, box, stop).tree;
}

DensityTree grow(const DataTable& data, const Box& box, const StopCondition& stop) {
  std::vector<std::size_t> rows(data.rows());
  std::iota(rows.begin(), rows.end(), std::size_t{0});
  return grow_with_report(data, rows, box, stop).tree;
}

}  // namespace detree
