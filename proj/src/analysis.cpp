#include "detree/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <string>

#include "detree/errors.hpp"

namespace detree {

SelectionRegion::SelectionRegion(std::vector<Interval> bounds) : bounds_(std::move(bounds)) {
  for (std::size_t k = 0; k < bounds_.size(); ++k) set(k, bounds_[k]);
}

SelectionRegion SelectionRegion::full(const Box& box) {
  std::vector<Interval> b(box.dims());
  for (std::size_t k = 0; k < box.dims(); ++k) b[k] = {box.lo(k), box.hi(k)};
  return SelectionRegion(std::move(b));
}

void SelectionRegion::set(std::size_t k, Interval iv) {
  if (!(iv.lo <= iv.hi) || std::isnan(iv.lo) || std::isnan(iv.hi))
    throw ConfigError("bad-region", "region interval " + std::to_string(k) + " has lo > hi");
  bounds_.at(k) = iv;
}

double SelectionRegion::volume() const noexcept {
  double v = 1.0;
  for (const auto& iv : bounds_) v *= iv.length();
  return v;
}

void YieldConfig::validate() const {
  if (!std::isfinite(s_infinity) || !std::isfinite(b_infinity) || s_infinity < 0 || b_infinity < 0)
    throw ConfigError("bad-yield", "expected yields must be finite and non-negative");
}

namespace {

double overlap(double lo, double hi, const Interval& iv) {
  const double a = std::max(lo, iv.lo);
  const double b = std::min(hi, iv.hi);
  return b > a ? b - a : 0.0;
}

void check_region(const DensityTree& tree, const SelectionRegion& region) {
  if (region.dims() != tree.dims()) throw DimensionError(tree.dims(), region.dims());
}

// Fraction of the node box inside the region, 1.0 exactly when fully inside.
double inside_fraction(const Box& box, const SelectionRegion& region, bool& whole) {
  double f = 1.0;
  whole = true;
  for (std::size_t k = 0; k < box.dims(); ++k) {
    const Interval& iv = region[k];
    if (iv.lo <= box.lo(k) && box.hi(k) <= iv.hi) continue;
    whole = false;
    const double o = overlap(box.lo(k), box.hi(k), iv);
    if (o <= 0.0) return 0.0;
    f *= o / box.width(k);
  }
  return f;
}

}  // namespace

double integrate_region(const DensityTree& tree, const SelectionRegion& region) {
  check_region(tree, region);
  const double n = static_cast<double>(tree.n_tot());
  double sum = 0.0;
  std::vector<NodeId> stack{0};
  while (!stack.empty()) {
    const NodeId id = stack.back();
    stack.pop_back();
    const TreeNode& nd = tree.node(id);
    if (nd.count == 0) continue;
    bool whole = false;
    const double f = inside_fraction(nd.box, region, whole);
    if (f <= 0.0) continue;
    if (whole || nd.is_leaf()) {
      sum += static_cast<double>(nd.count) * f;
      continue;
    }
    stack.push_back(nd.right);
    stack.push_back(nd.left);
  }
  return std::min(sum / n, 1.0);
}

namespace {

double metric_of(double s, double b) { return s / (1.0 + s + b); }

void check_pair(const DensityTree& signal, const DensityTree& background) {
  if (signal.columns() != background.columns())
    throw ConfigError("column-mismatch", "signal and background models have different columns");
}

}  // namespace

double selection_metric(const SelectionRegion& region, const DensityTree& signal, const DensityTree& background,
                        const YieldConfig& yields) {
  yields.validate();
  check_pair(signal, background);
  const double s = yields.s_infinity * integrate_region(signal, region);
  const double b = yields.b_infinity * integrate_region(background, region);
  return metric_of(s, b);
}

std::vector<double> boundary_candidates(const DensityTree& signal, const DensityTree& background, std::size_t dim) {
  std::vector<double> c;
  for (const DensityTree* t : {&signal, &background}) {
    c.push_back(t->root_box().lo(dim));
    c.push_back(t->root_box().hi(dim));
    for (NodeId id : t->leaves()) {
      c.push_back(t->node(id).box.lo(dim));
      c.push_back(t->node(id).box.hi(dim));
    }
  }
  std::sort(c.begin(), c.end());
  c.erase(std::unique(c.begin(), c.end()), c.end());
  return c;
}

namespace {

constexpr double kTieTolerance = 1e-13;
constexpr int kStarts = 8;
constexpr double kLatticeBudget = 3e7;  // region evaluations for the exact search

struct Leaf {
  std::vector<double> lo, hi;
  double mass;  // count / N_tot times the yield
};

// Region state expressed as candidate-index pairs over the searched dimensions.
class Search {
 public:
  Search(const DensityTree& sig, const DensityTree& bkg, const YieldConfig& y, std::vector<std::size_t> dims)
      : dims_(std::move(dims)) {
    const std::size_t d = sig.dims();
    full_lo_.resize(d);
    full_hi_.resize(d);
    for (std::size_t k = 0; k < d; ++k) {
      full_lo_[k] = std::min(sig.root_box().lo(k), bkg.root_box().lo(k));
      full_hi_[k] = std::max(sig.root_box().hi(k), bkg.root_box().hi(k));
    }
    for (std::size_t m : dims_) cand_.push_back(boundary_candidates(sig, bkg, m));
    add_leaves(sig, y.s_infinity, sig_);
    add_leaves(bkg, y.b_infinity, bkg_);
  }

  std::size_t n_dims() const { return dims_.size(); }
  std::size_t n_cand(std::size_t j) const { return cand_[j].size(); }

  struct State {
    std::vector<std::size_t> a, b;
  };

  State full_state() const {
    State s;
    for (const auto& c : cand_) {
      s.a.push_back(0);
      s.b.push_back(c.size() - 1);
    }
    return s;
  }

  double width(const State& s, std::size_t j) const { return cand_[j][s.b[j]] - cand_[j][s.a[j]]; }

  double volume(const State& s) const {
    double v = 1.0;
    for (std::size_t j = 0; j < dims_.size(); ++j) v *= width(s, j);
    return v;
  }

  SelectionRegion region(const State& s) const {
    std::vector<Interval> b(full_lo_.size());
    for (std::size_t k = 0; k < b.size(); ++k) b[k] = {full_lo_[k], full_hi_[k]};
    for (std::size_t j = 0; j < dims_.size(); ++j) b[dims_[j]] = {cand_[j][s.a[j]], cand_[j][s.b[j]]};
    return SelectionRegion(std::move(b));
  }

  // Best interval along searched dimension j with the others held; returns true on a move.
  bool step(State& s, std::size_t j) const {
    const auto& c = cand_[j];
    const std::vector<double> fs = cumulative(sig_, s, j);
    const std::vector<double> fb = cumulative(bkg_, s, j);
    std::size_t ba = s.a[j], bb = s.b[j];
    double best = metric_of(fs[bb] - fs[ba], fb[bb] - fb[ba]);
    double best_w = c[bb] - c[ba];
    for (std::size_t ia = 0; ia < c.size(); ++ia) {
      for (std::size_t ib = ia + 1; ib < c.size(); ++ib) {
        const double m = metric_of(fs[ib] - fs[ia], fb[ib] - fb[ia]);
        const double w = c[ib] - c[ia];
        if (m > best + kTieTolerance || (m >= best - kTieTolerance && w > best_w)) {
          best = m;
          best_w = w;
          ba = ia;
          bb = ib;
        }
      }
    }
    if (ba == s.a[j] && bb == s.b[j]) return false;
    s.a[j] = ba;
    s.b[j] = bb;
    return true;
  }

  State ascend(State s, std::size_t first) const {
    const std::size_t n = dims_.size();
    std::size_t quiet = 0;  // consecutive dimensions without a move
    std::size_t j = first % n;
    for (std::size_t iter = 0; quiet < n && iter < 200 * n; ++iter) {
      quiet = step(s, j) ? 0 : quiet + 1;
      j = (j + 1) % n;
    }
    return s;
  }

  State random_state(std::uint64_t seed) const {
    std::mt19937_64 rng(seed);
    State s;
    for (const auto& c : cand_) {
      std::size_t x = rng() % c.size(), y = rng() % c.size();
      if (x == y) y = (x + 1 < c.size()) ? x + 1 : x - 1;
      s.a.push_back(std::min(x, y));
      s.b.push_back(std::max(x, y));
    }
    return s;
  }

  double lattice_regions() const {
    double r = 1.0, cells = 1.0;
    for (const auto& c : cand_) {
      const double k = static_cast<double>(c.size());
      r *= k * (k - 1) / 2;
      cells *= k;
    }
    return cells > 4e6 ? std::numeric_limits<double>::infinity() : r;
  }

  // Exhaustive search of every candidate box using corner sums.
  State exact() const {
    const std::size_t n = dims_.size();
    std::vector<std::size_t> shape(n), stride(n);
    std::size_t total = 1;
    for (std::size_t j = n; j-- > 0;) {
      shape[j] = cand_[j].size();
      stride[j] = total;
      total *= shape[j];
    }
    const std::vector<double> ps = prefix(sig_, shape, stride, total);
    const std::vector<double> pb = prefix(bkg_, shape, stride, total);
    auto corner_sum = [&](const std::vector<double>& p, const State& s) {
      double acc = 0.0;
      for (std::size_t mask = 0; mask < (std::size_t{1} << n); ++mask) {
        std::size_t off = 0;
        int sign = 1;
        for (std::size_t j = 0; j < n; ++j) {
          if (mask >> j & 1) {
            off += s.a[j] * stride[j];
            sign = -sign;
          } else {
            off += s.b[j] * stride[j];
          }
        }
        acc += sign * p[off];
      }
      return acc;
    };
    State cur;
    cur.a.assign(n, 0);
    cur.b.assign(n, 1);
    State best = full_state();
    double best_m = metric_of(corner_sum(ps, best), corner_sum(pb, best));
    double best_v = volume(best);
    while (true) {
      const double m = metric_of(corner_sum(ps, cur), corner_sum(pb, cur));
      if (m > best_m + kTieTolerance || (m >= best_m - kTieTolerance && volume(cur) > best_v)) {
        best = cur;
        best_m = m;
        best_v = volume(cur);
      }
      std::size_t j = n;
      while (j-- > 0) {
        if (++cur.b[j] < shape[j]) break;
        if (++cur.a[j] + 1 < shape[j]) {
          cur.b[j] = cur.a[j] + 1;
          break;
        }
        cur.a[j] = 0;
        cur.b[j] = 1;
      }
      if (j == static_cast<std::size_t>(-1)) break;
    }
    return best;
  }

 private:
  void add_leaves(const DensityTree& t, double yield, std::vector<Leaf>& out) const {
    const double n = static_cast<double>(t.n_tot());
    for (NodeId id : t.leaves()) {
      const TreeNode& nd = t.node(id);
      if (nd.count == 0) continue;
      out.push_back({nd.box.lo(), nd.box.hi(), yield * static_cast<double>(nd.count) / n});
    }
  }

  std::size_t index_of(std::size_t j, double v) const {
    const auto& c = cand_[j];
    return static_cast<std::size_t>(std::lower_bound(c.begin(), c.end(), v) - c.begin());
  }

  // Fraction of the leaf inside the current state along searched dimension i.
  double fraction(const Leaf& l, const State& s, std::size_t i) const {
    const std::size_t m = dims_[i];
    const double lo = std::max(l.lo[m], cand_[i][s.a[i]]);
    const double hi = std::min(l.hi[m], cand_[i][s.b[i]]);
    return hi > lo ? (hi - lo) / (l.hi[m] - l.lo[m]) : 0.0;
  }

  // Yield-scaled mass in [c_0, c_k] along dimension j, other searched dimensions as in s.
  std::vector<double> cumulative(const std::vector<Leaf>& leaves, const State& s, std::size_t j) const {
    const auto& c = cand_[j];
    const std::size_t m = dims_[j];
    std::vector<double> dens(c.size() + 1, 0.0);
    for (const Leaf& l : leaves) {
      double w = l.mass;
      for (std::size_t i = 0; i < dims_.size() && w > 0.0; ++i)
        if (i != j) w *= fraction(l, s, i);
      if (w <= 0.0) continue;
      const double rho = w / (l.hi[m] - l.lo[m]);
      dens[index_of(j, l.lo[m])] += rho;
      dens[index_of(j, l.hi[m])] -= rho;
    }
    std::vector<double> f(c.size(), 0.0);
    double rho = 0.0;
    for (std::size_t g = 0; g + 1 < c.size(); ++g) {
      rho += dens[g];
      f[g + 1] = f[g] + std::max(rho, 0.0) * (c[g + 1] - c[g]);
    }
    return f;
  }

  // Cumulative mass table over the candidate lattice: p[idx] = mass below the lattice point.
  std::vector<double> prefix(const std::vector<Leaf>& leaves, const std::vector<std::size_t>& shape,
                             const std::vector<std::size_t>& stride, std::size_t total) const {
    const std::size_t n = dims_.size();
    std::vector<double> cell(total, 0.0);
    std::vector<std::size_t> lo(n), hi(n), idx(n);
    for (const Leaf& l : leaves) {
      for (std::size_t j = 0; j < n; ++j) {
        lo[j] = index_of(j, l.lo[dims_[j]]);
        hi[j] = index_of(j, l.hi[dims_[j]]);
        if (lo[j] >= hi[j]) goto next;
      }
      idx = lo;
      while (true) {
        double w = l.mass;
        std::size_t off = 0;
        for (std::size_t j = 0; j < n; ++j) {
          const std::size_t m = dims_[j];
          w *= (cand_[j][idx[j] + 1] - cand_[j][idx[j]]) / (l.hi[m] - l.lo[m]);
          off += (idx[j] + 1) * stride[j];
        }
        cell[off] += w;
        std::size_t j = n;
        while (j-- > 0) {
          if (++idx[j] < hi[j]) break;
          idx[j] = lo[j];
        }
        if (j == static_cast<std::size_t>(-1)) break;
      }
    next:;
    }
    for (std::size_t j = 0; j < n; ++j) {
      for (std::size_t off = 0; off < total; ++off) {
        if ((off / stride[j]) % shape[j] == 0) continue;
        cell[off] += cell[off - stride[j]];
      }
    }
    return cell;
  }

  std::vector<std::size_t> dims_;
  std::vector<std::vector<double>> cand_;
  std::vector<double> full_lo_, full_hi_;
  std::vector<Leaf> sig_, bkg_;
};

}  // namespace

SelectionResult optimize_selection(const DensityTree& signal, const DensityTree& background,
                                   const YieldConfig& yields, std::span<const std::string> dims) {
  yields.validate();
  check_pair(signal, background);
  if (dims.empty()) throw ConfigError("no-dimensions", "optimize_selection needs at least one dimension");
  std::vector<std::size_t> idx;
  for (const auto& name : dims) {
    const auto& cols = signal.columns();
    const auto it = std::find(cols.begin(), cols.end(), name);
    if (it == cols.end()) throw MissingColumnError(name);
    const auto k = static_cast<std::size_t>(it - cols.begin());
    if (std::find(idx.begin(), idx.end(), k) != idx.end())
      throw ConfigError("duplicate-dimension", "dimension '" + name + "' listed twice");
    idx.push_back(k);
  }
  const Search search(signal, background, yields, idx);
  const std::size_t n = search.n_dims();

  std::vector<Search::State> finalists;
  for (std::size_t j = 0; j < n; ++j) {
    Search::State s = search.full_state();
    search.step(s, j);
    finalists.push_back(s);
  }
  for (int k = 0; k < kStarts; ++k) {
    const auto uk = static_cast<std::size_t>(k);
    if (uk < n) {
      finalists.push_back(search.ascend(search.full_state(), uk));
    } else {
      finalists.push_back(search.ascend(search.random_state(0x5eedULL + uk), uk % n));
    }
  }
  if (search.lattice_regions() <= kLatticeBudget) finalists.push_back(search.exact());

  std::optional<SelectionResult> best;
  double best_v = -1.0;
  for (const auto& s : finalists) {
    SelectionRegion r = search.region(s);
    const double m = selection_metric(r, signal, background, yields);
    const double v = search.volume(s);
    if (!best || m > best->metric + kTieTolerance || (m >= best->metric - kTieTolerance && v > best_v)) {
      best = SelectionResult{std::move(r), m};
      best_v = v;
    }
  }
  return *best;
}

DensityModel::DensityModel(DensityTree tree) : model_(std::move(tree)) {}
DensityModel::DensityModel(SmearedModel smeared) : model_(std::move(smeared)) {}

const DensityTree& DensityModel::tree() const noexcept {
  if (const auto* t = std::get_if<DensityTree>(&model_)) return *t;
  return std::get<SmearedModel>(model_).tree();
}

double DensityModel::evaluate(std::span<const double> x) const {
  if (const auto* t = std::get_if<DensityTree>(&model_)) return t->evaluate(x);
  return std::get<SmearedModel>(model_).evaluate(x);
}

double DensityModel::floor() const noexcept {
  const DensityTree& t = tree();
  return 1.0 / (static_cast<double>(t.n_tot()) * t.root_box().volume());
}

double delta_log_likelihood(const DensityModel& signal, const DensityModel& background, std::span<const double> x) {
  const double fs = std::max(signal.evaluate(x), signal.floor());
  const double fb = std::max(background.evaluate(x), background.floor());
  return std::log(fs) - std::log(fb);
}

double conditional_line_integral(const DensityTree& tree, std::size_t dim, std::span<const double> x) {
  if (x.size() != tree.dims()) throw DimensionError(tree.dims(), x.size());
  if (dim >= tree.dims()) throw ConfigError("bad-dimension", "conditional dimension out of range");
  const Box& root = tree.root_box();
  for (std::size_t k = 0; k < tree.dims(); ++k) {
    if (k == dim) continue;
    if (!(x[k] >= root.lo(k) && x[k] <= root.hi(k))) return 0.0;
  }
  double sum = 0.0;
  std::vector<NodeId> stack{0};
  while (!stack.empty()) {
    const TreeNode& nd = tree.node(stack.back());
    const NodeId id = stack.back();
    stack.pop_back();
    if (nd.is_leaf()) {
      sum += tree.node_density(id) * nd.box.width(dim);
      continue;
    }
    const auto k = static_cast<std::size_t>(nd.split_dim);
    if (k == dim) {
      stack.push_back(nd.right);
      stack.push_back(nd.left);
    } else {
      stack.push_back(x[k] < nd.split_value ? nd.left : nd.right);
    }
  }
  return sum;
}

std::optional<double> Record::get(std::string_view name) const {
  for (std::size_t i = 0; i < columns.size() && i < values.size(); ++i)
    if (columns[i] == name) return values[i];
  return std::nullopt;
}

LikelihoodEvaluator::LikelihoodEvaluator(const LikelihoodSpec& spec, std::span<const std::string> record_columns)
    : width_(record_columns.size()) {
  if (spec.factors.empty()) throw ConfigError("empty-likelihood", "likelihood needs at least one factor");
  for (const auto& f : spec.factors) {
    const auto& mcols = f.model.columns();
    const std::vector<std::string>& inputs = f.inputs.empty() ? mcols : f.inputs;
    if (inputs.size() != mcols.size()) throw DimensionError(mcols.size(), inputs.size());
    Bound b{&f, {}, std::nullopt};
    for (const auto& name : inputs) {
      const auto it = std::find(record_columns.begin(), record_columns.end(), name);
      if (it == record_columns.end()) throw MissingColumnError(name);
      b.record_index.push_back(static_cast<std::size_t>(it - record_columns.begin()));
    }
    if (f.conditional_dim) {
      const auto it = std::find(mcols.begin(), mcols.end(), *f.conditional_dim);
      if (it == mcols.end())
        throw ConfigError("bad-conditional", "conditional dimension '" + *f.conditional_dim +
                                                 "' is not a model column");
      if (f.model.smeared())
        throw ConfigError("bad-conditional", "conditional factors need a piecewise-constant model");
      b.conditional = static_cast<std::size_t>(it - mcols.begin());
    }
    bound_.push_back(std::move(b));
  }
}

double LikelihoodEvaluator::operator()(std::span<const double> record_values) const {
  if (record_values.size() != width_) throw DimensionError(width_, record_values.size());
  double total = 0.0;
  std::vector<double> x;
  for (const auto& b : bound_) {
    x.resize(b.record_index.size());
    for (std::size_t k = 0; k < x.size(); ++k) x[k] = record_values[b.record_index[k]];
    const DensityModel& model = b.factor->model;
    double value = 0.0;
    if (b.conditional) {
      const DensityTree& t = model.tree();
      const double eps = 1.0 / (static_cast<double>(t.n_tot()) * t.root_box().width(*b.conditional));
      const double f = model.evaluate(x);
      const double line = conditional_line_integral(t, *b.conditional, x);
      value = (f > 0.0 && line > 0.0) ? std::max(f / line, eps) : eps;
    } else {
      value = std::max(model.evaluate(x), model.floor());
    }
    total += b.factor->role == FactorRole::Numerator ? std::log(value) : -std::log(value);
  }
  return total;
}

double composite_log_likelihood(const LikelihoodSpec& spec, const Record& record) {
  if (record.columns.size() != record.values.size())
    throw DimensionError(record.columns.size(), record.values.size());
  return LikelihoodEvaluator(spec, record.columns)(record.values);
}

}  // namespace detree
