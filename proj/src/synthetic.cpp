#include "detree/synthetic.hpp"

#include <cmath>
#include <numbers>
#include <random>

#include "detree/errors.hpp"

namespace detree {

namespace {

constexpr double kPeak = 1.865;
constexpr double kPeakWidth = 0.01;

double unit_open(std::mt19937_64& rng) {
  // (0, 1): 53 random bits shifted by half an ulp
  return (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53;
}

double normal(std::mt19937_64& rng) {
  const double u1 = unit_open(rng);
  const double u2 = unit_open(rng);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

}  // namespace

double Marginal::pdf(double x) const {
  if (kind == Kind::Uniform) return (x >= a && x <= b) ? 1.0 / (b - a) : 0.0;
  const double z = (x - a) / b;
  return std::exp(-0.5 * z * z) / (b * std::sqrt(2.0 * std::numbers::pi));
}

void SyntheticSpec::validate() const {
  if (columns.empty()) throw ConfigError("bad-synthetic", "synthetic spec needs at least one column");
  if (components.empty()) throw ConfigError("bad-synthetic", "synthetic spec needs at least one component");
  if (n == 0) throw ConfigError("bad-synthetic", "sample size must be positive");
  double wsum = 0.0;
  for (const auto& c : components) {
    if (!(c.weight >= 0.0) || !std::isfinite(c.weight)) throw ConfigError("bad-synthetic", "weights must be non-negative");
    wsum += c.weight;
    if (c.marginals.size() != columns.size()) throw DimensionError(columns.size(), c.marginals.size());
    for (const auto& m : c.marginals) {
      if (!std::isfinite(m.a) || !std::isfinite(m.b)) throw ConfigError("bad-synthetic", "parameters must be finite");
      if (m.kind == Marginal::Kind::Uniform && !(m.a < m.b))
        throw ConfigError("bad-synthetic", "uniform range needs lo < hi");
      if (m.kind == Marginal::Kind::Normal && !(m.b > 0.0))
        throw ConfigError("bad-synthetic", "normal sigma must be positive");
    }
  }
  if (!(wsum > 0.0)) throw ConfigError("bad-synthetic", "weights sum to zero");
}

double SyntheticSpec::pdf(std::span<const double> x) const {
  if (x.size() != columns.size()) throw DimensionError(columns.size(), x.size());
  double wsum = 0.0, f = 0.0;
  for (const auto& c : components) {
    wsum += c.weight;
    double p = c.weight;
    for (std::size_t k = 0; k < x.size() && p > 0.0; ++k) p *= c.marginals[k].pdf(x[k]);
    f += p;
  }
  return f / wsum;
}

SyntheticSample generate_synthetic(const SyntheticSpec& spec) {
  spec.validate();
  std::vector<double> cum;
  double wsum = 0.0;
  for (const auto& c : spec.components) cum.push_back(wsum += c.weight);
  std::mt19937_64 rng(spec.seed);
  const std::size_t d = spec.columns.size();
  std::vector<double> values;
  values.reserve(spec.n * d);
  std::vector<std::size_t> tags;
  tags.reserve(spec.n);
  for (std::size_t i = 0; i < spec.n; ++i) {
    const double u = unit_open(rng) * wsum;
    std::size_t c = 0;
    while (c + 1 < cum.size() && !(u < cum[c])) ++c;
    while (spec.components[c].weight == 0.0) --c;  // u landed past a run of zero weights
    tags.push_back(c);
    for (const auto& m : spec.components[c].marginals) {
      values.push_back(m.kind == Marginal::Kind::Uniform ? m.a + (m.b - m.a) * unit_open(rng)
                                                        : m.a + m.b * normal(rng));
    }
  }
  return {DataTable(spec.columns, std::move(values)), std::move(tags)};
}

std::vector<std::string> synthetic_preset_names() {
  return {"d0-demo", "mixture-1d", "uniform", "uniform-2d", "bench-2d"};
}

SyntheticSpec synthetic_preset(const std::string& name, std::size_t n, std::uint64_t seed) {
  using M = Marginal;
  SyntheticSpec s;
  s.n = n;
  s.seed = seed;
  if (name == "d0-demo") {
    s.columns = {"mass", "log_ip", "decay_time", "pt"};
    s.components = {
        {0.5, {M::normal(kPeak, kPeakWidth), M::normal(-1.6, 0.35), M::normal(1.2, 0.35), M::normal(5.0, 1.2)}},
        {0.5, {M::uniform(1.815, 1.915), M::normal(-0.6, 0.7), M::uniform(0.0, 3.0), M::uniform(1.0, 10.0)}},
    };
  } else if (name == "mixture-1d") {
    s.columns = {"x"};
    s.components = {
        {0.35, {M::normal(0.3, 0.05)}},
        {0.35, {M::normal(0.65, 0.1)}},
        {0.3, {M::uniform(0.0, 1.0)}},
    };
  } else if (name == "uniform") {
    s.columns = {"x"};
    s.components = {{1.0, {M::uniform(0.0, 1.0)}}};
  } else if (name == "uniform-2d") {
    s.columns = {"x", "y"};
    s.components = {{1.0, {M::uniform(0.0, 1.0), M::uniform(0.0, 1.0)}}};
  } else if (name == "bench-2d") {
    s.columns = {"x", "y"};
    s.components = {
        {0.5, {M::normal(0.5, 0.1), M::normal(0.5, 0.1)}},
        {0.5, {M::uniform(0.0, 1.0), M::uniform(0.0, 1.0)}},
    };
  } else {
    throw ConfigError("unknown-preset", "unknown synthetic preset '" + name + "'");
  }
  return s;
}

namespace {

DataTable mass_filter(const DataTable& data, bool inside) {
  const auto k = data.column_index("mass");
  if (!k) throw MissingColumnError("mass");
  std::vector<std::size_t> rows;
  for (std::size_t i = 0; i < data.rows(); ++i) {
    const double dm = std::abs(data(i, *k) - kPeak);
    if (inside ? dm < 2.0 * kPeakWidth : dm > 3.0 * kPeakWidth) rows.push_back(i);
  }
  if (rows.empty()) throw EmptyInputError("mass window selects no rows");
  return data.subset(rows);
}

}  // namespace

DataTable signal_window(const DataTable& data) { return mass_filter(data, true); }
DataTable sideband(const DataTable& data) { return mass_filter(data, false); }

}  // namespace detree
