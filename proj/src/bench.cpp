#include "detree/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <optional>
#include <ostream>

#include "detree/csv.hpp"
#include "detree/errors.hpp"
#include "detree/grid.hpp"
#include "detree/kde.hpp"
#include "detree/synthetic.hpp"
#include "detree/train.hpp"

namespace detree {

BenchStop parse_bench_stop(const std::string& name) {
  if (name == "tight") return BenchStop::Tight;
  if (name == "loose") return BenchStop::Loose;
  throw UsageError("unknown stop variant '" + name + "' (expected tight or loose)");
}

StopCondition bench_stop_condition(BenchStop stop) {
  StopCondition s;
  s.min_count = 5;
  // tight: leaves at least 1/20 of the unit square's side wide
  s.min_widths = stop == BenchStop::Tight ? std::vector<double>{0.05, 0.05} : std::vector<double>{};
  return s;
}

namespace {

using Clock = std::chrono::steady_clock;

template <class F>
double seconds(F&& f) {
  const auto t0 = Clock::now();
  f();
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

// Density sums are accumulated so the optimizer cannot drop the evaluations.
volatile double g_sink = 0.0;

}  // namespace

std::vector<BenchRow> run_benchmark(const BenchOptions& options) {
  if (options.sizes.empty()) throw ConfigError("bad-bench", "benchmark needs at least one size");
  if (!std::is_sorted(options.sizes.begin(), options.sizes.end()))
    throw ConfigError("bad-bench", "benchmark sizes must be ascending");
  if (options.repetitions < 1) throw ConfigError("bad-bench", "repetitions must be positive");
  std::vector<BenchRow> rows;
  for (std::size_t n : options.sizes) {
    if (n < 2) throw ConfigError("bad-bench", "benchmark sizes must be at least 2");
    const DataTable data = generate_synthetic(synthetic_preset("bench-2d", n, options.seed + n)).data;
    TrainConfig cfg;
    cfg.stop = bench_stop_condition(options.stop);
    BenchRow row;
    row.n_tot = n;
    row.t_train = row.t_cv = row.t_grid_det = row.t_grid_kde = std::numeric_limits<double>::infinity();
    for (int r = 0; r < options.repetitions; ++r) {
      std::optional<TrainResult> res;
      const double t = seconds([&] { res.emplace(train(data, cfg)); });
      row.t_train = std::min(row.t_train, t);
      row.t_cv = std::min(row.t_cv, res->seconds_crossval);
      row.n_leaves = res->unpruned.n_leaves();  // the grown tree sets the cost

      const DensityTree& tree = res->tree;
      const Box& box = tree.root_box();
      const std::vector<std::string> names = tree.columns();
      row.t_grid_det = std::min(row.t_grid_det, seconds([&] {
        const Grid g = sample_grid([&](std::span<const double> x) { return tree.evaluate(x); }, box,
                                   options.bins, names);
        g_sink = g_sink + g.mass();
      }));
      const KdeModel kde(data, res->bandwidths);
      row.t_grid_kde = std::min(row.t_grid_kde, seconds([&] {
        const Grid g = sample_grid([&](std::span<const double> x) { return kde.evaluate(x); }, box,
                                   options.bins, names);
        g_sink = g_sink + g.mass();
      }));
    }
    rows.push_back(row);
  }
  return rows;
}

void write_bench_csv(std::ostream& out, std::span<const BenchRow> rows) {
  out << "n_tot,n_leaves,t_train,t_cv,t_grid_det,t_grid_kde\n";
  for (const auto& r : rows) {
    out << r.n_tot << ',' << r.n_leaves << ',' << format_double(r.t_train) << ',' << format_double(r.t_cv) << ','
        << format_double(r.t_grid_det) << ',' << format_double(r.t_grid_kde) << '\n';
  }
}

double loglog_slope(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) throw ConfigError("bad-fit", "slope needs two or more points");
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double lx = std::log(x[i]), ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace detree
