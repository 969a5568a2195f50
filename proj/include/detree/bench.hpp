#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "detree/growth.hpp"

namespace detree {

enum class BenchStop { Tight, Loose };
BenchStop parse_bench_stop(const std::string& name);
StopCondition bench_stop_condition(BenchStop stop);

struct BenchOptions {
  std::vector<std::size_t> sizes;
  BenchStop stop = BenchStop::Loose;
  std::vector<std::size_t> bins{200, 200};
  int repetitions = 3;
  std::uint64_t seed = 42;
};

/// Wall-clock seconds, minimum over the repetitions. t_train covers growth,
/// pruning and kernel cross-validation; t_cv is the cross-validation part.
struct BenchRow {
  std::size_t n_tot = 0;
  std::size_t n_leaves = 0;  // before pruning
  double t_train = 0.0;
  double t_cv = 0.0;
  double t_grid_det = 0.0;
  double t_grid_kde = 0.0;
};

/// Trains on the bench-2d preset at each size and grid-samples the tree and a
/// triangular-kernel estimate with the same bandwidths.
std::vector<BenchRow> run_benchmark(const BenchOptions& options);

void write_bench_csv(std::ostream& out, std::span<const BenchRow> rows);

/// Least-squares slope of log(y) against log(x).
double loglog_slope(std::span<const double> x, std::span<const double> y);

}  // namespace detree
