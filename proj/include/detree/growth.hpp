#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "detree/box.hpp"
#include "detree/data_table.hpp"
#include "detree/tree.hpp"

namespace detree {

/// A cut is rejected when either child would hold fewer than `min_count`
/// entries or be narrower than `min_widths[m]` along the cut dimension.
struct StopCondition {
  std::uint64_t min_count = 1;
  std::vector<double> min_widths;  // empty: no width limit
  std::optional<std::size_t> max_leaves;

  void validate(std::size_t dims) const;
};

struct SplitCandidate {
  std::size_t dim = 0;
  double cut = 0.0;
  double gain = 0.0;
};

enum class StopReason : std::uint8_t {
  NoCandidates,  // every coordinate equal in every dimension
  MinCount,
  MinWidth,
  NoGain,
  MaxLeaves,
};
inline constexpr std::size_t kStopReasonCount = 5;
std::string_view stop_reason_name(StopReason r) noexcept;

struct GrowthReport {
  std::size_t n_leaves = 0;
  std::vector<double> gains;  // per node id; 0 for leaves
  std::vector<StopReason> leaf_reasons;  // per node id; meaningful for leaves only
  std::array<std::size_t, kStopReasonCount> stop_histogram{};
};

struct GrowthResult {
  DensityTree tree;
  GrowthReport report;
};

/// -count^2 / (n_tot^2 * volume).
double replacement_error(std::uint64_t count, double volume, std::uint64_t n_tot);

/// Highest-gain admissible cut among midpoints of consecutive distinct
/// coordinates, or nullopt when no cut has positive gain. Ties go to the
/// lowest dimension, then the smallest cut.
std::optional<SplitCandidate> best_split(const DataTable& data, std::span<const std::size_t> entries,
                                         const Box& box, const StopCondition& stop, std::uint64_t n_tot);

/// Greedy growth over the rows listed in `rows` (all rows when empty is not allowed).
GrowthResult grow_with_report(const DataTable& data, std::span<const std::size_t> rows, const Box& box,
                              const StopCondition& stop);
DensityTree grow(const DataTable& data, std::span<const std::size_t> rows, const Box& box,
                 const StopCondition& stop);
DensityTree grow(const DataTable& data, const Box& box, const StopCondition& stop);

}  // namespace detree
