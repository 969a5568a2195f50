#pragma once

#include <cstddef>
#include <cstdint>
#include <string_view>
#include <vector>

#include "detree/tree.hpp"

namespace detree {

/// LeafCount: number of leaves under the node (top-down simplification).
/// NodeDepth: 1 + depth of the node, root at depth 0 (bottom-up simplification).
enum class ComplexityKind { LeafCount, NodeDepth };

std::string_view complexity_name(ComplexityKind kind) noexcept;
ComplexityKind parse_complexity(std::string_view name);

/// Replacement error of a node treated as a single leaf.
double node_error(const DensityTree& tree, NodeId id);

/// Complexity of a node of the unpruned tree.
double complexity(const DensityTree& tree, NodeId id, ComplexityKind kind);

/// (R(node) - sum of R over the leaves below it) / C(node) on the unpruned tree.
/// Throws ConfigError for a leaf.
double alpha_threshold(const DensityTree& tree, NodeId id, ComplexityKind kind);

struct PruneStep {
  double alpha = 0.0;
  NodeId node = 0;
  std::size_t n_leaves_after = 0;

  friend bool operator==(const PruneStep&, const PruneStep&) = default;
};

/// Weakest-link pruning sequence of one tree. Thresholds are non-decreasing
/// and the last step collapses the root.
struct PruneProfile {
  ComplexityKind kind = ComplexityKind::LeafCount;
  std::vector<PruneStep> steps;
  std::size_t source_nodes = 0;
  std::size_t source_leaves = 0;
  std::uint64_t source_fingerprint = 0;

  /// Distinct values of {0} and every threshold, ascending.
  std::vector<double> candidate_alphas() const;
};

/// Hash of the tree's splits and counts; ties a profile to the tree it came from.
std::uint64_t structure_fingerprint(const DensityTree& tree);

/// Repeatedly collapses the internal node with the smallest current threshold,
/// re-evaluating the ancestors after each collapse. Ties collapse the deepest
/// node first, then the lowest id. A recorded threshold never falls below the
/// previous one.
PruneProfile prune_sequence(const DensityTree& tree, ComplexityKind kind);

/// Per node of the source tree: true if the node is a leaf of the pruned tree
/// obtained by applying every step with threshold <= alpha. Descendants of a
/// pruned leaf are false.
std::vector<bool> pruned_leaf_mask(const DensityTree& tree, const PruneProfile& profile, double alpha);

/// Tree after every step whose threshold is <= alpha. Throws ConfigError when
/// the profile was built from a different tree.
DensityTree apply_alpha(const DensityTree& tree, const PruneProfile& profile, double alpha);

void check_profile_matches(const DensityTree& tree, const PruneProfile& profile);

}  // namespace detree
