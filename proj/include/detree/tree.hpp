#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "detree/box.hpp"

namespace detree {

using NodeId = std::size_t;
inline constexpr NodeId kNoNode = std::numeric_limits<NodeId>::max();

struct TreeNode {
  Box box;
  std::uint64_t count = 0;
  int split_dim = -1;  // -1 marks a leaf
  double split_value = 0.0;
  NodeId left = kNoNode;
  NodeId right = kNoNode;
  NodeId parent = kNoNode;
  std::size_t depth = 0;

  bool is_leaf() const noexcept { return split_dim < 0; }
};

/// Recursive description used to assemble a tree; `children` is empty or has two entries.
struct NodeSpec {
  std::uint64_t count = 0;
  int split_dim = -1;
  double split_value = 0.0;
  std::vector<NodeSpec> children;

  static NodeSpec leaf(std::uint64_t count) { return NodeSpec{count, -1, 0.0, {}}; }
  static NodeSpec split(int dim, double value, NodeSpec left, NodeSpec right) {
    NodeSpec s{left.count + right.count, dim, value, {}};
    s.children.push_back(std::move(left));
    s.children.push_back(std::move(right));
    return s;
  }
};

/// Training parameters carried along with a model for reference.
struct Provenance {
  std::optional<std::uint64_t> min_count;
  std::vector<double> min_widths;
  std::optional<std::size_t> max_leaves;
  std::optional<std::string> complexity;
  std::optional<double> alpha;

  friend bool operator==(const Provenance&, const Provenance&) = default;
};

/// Piecewise-constant density estimator over a binary partition of a root box.
///
/// Nodes are stored in pre-order; node 0 is the root and the subtree of node
/// i occupies the contiguous id range [i, subtree_end(i)). Leaf intervals are
/// half-open [lo, hi) along every split, with the upper root boundary closed.
/// Densities are derived from integer counts as N(leaf) / (N_tot * V(leaf)).
class DensityTree {
 public:
  DensityTree(std::vector<std::string> columns, std::uint64_t n_tot, const Box& root_box,
              const NodeSpec& root, Provenance provenance = {});

  std::size_t dims() const noexcept { return columns_.size(); }
  const std::vector<std::string>& columns() const noexcept { return columns_; }
  std::uint64_t n_tot() const noexcept { return n_tot_; }
  const Box& root_box() const noexcept { return nodes_.front().box; }
  const Provenance& provenance() const noexcept { return provenance_; }
  void set_provenance(Provenance p) { provenance_ = std::move(p); }

  std::size_t size() const noexcept { return nodes_.size(); }
  const TreeNode& node(NodeId id) const { return nodes_.at(id); }
  const std::vector<TreeNode>& nodes() const noexcept { return nodes_; }
  NodeId subtree_end(NodeId id) const { return subtree_end_.at(id); }
  const std::vector<NodeId>& leaves() const noexcept { return leaves_; }
  std::size_t n_leaves() const noexcept { return leaves_.size(); }

  /// Density value of a leaf (or the merged value of an internal node).
  double node_density(NodeId id) const;

  /// Leaf whose box holds x, or nullopt outside the root box.
  std::optional<NodeId> locate(std::span<const double> x) const;
  /// N(leaf) / (N_tot * V(leaf)) for the containing leaf, 0 outside the root box.
  double evaluate(std::span<const double> x) const;

  /// NodeSpec equivalent of the subtree rooted at `id`.
  NodeSpec to_spec(NodeId id = 0) const;

  /// Structural equality: columns, n_tot, boxes, counts and splits.
  bool same_structure(const DensityTree& other) const;

 private:
  std::vector<std::string> columns_;
  std::uint64_t n_tot_ = 0;
  std::vector<TreeNode> nodes_;
  std::vector<NodeId> subtree_end_;
  std::vector<NodeId> leaves_;
  Provenance provenance_;
};

std::optional<NodeId> locate(const DensityTree& tree, std::span<const double> x);
double evaluate(const DensityTree& tree, std::span<const double> x);

}  // namespace detree
