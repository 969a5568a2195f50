#include "detree/tree.hpp"

#include <algorithm>
#include <set>
#include <string>

#include "detree/errors.hpp"

namespace detree {

namespace {

struct Frame {
  const NodeSpec* spec;
  NodeId parent;
  bool is_right;
  Box box;
  std::size_t depth;
};

}  // namespace

DensityTree::DensityTree(std::vector<std::string> columns, std::uint64_t n_tot, const Box& root_box,
                         const NodeSpec& root, Provenance provenance)
    : columns_(std::move(columns)), n_tot_(n_tot), provenance_(std::move(provenance)) {
  if (columns_.empty()) throw ModelInvariantError("tree needs at least one column");
  if (std::set<std::string>(columns_.begin(), columns_.end()).size() != columns_.size()) {
    throw ModelInvariantError("column names must be unique");
  }
  if (root_box.dims() != columns_.size()) throw ModelInvariantError("root box dimension does not match columns");
  if (n_tot_ == 0) throw ModelInvariantError("n_tot must be positive");
  if (root.count != n_tot_) {
    throw ModelInvariantError("root count " + std::to_string(root.count) + " differs from n_tot " +
                              std::to_string(n_tot_));
  }

  // Iterative pre-order expansion; deep trees must not exhaust the call stack.
  std::vector<Frame> stack;
  stack.push_back({&root, kNoNode, false, root_box, 0});
  while (!stack.empty()) {
    Frame f = std::move(stack.back());
    stack.pop_back();
    const NodeSpec& s = *f.spec;
    const NodeId id = nodes_.size();
    TreeNode n;
    n.box = f.box;
    n.count = s.count;
    n.parent = f.parent;
    n.depth = f.depth;
    if (f.parent != kNoNode) {
      (f.is_right ? nodes_[f.parent].right : nodes_[f.parent].left) = id;
    }
    if (s.children.empty()) {
      if (s.split_dim >= 0) throw ModelInvariantError("leaf node carries a split");
      nodes_.push_back(std::move(n));
      continue;
    }
    if (s.children.size() != 2) throw ModelInvariantError("internal node must have two children");
    if (s.split_dim < 0 || static_cast<std::size_t>(s.split_dim) >= columns_.size()) {
      throw ModelInvariantError("split dimension out of range at node " + std::to_string(id));
    }
    const auto dim = static_cast<std::size_t>(s.split_dim);
    if (!(n.box.lo(dim) < s.split_value && s.split_value < n.box.hi(dim))) {
      throw ModelInvariantError("split value outside the node box at node " + std::to_string(id));
    }
    if (s.children[0].count + s.children[1].count != s.count) {
      throw ModelInvariantError("child counts do not add up at node " + std::to_string(id));
    }
    n.split_dim = s.split_dim;
    n.split_value = s.split_value;
    Box lower = n.box.lower_part(dim, s.split_value);
    Box upper = n.box.upper_part(dim, s.split_value);
    nodes_.push_back(std::move(n));
    stack.push_back({&s.children[1], id, true, std::move(upper), f.depth + 1});
    stack.push_back({&s.children[0], id, false, std::move(lower), f.depth + 1});
  }

  subtree_end_.assign(nodes_.size(), 0);
  for (NodeId i = nodes_.size(); i-- > 0;) {
    const TreeNode& n = nodes_[i];
    subtree_end_[i] = n.is_leaf() ? i + 1 : subtree_end_[n.right];
    if (n.is_leaf()) leaves_.push_back(i);
  }
  std::reverse(leaves_.begin(), leaves_.end());
}

double DensityTree::node_density(NodeId id) const {
  const TreeNode& n = nodes_.at(id);
  return static_cast<double>(n.count) / (static_cast<double>(n_tot_) * n.box.volume());
}

std::optional<NodeId> DensityTree::locate(std::span<const double> x) const {
  if (x.size() != dims()) throw DimensionError(dims(), x.size());
  if (!root_box().contains(x)) return std::nullopt;
  NodeId id = 0;
  while (!nodes_[id].is_leaf()) {
    const TreeNode& n = nodes_[id];
    id = x[static_cast<std::size_t>(n.split_dim)] < n.split_value ? n.left : n.right;
  }
  return id;
}

double DensityTree::evaluate(std::span<const double> x) const {
  const auto leaf = locate(x);
  return leaf ? node_density(*leaf) : 0.0;
}

NodeSpec DensityTree::to_spec(NodeId id) const {
  const TreeNode& n = nodes_.at(id);
  if (n.is_leaf()) return NodeSpec::leaf(n.count);
  NodeSpec s{n.count, n.split_dim, n.split_value, {}};
  s.children.push_back(to_spec(n.left));
  s.children.push_back(to_spec(n.right));
  return s;
}

bool DensityTree::same_structure(const DensityTree& other) const {
  if (columns_ != other.columns_ || n_tot_ != other.n_tot_ || nodes_.size() != other.nodes_.size()) {
    return false;
  }
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    const TreeNode& a = nodes_[i];
    const TreeNode& b = other.nodes_[i];
    if (a.count != b.count || a.split_dim != b.split_dim || !(a.box == b.box)) return false;
    if (!a.is_leaf() && a.split_value != b.split_value) return false;
  }
  return true;
}

std::optional<NodeId> locate(const DensityTree& tree, std::span<const double> x) { return tree.locate(x); }
double evaluate(const DensityTree& tree, std::span<const double> x) { return tree.evaluate(x); }

}  // namespace detree
