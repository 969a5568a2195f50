#include "detree/pruning.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <queue>
#include <string>
#include <tuple>

#include "detree/errors.hpp"
#include "detree/growth.hpp"

namespace detree {

std::string_view complexity_name(ComplexityKind kind) noexcept {
  return kind == ComplexityKind::LeafCount ? "leaves" : "depth";
}

ComplexityKind parse_complexity(std::string_view name) {
  if (name == "leaves") return ComplexityKind::LeafCount;
  if (name == "depth") return ComplexityKind::NodeDepth;
  throw ConfigError("invalid-complexity", "complexity must be 'leaves' or 'depth', got '" + std::string(name) + "'");
}

double node_error(const DensityTree& tree, NodeId id) {
  const TreeNode& n = tree.node(id);
  return replacement_error(n.count, n.box.volume(), tree.n_tot());
}

double complexity(const DensityTree& tree, NodeId id, ComplexityKind kind) {
  const TreeNode& n = tree.node(id);
  if (kind == ComplexityKind::NodeDepth) return 1.0 + static_cast<double>(n.depth);
  std::size_t leaves = 0;
  for (NodeId j = id; j < tree.subtree_end(id); ++j) leaves += tree.node(j).is_leaf() ? 1 : 0;
  return static_cast<double>(leaves);
}

double alpha_threshold(const DensityTree& tree, NodeId id, ComplexityKind kind) {
  if (tree.node(id).is_leaf()) throw ConfigError("leaf-threshold", "alpha threshold is undefined for a leaf");
  double leaf_sum = 0.0;
  for (NodeId j = id; j < tree.subtree_end(id); ++j) {
    if (tree.node(j).is_leaf()) leaf_sum += node_error(tree, j);
  }
  return std::max(0.0, (node_error(tree, id) - leaf_sum) / complexity(tree, id, kind));
}

std::vector<double> PruneProfile::candidate_alphas() const {
  std::vector<double> out{0.0};
  for (const auto& s : steps) {
    if (s.alpha > out.back()) out.push_back(s.alpha);
  }
  return out;
}

std::uint64_t structure_fingerprint(const DensityTree& tree) {
  // FNV-1a over the fields that define the partition.
  std::uint64_t h = 1469598103934665603ULL;
  auto mix = [&h](std::uint64_t v) {
    for (int b = 0; b < 8; ++b) {
      h ^= (v >> (8 * b)) & 0xffU;
      h *= 1099511628211ULL;
    }
  };
  mix(tree.n_tot());
  for (const TreeNode& n : tree.nodes()) {
    mix(n.count);
    mix(static_cast<std::uint64_t>(static_cast<std::int64_t>(n.split_dim)));
    if (!n.is_leaf()) mix(std::bit_cast<std::uint64_t>(n.split_value));
  }
  return h;
}

PruneProfile prune_sequence(const DensityTree& tree, ComplexityKind kind) {
  PruneProfile profile;
  profile.kind = kind;
  profile.source_nodes = tree.size();
  profile.source_leaves = tree.n_leaves();
  profile.source_fingerprint = structure_fingerprint(tree);

  const std::size_t n = tree.size();
  std::vector<double> own_error(n), leaf_error(n, 0.0);
  std::vector<std::size_t> leaves_below(n, 0);
  for (NodeId i = n; i-- > 0;) {
    const TreeNode& node = tree.node(i);
    own_error[i] = node_error(tree, i);
    if (node.is_leaf()) {
      leaf_error[i] = own_error[i];
      leaves_below[i] = 1;
    } else {
      leaf_error[i] = leaf_error[node.left] + leaf_error[node.right];
      leaves_below[i] = leaves_below[node.left] + leaves_below[node.right];
    }
  }

  auto current_alpha = [&](NodeId i) {
    const double c = kind == ComplexityKind::LeafCount ? static_cast<double>(leaves_below[i])
                                                       : 1.0 + static_cast<double>(tree.node(i).depth);
    return std::max(0.0, (own_error[i] - leaf_error[i]) / c);
  };

  // Min-heap on (alpha, -depth, id) with lazy invalidation through versions.
  using Entry = std::tuple<double, std::ptrdiff_t, NodeId, std::uint32_t>;
  std::priority_queue<Entry, std::vector<Entry>, std::greater<>> heap;
  std::vector<std::uint32_t> version(n, 0);
  std::vector<char> alive(n, 1);  // internal and not inside a collapsed subtree
  auto push = [&](NodeId i) {
    heap.emplace(current_alpha(i), -static_cast<std::ptrdiff_t>(tree.node(i).depth), i, ++version[i]);
  };
  for (NodeId i = 0; i < n; ++i) {
    if (tree.node(i).is_leaf()) {
      alive[i] = 0;
    } else {
      push(i);
    }
  }

  std::size_t total_leaves = tree.n_leaves();
  double floor_alpha = 0.0;
  while (!heap.empty()) {
    const auto [alpha, neg_depth, id, ver] = heap.top();
    heap.pop();
    if (!alive[id] || ver != version[id]) continue;

    // Collapse: everything below becomes dead.
    for (NodeId j = id; j < tree.subtree_end(id);) {
      if (j != id && !alive[j] && !tree.node(j).is_leaf()) {
        j = tree.subtree_end(j);
        continue;
      }
      alive[j] = 0;
      ++j;
    }
    const double delta_error = own_error[id] - leaf_error[id];
    const std::size_t removed = leaves_below[id] - 1;
    leaf_error[id] = own_error[id];
    leaves_below[id] = 1;
    total_leaves -= removed;
    for (NodeId a = tree.node(id).parent; a != kNoNode; a = tree.node(a).parent) {
      leaf_error[a] += delta_error;
      leaves_below[a] -= removed;
      push(a);
    }
    floor_alpha = std::max(floor_alpha, alpha);
    profile.steps.push_back(PruneStep{floor_alpha, id, total_leaves});
  }
  return profile;
}

void check_profile_matches(const DensityTree& tree, const PruneProfile& profile) {
  if (profile.source_nodes != tree.size() || profile.source_leaves != tree.n_leaves() ||
      profile.source_fingerprint != structure_fingerprint(tree)) {
    throw ConfigError("profile-mismatch", "prune profile was built from a different tree");
  }
}

std::vector<bool> pruned_leaf_mask(const DensityTree& tree, const PruneProfile& profile, double alpha) {
  check_profile_matches(tree, profile);
  std::vector<char> collapsed(tree.size(), 0);
  for (const auto& s : profile.steps) {
    if (s.alpha > alpha) break;
    collapsed[s.node] = 1;
  }
  std::vector<bool> mask(tree.size(), false);
  for (NodeId i = 0; i < tree.size();) {
    if (collapsed[i] || tree.node(i).is_leaf()) {
      mask[i] = true;
      i = tree.subtree_end(i);
    } else {
      ++i;
    }
  }
  return mask;
}

namespace {

NodeSpec pruned_spec(const DensityTree& tree, const std::vector<bool>& mask, NodeId id) {
  const TreeNode& n = tree.node(id);
  if (mask[id]) return NodeSpec::leaf(n.count);
  return NodeSpec::split(n.split_dim, n.split_value, pruned_spec(tree, mask, n.left),
                         pruned_spec(tree, mask, n.right));
}

}  // namespace

DensityTree apply_alpha(const DensityTree& tree, const PruneProfile& profile, double alpha) {
  const auto mask = pruned_leaf_mask(tree, profile, alpha);
  Provenance prov = tree.provenance();
  prov.complexity = std::string(complexity_name(profile.kind));
  if (std::isfinite(alpha)) {
    prov.alpha = alpha;
  } else {
    prov.alpha.reset();
  }
  return DensityTree(tree.columns(), tree.n_tot(), tree.root_box(), pruned_spec(tree, mask, 0), std::move(prov));
}

}  // namespace detree
