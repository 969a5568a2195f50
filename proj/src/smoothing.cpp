#include "detree/smoothing.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <string>

#include "detree/errors.hpp"

namespace detree {

SmearedModel::SmearedModel(DensityTree tree, Bandwidths bw) : tree_(std::move(tree)), bw_(std::move(bw)) {
  if (bw_.dims() != tree_.dims()) throw DimensionError(tree_.dims(), bw_.dims());
}

double SmearedModel::evaluate(std::span<const double> x) const {
  if (x.size() != tree_.dims()) throw DimensionError(tree_.dims(), x.size());
  const auto& h = bw_.h;
  double total = 0.0;
  std::vector<NodeId> stack{0};
  while (!stack.empty()) {
    const NodeId id = stack.back();
    stack.pop_back();
    const TreeNode& n = tree_.node(id);
    bool reaches = true;
    for (std::size_t k = 0; k < x.size() && reaches; ++k) {
      reaches = n.box.hi(k) > x[k] - h[k] && n.box.lo(k) < x[k] + h[k];
    }
    if (!reaches) continue;
    if (!n.is_leaf()) {
      stack.push_back(n.right);
      stack.push_back(n.left);
      continue;
    }
    if (n.count == 0) continue;
    double weight = 1.0;
    for (std::size_t k = 0; k < x.size(); ++k) {
      weight *= overlap_integral(n.box.lo(k), n.box.hi(k), x[k], h[k]) / h[k];
    }
    total += tree_.node_density(id) * weight;
  }
  return total;
}

double smear_evaluate(const SmearedModel& model, std::span<const double> x) { return model.evaluate(x); }

long double incircle(Point2 a, Point2 b, Point2 c, Point2 d) {
  const long double adx = static_cast<long double>(a.x) - d.x, ady = static_cast<long double>(a.y) - d.y;
  const long double bdx = static_cast<long double>(b.x) - d.x, bdy = static_cast<long double>(b.y) - d.y;
  const long double cdx = static_cast<long double>(c.x) - d.x, cdy = static_cast<long double>(c.y) - d.y;
  const long double ad = adx * adx + ady * ady;
  const long double bd = bdx * bdx + bdy * bdy;
  const long double cd = cdx * cdx + cdy * cdy;
  return adx * (bdy * cd - bd * cdy) - ady * (bdx * cd - bd * cdx) + ad * (bdx * cdy - bdy * cdx);
}

namespace {

long double orient(Point2 a, Point2 b, Point2 c) {
  return (static_cast<long double>(b.x) - a.x) * (static_cast<long double>(c.y) - a.y) -
         (static_cast<long double>(b.y) - a.y) * (static_cast<long double>(c.x) - a.x);
}

// Strict containment with a relative tolerance so cocircular sets stay untouched.
bool strictly_in_circle(Point2 a, Point2 b, Point2 c, Point2 d) {
  const long double det = incircle(a, b, c, d);
  const auto sq = [](long double v) { return v * v; };
  const long double scale = (sq(a.x - d.x) + sq(a.y - d.y)) * (sq(b.x - d.x) + sq(b.y - d.y)) +
                            (sq(c.x - d.x) + sq(c.y - d.y)) * (sq(b.x - d.x) + sq(b.y - d.y)) +
                            (sq(a.x - d.x) + sq(a.y - d.y)) * (sq(c.x - d.x) + sq(c.y - d.y));
  return det > 1e-12L * scale;
}

}  // namespace

Triangulation::Triangulation(std::vector<Point2> vertices, std::vector<double> values,
                             std::vector<Triangle> triangles)
    : vertices_(std::move(vertices)), values_(std::move(values)), triangles_(std::move(triangles)) {
  if (values_.size() != vertices_.size()) throw DimensionError(vertices_.size(), values_.size());
  bounds_.reserve(triangles_.size());
  for (const auto& t : triangles_) {
    const Point2 a = vertices_.at(t[0]), b = vertices_.at(t[1]), c = vertices_.at(t[2]);
    bounds_.push_back({std::min({a.x, b.x, c.x}), std::max({a.x, b.x, c.x}), std::min({a.y, b.y, c.y}),
                       std::max({a.y, b.y, c.y})});
  }
}

std::optional<std::pair<std::size_t, std::array<double, 3>>> Triangulation::find(Point2 p) const {
  constexpr double kEdgeTolerance = 1e-12;
  for (std::size_t t = 0; t < triangles_.size(); ++t) {
    const auto& bb = bounds_[t];
    const double slack_x = kEdgeTolerance * (bb[1] - bb[0]);
    const double slack_y = kEdgeTolerance * (bb[3] - bb[2]);
    if (p.x < bb[0] - slack_x || p.x > bb[1] + slack_x || p.y < bb[2] - slack_y || p.y > bb[3] + slack_y) continue;
    const Point2 a = vertices_[triangles_[t][0]], b = vertices_[triangles_[t][1]], c = vertices_[triangles_[t][2]];
    const double det = (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x);
    const double wb = ((p.x - a.x) * (c.y - a.y) - (p.y - a.y) * (c.x - a.x)) / det;
    const double wc = ((b.x - a.x) * (p.y - a.y) - (b.y - a.y) * (p.x - a.x)) / det;
    const double wa = 1.0 - wb - wc;
    if (wa >= -kEdgeTolerance && wb >= -kEdgeTolerance && wc >= -kEdgeTolerance) {
      return std::make_pair(t, std::array<double, 3>{wa, wb, wc});
    }
  }
  return std::nullopt;
}

Triangulation triangulate(const DensityTree& tree) {
  using Triangle = Triangulation::Triangle;
  if (tree.dims() != 2) {
    throw GeometryError("unsupported-dimension",
                        "interpolation needs a two-dimensional tree, got " + std::to_string(tree.dims()));
  }
  const auto& leaves = tree.leaves();
  if (leaves.size() < 3) throw GeometryError("degenerate-geometry", "interpolation needs at least three leaves");

  std::vector<Point2> pts;
  std::vector<double> values;
  for (NodeId leaf : leaves) {
    const Box& b = tree.node(leaf).box;
    pts.push_back({b.center(0), b.center(1)});
    values.push_back(tree.node_density(leaf));
  }

  double xmin = pts[0].x, xmax = pts[0].x, ymin = pts[0].y, ymax = pts[0].y;
  for (const auto& p : pts) {
    xmin = std::min(xmin, p.x);
    xmax = std::max(xmax, p.x);
    ymin = std::min(ymin, p.y);
    ymax = std::max(ymax, p.y);
  }
  // Collinearity: largest triangle spanned with the farthest pair.
  std::size_t far = 0;
  double far_d = -1.0;
  for (std::size_t i = 1; i < pts.size(); ++i) {
    const double d = std::hypot(pts[i].x - pts[0].x, pts[i].y - pts[0].y);
    if (d > far_d) {
      far_d = d;
      far = i;
    }
  }
  long double best_area = 0.0L;
  for (const auto& p : pts) best_area = std::max(best_area, std::abs(orient(pts[0], pts[far], p)) / 2.0L);
  if (best_area <= 1e-12L * (xmax - xmin) * (ymax - ymin) || best_area == 0.0L) {
    throw GeometryError("degenerate-geometry", "leaf centers are collinear");
  }

  const std::size_t n = pts.size();
  const double span = std::max(xmax - xmin, ymax - ymin);
  const double cx = 0.5 * (xmin + xmax), cy = 0.5 * (ymin + ymax);
  std::vector<Point2> all = pts;
  all.push_back({cx - 100.0 * span, cy - 100.0 * span});
  all.push_back({cx + 100.0 * span, cy - 100.0 * span});
  all.push_back({cx, cy + 100.0 * span});

  std::vector<Triangle> tris{{n, n + 1, n + 2}};
  std::vector<char> bad;
  std::map<std::pair<std::size_t, std::size_t>, int> edge_use;
  for (std::size_t i = 0; i < n; ++i) {
    const Point2 p = all[i];
    bad.assign(tris.size(), 0);
    for (std::size_t t = 0; t < tris.size(); ++t) {
      bad[t] = strictly_in_circle(all[tris[t][0]], all[tris[t][1]], all[tris[t][2]], p) ? 1 : 0;
    }
    edge_use.clear();
    for (std::size_t t = 0; t < tris.size(); ++t) {
      if (!bad[t]) continue;
      for (int e = 0; e < 3; ++e) {
        std::size_t u = tris[t][e], v = tris[t][(e + 1) % 3];
        ++edge_use[{std::min(u, v), std::max(u, v)}];
      }
    }
    std::vector<Triangle> next;
    next.reserve(tris.size() + 2);
    for (std::size_t t = 0; t < tris.size(); ++t) {
      if (!bad[t]) next.push_back(tris[t]);
    }
    for (std::size_t t = 0; t < tris.size(); ++t) {
      if (!bad[t]) continue;
      for (int e = 0; e < 3; ++e) {
        const std::size_t u = tris[t][e], v = tris[t][(e + 1) % 3];
        if (edge_use[{std::min(u, v), std::max(u, v)}] != 1) continue;
        Triangle nt{u, v, i};
        if (orient(all[u], all[v], p) < 0) std::swap(nt[0], nt[1]);
        if (orient(all[nt[0]], all[nt[1]], all[nt[2]]) == 0.0L) continue;
        next.push_back(nt);
      }
    }
    tris = std::move(next);
  }

  std::vector<Triangle> kept;
  for (const auto& t : tris) {
    if (t[0] < n && t[1] < n && t[2] < n) kept.push_back(t);
  }
  if (kept.empty()) throw GeometryError("degenerate-geometry", "triangulation produced no triangles");
  return Triangulation(std::move(pts), std::move(values), std::move(kept));
}

double interpolate_evaluate(const Triangulation& tri, const DensityTree& tree, std::span<const double> x) {
  if (x.size() != 2 || tree.dims() != 2) throw DimensionError(2, x.size());
  if (!tree.root_box().contains(x)) return 0.0;
  const auto hit = tri.find({x[0], x[1]});
  if (!hit) return tree.evaluate(x);
  const auto& t = tri.triangles()[hit->first];
  const auto& w = hit->second;
  const auto& v = tri.values();
  return std::max(0.0, w[0] * v[t[0]] + w[1] * v[t[1]] + w[2] * v[t[2]]);
}

}  // namespace detree
