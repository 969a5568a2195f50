#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "detree/crossval.hpp"
#include "detree/tree.hpp"

namespace detree {

/// Tree estimator convolved with a normalized product triangular resolution function.
class SmearedModel {
 public:
  SmearedModel(DensityTree tree, Bandwidths bw);

  const DensityTree& tree() const noexcept { return tree_; }
  const Bandwidths& bandwidths() const noexcept { return bw_; }
  double evaluate(std::span<const double> x) const;

 private:
  DensityTree tree_;
  Bandwidths bw_;
};

/// Sum over leaves of density_j * prod_k overlap_integral(lo_jk, hi_jk, x_k, h_k) / h_k.
/// Only leaves within one bandwidth of x are visited.
double smear_evaluate(const SmearedModel& model, std::span<const double> x);

struct Point2 {
  double x = 0.0;
  double y = 0.0;
};

/// Delaunay triangulation of the leaf centers of a two-dimensional tree.
class Triangulation {
 public:
  using Triangle = std::array<std::size_t, 3>;  // counter-clockwise vertex ids

  Triangulation(std::vector<Point2> vertices, std::vector<double> values, std::vector<Triangle> triangles);

  const std::vector<Point2>& vertices() const noexcept { return vertices_; }
  const std::vector<double>& values() const noexcept { return values_; }
  const std::vector<Triangle>& triangles() const noexcept { return triangles_; }

  /// Triangle holding p (edges included) with barycentric weights, if any.
  std::optional<std::pair<std::size_t, std::array<double, 3>>> find(Point2 p) const;

 private:
  std::vector<Point2> vertices_;
  std::vector<double> values_;
  std::vector<Triangle> triangles_;
  std::vector<std::array<double, 4>> bounds_;  // per triangle: xmin, xmax, ymin, ymax
};

/// Incremental (Bowyer-Watson) Delaunay triangulation of the leaf centers,
/// each vertex carrying its leaf density. Throws GeometryError when the tree
/// is not two-dimensional, has fewer than three leaves, or all centers are
/// collinear (area below 1e-12 of the bounding-box area).
Triangulation triangulate(const DensityTree& tree);

/// Planar interpolation inside the hull of leaf centers, the piecewise-constant
/// estimate elsewhere in the root box, 0 outside it. Never negative.
double interpolate_evaluate(const Triangulation& tri, const DensityTree& tree, std::span<const double> x);

/// > 0 when d is strictly inside the circumcircle of the counter-clockwise triangle (a, b, c).
long double incircle(Point2 a, Point2 b, Point2 c, Point2 d);

}  // namespace detree
