#include <doctest.h>

#include <cmath>
#include <numeric>
#include <random>

#include "detree/crossval.hpp"
#include "detree/errors.hpp"
#include "detree/growth.hpp"
#include "detree/kde.hpp"
#include "detree/pruning.hpp"
#include "detree/synthetic.hpp"
#include "helpers.hpp"
#include "oracles.hpp"

using namespace detree;
using namespace testing_util;

namespace {

// -int (fa - fk)^2 + int (fb - fk)^2 over the box, exact for piecewise-linear fk (1-D).
double ise_gap_1d(const DensityTree& a, const DensityTree& b, const KdeModel& kde, const DensityTree& fine) {
  const Box& box = fine.root_box();
  std::vector<double> br = oracle::boundaries({&fine}, 0);
  const double h = kde.bandwidths().h[0];
  for (std::size_t i = 0; i < kde.data().rows(); ++i) {
    const double x = kde.data()(i, 0);
    for (double p : {x - h, x, x + h})
      if (p > box.lo(0) && p < box.hi(0)) br.push_back(p);
  }
  const oracle::Fn1 f = [&](double x) {
    const double fk = kde.evaluate(std::span<const double>(&x, 1));
    const double da = a.evaluate(std::span<const double>(&x, 1)) - fk;
    const double db = b.evaluate(std::span<const double>(&x, 1)) - fk;
    return -da * da + db * db;
  };
  return oracle::gl_integrate(f, box.lo(0), box.hi(0), br, 3);
}

DataTable two_level(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<double> v;
  for (std::size_t i = 0; i < n; ++i) v.push_back(uniform01(rng) < 0.7 ? 0.5 * uniform01(rng) : uniform01(rng));
  return column_table(v);
}

}  // namespace

TEST_SUITE("crossval") {
  TEST_CASE("overlap integral examples") {
    CHECK(overlap_integral(0, 1, 0.5, 0.25) == doctest::Approx(0.25).epsilon(1e-15));
    CHECK(overlap_integral(0, 1, 2.0, 0.25) == 0.0);
    CHECK(overlap_integral(0.5, 1, 0.5, 0.25) == doctest::Approx(0.125).epsilon(1e-15));
    const double q = oracle::overlap_simpson(0.1, 0.7, 0.55, 0.3, 1e-12);
    CHECK(overlap_integral(0.1, 0.7, 0.55, 0.3) == doctest::Approx(q).epsilon(1e-8));
    CHECK_THROWS_AS(overlap_integral(0, 1, 0.5, 0.0), ConfigError);
    CHECK_THROWS_AS(overlap_integral(0, 1, 0.5, -1.0), ConfigError);
  }

  TEST_CASE("overlap integral: interior value, continuity, monotone in h") {
    std::mt19937_64 rng(3);
    for (int i = 0; i < 500; ++i) {
      const double lo = uniform(rng, -1, 1), hi = lo + uniform(rng, 0.01, 2);
      const double h = uniform(rng, 0.001, 1.5), x = uniform(rng, lo - 2, hi + 2);
      const double v = overlap_integral(lo, hi, x, h);
      CHECK(v >= 0.0);
      CHECK(v <= std::min(h, hi - lo) + 1e-15);
      if (x - h >= lo && x + h <= hi) CHECK(v == h);
      CHECK(std::abs(overlap_integral(lo, hi, x + 1e-9, h) - v) < 1e-8);
      CHECK(overlap_integral(lo, hi, x, h * 1.1) >= v - 1e-15);
      CHECK(v == doctest::Approx(oracle::overlap_quadrature(lo, hi, x, h)).epsilon(1e-9).scale(1e-12));
    }
  }

  TEST_CASE("expected kernel count examples") {
    const DataTable two = column_table({0.5, 0.5});
    CHECK(expected_kernel_count(unit_box(1), two, Bandwidths({0.25})) == doctest::Approx(2.0));
    CHECK(expected_kernel_count(unit_box(1), column_table({3.0}), Bandwidths({0.25})) == 0.0);
    const DataTable p({"x", "y"}, {0.05, 0.5});
    const double got = expected_kernel_count(unit_box(2), p, Bandwidths({0.2, 0.2}));
    const oracle::Fn1 outer = [&](double x) {
      const oracle::Fn1 inner = [&](double y) {
        return oracle::triangle((x - 0.05) / 0.2) * oracle::triangle((y - 0.5) / 0.2) / 0.04;
      };
      return oracle::gl_integrate(inner, 0, 1, {0.3, 0.5, 0.7}, 3);
    };
    CHECK(got == doctest::Approx(oracle::gl_integrate(outer, 0, 1, {0.05, 0.25}, 3)).epsilon(1e-6));
    CHECK_THROWS_AS(expected_kernel_count(unit_box(2), p, Bandwidths({0.2})), Error);
  }

  TEST_CASE("kernel counts: additivity and mass conservation over a tiling") {
    const DataTable data = uniform_table(400, 2, 77);
    const DensityTree t = grow(data, data.default_box(), StopCondition{5, {}, {}});
    const Bandwidths bw({0.05, 0.08});
    const auto c = expected_kernel_counts(t, data, bw);
    double leaf_sum = 0.0;
    for (NodeId id : t.leaves()) leaf_sum += c[id];
    for (NodeId id = 0; id < t.size(); ++id) {
      const auto& n = t.node(id);
      if (!n.is_leaf()) CHECK(c[id] == doctest::Approx(c[n.left] + c[n.right]).epsilon(1e-12));
    }
    CHECK(leaf_sum <= 400.0 + 1e-9);
    CHECK(leaf_sum == doctest::Approx(expected_kernel_count(t.root_box(), data, bw)).epsilon(1e-10));
    // interior kernels: equality
    const DataTable mid = column_table({0.4, 0.45, 0.5, 0.55, 0.6});
    const DensityTree tm = grow(mid, unit_box(1), StopCondition{});
    const auto cm = expected_kernel_counts(tm, mid, Bandwidths({0.1}));
    double s = 0.0;
    for (NodeId id : tm.leaves()) s += cm[id];
    CHECK(s == doctest::Approx(5.0).epsilon(1e-12));
  }

  TEST_CASE("single-leaf quality with interior kernels is 1/V") {
    const DataTable mid = column_table({0.4, 0.45, 0.5, 0.55, 0.6});
    const DensityTree t({"x"}, 5, Box({0.0}, {2.0}), NodeSpec::leaf(5));
    const PruneProfile p = prune_sequence(t, ComplexityKind::LeafCount);
    const QualityCurve c = quality_kernel(t, p, mid, Bandwidths({0.1}));
    REQUIRE(c.points.size() == 1);
    CHECK(c.points[0].q == doctest::Approx(0.5).epsilon(1e-12));
  }

  TEST_CASE("equal leaf sets give equal quality") {
    const DataTable data = uniform_table(300, 1, 4);
    const DensityTree t = grow(data, data.default_box(), StopCondition{5, {}, {}});
    const PruneProfile p = prune_sequence(t, ComplexityKind::LeafCount);
    const QualityCurve c = quality_kernel(t, p, data, Bandwidths({0.05}));
    CHECK(c.points.size() == p.candidate_alphas().size());
    for (std::size_t i = 1; i < c.points.size(); ++i) {
      const double mid = 0.5 * (c.points[i - 1].alpha + c.points[i].alpha);
      if (apply_alpha(t, p, mid).same_structure(apply_alpha(t, p, c.points[i - 1].alpha)))
        CHECK(c.points[i - 1].q == doctest::Approx(quality_kernel(t, p, data, Bandwidths({0.05})).points[i - 1].q));
    }
  }

  TEST_CASE("quality differences equal the integrated squared-error differences (1-D, 50 points)") {
    const DataTable data = generate_synthetic(synthetic_preset("mixture-1d", 50, 12)).data;
    const Box box = data.default_box();
    StopCondition stop;
    stop.max_leaves = 6;
    const DensityTree t = grow(data, box, stop);
    REQUIRE(t.n_leaves() == 6);
    const PruneProfile p = prune_sequence(t, ComplexityKind::LeafCount);
    const Bandwidths bw = silverman_bandwidths(data);
    const KdeModel kde(data, bw);
    const QualityCurve c = quality_kernel(t, p, data, bw);
    for (std::size_t i = 0; i < c.points.size(); ++i) {
      for (std::size_t j = i + 1; j < c.points.size(); ++j) {
        const DensityTree a = apply_alpha(t, p, c.points[i].alpha);
        const DensityTree b = apply_alpha(t, p, c.points[j].alpha);
        CHECK(std::abs(c.points[i].q - c.points[j].q - ise_gap_1d(a, b, kde, t)) < 1e-5);
      }
    }
  }

  TEST_CASE("select_alpha") {
    QualityCurve c;
    c.points = {{0.0, 1.0}, {0.1, 2.0}};
    CHECK(select_alpha(c) == 0.1);
    c.points = {{0.0, 1.0}, {0.1, 1.0}, {0.3, 1.0}};
    CHECK(select_alpha(c) == 0.3);
    CHECK_THROWS_AS(select_alpha(QualityCurve{}), ConfigError);
  }

  TEST_CASE("selected alpha does not raise the true ISE (50 points)") {
    const SyntheticSpec spec = synthetic_preset("mixture-1d", 50, 12);
    const DataTable data = generate_synthetic(spec).data;
    const DensityTree t = grow(data, data.default_box(), StopCondition{1, {}, {}});
    const PruneProfile p = prune_sequence(t, ComplexityKind::LeafCount);
    const QualityCurve c = quality_kernel(t, p, data, silverman_bandwidths(data));
    const DensityTree best = apply_alpha(t, p, select_alpha(c));
    const Box& b = t.root_box();
    auto true_ise = [&](const DensityTree& tr) {
      const oracle::Fn1 f = [&](double x) {
        const double d = tr.evaluate(std::span<const double>(&x, 1)) - spec.pdf(std::span<const double>(&x, 1));
        return d * d;
      };
      auto br = oracle::boundaries({&t}, 0);
      std::vector<double> fine;
      for (std::size_t i = 0; i + 1 < br.size(); ++i)
        for (int k = 0; k < 8; ++k) fine.push_back(br[i] + (br[i + 1] - br[i]) * k / 8.0);
      return oracle::gl_integrate(f, b.lo(0), b.hi(0), fine, 6);
    };
    CHECK(true_ise(best) <= true_ise(t));
  }

  TEST_CASE("leave-one-out identities") {
    const DataTable u = column_table({0.1, 0.35, 0.5, 0.8, 0.95});
    StopCondition all;
    all.min_count = 5;
    CHECK(loo_risk(u, unit_box(1), all, ComplexityKind::LeafCount, 0.0) == doctest::Approx(-1.0).epsilon(1e-14));
    const DataTable dup = column_table({0.3, 0.3});
    CHECK(loo_risk(dup, unit_box(1), StopCondition{}, ComplexityKind::LeafCount, 0.0) ==
          doctest::Approx(-1.0).epsilon(1e-14));
  }

  TEST_CASE("leave-one-out cap") {
    const DataTable big = uniform_table(501, 1, 1);
    try {
      loo_risk(big, unit_box(1), StopCondition{}, ComplexityKind::LeafCount, 0.0);
      FAIL("expected an error");
    } catch (const ConfigError& e) {
      CHECK(e.kind() == "loo-cap");
      CHECK(std::string(e.what()).find("quality_kernel") != std::string::npos);
    }
    LooOptions opt;
    opt.max_entries = 600;
    CHECK_NOTHROW(loo_curve(big, unit_box(1), StopCondition{200, {}, {}}, ComplexityKind::LeafCount,
                            std::vector<double>{0.0}, opt));
  }

  TEST_CASE("leave-one-out curve matches a direct resampling computation (N = 30)") {
    const DataTable data = two_level(30, 6);
    const Box box = unit_box(1);
    StopCondition stop;
    stop.min_count = 2;
    const DensityTree full = grow(data, box, stop);
    const PruneProfile p = prune_sequence(full, ComplexityKind::LeafCount);
    const auto alphas = p.candidate_alphas();
    const auto got = loo_curve(data, box, stop, ComplexityKind::LeafCount, alphas);
    std::vector<double> want(alphas.size(), 0.0);
    for (std::size_t a = 0; a < alphas.size(); ++a) {
      const DensityTree fa = apply_alpha(full, p, alphas[a]);
      double sq = 0.0;
      for (NodeId id : fa.leaves()) sq += fa.node_density(id) * fa.node_density(id) * fa.node(id).box.volume();
      double held = 0.0;
      for (std::size_t i = 0; i < data.rows(); ++i) {
        std::vector<std::size_t> rows;
        for (std::size_t j = 0; j < data.rows(); ++j)
          if (j != i) rows.push_back(j);
        const DataTable sub = data.subset(rows);
        const DensityTree ti = grow(sub, box, stop);
        const PruneProfile pi = prune_sequence(ti, ComplexityKind::LeafCount);
        held += apply_alpha(ti, pi, alphas[a]).evaluate(data.row(i));
      }
      want[a] = sq - 2.0 * held / 30.0;
      CHECK(got[a] == doctest::Approx(want[a]).epsilon(1e-12));
    }
    const auto argmin = [](const std::vector<double>& v) {
      return static_cast<std::size_t>(std::min_element(v.begin(), v.end()) - v.begin());
    };
    const auto ga = argmin(got), wa = argmin(want);
    CHECK((ga > wa ? ga - wa : wa - ga) <= 1);
  }

  TEST_CASE("Silverman-style default bandwidths") {
    const DataTable data = uniform_table(1000, 2, 3);
    const Bandwidths bw = silverman_bandwidths(data);
    for (std::size_t k = 0; k < 2; ++k) {
      double m = 0, s = 0;
      for (std::size_t i = 0; i < 1000; ++i) m += data(i, k);
      m /= 1000;
      for (std::size_t i = 0; i < 1000; ++i) s += (data(i, k) - m) * (data(i, k) - m);
      const double sigma = std::sqrt(s / 999.0);
      CHECK(bw.h[k] == doctest::Approx(2.0 * sigma * std::pow(1000.0, -1.0 / 6.0)).epsilon(1e-12));
    }
    CHECK_THROWS_AS(Bandwidths({0.1, 0.0}), ConfigError);
  }
}
