#include <doctest.h>

#include <cmath>
#include <random>

#include "detree/errors.hpp"
#include "detree/growth.hpp"
#include "detree/serialize.hpp"
#include "detree/tree.hpp"
#include "helpers.hpp"

using namespace detree;
using namespace testing_util;

TEST_SUITE("core_model") {
  TEST_CASE("data table rejects bad input") {
    CHECK_THROWS_AS(DataTable({"a"}, {}), Error);
    CHECK_THROWS_AS(DataTable({"a", "a"}, {1.0, 2.0}), Error);
    CHECK_THROWS_AS(DataTable({"a"}, {1.0, NAN}), Error);
    CHECK_THROWS_AS(DataTable({"a", "b"}, {1.0, 2.0, 3.0}), Error);
    const DataTable t({"a", "b"}, {1, 2, 3, 4, 5, 6});
    CHECK(t.rows() == 3);
    CHECK(t.dims() == 2);
    CHECK(t(2, 1) == 6);
    CHECK(*t.column_index("b") == 1);
    CHECK_FALSE(t.column_index("c"));
  }

  TEST_CASE("default box pads the range by 0.1 percent") {
    const DataTable t({"a"}, {0.0, 10.0, 5.0});
    const Box b = t.default_box();
    CHECK(b.lo(0) == doctest::Approx(-0.01).epsilon(1e-12));
    CHECK(b.hi(0) == doctest::Approx(10.01).epsilon(1e-12));
  }

  TEST_CASE("box validation") {
    CHECK_THROWS_AS(Box({0.0}, {0.0}), Error);
    CHECK_THROWS_AS(Box({1.0}, {0.0}), Error);
    CHECK_THROWS_AS(Box({0.0, 0.0}, {1.0}), Error);
    const Box b({0, 0}, {2, 3});
    CHECK(b.volume() == 6.0);
    CHECK(b.lower_part(0, 0.5).hi(0) == 0.5);
    CHECK(b.upper_part(1, 1.0).lo(1) == 1.0);
  }

  TEST_CASE("locate on a single leaf") {
    const DensityTree t({"x", "y"}, 7, unit_box(2), NodeSpec::leaf(7));
    const double in[2] = {0.3, 0.7}, out[2] = {1.5, 0.5};
    CHECK(t.locate(in) == std::optional<NodeId>(0));
    CHECK_FALSE(t.locate(out));
    CHECK(t.evaluate(std::vector<double>{0.2, 0.2}) == 1.0);
  }

  TEST_CASE("half-open boundary goes right; upper root boundary is closed") {
    const DensityTree t = two_leaf_1d(3, 1);
    const double mid = 0.5, top = 1.0, bottom = 0.0;
    CHECK(*t.locate(std::span<const double>(&mid, 1)) == t.node(0).right);
    CHECK(*t.locate(std::span<const double>(&top, 1)) == t.node(0).right);
    CHECK(*t.locate(std::span<const double>(&bottom, 1)) == t.node(0).left);
  }

  TEST_CASE("evaluate two leaves") {
    const DensityTree t = two_leaf_1d(3, 1);
    CHECK(t.evaluate(std::vector<double>{0.25}) == 1.5);
    CHECK(t.evaluate(std::vector<double>{0.75}) == 0.5);
    CHECK(t.evaluate(std::vector<double>{-0.1}) == 0.0);
    CHECK(t.evaluate(std::vector<double>{1.0000001}) == 0.0);
    CHECK_THROWS_AS(t.evaluate(std::vector<double>{0.1, 0.2}), DimensionError);
  }

  TEST_CASE("construction rejects inconsistent trees") {
    // split outside the box
    CHECK_THROWS_AS(DensityTree({"x"}, 2, unit_box(1), NodeSpec::split(0, 1.5, NodeSpec::leaf(1), NodeSpec::leaf(1))),
                    ModelInvariantError);
    // leaf counts not summing to n_tot
    CHECK_THROWS_AS(DensityTree({"x"}, 5, unit_box(1), NodeSpec::split(0, 0.5, NodeSpec::leaf(1), NodeSpec::leaf(1))),
                    ModelInvariantError);
    // bad dimension
    CHECK_THROWS_AS(DensityTree({"x"}, 2, unit_box(1), NodeSpec::split(1, 0.5, NodeSpec::leaf(1), NodeSpec::leaf(1))),
                    ModelInvariantError);
  }

  TEST_CASE("leaves tile the root box: exclusivity, volume sum, unit integral") {
    const DataTable data = uniform_table(2000, 3, 11);
    const DensityTree t = grow(data, data.default_box(), StopCondition{5, {}, {}});
    REQUIRE(t.n_leaves() > 50);
    double vol = 0.0, integral = 0.0;
    std::uint64_t counts = 0;
    for (NodeId id : t.leaves()) {
      vol += t.node(id).box.volume();
      integral += t.node_density(id) * t.node(id).box.volume();
      counts += t.node(id).count;
    }
    CHECK(counts == t.n_tot());
    CHECK(std::abs(vol - t.root_box().volume()) <= 1e-12 * t.root_box().volume());
    CHECK(std::abs(integral - 1.0) <= 1e-12);

    std::mt19937_64 rng(5);
    const Box& rb = t.root_box();
    for (int i = 0; i < 10000; ++i) {
      std::vector<double> x(3);
      for (std::size_t k = 0; k < 3; ++k) x[k] = uniform(rng, rb.lo(k), rb.hi(k));
      int holders = 0;
      for (NodeId id : t.leaves()) {
        const Box& b = t.node(id).box;
        bool in = true;
        for (std::size_t k = 0; k < 3; ++k) {
          const bool top = b.hi(k) == rb.hi(k);
          in = in && x[k] >= b.lo(k) && (x[k] < b.hi(k) || (top && x[k] == b.hi(k)));
        }
        holders += in ? 1 : 0;
      }
      REQUIRE(holders == 1);
      const auto leaf = t.locate(x);
      REQUIRE(leaf);
      CHECK(t.evaluate(x) == static_cast<double>(t.node(*leaf).count) /
                                 (static_cast<double>(t.n_tot()) * t.node(*leaf).box.volume()));
    }
  }

  TEST_CASE("serialization round trip is exact") {
    const DataTable data = uniform_table(500, 2, 3);
    DensityTree t = grow(data, data.default_box(), StopCondition{4, {}, {}});
    Provenance p;
    p.min_count = 4;
    p.alpha = 0.1 / 3.0;
    t.set_provenance(p);
    const std::string s = serialize(t);
    const DensityTree back = deserialize(s);
    CHECK(back.same_structure(t));
    CHECK(back.provenance() == t.provenance());
    CHECK(serialize(back) == s);
    for (NodeId id = 0; id < t.size(); ++id) {
      CHECK(back.node(id).split_value == t.node(id).split_value);
      CHECK(back.node(id).box == t.node(id).box);
    }
  }

  TEST_CASE("serialization error paths are distinct") {
    const std::string good = serialize(two_leaf_1d(3, 1));
    CHECK_THROWS_AS(deserialize(good.substr(0, good.size() / 2)), ModelParseError);
    std::string wrong_format = good;
    wrong_format.replace(wrong_format.find("detree-v1"), 9, "detree-v9");
    CHECK_THROWS_AS(deserialize(wrong_format), ModelSchemaError);
    std::string bad_count = good;
    bad_count.replace(bad_count.find("\"n_tot\":4"), 9, "\"n_tot\":5");
    CHECK_THROWS_AS(deserialize(bad_count), ModelInvariantError);
    CHECK_THROWS_AS(deserialize("{\"format\":\"detree-v1\"}"), ModelSchemaError);
  }

  TEST_CASE("model file layout") {
    const std::string s = serialize(two_leaf_1d(3, 1));
    CHECK(s.find("{\"format\":\"detree-v1\",\"columns\":[\"x\"],\"n_tot\":4,\"box\":{\"lo\":[0.0],\"hi\":[1.0]},") == 0);
    CHECK(s.find("\"split_dim\":0,\"split_value\":0.5") != std::string::npos);
    CHECK(s.find("{\"count\":3,\"leaf\":true}") != std::string::npos);
  }
}
