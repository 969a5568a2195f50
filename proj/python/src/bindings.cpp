#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "detree/analysis.hpp"
#include "detree/csv.hpp"
#include "detree/errors.hpp"
#include "detree/grid.hpp"
#include "detree/kde.hpp"
#include "detree/serialize.hpp"
#include "detree/synthetic.hpp"
#include "detree/train.hpp"

namespace py = pybind11;
using namespace detree;

namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

DataTable table_from(const Array& a, std::vector<std::string> columns) {
  if (a.ndim() == 1 && columns.size() == 1) {
    return DataTable(std::move(columns), std::vector<double>(a.data(), a.data() + a.size()));
  }
  if (a.ndim() != 2) throw DimensionError(columns.size(), static_cast<std::size_t>(a.ndim()));
  if (static_cast<std::size_t>(a.shape(1)) != columns.size())
    throw DimensionError(columns.size(), static_cast<std::size_t>(a.shape(1)));
  return DataTable(std::move(columns), std::vector<double>(a.data(), a.data() + a.size()));
}

Array table_values(const DataTable& t) {
  Array out({t.rows(), t.dims()});
  std::copy(t.values().begin(), t.values().end(), out.mutable_data());
  return out;
}

// f evaluated at every row of an (n, d) array, or at one point given as a 1-D array
template <class F>
py::object evaluate_many(const Array& x, std::size_t dims, F&& f) {
  if (x.ndim() == 1) {
    if (static_cast<std::size_t>(x.shape(0)) != dims) throw DimensionError(dims, static_cast<std::size_t>(x.shape(0)));
    return py::float_(f(std::span<const double>(x.data(), dims)));
  }
  if (x.ndim() != 2 || static_cast<std::size_t>(x.shape(1)) != dims)
    throw DimensionError(dims, x.ndim() == 2 ? static_cast<std::size_t>(x.shape(1)) : 0);
  const auto n = static_cast<std::size_t>(x.shape(0));
  Array out(n);
  double* o = out.mutable_data();
  for (std::size_t i = 0; i < n; ++i) o[i] = f(std::span<const double>(x.data() + i * dims, dims));
  return std::move(out);
}

StopCondition make_stop(std::uint64_t min_count, std::vector<double> min_widths, std::optional<std::size_t> max_leaves) {
  StopCondition s;
  s.min_count = min_count;
  s.min_widths = std::move(min_widths);
  s.max_leaves = max_leaves;
  return s;
}

}  // namespace

PYBIND11_MODULE(_detree, m) {
  m.doc() = "Density estimation trees";

  auto base = py::register_exception<Error>(m, "DetreeError", PyExc_RuntimeError);
  auto data_err = py::register_exception<DataError>(m, "DataError", base.ptr());
  py::register_exception<ConfigError>(m, "ConfigError", base.ptr());
  py::register_exception<NumericError>(m, "NumericError", base.ptr());
  py::register_exception<UsageError>(m, "UsageError", base.ptr());
  (void)data_err;

  py::class_<Box>(m, "Box")
      .def(py::init<std::vector<double>, std::vector<double>>(), py::arg("lo"), py::arg("hi"))
      .def_property_readonly("lo", [](const Box& b) { return b.lo(); })
      .def_property_readonly("hi", [](const Box& b) { return b.hi(); })
      .def_property_readonly("volume", &Box::volume)
      .def("__repr__", [](const Box& b) {
        std::string s = "Box(";
        for (std::size_t k = 0; k < b.dims(); ++k)
          s += (k ? ", [" : "[") + format_double(b.lo(k)) + ", " + format_double(b.hi(k)) + "]";
        return s + ")";
      });

  py::class_<DataTable>(m, "DataTable")
      .def(py::init(&table_from), py::arg("values"), py::arg("columns"))
      .def_property_readonly("columns", &DataTable::columns)
      .def_property_readonly("values", &table_values)
      .def("__len__", &DataTable::rows)
      .def("default_box", &DataTable::default_box)
      .def("select", [](const DataTable& t, const std::vector<std::string>& names) { return t.select(names); });

  m.def("load_csv", [](const std::string& path, const std::vector<std::string>& columns) {
    return load_csv(path, columns);
  }, py::arg("path"), py::arg("columns") = std::vector<std::string>{});

  py::class_<StopCondition>(m, "StopCondition")
      .def(py::init(&make_stop), py::arg("min_count") = 1, py::arg("min_widths") = std::vector<double>{},
           py::arg("max_leaves") = std::nullopt)
      .def_readwrite("min_count", &StopCondition::min_count)
      .def_readwrite("min_widths", &StopCondition::min_widths)
      .def_readwrite("max_leaves", &StopCondition::max_leaves);

  py::class_<DensityTree>(m, "DensityTree")
      .def_property_readonly("columns", &DensityTree::columns)
      .def_property_readonly("n_tot", &DensityTree::n_tot)
      .def_property_readonly("n_leaves", &DensityTree::n_leaves)
      .def_property_readonly("root_box", &DensityTree::root_box)
      .def_property_readonly("alpha", [](const DensityTree& t) { return t.provenance().alpha; })
      .def("evaluate", [](const DensityTree& t, const Array& x) {
        return evaluate_many(x, t.dims(), [&](std::span<const double> p) { return t.evaluate(p); });
      }, py::arg("x"))
      .def("leaves", [](const DensityTree& t) {
        py::list out;
        for (NodeId id : t.leaves()) {
          const TreeNode& n = t.node(id);
          out.append(py::make_tuple(n.box, n.count, t.node_density(id)));
        }
        return out;
      }, "(box, count, density) for every leaf")
      .def("to_json", [](const DensityTree& t) { return serialize(t); })
      .def_static("from_json", [](const std::string& s) { return deserialize(s); })
      .def("save", [](const DensityTree& t, const std::filesystem::path& p) { save_model(t, p); })
      .def_static("load", [](const std::filesystem::path& p) { return load_model(p); });

  m.def("grow", [](const DataTable& d, const StopCondition& stop, std::optional<Box> box) {
    return grow(d, box ? *box : d.default_box(), stop);
  }, py::arg("data"), py::arg("stop") = StopCondition{}, py::arg("box") = std::nullopt);

  py::class_<PruneStep>(m, "PruneStep")
      .def_readonly("alpha", &PruneStep::alpha)
      .def_readonly("node", &PruneStep::node)
      .def_readonly("n_leaves_after", &PruneStep::n_leaves_after);
  py::class_<PruneProfile>(m, "PruneProfile")
      .def_readonly("steps", &PruneProfile::steps)
      .def("candidate_alphas", &PruneProfile::candidate_alphas);

  m.def("prune_sequence", [](const DensityTree& t, const std::string& kind) {
    return prune_sequence(t, parse_complexity(kind));
  }, py::arg("tree"), py::arg("complexity") = "leaves");
  m.def("apply_alpha", &apply_alpha, py::arg("tree"), py::arg("profile"), py::arg("alpha"));

  py::class_<Bandwidths>(m, "Bandwidths")
      .def(py::init<std::vector<double>>(), py::arg("h"))
      .def_readonly("h", &Bandwidths::h);
  m.def("silverman_bandwidths", &silverman_bandwidths, py::arg("data"), py::arg("factor") = 2.0);
  m.def("overlap_integral", &overlap_integral, py::arg("lo"), py::arg("hi"), py::arg("x"), py::arg("h"));
  m.def("quality_kernel", [](const DensityTree& t, const PruneProfile& p, const DataTable& d, const Bandwidths& bw) {
    const QualityCurve c = quality_kernel(t, p, d, bw);
    std::vector<std::pair<double, double>> out;
    for (const auto& pt : c.points) out.emplace_back(pt.alpha, pt.q);
    return out;
  }, "list of (alpha, Q)");

  py::class_<TrainResult>(m, "TrainResult")
      .def_readonly("tree", &TrainResult::tree)
      .def_readonly("unpruned", &TrainResult::unpruned)
      .def_readonly("profile", &TrainResult::profile)
      .def_readonly("bandwidths", &TrainResult::bandwidths)
      .def_readonly("alpha", &TrainResult::alpha)
      .def_property_readonly("curve", [](const TrainResult& r) {
        std::vector<std::pair<double, double>> out;
        for (const auto& pt : r.curve.points) out.emplace_back(pt.alpha, pt.q);
        return out;
      });

  m.def("train", [](const DataTable& d, const StopCondition& stop, const std::string& complexity,
                    const std::string& cv, std::optional<std::vector<double>> bandwidths, double silverman_factor,
                    std::optional<Box> box) {
    TrainConfig cfg;
    cfg.stop = stop;
    cfg.complexity = parse_complexity(complexity);
    cfg.cv = parse_cv_mode(cv);
    if (bandwidths) cfg.bandwidths = Bandwidths(*bandwidths);
    cfg.silverman_factor = silverman_factor;
    cfg.box = box;
    py::gil_scoped_release release;
    return train(d, cfg);
  }, py::arg("data"), py::arg("stop") = StopCondition{}, py::arg("complexity") = "leaves", py::arg("cv") = "kernel",
     py::arg("bandwidths") = std::nullopt, py::arg("silverman_factor") = 2.0, py::arg("box") = std::nullopt);

  py::class_<SmearedModel>(m, "SmearedModel")
      .def(py::init([](const DensityTree& t, std::vector<double> h) { return SmearedModel(t, Bandwidths(std::move(h))); }),
           py::arg("tree"), py::arg("h"))
      .def("evaluate", [](const SmearedModel& s, const Array& x) {
        return evaluate_many(x, s.tree().dims(), [&](std::span<const double> p) { return s.evaluate(p); });
      });

  py::class_<Triangulation>(m, "Triangulation")
      .def_property_readonly("n_triangles", [](const Triangulation& t) { return t.triangles().size(); })
      .def_property_readonly("triangles", &Triangulation::triangles);
  m.def("triangulate", &triangulate, py::arg("tree"));
  m.def("interpolate", [](const Triangulation& tri, const DensityTree& t, const Array& x) {
    return evaluate_many(x, t.dims(), [&](std::span<const double> p) { return interpolate_evaluate(tri, t, p); });
  }, py::arg("triangulation"), py::arg("tree"), py::arg("x"));

  py::class_<KdeModel>(m, "KdeModel")
      .def(py::init([](const DataTable& d, std::vector<double> h) { return KdeModel(d, Bandwidths(std::move(h))); }),
           py::arg("data"), py::arg("h"))
      .def("evaluate", [](const KdeModel& k, const Array& x) {
        return evaluate_many(x, k.data().dims(), [&](std::span<const double> p) { return k.evaluate(p); });
      });

  m.def("integrate_region", [](const DensityTree& t, const std::vector<std::pair<double, double>>& bounds) {
    std::vector<Interval> iv;
    for (auto [lo, hi] : bounds) iv.push_back({lo, hi});
    return integrate_region(t, SelectionRegion(iv));
  }, py::arg("tree"), py::arg("bounds"), "bounds: one (lo, hi) per dimension");
  m.def("optimize_selection", [](const DensityTree& s, const DensityTree& b, double sy, double by,
                                 const std::vector<std::string>& dims) {
    const YieldConfig y{sy, by};
    y.validate();
    const SelectionResult r = optimize_selection(s, b, y, dims);
    std::vector<std::pair<double, double>> bounds;
    for (const auto& iv : r.region.bounds()) bounds.emplace_back(iv.lo, iv.hi);
    return py::make_tuple(bounds, r.metric);
  }, py::arg("signal"), py::arg("background"), py::arg("s_yield"), py::arg("b_yield"), py::arg("dims"));
  m.def("delta_log_likelihood", [](const DensityTree& s, const DensityTree& b, const Array& x) {
    const DensityModel ms(s), mb(b);
    return evaluate_many(x, s.dims(), [&](std::span<const double> p) { return delta_log_likelihood(ms, mb, p); });
  }, py::arg("signal"), py::arg("background"), py::arg("x"));

  m.def("synthetic", [](const std::string& preset, std::size_t n, std::uint64_t seed) {
    return generate_synthetic(synthetic_preset(preset, n, seed)).data;
  }, py::arg("preset"), py::arg("n"), py::arg("seed") = 1);
  m.def("synthetic_presets", &synthetic_preset_names);
}
