// detree command-line tool.
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "detree/analysis.hpp"
#include "detree/bench.hpp"
#include "detree/config.hpp"
#include "detree/csv.hpp"
#include "detree/errors.hpp"
#include "detree/grid.hpp"
#include "detree/serialize.hpp"
#include "detree/smoothing.hpp"
#include "detree/synthetic.hpp"
#include "detree/train.hpp"

using namespace detree;

namespace {

struct TrainArgs {
  std::string input, output, columns, min_widths, bandwidths, complexity = "leaves", cv = "kernel";
  std::uint64_t min_count = 0;
  std::size_t max_leaves = 0;
  double silverman = 2.0;
};

struct EvalArgs {
  std::string model, input, output, smear;
  bool interpolate = false;
};

struct GridArgs {
  std::string model, bins, output, smear;
  bool interpolate = false, pad = false;
};

struct IntegrateArgs {
  std::string model, region;
};

struct OptimizeArgs {
  std::string signal, background, dims;
  double s_yield = 0.0, b_yield = 0.0;
};

struct LikelihoodArgs {
  std::string spec, input, output;
};

struct SynthArgs {
  std::string preset, output;
  std::size_t n = 1000;
  std::uint64_t seed = 42;
  bool tag = false, no_subsamples = false;
};

struct BenchArgs {
  std::string sizes, stop = "loose", bins = "200x200", output;
  int reps = 3;
  std::uint64_t seed = 42;
};

// Output to a file, or stdout when the path is empty or "-".
class Sink {
 public:
  explicit Sink(const std::string& path) {
    if (path.empty() || path == "-") return;
    file_ = std::make_unique<std::ofstream>(path, std::ios::binary);
    if (!*file_) throw DataError("unwritable-file", "cannot write '" + path + "'");
  }
  std::ostream& out() { return file_ ? *file_ : std::cout; }

 private:
  std::unique_ptr<std::ofstream> file_;
};

std::vector<std::string> names(const std::string& list) { return split_list(list); }

void run_train(const TrainArgs& a, bool bw_given, bool sf_given) {
  if (bw_given && sf_given) throw UsageError("--bandwidths and --silverman-factor are exclusive");
  const auto cols = names(a.columns);
  const DataTable data = load_csv(a.input, cols);
  TrainConfig cfg;
  cfg.stop.min_count = a.min_count;
  if (!a.min_widths.empty()) cfg.stop.min_widths = parse_double_list(a.min_widths);
  if (a.max_leaves > 0) cfg.stop.max_leaves = a.max_leaves;
  cfg.complexity = parse_complexity(a.complexity);
  cfg.cv = parse_cv_mode(a.cv);
  if (bw_given) cfg.bandwidths = Bandwidths(parse_double_list(a.bandwidths));
  cfg.silverman_factor = a.silverman;
  const TrainResult r = train(data, cfg);
  save_model(r.tree, a.output);
  std::cout << "entries " << data.rows() << "\nleaves_unpruned " << r.unpruned.n_leaves() << "\nleaves "
            << r.tree.n_leaves() << "\nalpha " << format_double(r.alpha) << "\n";
}

using Evaluator = std::function<double(std::span<const double>)>;

struct LoadedModel {
  DensityTree tree;
  std::optional<SmearedModel> smeared;
  std::optional<Triangulation> tri;
};

LoadedModel load_for_eval(const std::string& path, const std::string& smear, bool interpolate) {
  LoadedModel m{load_model(path), std::nullopt, std::nullopt};
  if (!smear.empty() && interpolate) throw UsageError("--smear and --interpolate are exclusive");
  if (!smear.empty()) m.smeared.emplace(m.tree, Bandwidths(parse_double_list(smear)));
  if (interpolate) m.tri.emplace(triangulate(m.tree));
  return m;
}

Evaluator evaluator(const LoadedModel& m) {
  if (m.smeared) return [&m](std::span<const double> x) { return m.smeared->evaluate(x); };
  if (m.tri) return [&m](std::span<const double> x) { return interpolate_evaluate(*m.tri, m.tree, x); };
  return [&m](std::span<const double> x) { return m.tree.evaluate(x); };
}

void run_eval(const EvalArgs& a) {
  const LoadedModel m = load_for_eval(a.model, a.smear, a.interpolate);
  const DataTable data = load_csv(a.input, m.tree.columns());
  const Evaluator f = evaluator(m);
  std::vector<std::string> cols = m.tree.columns();
  cols.push_back("density");
  std::vector<double> out;
  out.reserve(data.rows() * cols.size());
  for (std::size_t i = 0; i < data.rows(); ++i) {
    const auto row = data.row(i);
    out.insert(out.end(), row.begin(), row.end());
    out.push_back(f(row));
  }
  Sink sink(a.output);
  write_csv(sink.out(), cols, out);
}

void run_grid(const GridArgs& a) {
  const LoadedModel m = load_for_eval(a.model, a.smear, a.interpolate);
  const auto bins = parse_bins(a.bins, m.tree.dims());
  Box box = m.tree.root_box();
  if (a.pad) {
    if (!m.smeared) throw UsageError("--pad needs --smear");
    std::vector<double> lo = box.lo(), hi = box.hi();
    for (std::size_t k = 0; k < lo.size(); ++k) {
      lo[k] -= m.smeared->bandwidths().h[k];
      hi[k] += m.smeared->bandwidths().h[k];
    }
    box = Box(lo, hi);
  }
  const Grid g = sample_grid(evaluator(m), box, bins, m.tree.columns());
  Sink sink(a.output);
  write_csv(sink.out(), g.columns, g.values);
}

void run_integrate(const IntegrateArgs& a) {
  const DensityTree tree = load_model(a.model);
  const SelectionRegion region = parse_region(a.region, tree);
  std::cout << format_double(integrate_region(tree, region)) << "\n";
}

void run_optimize(const OptimizeArgs& a) {
  const DensityTree sig = load_model(a.signal);
  const DensityTree bkg = load_model(a.background);
  const auto dims = names(a.dims);
  const SelectionResult r = optimize_selection(sig, bkg, YieldConfig{a.s_yield, a.b_yield}, dims);
  std::cout << "region " << format_region(r.region, sig.columns()) << "\nmetric " << format_double(r.metric)
            << "\nsignal " << format_double(a.s_yield * integrate_region(sig, r.region)) << "\nbackground "
            << format_double(a.b_yield * integrate_region(bkg, r.region)) << "\n";
}

void run_likelihood(const LikelihoodArgs& a) {
  const LikelihoodSpec spec = load_likelihood_spec(a.spec);
  const DataTable data = load_csv(a.input);
  const LikelihoodEvaluator eval(spec, data.columns());
  std::vector<std::string> cols = data.columns();
  cols.push_back("score");
  std::vector<double> out;
  out.reserve(data.rows() * cols.size());
  for (std::size_t i = 0; i < data.rows(); ++i) {
    const auto row = data.row(i);
    out.insert(out.end(), row.begin(), row.end());
    out.push_back(eval(row));
  }
  Sink sink(a.output);
  write_csv(sink.out(), cols, out);
}

void write_table(const std::string& path, const DataTable& t) { write_csv(path, t.columns(), t.values()); }

void run_synth(const SynthArgs& a) {
  const SyntheticSample s = generate_synthetic(synthetic_preset(a.preset, a.n, a.seed));
  if (a.tag) {
    std::vector<std::string> cols = s.data.columns();
    cols.push_back("component");
    std::vector<double> out;
    for (std::size_t i = 0; i < s.data.rows(); ++i) {
      const auto row = s.data.row(i);
      out.insert(out.end(), row.begin(), row.end());
      out.push_back(static_cast<double>(s.component[i]));
    }
    write_csv(a.output, cols, out);
  } else {
    write_table(a.output, s.data);
  }
  if (a.preset == "d0-demo" && !a.no_subsamples) {
    const std::filesystem::path p(a.output);
    const std::filesystem::path stem = p.parent_path() / p.stem();
    const std::string ext = p.extension().string();
    write_table(stem.string() + "-signal" + ext, signal_window(s.data));
    write_table(stem.string() + "-sideband" + ext, sideband(s.data));
  }
}

void run_bench(const BenchArgs& a) {
  BenchOptions o;
  for (double v : parse_double_list(a.sizes)) {
    if (!(v >= 1) || v != static_cast<double>(static_cast<std::size_t>(v)))
      throw UsageError("benchmark sizes must be positive integers");
    o.sizes.push_back(static_cast<std::size_t>(v));
  }
  o.stop = parse_bench_stop(a.stop);
  o.bins = parse_bins(a.bins, 2);
  o.repetitions = a.reps;
  o.seed = a.seed;
  const auto rows = run_benchmark(o);
  Sink sink(a.output);
  write_bench_csv(sink.out(), rows);
}

int fail(ErrorCategory c, const std::string& kind, const std::string& msg) {
  std::cerr << "error:" << category_name(c) << ":" << kind << ": " << msg << "\n";
  return exit_code(c);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Density estimation trees: train, evaluate, smear, select."};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all");

  TrainArgs ta;
  auto* train_cmd = app.add_subcommand("train", "grow, prune and cross-validate a tree");
  train_cmd->add_option("--input", ta.input, "CSV training sample")->required();
  train_cmd->add_option("--columns", ta.columns, "comma-separated columns (default: all)");
  train_cmd->add_option("--min-count", ta.min_count, "minimum entries per leaf")->required()->check(CLI::PositiveNumber);
  train_cmd->add_option("--min-widths", ta.min_widths, "minimum leaf widths per column");
  train_cmd->add_option("--max-leaves", ta.max_leaves, "leaf budget");
  train_cmd->add_option("--complexity", ta.complexity, "leaves|depth")->check(CLI::IsMember({"leaves", "depth"}));
  auto* bw_opt = train_cmd->add_option("--bandwidths", ta.bandwidths, "kernel bandwidths per column");
  auto* sf_opt = train_cmd->add_option("--silverman-factor", ta.silverman, "bandwidth rule factor");
  train_cmd->add_option("--cv", ta.cv, "kernel|loo")->check(CLI::IsMember({"kernel", "loo"}));
  train_cmd->add_option("--output", ta.output, "model JSON path")->required();

  EvalArgs ea;
  auto* eval_cmd = app.add_subcommand("eval", "evaluate a model at CSV rows");
  eval_cmd->add_option("--model", ea.model)->required();
  eval_cmd->add_option("--input", ea.input)->required();
  eval_cmd->add_option("--smear", ea.smear, "resolution widths per column");
  eval_cmd->add_flag("--interpolate", ea.interpolate, "linear interpolation between leaf centers (2-D)");
  eval_cmd->add_option("--output", ea.output, "CSV path (default stdout)");

  GridArgs ga;
  auto* grid_cmd = app.add_subcommand("grid", "sample a model on a regular grid");
  grid_cmd->add_option("--model", ga.model)->required();
  grid_cmd->add_option("--bins", ga.bins, "e.g. 200x200")->required();
  grid_cmd->add_option("--smear", ga.smear, "resolution widths per column");
  grid_cmd->add_flag("--interpolate", ga.interpolate);
  grid_cmd->add_flag("--pad", ga.pad, "extend the grid by one resolution width on every side");
  grid_cmd->add_option("--output", ga.output, "CSV path (default stdout)");

  IntegrateArgs ia;
  auto* int_cmd = app.add_subcommand("integrate", "fraction of the estimate inside a rectangular region");
  int_cmd->add_option("--model", ia.model)->required();
  int_cmd->add_option("--region", ia.region, "e.g. \"a:[0,1];b:[2,3]\"")->required();

  OptimizeArgs oa;
  auto* opt_cmd = app.add_subcommand("optimize", "maximize S/(1+S+B) over rectangular selections");
  opt_cmd->add_option("--signal", oa.signal)->required();
  opt_cmd->add_option("--background", oa.background)->required();
  opt_cmd->add_option("--s-yield", oa.s_yield)->required()->check(CLI::NonNegativeNumber);
  opt_cmd->add_option("--b-yield", oa.b_yield)->required()->check(CLI::NonNegativeNumber);
  opt_cmd->add_option("--dims", oa.dims, "columns to cut on")->required();

  LikelihoodArgs la;
  auto* lik_cmd = app.add_subcommand("likelihood", "composite log-likelihood ratio per CSV row");
  lik_cmd->add_option("--spec", la.spec, "likelihood spec JSON")->required();
  lik_cmd->add_option("--input", la.input)->required();
  lik_cmd->add_option("--output", la.output, "CSV path (default stdout)");

  SynthArgs sa;
  auto* syn_cmd = app.add_subcommand("synth", "generate a synthetic sample");
  syn_cmd->add_option("--preset", sa.preset)->required()->check(CLI::IsMember(synthetic_preset_names()));
  syn_cmd->add_option("--n", sa.n)->check(CLI::PositiveNumber);
  syn_cmd->add_option("--seed", sa.seed);
  syn_cmd->add_flag("--tag", sa.tag, "append the generating component index");
  syn_cmd->add_flag("--no-subsamples", sa.no_subsamples, "skip the d0-demo signal and sideband files");
  syn_cmd->add_option("--output", sa.output)->required();

  BenchArgs ba;
  auto* bench_cmd = app.add_subcommand("bench", "training and grid timing study");
  bench_cmd->add_option("--sizes", ba.sizes, "ascending sample sizes")->required();
  bench_cmd->add_option("--stop", ba.stop, "tight|loose")->check(CLI::IsMember({"tight", "loose"}));
  bench_cmd->add_option("--bins", ba.bins);
  bench_cmd->add_option("--reps", ba.reps)->check(CLI::PositiveNumber);
  bench_cmd->add_option("--seed", ba.seed);
  bench_cmd->add_option("--output", ba.output, "CSV path (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::string msg = e.what();
    for (char& c : msg)
      if (c == '\n') c = ' ';
    return fail(ErrorCategory::Usage, "usage", msg);
  }

  try {
    if (*train_cmd) run_train(ta, bw_opt->count() > 0, sf_opt->count() > 0);
    if (*eval_cmd) run_eval(ea);
    if (*grid_cmd) run_grid(ga);
    if (*int_cmd) run_integrate(ia);
    if (*opt_cmd) run_optimize(oa);
    if (*lik_cmd) run_likelihood(la);
    if (*syn_cmd) run_synth(sa);
    if (*bench_cmd) run_bench(ba);
  } catch (const Error& e) {
    return fail(e.category(), e.kind(), e.what());
  } catch (const std::exception& e) {
    return fail(ErrorCategory::Config, "internal", e.what());
  }
  return 0;
}
