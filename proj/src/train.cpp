#include "detree/train.hpp"

#include <chrono>
#include <string>

#include "detree/errors.hpp"

namespace detree {

CvMode parse_cv_mode(std::string_view name) {
  if (name == "kernel") return CvMode::Kernel;
  if (name == "loo") return CvMode::Loo;
  throw ConfigError("invalid-cv", "cross-validation must be 'kernel' or 'loo', got '" + std::string(name) + "'");
}

TrainResult train(const DataTable& data, const TrainConfig& config) {
  using clock = std::chrono::steady_clock;
  const Box box = config.box ? *config.box : data.default_box();
  Bandwidths bw = config.bandwidths ? *config.bandwidths : silverman_bandwidths(data, config.silverman_factor);
  if (bw.dims() != data.dims()) throw DimensionError(data.dims(), bw.dims());

  const auto t0 = clock::now();
  DensityTree unpruned = grow(data, box, config.stop);
  Provenance prov;
  prov.min_count = config.stop.min_count;
  prov.min_widths = config.stop.min_widths;
  prov.max_leaves = config.stop.max_leaves;
  unpruned.set_provenance(std::move(prov));
  PruneProfile profile = prune_sequence(unpruned, config.complexity);
  const auto t1 = clock::now();

  QualityCurve curve;
  if (config.cv == CvMode::Kernel) {
    curve = quality_kernel(unpruned, profile, data, bw);
  } else {
    const auto alphas = profile.candidate_alphas();
    const auto risk = loo_curve(data, box, config.stop, config.complexity, alphas, config.loo);
    for (std::size_t i = 0; i < alphas.size(); ++i) curve.points.push_back({alphas[i], -risk[i]});
    for (std::size_t i = 1; i < curve.points.size(); ++i) {
      if (curve.points[i].q >= curve.points[curve.argmax].q) curve.argmax = i;
    }
  }
  const double alpha = select_alpha(curve);
  DensityTree pruned = apply_alpha(unpruned, profile, alpha);
  const auto t2 = clock::now();

  TrainResult result{std::move(unpruned), std::move(profile), std::move(curve), std::move(bw), alpha,
                     std::move(pruned), std::chrono::duration<double>(t1 - t0).count(),
                     std::chrono::duration<double>(t2 - t1).count()};
  return result;
}

}  // namespace detree
