#pragma once

#include <optional>
#include <string_view>

#include "detree/crossval.hpp"
#include "detree/growth.hpp"
#include "detree/pruning.hpp"

namespace detree {

enum class CvMode { Kernel, Loo };
CvMode parse_cv_mode(std::string_view name);

struct TrainConfig {
  StopCondition stop;
  ComplexityKind complexity = ComplexityKind::LeafCount;
  CvMode cv = CvMode::Kernel;
  std::optional<Bandwidths> bandwidths;  // default: Silverman rule
  double silverman_factor = 2.0;
  std::optional<Box> box;  // default: DataTable::default_box()
  LooOptions loo;
};

struct TrainResult {
  DensityTree unpruned;
  PruneProfile profile;
  QualityCurve curve;  // for LOO, q = -R_LOO
  Bandwidths bandwidths;
  double alpha = 0.0;
  DensityTree tree;
  double seconds_growth = 0.0;
  double seconds_crossval = 0.0;
};

/// Grow, prune, pick the alpha by cross-validation, and return the pruned tree.
TrainResult train(const DataTable& data, const TrainConfig& config);

}  // namespace detree
