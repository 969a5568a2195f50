#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "detree/analysis.hpp"

namespace detree {

/// Comma-separated reals, e.g. "0.1,0.2".
std::vector<double> parse_double_list(const std::string& text);

/// "a:[0,1];b:[2,3]"; columns that are not named span the tree's root box.
SelectionRegion parse_region(const std::string& text, const DensityTree& tree);
std::string format_region(const SelectionRegion& region, const std::vector<std::string>& columns);

/// Likelihood factors from JSON:
///   {"factors": [{"model": "sig.json", "role": "numerator",
///                 "inputs": ["m", "ip"], "smear": [0.01, 0.1], "conditional": "pid"}]}
/// Model paths are relative to the file's directory; "inputs", "smear" and
/// "conditional" are optional.
LikelihoodSpec load_likelihood_spec(const std::filesystem::path& path);
LikelihoodSpec parse_likelihood_spec(const std::string& document, const std::filesystem::path& base_dir);

}  // namespace detree
