#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "detree/tree.hpp"

namespace detree {

inline constexpr std::string_view kModelFormat = "detree-v1";

/// JSON model document; doubles use shortest round-trip formatting.
std::string serialize(const DensityTree& tree);

/// Inverse of serialize. Throws ModelParseError for malformed JSON,
/// ModelSchemaError for a wrong format tag or layout, and
/// ModelInvariantError when the decoded tree is inconsistent.
DensityTree deserialize(std::string_view document);

void save_model(const DensityTree& tree, const std::filesystem::path& path);
DensityTree load_model(const std::filesystem::path& path);

}  // namespace detree
