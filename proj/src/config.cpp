#include "detree/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "detree/csv.hpp"
#include "detree/errors.hpp"
#include "detree/serialize.hpp"

namespace detree {

namespace {

double parse_real(std::string_view text, const std::string& context) {
  while (!text.empty() && (text.front() == ' ' || text.front() == '+')) text.remove_prefix(1);
  while (!text.empty() && text.back() == ' ') text.remove_suffix(1);
  double v = 0.0;
  const auto [p, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (text.empty() || ec != std::errc() || p != text.data() + text.size() || !std::isfinite(v))
    throw UsageError("bad number '" + std::string(text) + "' in " + context);
  return v;
}

}  // namespace

std::vector<double> parse_double_list(const std::string& text) {
  std::vector<double> out;
  for (const auto& item : split_list(text)) out.push_back(parse_real(item, "'" + text + "'"));
  if (out.empty()) throw UsageError("empty number list");
  return out;
}

SelectionRegion parse_region(const std::string& text, const DensityTree& tree) {
  SelectionRegion region = SelectionRegion::full(tree.root_box());
  std::vector<bool> seen(tree.dims(), false);
  for (const auto& part : split_list(text, ';')) {
    const auto colon = part.find(':');
    const auto open = part.find('[', colon == std::string::npos ? 0 : colon);
    const auto comma = part.find(',', open == std::string::npos ? 0 : open);
    const auto close = part.find(']', comma == std::string::npos ? 0 : comma);
    if (colon == std::string::npos || open == std::string::npos || comma == std::string::npos ||
        close == std::string::npos || part.find_first_not_of(' ', close + 1) != std::string::npos)
      throw UsageError("bad region term '" + part + "' (expected name:[lo,hi])");
    std::string name = part.substr(0, colon);
    while (!name.empty() && name.back() == ' ') name.pop_back();
    const auto& cols = tree.columns();
    const auto it = std::find(cols.begin(), cols.end(), name);
    if (it == cols.end()) throw MissingColumnError(name);
    const auto k = static_cast<std::size_t>(it - cols.begin());
    if (seen[k]) throw UsageError("column '" + name + "' appears twice in the region");
    seen[k] = true;
    const double lo = parse_real(std::string_view(part).substr(open + 1, comma - open - 1), "region");
    const double hi = parse_real(std::string_view(part).substr(comma + 1, close - comma - 1), "region");
    region.set(k, {lo, hi});
  }
  return region;
}

std::string format_region(const SelectionRegion& region, const std::vector<std::string>& columns) {
  std::string out;
  for (std::size_t k = 0; k < region.dims(); ++k) {
    if (k) out += ';';
    out += columns.at(k) + ":[" + format_double(region[k].lo) + "," + format_double(region[k].hi) + "]";
  }
  return out;
}

LikelihoodSpec parse_likelihood_spec(const std::string& document, const std::filesystem::path& base_dir) {
  using nlohmann::json;
  json j;
  try {
    j = json::parse(document);
  } catch (const json::exception& e) {
    throw ConfigError("bad-likelihood-spec", std::string("likelihood spec is not valid JSON: ") + e.what());
  }
  if (!j.is_object() || !j.contains("factors") || !j["factors"].is_array())
    throw ConfigError("bad-likelihood-spec", "likelihood spec needs a 'factors' array");
  LikelihoodSpec spec;
  try {
    for (const auto& f : j["factors"]) {
      if (!f.is_object() || !f.contains("model") || !f["model"].is_string())
        throw ConfigError("bad-likelihood-spec", "each factor needs a 'model' path");
      std::filesystem::path mp = f["model"].get<std::string>();
      if (mp.is_relative()) mp = base_dir / mp;
      DensityTree tree = load_model(mp);
      FactorRole role = FactorRole::Numerator;
      const std::string r = f.value("role", std::string("numerator"));
      if (r == "denominator") {
        role = FactorRole::Denominator;
      } else if (r != "numerator") {
        throw ConfigError("bad-likelihood-spec", "role must be 'numerator' or 'denominator', got '" + r + "'");
      }
      std::vector<std::string> inputs;
      if (f.contains("inputs")) inputs = f["inputs"].get<std::vector<std::string>>();
      std::optional<std::string> cond;
      if (f.contains("conditional") && !f["conditional"].is_null()) cond = f["conditional"].get<std::string>();
      if (f.contains("smear") && !f["smear"].is_null()) {
        Bandwidths bw(f["smear"].get<std::vector<double>>());
        spec.factors.push_back({DensityModel(SmearedModel(std::move(tree), std::move(bw))), role, inputs, cond});
      } else {
        spec.factors.push_back({DensityModel(std::move(tree)), role, inputs, cond});
      }
    }
  } catch (const json::exception& e) {
    throw ConfigError("bad-likelihood-spec", std::string("bad factor field: ") + e.what());
  }
  return spec;
}

LikelihoodSpec load_likelihood_spec(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("unreadable-file", "cannot open '" + path.string() + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_likelihood_spec(ss.str(), path.parent_path());
}

}  // namespace detree
