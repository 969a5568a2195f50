#include "detree/serialize.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "detree/errors.hpp"

namespace detree {

using ordered_json = nlohmann::ordered_json;

namespace {

ordered_json node_to_json(const DensityTree& tree, NodeId id) {
  const TreeNode& n = tree.node(id);
  ordered_json j;
  j["count"] = n.count;
  if (n.is_leaf()) {
    j["leaf"] = true;
  } else {
    j["split_dim"] = n.split_dim;
    j["split_value"] = n.split_value;
    j["left"] = node_to_json(tree, n.left);
    j["right"] = node_to_json(tree, n.right);
  }
  return j;
}

template <class T>
T required(const ordered_json& j, const char* key, const char* where) {
  auto it = j.find(key);
  if (it == j.end()) throw ModelSchemaError(std::string("missing key '") + key + "' in " + where);
  try {
    return it->get<T>();
  } catch (const nlohmann::json::exception&) {
    throw ModelSchemaError(std::string("key '") + key + "' in " + where + " has the wrong type");
  }
}

NodeSpec node_from_json(const ordered_json& j) {
  if (!j.is_object()) throw ModelSchemaError("tree node must be an object");
  const auto& count_field = j.find("count");
  if (count_field == j.end() || !count_field->is_number_unsigned()) {
    throw ModelSchemaError("tree node needs a non-negative integer 'count'");
  }
  NodeSpec s;
  s.count = count_field->get<std::uint64_t>();
  if (j.contains("leaf")) {
    if (!j["leaf"].is_boolean() || !j["leaf"].get<bool>()) throw ModelSchemaError("'leaf' must be true");
    if (j.contains("split_dim") || j.contains("left") || j.contains("right")) {
      throw ModelSchemaError("leaf node must not carry split fields");
    }
    return s;
  }
  const auto& dim = j.find("split_dim");
  if (dim == j.end() || !dim->is_number_integer()) throw ModelSchemaError("internal node needs integer 'split_dim'");
  s.split_dim = dim->get<int>();
  s.split_value = required<double>(j, "split_value", "internal node");
  if (!j.contains("left") || !j.contains("right")) throw ModelSchemaError("internal node needs 'left' and 'right'");
  s.children.push_back(node_from_json(j["left"]));
  s.children.push_back(node_from_json(j["right"]));
  return s;
}

ordered_json provenance_to_json(const Provenance& p) {
  ordered_json j = ordered_json::object();
  if (p.min_count) j["min_count"] = *p.min_count;
  if (!p.min_widths.empty()) j["min_widths"] = p.min_widths;
  if (p.max_leaves) j["max_leaves"] = *p.max_leaves;
  if (p.complexity) j["complexity"] = *p.complexity;
  if (p.alpha) j["alpha"] = *p.alpha;
  return j;
}

Provenance provenance_from_json(const ordered_json& j) {
  if (!j.is_object()) throw ModelSchemaError("'provenance' must be an object");
  Provenance p;
  try {
    if (j.contains("min_count")) p.min_count = j["min_count"].get<std::uint64_t>();
    if (j.contains("min_widths")) p.min_widths = j["min_widths"].get<std::vector<double>>();
    if (j.contains("max_leaves")) p.max_leaves = j["max_leaves"].get<std::size_t>();
    if (j.contains("complexity")) p.complexity = j["complexity"].get<std::string>();
    if (j.contains("alpha")) p.alpha = j["alpha"].get<double>();
  } catch (const nlohmann::json::exception& e) {
    throw ModelSchemaError(std::string("bad provenance field: ") + e.what());
  }
  return p;
}

}  // namespace

std::string serialize(const DensityTree& tree) {
  ordered_json doc;
  doc["format"] = kModelFormat;
  doc["columns"] = tree.columns();
  doc["n_tot"] = tree.n_tot();
  doc["box"] = {{"lo", tree.root_box().lo()}, {"hi", tree.root_box().hi()}};
  doc["root"] = node_to_json(tree, 0);
  const ordered_json prov = provenance_to_json(tree.provenance());
  if (!prov.empty()) doc["provenance"] = prov;
  return doc.dump() + "\n";
}

DensityTree deserialize(std::string_view document) {
  ordered_json doc;
  try {
    doc = ordered_json::parse(document.begin(), document.end());
  } catch (const nlohmann::json::parse_error& e) {
    throw ModelParseError(e.what());
  }
  if (!doc.is_object()) throw ModelSchemaError("model document must be a JSON object");
  const auto format = required<std::string>(doc, "format", "model");
  if (format != kModelFormat) {
    throw ModelSchemaError("unsupported model format '" + format + "', expected '" + std::string(kModelFormat) + "'");
  }
  auto columns = required<std::vector<std::string>>(doc, "columns", "model");
  if (!doc.contains("n_tot") || !doc["n_tot"].is_number_unsigned()) {
    throw ModelSchemaError("'n_tot' must be a non-negative integer");
  }
  const auto n_tot = doc["n_tot"].get<std::uint64_t>();
  const auto box_json = required<ordered_json>(doc, "box", "model");
  auto lo = required<std::vector<double>>(box_json, "lo", "box");
  auto hi = required<std::vector<double>>(box_json, "hi", "box");
  if (!doc.contains("root")) throw ModelSchemaError("missing key 'root' in model");
  NodeSpec root = node_from_json(doc["root"]);
  Provenance prov;
  if (doc.contains("provenance")) prov = provenance_from_json(doc["provenance"]);

  Box box;
  try {
    box = Box(std::move(lo), std::move(hi));
  } catch (const Error& e) {
    throw ModelInvariantError(std::string("invalid root box: ") + e.what());
  }
  return DensityTree(std::move(columns), n_tot, box, root, std::move(prov));
}

void save_model(const DensityTree& tree, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("io", "cannot open '" + path.string() + "' for writing");
  out << serialize(tree);
  if (!out) throw DataError("io", "failed writing '" + path.string() + "'");
}

DensityTree load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("io", "cannot open model file '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return deserialize(ss.str());
}

}  // namespace detree
