#include "wstl/model_io.hpp"

#include "wstl/dataset.hpp"
#include "wstl/error.hpp"
#include "wstl/formula_io.hpp"
#include "wstl/network.hpp"

#include "json.hpp"

#include <fstream>
#include <sstream>

namespace wstl {

using nlohmann::json;

namespace {

constexpr const char* kFormatName = "wstl-model";

json views_to_json(const ViewConfig& v) {
  json j;
  j["views"] = json::array();
  for (ViewKind kind : v.views)
    j["views"].push_back(std::string(to_string(kind)));
  j["interval_features"] = v.interval_features;
  j["interval_count"] = v.interval_count;
  j["interval_len"] = v.interval_len ? json(*v.interval_len) : json(nullptr);
  j["aggregations"] = json::array();
  for (Aggregation a : v.aggregations)
    j["aggregations"].push_back(std::string(to_string(a)));
  j["z_normalize"] = v.z_normalize;
  return j;
}

ViewConfig views_from_json(const json& j) {
  ViewConfig v;
  v.views.clear();
  for (const auto& name : j.at("views"))
    v.views.push_back(view_kind_from_string(name.get<std::string>()));
  v.interval_features = j.at("interval_features").get<bool>();
  v.interval_count = j.at("interval_count").get<std::size_t>();
  if (!j.at("interval_len").is_null())
    v.interval_len = j.at("interval_len").get<std::size_t>();
  v.aggregations.clear();
  for (const auto& name : j.at("aggregations"))
    v.aggregations.push_back(aggregation_from_string(name.get<std::string>()));
  v.z_normalize = j.at("z_normalize").get<bool>();
  v.check();
  return v;
}

json config_to_json(const TreeConfig& c) {
  const TrainConfig& t = c.train;
  return {
      {"epochs", t.epochs},
      {"learning_rate", t.learning_rate},
      {"beta1", t.beta1},
      {"beta2", t.beta2},
      {"adam_epsilon", t.adam_epsilon},
      {"weight_decay", t.weight_decay},
      {"batch_size", t.batch_size},
      {"weight_floor", t.weight_floor},
      {"probability_clamp", t.probability_clamp},
      {"orient_predicates", t.orient_predicates},
      {"max_depth", c.max_depth ? json(*c.max_depth) : json(nullptr)},
      {"min_node_size", c.min_node_size},
      {"family", std::string(to_string(c.family))},
      {"seed", c.seed},
  };
}

TreeConfig config_from_json(const json& j) {
  TreeConfig c;
  TrainConfig& t = c.train;
  t.epochs = j.at("epochs").get<std::size_t>();
  t.learning_rate = j.at("learning_rate").get<double>();
  t.beta1 = j.at("beta1").get<double>();
  t.beta2 = j.at("beta2").get<double>();
  t.adam_epsilon = j.at("adam_epsilon").get<double>();
  t.weight_decay = j.at("weight_decay").get<double>();
  t.batch_size = j.at("batch_size").get<std::size_t>();
  t.weight_floor = j.at("weight_floor").get<double>();
  t.probability_clamp = j.at("probability_clamp").get<double>();
  t.orient_predicates = j.at("orient_predicates").get<bool>();
  if (!j.at("max_depth").is_null())
    c.max_depth = j.at("max_depth").get<std::size_t>();
  c.min_node_size = j.at("min_node_size").get<std::size_t>();
  c.family = predicate_family_from_string(j.at("family").get<std::string>());
  c.seed = j.at("seed").get<std::uint64_t>();
  return c;
}

json body_to_json(const TreeClassifier& tree, std::span<const std::string> label_names) {
  json body;
  body["raw_length"] = tree.raw_length;
  body["dim"] = tree.dim;
  body["classes"] = tree.classes;
  body["label_names"] = std::vector<std::string>(label_names.begin(), label_names.end());
  body["preprocessing"] = views_to_json(tree.views);
  body["view_lengths"] = tree.view_lengths;
  body["training"] = config_to_json(tree.config);
  json nodes = json::array();
  for (const TreeNode& n : tree.nodes) {
    json node;
    node["index"] = n.index;
    node["depth"] = n.depth;
    node["leaf_class"] = n.leaf_class;
    json hist = json::array();
    for (const auto& [label, count] : n.histogram)
      hist.push_back({label, count});
    node["histogram"] = hist;
    if (n.split) {
      node["class"] = n.split->class_id;
      node["template"] = std::string(to_string(n.split->structure));
      node["criterion"] = n.split->criterion;
      node["formula"] = to_canonical(n.split->formula);
      node["left"] = *n.left;
      node["right"] = *n.right;
    }
    nodes.push_back(std::move(node));
  }
  body["nodes"] = std::move(nodes);
  return body;
}

TreeClassifier tree_from_json(const json& body) {
  TreeClassifier tree;
  tree.raw_length = body.at("raw_length").get<std::size_t>();
  tree.dim = body.at("dim").get<std::size_t>();
  tree.classes = body.at("classes").get<std::vector<int>>();
  tree.views = views_from_json(body.at("preprocessing"));
  tree.view_lengths = body.at("view_lengths").get<std::vector<std::size_t>>();
  tree.config = config_from_json(body.at("training"));
  if (tree.view_lengths != extended_lengths(tree.views, tree.raw_length))
    fail(ErrorCode::Integrity, "view lengths disagree with the preprocessing configuration");

  const auto& nodes = body.at("nodes");
  if (!nodes.is_array() || nodes.empty())
    fail(ErrorCode::Integrity, "model has no nodes");
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const auto& j = nodes[i];
    TreeNode n;
    n.index = j.at("index").get<std::size_t>();
    n.depth = j.at("depth").get<std::size_t>();
    n.leaf_class = j.at("leaf_class").get<int>();
    for (const auto& entry : j.at("histogram"))
      n.histogram[entry.at(0).get<int>()] = entry.at(1).get<std::size_t>();
    if (n.index != i)
      fail(ErrorCode::Integrity, "node " + std::to_string(i) + " carries index " + std::to_string(n.index));
    if (j.contains("formula")) {
      NodeSplit split;
      split.class_id = j.at("class").get<int>();
      split.structure = template_id_from_string(j.at("template").get<std::string>());
      split.criterion = j.at("criterion").get<double>();
      split.formula = parse_canonical(j.at("formula").get<std::string>());
      n.split = std::move(split);
      n.left = j.at("left").get<std::size_t>();
      n.right = j.at("right").get<std::size_t>();
    }
    tree.nodes.push_back(std::move(n));
  }

  // Children come after their parent (pre-order), each node has exactly one
  // parent and the root none; this rules out cycles and orphans.
  std::vector<int> parents(tree.nodes.size(), 0);
  for (const TreeNode& n : tree.nodes) {
    if (n.is_leaf())
      continue;
    for (std::size_t child : {*n.left, *n.right}) {
      if (child <= n.index || child >= tree.nodes.size())
        fail(ErrorCode::Integrity, "node " + std::to_string(n.index) + " has an invalid child");
      if (tree.nodes[child].depth != n.depth + 1)
        fail(ErrorCode::Integrity, "node " + std::to_string(child) + " has an inconsistent depth");
      ++parents[child];
    }
  }
  if (tree.nodes.front().depth != 0 || parents.front() != 0)
    fail(ErrorCode::Integrity, "malformed root");
  for (std::size_t i = 1; i < parents.size(); ++i)
    if (parents[i] != 1)
      fail(ErrorCode::Integrity, "node " + std::to_string(i) + " is not reachable exactly once");

  // Every split formula must evaluate on instances of the stored shape.
  std::vector<Signal> probe;
  for (std::size_t len : tree.view_lengths)
    probe.emplace_back(tree.dim, std::vector<double>(len * tree.dim, 0.0));
  for (const TreeNode& n : tree.nodes)
    if (n.split)
      Network(n.split->formula).evaluate(probe);
  return tree;
}

} // namespace

std::string serialize_model(const TreeClassifier& tree, std::span<const std::string> label_names) {
  const json body = body_to_json(tree, label_names);
  const std::string body_text = body.dump();
  json doc;
  doc["format"] = kFormatName;
  doc["version"] = kModelFormatVersion;
  doc["body"] = body;
  doc["checksum"] = crc32_of(body_text);
  return doc.dump(1) + "\n";
}

StoredModel deserialize_model(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    fail(ErrorCode::Integrity, std::string("model file is not valid JSON: ") + e.what());
  }
  try {
    if (!doc.is_object() || doc.value("format", "") != kFormatName)
      fail(ErrorCode::Integrity, "not a model file");
    const auto& version = doc.at("version");
    if (!version.is_number_integer() || version.get<int>() != kModelFormatVersion)
      fail(ErrorCode::UnsupportedVersion,
           "model format version " + version.dump() + " (supported: " + std::to_string(kModelFormatVersion) + ")");
    const json& body = doc.at("body");
    if (crc32_of(body.dump()) != doc.at("checksum").get<std::uint32_t>())
      fail(ErrorCode::Integrity, "model checksum mismatch");
    StoredModel model;
    model.tree = tree_from_json(body);
    model.label_names = body.at("label_names").get<std::vector<std::string>>();
    if (model.label_names.size() < model.tree.classes.size())
      fail(ErrorCode::Integrity, "label map is shorter than the class list");
    return model;
  } catch (const Error& e) {
    if (e.code() == ErrorCode::UnsupportedVersion || e.code() == ErrorCode::Integrity)
      throw;
    fail(ErrorCode::Integrity, std::string("corrupt model: ") + e.what());
  } catch (const json::exception& e) {
    fail(ErrorCode::Integrity, std::string("corrupt model: ") + e.what());
  }
}

void save_model(const std::filesystem::path& path, const TreeClassifier& tree,
                std::span<const std::string> label_names) {
  const std::string text = serialize_model(tree, label_names);
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out)
      fail(ErrorCode::Io, "cannot write " + tmp.string());
    out << text;
    if (!out.flush())
      fail(ErrorCode::Io, "cannot write " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec)
    fail(ErrorCode::Io, "cannot move model into " + path.string() + ": " + ec.message());
}

StoredModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    fail(ErrorCode::Io, "cannot open " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return deserialize_model(buffer.str());
}

} // namespace wstl
