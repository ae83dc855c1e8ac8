#include "lrbm/model_io.hpp"

#include <fstream>
#include <sstream>

#include "json.hpp"
#include "lrbm/errors.hpp"
#include "lrbm/parser.hpp"

namespace lrbm {

namespace {

using Json = nlohmann::ordered_json;

Json params_json(const LeafParams& p) { return Json::array({p.d, p.c, p.w, p.u0, p.u1}); }

LeafParams params_from(const Json& j) {
  if (!j.is_array() || j.size() != 5) throw ParseError("leaf parameters must be a 5-element array", 0);
  return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>(), j[3].get<double>(), j[4].get<double>()};
}

Json node_json(const RelationalRegressionTree& tree, int index) {
  const auto& n = tree.node(index);
  Json j = Json::object();
  if (n.is_leaf()) {
    j["leaf"] = params_json(n.params);
    return j;
  }
  j["test"] = to_string(n.test->atom());
  j["true"] = node_json(tree, n.true_child);
  j["false"] = node_json(tree, n.false_child);
  return j;
}

void read_node(const Json& j, const Schema& schema, RelationalRegressionTree& tree, int index) {
  if (j.contains("leaf")) {
    tree.set_params(index, params_from(j.at("leaf")));
    return;
  }
  const Atom test = parse_atom(j.at("test").get<std::string>(), schema);
  auto [yes, no] = tree.split(index, Literal::positive(test));
  read_node(j.at("true"), schema, tree, yes);
  read_node(j.at("false"), schema, tree, no);
}

Json config_json(const TrainConfig& c) {
  return Json{{"n_trees", c.n_trees},         {"max_leaves", c.max_leaves},   {"learning_rate", c.learning_rate},
              {"cd_max_iters", c.cd_max_iters}, {"cd_tolerance", c.cd_tolerance}, {"max_new_vars", c.max_new_vars},
              {"seed", c.seed},               {"psi_clamp", c.psi_clamp},     {"psi0", c.psi0},
              {"online_cd", c.online_cd},     {"max_depth", c.max_depth},     {"beam_width", c.beam_width}};
}

TrainConfig config_from(const Json& j) {
  TrainConfig c;
  c.n_trees = j.at("n_trees").get<int>();
  c.max_leaves = j.at("max_leaves").get<int>();
  c.learning_rate = j.at("learning_rate").get<double>();
  c.cd_max_iters = j.at("cd_max_iters").get<int>();
  c.cd_tolerance = j.at("cd_tolerance").get<double>();
  c.max_new_vars = j.at("max_new_vars").get<int>();
  c.seed = j.at("seed").get<std::uint64_t>();
  c.psi_clamp = j.at("psi_clamp").get<double>();
  c.psi0 = j.at("psi0").get<double>();
  c.online_cd = j.at("online_cd").get<bool>();
  c.max_depth = j.at("max_depth").get<int>();
  c.beam_width = j.at("beam_width").get<std::size_t>();
  return c;
}

}  // namespace

std::string serialize_model(const BoostedModel& model) {
  Json doc;
  doc["format"] = "lrbm-model";
  doc["version"] = kModelFormatVersion;
  doc["target"] = to_string(model.head);
  doc["modes"] = serialize_modes(model.schema);
  doc["psi0"] = model.psi0;
  doc["config"] = config_json(model.config);
  Json trees = Json::array();
  for (const auto& tree : model.trees) trees.push_back(node_json(tree, 0));
  doc["trees"] = std::move(trees);
  return doc.dump(2) + "\n";
}

BoostedModel parse_model(std::string_view text) {
  Json doc;
  try {
    doc = Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("model is not valid JSON: ") + e.what(), 0);
  }
  try {
    if (doc.value("format", "") != "lrbm-model") throw ParseError("not an lrbm model document", 0);
    const int version = doc.at("version").get<int>();
    if (version != kModelFormatVersion) {
      throw ParseError("unsupported model version " + std::to_string(version), 0);
    }
    BoostedModel model;
    model.schema = parse_modes(doc.at("modes").get<std::string>());
    const Atom target = parse_atom(doc.at("target").get<std::string>(), model.schema);
    model.head = model.schema.head(target.predicate);
    model.psi0 = doc.at("psi0").get<double>();
    model.config = config_from(doc.at("config"));
    for (const auto& t : doc.at("trees")) {
      RelationalRegressionTree tree(model.head);
      read_node(t, model.schema, tree, 0);
      model.trees.push_back(std::move(tree));
    }
    return model;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("malformed model document: ") + e.what(), 0);
  }
}

void save_model(const BoostedModel& model, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write model file " + path);
  out << serialize_model(model);
  if (!out) throw DataError("failed writing model file " + path);
}

BoostedModel load_model(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot read model file " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_model(buf.str());
}

}  // namespace lrbm
