#include "lrbm/explain.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>
#include <sstream>

#include "json.hpp"
#include "lrbm/errors.hpp"
#include "lrbm/parallel.hpp"

namespace lrbm {

std::vector<Symbol> body_predicates(const Clause& clause) {
  std::vector<Symbol> out;
  for (const auto& lit : clause.body) {
    for (const auto& a : lit.atoms) {
      if (std::ranges::find(out, a.predicate) == out.end()) out.push_back(a.predicate);
    }
  }
  return out;
}

LiftedRBMNetwork make_network(Atom head, std::vector<HiddenNode> hidden, double psi0, double psi_clamp) {
  LiftedRBMNetwork net;
  net.head = std::move(head);
  net.psi0 = psi0;
  net.psi_clamp = psi_clamp;
  net.hidden = std::move(hidden);
  for (const auto& h : net.hidden) {
    std::vector<std::size_t> row;
    for (Symbol p : body_predicates(h.clause)) {
      auto it = std::ranges::find(net.visible, p);
      if (it == net.visible.end()) {
        net.visible.push_back(p);
        it = net.visible.end() - 1;
      }
      row.push_back(static_cast<std::size_t>(it - net.visible.begin()));
    }
    std::ranges::sort(row);
    net.edges.push_back(std::move(row));
  }
  return net;
}

LiftedRBMNetwork paths_to_lrbm(const BoostedModel& model) {
  std::vector<HiddenNode> hidden;
  for (std::size_t t = 0; t < model.trees.size(); ++t) {
    const auto& tree = model.trees[t];
    const auto leaves = tree.leaves();
    for (std::size_t p = 0; p < leaves.size(); ++p) {
      const auto& leaf = tree.node(leaves[p]);
      hidden.push_back({Clause{tree.head(), leaf.body}, leaf.params, static_cast<int>(t), static_cast<int>(p)});
    }
  }
  return make_network(model.head, std::move(hidden), model.psi0, model.config.psi_clamp);
}

BoostedModel distill_single_tree(const BoostedModel& model, std::span<const LabeledExample> examples,
                                 const KnowledgeBase& kb, int max_depth) {
  if (examples.empty()) throw DataError("distillation needs training examples");
  if (max_depth < 1) throw ConfigError("max_depth must be >= 1");
  std::vector<RegressionExample> targets(examples.size());
  parallel_for(examples.size(), model.config.jobs, [&](std::size_t i) {
    targets[i] = {examples[i].query, examples[i].label, model_psi(model, examples[i].query, kb)};
  });

  TrainConfig config = model.config;
  config.n_trees = 1;
  config.max_depth = max_depth;
  config.max_leaves = std::numeric_limits<int>::max();
  // Refit leaves until no further improvement so a tree that can reproduce the
  // targets actually does.
  config.cd_tolerance = 0.0;
  config.cd_max_iters = std::max(config.cd_max_iters, 2000);

  BoostedModel out{model.head, model.schema, 0.0, {}, config};
  out.trees.push_back(fit_regression_tree(targets, model.head, model.schema, kb, config.tree_config()));
  return out;
}

InferenceResult lrbm_inference(const LiftedRBMNetwork& net, const Atom& query, const KnowledgeBase& kb, int jobs) {
  if (!query.is_ground()) throw DataError("query " + to_string(query) + " is not ground");
  for (const auto& t : query.args) {
    if (!kb.knows(t)) throw DataError("unknown constant '" + t.name.str() + "' in " + to_string(query));
  }
  const auto cutoff = kb.cutoff_for(query);
  std::vector<Satisfaction> found(net.hidden.size());
  std::vector<SearchStats> stats(net.hidden.size());
  parallel_for(net.hidden.size(), jobs, [&](std::size_t h) {
    const auto& clause = net.hidden[h].clause;
    auto s = unify(clause.head, query);
    if (!s) throw DataError("query " + to_string(query) + " does not ground " + to_string(clause.head));
    found[h] = satisfy(clause.body, *s, kb, SatisfyOptions{cutoff, &stats[h]});
  });

  InferenceResult r;
  r.psi = net.psi0;
  for (std::size_t h = 0; h < net.hidden.size(); ++h) {
    if (!found[h].satisfied) continue;
    r.activated.push_back(h);
    r.witnesses.push_back(*found[h].witness);
    r.psi += leaf_potential(net.hidden[h].params);
  }
  r.stats = std::move(stats);
  r.probability = probability(r.psi, net.psi_clamp);
  return r;
}

namespace {

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", x);
  return buf;
}

std::string dot_escape(const std::string& s) {
  std::string out;
  for (char ch : s) {
    if (ch == '"' || ch == '\\') out += '\\';
    out += ch;
  }
  return out;
}

std::string theta_text(const LeafParams& p) {
  return "d=" + fmt(p.d) + " c=" + fmt(p.c) + " W=" + fmt(p.w) + " U0=" + fmt(p.u0) + " U1=" + fmt(p.u1);
}

}  // namespace

std::string export_dot(const LiftedRBMNetwork& net) {
  std::ostringstream out;
  const std::string target = net.head.predicate.str();
  out << "digraph lrbm {\n  rankdir=BT;\n  node [fontname=\"Helvetica\"];\n";
  for (std::size_t v = 0; v < net.visible.size(); ++v) {
    out << "  v" << v << " [shape=ellipse, label=\"" << dot_escape(net.visible[v].str()) << "\"];\n";
  }
  for (std::size_t h = 0; h < net.hidden.size(); ++h) {
    const auto& node = net.hidden[h];
    out << "  h" << h << " [shape=box, label=\"" << dot_escape(to_string(node.clause)) << "\\n"
        << theta_text(node.params) << "\"];\n";
  }
  out << "  y1 [shape=doublecircle, label=\"" << dot_escape(target) << " = 1\"];\n";
  out << "  y0 [shape=doublecircle, label=\"" << dot_escape(target) << " = 0\"];\n";
  for (std::size_t h = 0; h < net.hidden.size(); ++h) {
    for (auto v : net.edges[h]) out << "  v" << v << " -> h" << h << ";\n";
  }
  for (std::size_t h = 0; h < net.hidden.size(); ++h) {
    const auto& p = net.hidden[h].params;
    out << "  h" << h << " -> y1 [label=\"U1=" << fmt(p.u1) << "\"];\n";
    out << "  h" << h << " -> y0 [label=\"U0=" << fmt(p.u0) << "\"];\n";
  }
  out << "}\n";
  return out.str();
}

std::string export_text(const LiftedRBMNetwork& net) {
  std::vector<std::size_t> order(net.hidden.size());
  std::iota(order.begin(), order.end(), 0);
  auto influence = [&](std::size_t h) { return std::abs(net.hidden[h].params.u1 - net.hidden[h].params.u0); };
  std::ranges::stable_sort(order, [&](std::size_t a, std::size_t b) { return influence(a) > influence(b); });

  std::ostringstream out;
  out << "lifted RBM for " << to_string(net.head) << ": " << net.visible.size() << " visible predicates, "
      << net.hidden.size() << " hidden nodes, psi0=" << fmt(net.psi0) << "\n";
  for (auto h : order) {
    const auto& node = net.hidden[h];
    out << "h" << h;
    if (node.tree >= 0) out << " [tree " << node.tree << ", path " << node.path << "]";
    out << "  |U1-U0|=" << fmt(influence(h)) << "  v=" << fmt(leaf_potential(node.params)) << "  "
        << to_string(node.clause) << "\n";
  }
  return out.str();
}

std::string network_json(const LiftedRBMNetwork& net) {
  using Json = nlohmann::ordered_json;
  Json doc;
  doc["format"] = "lrbm-network";
  doc["version"] = 1;
  doc["target"] = to_string(net.head);
  doc["psi0"] = net.psi0;
  Json visible = Json::array();
  for (Symbol v : net.visible) visible.push_back(v.str());
  doc["visible"] = std::move(visible);
  Json hidden = Json::array();
  for (std::size_t h = 0; h < net.hidden.size(); ++h) {
    const auto& node = net.hidden[h];
    const auto& p = node.params;
    Json edges = Json::array();
    for (auto v : net.edges[h]) edges.push_back(net.visible[v].str());
    hidden.push_back(Json{{"id", h},
                          {"tree", node.tree},
                          {"path", node.path},
                          {"clause", to_string(node.clause)},
                          {"leaf", Json::array({p.d, p.c, p.w, p.u0, p.u1})},
                          {"potential", leaf_potential(p)},
                          {"visible", std::move(edges)}});
  }
  doc["hidden"] = std::move(hidden);
  return doc.dump(2) + "\n";
}

}  // namespace lrbm
