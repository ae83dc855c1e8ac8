#include "lrbm/boosting.hpp"

#include <cmath>
#include <limits>

#include "lrbm/errors.hpp"
#include "lrbm/parallel.hpp"

namespace lrbm {

void TrainConfig::validate() const {
  if (n_trees < 0) throw ConfigError("n_trees must be >= 0");
  if (max_leaves < 1) throw ConfigError("max_leaves must be >= 1");
  if (!(learning_rate > 0) || !std::isfinite(learning_rate)) throw ConfigError("learning_rate must be > 0");
  if (cd_max_iters < 0) throw ConfigError("cd_max_iters must be >= 0");
  if (!(cd_tolerance >= 0)) throw ConfigError("cd_tolerance must be >= 0");
  if (max_new_vars < 0) throw ConfigError("max_new_vars must be >= 0");
  if (!(psi_clamp > 0)) throw ConfigError("psi_clamp must be > 0");
  if (!std::isfinite(psi0)) throw ConfigError("psi0 must be finite");
  if (max_depth < 0) throw ConfigError("max_depth must be >= 0");
  if (jobs < 1) throw ConfigError("jobs must be >= 1");
}

TreeConfig TrainConfig::tree_config() const {
  TreeConfig t;
  t.max_leaves = static_cast<std::size_t>(max_leaves);
  t.max_depth = max_depth == 0 ? std::numeric_limits<int>::max() : max_depth;
  t.max_new_vars = max_new_vars;
  t.beam_width = beam_width;
  t.cd = CoordinateDescentConfig{learning_rate, cd_max_iters, cd_tolerance, online_cd};
  t.jobs = jobs;
  return t;
}

namespace {

void check_query(const BoostedModel& model, const Atom& query, const KnowledgeBase& kb) {
  if (!query.is_ground()) throw DataError("query " + to_string(query) + " is not ground");
  if (!unify(model.head, query)) {
    throw DataError("query " + to_string(query) + " does not ground target " + to_string(model.head));
  }
  for (const auto& t : query.args) {
    if (!kb.knows(t)) throw DataError("unknown constant '" + t.name.str() + "' in " + to_string(query));
  }
}

}  // namespace

double model_psi(const BoostedModel& model, const Atom& query, const KnowledgeBase& kb) {
  double psi = model.psi0;
  for (const auto& tree : model.trees) psi += evaluate_tree(tree, query, kb);
  return psi;
}

std::vector<double> compute_gradients(const BoostedModel& model, std::span<const LabeledExample> examples,
                                      const KnowledgeBase& kb) {
  std::vector<double> out(examples.size());
  parallel_for(examples.size(), model.config.jobs, [&](std::size_t i) {
    out[i] = pointwise_gradient(examples[i].label, model_psi(model, examples[i].query, kb), model.config.psi_clamp);
  });
  return out;
}

BoostedModel train(const KnowledgeBase& kb, const Schema& schema, const ExampleSet& examples,
                   const TrainConfig& config, const TrainObserver& observer) {
  config.validate();
  if (examples.size() == 0) throw DataError("no training examples");
  BoostedModel model{schema.head(examples.target), schema, config.psi0, {}, config};
  const auto labeled = examples.labeled();
  const TreeConfig tree_config = config.tree_config();

  // Running psi per example so each round evaluates only the newest tree.
  std::vector<double> psi(labeled.size(), config.psi0);
  std::vector<RegressionExample> regression(labeled.size());
  for (int t = 0; t < config.n_trees; ++t) {
    double abs_sum = 0.0;
    for (std::size_t i = 0; i < labeled.size(); ++i) {
      const double g = pointwise_gradient(labeled[i].label, psi[i], config.psi_clamp);
      regression[i] = {labeled[i].query, labeled[i].label, g};
      abs_sum += std::abs(g);
    }
    auto tree = fit_regression_tree(regression, model.head, schema, kb, tree_config);
    std::vector<double> values(labeled.size());
    parallel_for(labeled.size(), config.jobs,
                 [&](std::size_t i) { values[i] = evaluate_tree(tree, labeled[i].query, kb); });
    TreeReport report{t + 1, tree.leaf_count(), 0.0, abs_sum / static_cast<double>(labeled.size())};
    for (std::size_t i = 0; i < labeled.size(); ++i) {
      const double e = values[i] - regression[i].gradient;
      report.sse += e * e;
      psi[i] += values[i];
    }
    model.trees.push_back(std::move(tree));
    if (observer) observer(report);
  }
  return model;
}

BoostedModel train_single_tree(const KnowledgeBase& kb, const Schema& schema, const ExampleSet& examples,
                               TrainConfig config, int max_depth) {
  if (max_depth < 1) throw ConfigError("max_depth must be >= 1");
  config.n_trees = 1;
  config.max_depth = max_depth;
  config.max_leaves = std::numeric_limits<int>::max();
  return train(kb, schema, examples, config);
}

Prediction predict(const BoostedModel& model, const Atom& query, const KnowledgeBase& kb) {
  check_query(model, query, kb);
  Prediction p;
  p.psi = model.psi0;
  for (const auto& tree : model.trees) {
    const double v = evaluate_tree(tree, query, kb);
    p.per_tree.push_back(v);
    p.psi += v;
  }
  p.probability = probability(p.psi, model.config.psi_clamp);
  return p;
}

}  // namespace lrbm
