#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "lrbm/dataset.hpp"
#include "lrbm/rrt.hpp"
#include "lrbm/schema.hpp"

namespace lrbm {

struct TrainConfig {
  int n_trees = 20;
  int max_leaves = 4;
  double learning_rate = 0.05;  // coordinate-descent step size
  int cd_max_iters = 500;
  double cd_tolerance = 1e-8;
  int max_new_vars = 1;
  std::uint64_t seed = 0;
  double psi_clamp = kDefaultPsiClamp;
  double psi0 = 0.0;
  bool online_cd = false;
  int max_depth = 0;           // 0 = unlimited
  std::size_t beam_width = 0;  // 0 = unbounded
  int jobs = 1;

  // Throws ConfigError when an invariant is violated.
  void validate() const;
  TreeConfig tree_config() const;
};

struct BoostedModel {
  Atom head;
  Schema schema;
  double psi0 = 0.0;
  std::vector<RelationalRegressionTree> trees;
  TrainConfig config;

  Symbol target() const { return head.predicate; }
};

// Gradient of the log-likelihood with respect to psi at one example.
inline double pointwise_gradient(int label, double psi, double clamp = kDefaultPsiClamp) {
  return static_cast<double>(label) - probability(psi, clamp);
}

double model_psi(const BoostedModel& model, const Atom& query, const KnowledgeBase& kb);

// Label minus predicted probability, one per example.
std::vector<double> compute_gradients(const BoostedModel& model, std::span<const LabeledExample> examples,
                                      const KnowledgeBase& kb);

struct TreeReport {
  int index = 0;
  std::size_t leaves = 0;
  double sse = 0.0;             // fitted tree against the gradients it was trained on
  double mean_abs_gradient = 0.0;
};

using TrainObserver = std::function<void(const TreeReport&)>;

// Functional-gradient boosting: each tree fits the gradients left by the trees
// before it and is added to the model unscaled.
BoostedModel train(const KnowledgeBase& kb, const Schema& schema, const ExampleSet& examples,
                   const TrainConfig& config, const TrainObserver& observer = {});

// One deep tree fitted to the gradients of the empty model (depth 10 by default).
BoostedModel train_single_tree(const KnowledgeBase& kb, const Schema& schema, const ExampleSet& examples,
                               TrainConfig config, int max_depth = 10);

struct Prediction {
  double probability = 0.5;
  double psi = 0.0;
  std::vector<double> per_tree;
};

// Throws DataError when the query does not ground the target or mentions
// constants unknown to `kb`.
Prediction predict(const BoostedModel& model, const Atom& query, const KnowledgeBase& kb);

}  // namespace lrbm
