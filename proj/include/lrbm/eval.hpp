#pragma once

#include <span>
#include <string>
#include <vector>

#include "lrbm/boosting.hpp"
#include "lrbm/dataset.hpp"

namespace lrbm {

struct ScoredExample {
  Atom query;
  int label = 0;
  double score = 0.5;
};

// Probability that a random positive outranks a random negative; ties count
// one half. Throws DataError when either class is empty.
double auc_roc(std::span<const ScoredExample> scored);

// Average precision: mean over positives of the precision at the rank where
// each is retrieved, ranking by descending score with ties kept in input
// order. Throws DataError when there is no positive.
double auc_pr(std::span<const ScoredExample> scored);

enum class Learner {
  boosted,      // the boosted ensemble
  single_tree,  // one deep tree, no boosting
  distilled,    // boosted ensemble distilled into one deep tree
};

std::string to_string(Learner learner);
// Accepts "boosted", "single-tree" and "distilled".
Learner parse_learner(const std::string& name);

struct FoldMetrics {
  int fold = 0;
  std::size_t train_size = 0;
  std::size_t test_size = 0;
  double auc_roc = 0.0;
  double auc_pr = 0.0;
  double seconds = 0.0;
};

struct MetricsReport {
  Learner learner = Learner::boosted;
  TrainConfig config;
  int depth = 10;  // tree depth for single_tree and distilled
  int k = 0;
  std::uint64_t fold_seed = 0;
  std::vector<FoldMetrics> folds;
  double mean_roc = 0.0;
  double stdev_roc = 0.0;  // population standard deviation over folds
  double mean_pr = 0.0;
  double stdev_pr = 0.0;
  double seconds = 0.0;

  std::string to_text(bool timing = true) const;
  std::string to_json(bool timing = true) const;
};

// Scores every example with the model's probability.
std::vector<ScoredExample> score_examples(const BoostedModel& model, std::span<const LabeledExample> examples,
                                          const KnowledgeBase& kb);

// Trains on k-1 folds and scores the held-out fold, for each fold. Errors are
// rethrown with the fold number prepended.
MetricsReport cross_validate(const KnowledgeBase& kb, const Schema& schema, const ExampleSet& examples,
                             const FoldSpec& folds, const TrainConfig& config, Learner learner = Learner::boosted,
                             int depth = 10);

// Mean and population standard deviation.
std::pair<double, double> mean_stdev(std::span<const double> xs);

}  // namespace lrbm
