#include "lrbm/eval.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <sstream>

#include "json.hpp"
#include "lrbm/errors.hpp"
#include "lrbm/explain.hpp"
#include "lrbm/parallel.hpp"

namespace lrbm {

double auc_roc(std::span<const ScoredExample> scored) {
  std::vector<std::pair<double, int>> ranked;
  ranked.reserve(scored.size());
  for (const auto& s : scored) ranked.emplace_back(s.score, s.label);
  std::ranges::sort(ranked);
  double pos = 0, neg = 0, rank_sum = 0;
  // Mid-ranks over tied scores give ties half credit.
  for (std::size_t i = 0; i < ranked.size();) {
    std::size_t j = i;
    while (j < ranked.size() && ranked[j].first == ranked[i].first) ++j;
    const double mid = (static_cast<double>(i + 1) + static_cast<double>(j)) / 2.0;
    for (std::size_t t = i; t < j; ++t) {
      if (ranked[t].second == 1) {
        ++pos;
        rank_sum += mid;
      } else {
        ++neg;
      }
    }
    i = j;
  }
  if (pos == 0 || neg == 0) throw DataError("AUC-ROC needs at least one positive and one negative");
  return (rank_sum - pos * (pos + 1) / 2.0) / (pos * neg);
}

double auc_pr(std::span<const ScoredExample> scored) {
  std::vector<std::size_t> order(scored.size());
  std::iota(order.begin(), order.end(), 0);
  std::ranges::stable_sort(order, [&](std::size_t a, std::size_t b) { return scored[a].score > scored[b].score; });
  double hits = 0, sum = 0;
  for (std::size_t r = 0; r < order.size(); ++r) {
    if (scored[order[r]].label != 1) continue;
    ++hits;
    sum += hits / static_cast<double>(r + 1);
  }
  if (hits == 0) throw DataError("AUC-PR needs at least one positive");
  return sum / hits;
}

std::string to_string(Learner learner) {
  switch (learner) {
    case Learner::boosted:
      return "boosted";
    case Learner::single_tree:
      return "single-tree";
    case Learner::distilled:
      return "distilled";
  }
  return "?";
}

Learner parse_learner(const std::string& name) {
  if (name == "boosted") return Learner::boosted;
  if (name == "single-tree") return Learner::single_tree;
  if (name == "distilled") return Learner::distilled;
  throw ConfigError("unknown learner '" + name + "' (expected boosted, single-tree or distilled)");
}

std::pair<double, double> mean_stdev(std::span<const double> xs) {
  if (xs.empty()) return {0.0, 0.0};
  const double n = static_cast<double>(xs.size());
  const double mean = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
  double ss = 0;
  for (double x : xs) ss += (x - mean) * (x - mean);
  return {mean, std::sqrt(ss / n)};
}

std::vector<ScoredExample> score_examples(const BoostedModel& model, std::span<const LabeledExample> examples,
                                          const KnowledgeBase& kb) {
  std::vector<ScoredExample> out(examples.size());
  parallel_for(examples.size(), model.config.jobs, [&](std::size_t i) {
    out[i] = {examples[i].query, examples[i].label, predict(model, examples[i].query, kb).probability};
  });
  return out;
}

namespace {

BoostedModel fit_learner(const KnowledgeBase& kb, const Schema& schema, const ExampleSet& train_set,
                         const TrainConfig& config, Learner learner, int depth) {
  switch (learner) {
    case Learner::boosted:
      return train(kb, schema, train_set, config);
    case Learner::single_tree:
      return train_single_tree(kb, schema, train_set, config, depth);
    case Learner::distilled: {
      const auto ensemble = train(kb, schema, train_set, config);
      const auto labeled = train_set.labeled();
      return distill_single_tree(ensemble, labeled, kb, depth);
    }
  }
  throw ConfigError("unknown learner");
}

template <class E>
[[noreturn]] void rethrow_with_fold(int fold, const E& e) {
  throw E("fold " + std::to_string(fold) + ": " + e.what());
}

}  // namespace

MetricsReport cross_validate(const KnowledgeBase& kb, const Schema& schema, const ExampleSet& examples,
                             const FoldSpec& folds, const TrainConfig& config, Learner learner, int depth) {
  config.validate();
  if (folds.assignments.size() != examples.size()) {
    throw ConfigError("fold assignments do not match the example set");
  }
  MetricsReport report;
  report.learner = learner;
  report.config = config;
  report.depth = depth;
  report.k = folds.k;
  report.fold_seed = folds.seed;
  report.folds.resize(static_cast<std::size_t>(folds.k));

  // Folds run concurrently when jobs allow; the remaining budget goes to each
  // fold's own training.
  const int fold_jobs = std::min(config.jobs, folds.k);
  TrainConfig inner = config;
  inner.jobs = std::max(1, config.jobs / std::max(1, fold_jobs));

  const auto start = std::chrono::steady_clock::now();
  parallel_for(static_cast<std::size_t>(folds.k), fold_jobs, [&](std::size_t f) {
    const int fold = static_cast<int>(f);
    const auto fold_start = std::chrono::steady_clock::now();
    try {
      const auto train_idx = folds.train_indices(fold);
      const auto test_idx = folds.test_indices(fold);
      const auto train_set = subset(examples, train_idx);
      const auto test_set = subset(examples, test_idx);
      auto model = fit_learner(kb, schema, train_set, inner, learner, depth);
      const auto test_labeled = test_set.labeled();
      const auto scored = score_examples(model, test_labeled, kb);
      auto& m = report.folds[f];
      m.fold = fold;
      m.train_size = train_set.size();
      m.test_size = test_set.size();
      m.auc_roc = auc_roc(scored);
      m.auc_pr = auc_pr(scored);
    } catch (const DataError& e) {
      rethrow_with_fold(fold, e);
    } catch (const ConfigError& e) {
      rethrow_with_fold(fold, e);
    } catch (const TypeError& e) {
      rethrow_with_fold(fold, e);
    }
    report.folds[f].seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - fold_start).count();
  });
  report.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  std::vector<double> rocs, prs;
  for (const auto& m : report.folds) {
    rocs.push_back(m.auc_roc);
    prs.push_back(m.auc_pr);
  }
  std::tie(report.mean_roc, report.stdev_roc) = mean_stdev(rocs);
  std::tie(report.mean_pr, report.stdev_pr) = mean_stdev(prs);
  return report;
}

namespace {

std::string num(double x, const char* f = "%.4f") {
  char buf[32];
  std::snprintf(buf, sizeof buf, f, x);
  return buf;
}

nlohmann::ordered_json config_echo(const MetricsReport& r) {
  const auto& c = r.config;
  return {{"learner", to_string(r.learner)}, {"n_trees", c.n_trees},         {"max_leaves", c.max_leaves},
          {"learning_rate", c.learning_rate}, {"cd_max_iters", c.cd_max_iters}, {"cd_tolerance", c.cd_tolerance},
          {"max_new_vars", c.max_new_vars},   {"psi0", c.psi0},                 {"psi_clamp", c.psi_clamp},
          {"depth", r.depth},                 {"folds", r.k},                   {"seed", r.fold_seed}};
}

}  // namespace

std::string MetricsReport::to_text(bool timing) const {
  std::ostringstream out;
  out << "learner " << lrbm::to_string(learner) << ", " << k << "-fold CV (seed " << fold_seed << ")\n";
  out << "config: trees=" << config.n_trees << " leaves=" << config.max_leaves << " lr=" << config.learning_rate
      << " cd_iters=" << config.cd_max_iters << " cd_tol=" << config.cd_tolerance
      << " new_vars=" << config.max_new_vars;
  if (learner != Learner::boosted) out << " depth=" << depth;
  out << "\n";
  out << "fold  train  test   AUC-ROC  AUC-PR";
  if (timing) out << "   seconds";
  out << "\n";
  for (const auto& m : folds) {
    char line[96];
    std::snprintf(line, sizeof line, "%4d  %5zu  %4zu   %.4f   %.4f", m.fold, m.train_size, m.test_size, m.auc_roc,
                  m.auc_pr);
    out << line;
    if (timing) out << "   " << num(m.seconds, "%.2f");
    out << "\n";
  }
  out << "mean  AUC-ROC " << num(mean_roc) << " ± " << num(stdev_roc) << "  AUC-PR " << num(mean_pr) << " ± "
      << num(stdev_pr) << "\n";
  out << "(stdev is the population formula; ROC ties earn half credit; AUC-PR is average precision)\n";
  if (timing) out << "total " << num(seconds, "%.2f") << " s\n";
  return out.str();
}

std::string MetricsReport::to_json(bool timing) const {
  nlohmann::ordered_json doc;
  doc["config"] = config_echo(*this);
  auto folds_json = nlohmann::ordered_json::array();
  for (const auto& m : folds) {
    nlohmann::ordered_json f{{"fold", m.fold},
                             {"train_size", m.train_size},
                             {"test_size", m.test_size},
                             {"auc_roc", m.auc_roc},
                             {"auc_pr", m.auc_pr}};
    if (timing) f["seconds"] = m.seconds;
    folds_json.push_back(std::move(f));
  }
  doc["folds"] = std::move(folds_json);
  doc["auc_roc"] = {{"mean", mean_roc}, {"stdev", stdev_roc}};
  doc["auc_pr"] = {{"mean", mean_pr}, {"stdev", stdev_pr}};
  doc["stdev"] = "population";
  doc["roc_ties"] = "half credit";
  doc["pr_estimator"] = "average precision";
  if (timing) doc["seconds"] = seconds;
  return doc.dump(2) + "\n";
}

}  // namespace lrbm
