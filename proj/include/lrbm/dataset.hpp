#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "lrbm/logic.hpp"

namespace lrbm {

struct LabeledExample {
  Atom query;
  int label = 0;  // 1 = positive
};

// Positive and negative groundings of one target predicate.
struct ExampleSet {
  Symbol target;
  std::vector<Atom> positives;
  std::vector<Atom> negatives;

  std::size_t size() const { return positives.size() + negatives.size(); }
  // Positives first, then negatives; index i matches FoldSpec::assignments[i].
  std::vector<LabeledExample> labeled() const;
  LabeledExample at(std::size_t i) const;
};

// Validates the invariants: every atom grounds `target`, the two lists are
// disjoint, and every constant is known to `kb`. Throws DataError otherwise.
ExampleSet make_example_set(Symbol target, std::vector<Atom> positives, std::vector<Atom> negatives,
                            const KnowledgeBase& kb);

enum class NegativeStrategy {
  uniform,  // uniform over every type-consistent grounding of the target
  corrupt,  // replace one argument of a random positive with a random constant of its type
};

struct NegativeSample {
  std::vector<Atom> atoms;
  std::optional<std::string> warning;  // set when fewer than requested were available
};

// Draws round(ratio * |positives|) distinct groundings of `target_head` that are
// not positives, without replacement. Deterministic under `seed`.
NegativeSample generate_negatives(const KnowledgeBase& kb, const Atom& target_head,
                                  std::span<const Atom> positives, double ratio, std::uint64_t seed,
                                  NegativeStrategy strategy = NegativeStrategy::uniform);

// Stratified k-fold assignment over ExampleSet::labeled() order.
struct FoldSpec {
  int k = 5;
  std::uint64_t seed = 0;
  std::vector<int> assignments;

  std::vector<std::size_t> train_indices(int fold) const;
  std::vector<std::size_t> test_indices(int fold) const;
};

// Throws DataError when a class has fewer than k members, ConfigError for k < 2.
FoldSpec split_folds(const ExampleSet& examples, int k, std::uint64_t seed);

// Examples restricted to `indices` (ExampleSet::labeled() positions).
ExampleSet subset(const ExampleSet& examples, std::span<const std::size_t> indices);

}  // namespace lrbm
