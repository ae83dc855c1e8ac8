#include "lrbm/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <unordered_set>

#include "lrbm/errors.hpp"

namespace lrbm {

std::vector<LabeledExample> ExampleSet::labeled() const {
  std::vector<LabeledExample> out;
  out.reserve(size());
  for (const Atom& a : positives) out.push_back({a, 1});
  for (const Atom& a : negatives) out.push_back({a, 0});
  return out;
}

LabeledExample ExampleSet::at(std::size_t i) const {
  if (i < positives.size()) return {positives[i], 1};
  return {negatives.at(i - positives.size()), 0};
}

ExampleSet make_example_set(Symbol target, std::vector<Atom> positives, std::vector<Atom> negatives,
                            const KnowledgeBase& kb) {
  auto check = [&](const Atom& a) {
    if (a.predicate != target) {
      throw DataError("example " + to_string(a) + " is not an instance of " + target.str());
    }
    if (!a.is_ground()) throw DataError("example is not ground: " + to_string(a));
    for (const Term& t : a.args) {
      if (!kb.knows(t)) throw DataError("unknown constant " + t.name.str() + " in " + to_string(a));
    }
  };
  std::unordered_set<Atom, AtomHash> pos;
  for (const Atom& a : positives) {
    check(a);
    pos.insert(a);
  }
  for (const Atom& a : negatives) {
    check(a);
    if (pos.contains(a)) throw DataError("example is both positive and negative: " + to_string(a));
  }
  return ExampleSet{target, std::move(positives), std::move(negatives)};
}

namespace {

Atom grounding(const Atom& head, const std::vector<std::span<const Term>>& domains,
               const std::vector<std::size_t>& choice) {
  Atom a{head.predicate, {}};
  for (std::size_t i = 0; i < choice.size(); ++i) a.args.push_back(domains[i][choice[i]]);
  return a;
}

}  // namespace

NegativeSample generate_negatives(const KnowledgeBase& kb, const Atom& target_head,
                                  std::span<const Atom> positives, double ratio, std::uint64_t seed,
                                  NegativeStrategy strategy) {
  if (!(ratio >= 0)) throw ConfigError("negative ratio must be non-negative");
  NegativeSample out;
  const auto requested = static_cast<std::size_t>(std::llround(ratio * static_cast<double>(positives.size())));
  if (requested == 0) return out;

  std::vector<std::span<const Term>> domains;
  long double space = 1;
  for (const Term& t : target_head.args) {
    domains.push_back(kb.universe(t.type));
    space *= static_cast<long double>(domains.back().size());
  }
  std::unordered_set<Atom, AtomHash> excluded(positives.begin(), positives.end());
  std::size_t positives_in_space = 0;
  for (const Atom& p : excluded) {
    bool inside = p.predicate == target_head.predicate && p.arity() == target_head.arity();
    for (std::size_t i = 0; inside && i < p.arity(); ++i) inside = kb.knows(p.args[i]) && p.args[i].type == target_head.args[i].type;
    positives_in_space += inside ? 1 : 0;
  }
  const long double available = space - static_cast<long double>(positives_in_space);
  std::mt19937_64 rng(seed);

  if (strategy == NegativeStrategy::uniform && 2.0L * requested >= available) {
    // Dense request: enumerate the complement and shuffle.
    std::vector<Atom> pool;
    if (space > 0) {
      std::vector<std::size_t> choice(domains.size(), 0);
      while (true) {
        Atom a = grounding(target_head, domains, choice);
        if (!excluded.contains(a)) pool.push_back(std::move(a));
        std::size_t i = choice.size();
        while (i > 0 && ++choice[i - 1] == domains[i - 1].size()) choice[--i] = 0;
        if (i == 0) break;
      }
    }
    const std::size_t take = std::min(requested, pool.size());
    for (std::size_t i = 0; i < take; ++i) {
      std::uniform_int_distribution<std::size_t> pick(i, pool.size() - 1);
      std::swap(pool[i], pool[pick(rng)]);
    }
    pool.resize(take);
    out.atoms = std::move(pool);
  } else if (strategy == NegativeStrategy::uniform) {
    // Sparse request: rejection sampling of uniform tuples.
    while (out.atoms.size() < requested) {
      std::vector<std::size_t> choice;
      for (const auto& d : domains) choice.push_back(std::uniform_int_distribution<std::size_t>(0, d.size() - 1)(rng));
      Atom a = grounding(target_head, domains, choice);
      if (excluded.insert(a).second) out.atoms.push_back(std::move(a));
    }
  } else {
    if (!positives.empty() && !domains.empty()) {
      const std::size_t max_attempts = 100 * requested + 1000;
      for (std::size_t attempt = 0; attempt < max_attempts && out.atoms.size() < requested; ++attempt) {
        Atom a = positives[std::uniform_int_distribution<std::size_t>(0, positives.size() - 1)(rng)];
        const std::size_t slot = std::uniform_int_distribution<std::size_t>(0, a.arity() - 1)(rng);
        const auto& d = domains[slot];
        if (d.empty()) continue;
        a.args[slot] = d[std::uniform_int_distribution<std::size_t>(0, d.size() - 1)(rng)];
        if (excluded.insert(a).second) out.atoms.push_back(std::move(a));
      }
    }
  }
  if (out.atoms.size() < requested) {
    out.warning = "requested " + std::to_string(requested) + " negatives but only " +
                  std::to_string(out.atoms.size()) + " could be generated";
  }
  return out;
}

std::vector<std::size_t> FoldSpec::train_indices(int fold) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < assignments.size(); ++i) {
    if (assignments[i] != fold) out.push_back(i);
  }
  return out;
}

std::vector<std::size_t> FoldSpec::test_indices(int fold) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < assignments.size(); ++i) {
    if (assignments[i] == fold) out.push_back(i);
  }
  return out;
}

FoldSpec split_folds(const ExampleSet& examples, int k, std::uint64_t seed) {
  if (k < 2) throw ConfigError("fold count must be at least 2");
  const auto kk = static_cast<std::size_t>(k);
  if (examples.positives.size() < kk || examples.negatives.size() < kk) {
    throw DataError("each class needs at least " + std::to_string(k) + " examples for " +
                    std::to_string(k) + "-fold cross validation (have " +
                    std::to_string(examples.positives.size()) + " positives, " +
                    std::to_string(examples.negatives.size()) + " negatives)");
  }
  FoldSpec spec{k, seed, std::vector<int>(examples.size(), 0)};
  std::mt19937_64 rng(seed);
  auto assign = [&](std::size_t begin, std::size_t count) {
    std::vector<std::size_t> order(count);
    for (std::size_t i = 0; i < count; ++i) order[i] = begin + i;
    for (std::size_t i = count; i > 1; --i) {
      std::swap(order[i - 1], order[std::uniform_int_distribution<std::size_t>(0, i - 1)(rng)]);
    }
    for (std::size_t i = 0; i < count; ++i) spec.assignments[order[i]] = static_cast<int>(i % kk);
  };
  assign(0, examples.positives.size());
  assign(examples.positives.size(), examples.negatives.size());
  return spec;
}

ExampleSet subset(const ExampleSet& examples, std::span<const std::size_t> indices) {
  ExampleSet out{examples.target, {}, {}};
  for (std::size_t i : indices) {
    if (i < examples.positives.size()) {
      out.positives.push_back(examples.positives[i]);
    } else {
      out.negatives.push_back(examples.negatives.at(i - examples.positives.size()));
    }
  }
  return out;
}

}  // namespace lrbm
