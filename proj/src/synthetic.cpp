#include "lrbm/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <set>

#include "lrbm/errors.hpp"
#include "lrbm/parser.hpp"

namespace lrbm {

namespace {

std::string name(char prefix, int i) { return std::string(1, prefix) + std::to_string(i); }

Atom fact(const char* pred, const Term& a, const Term& b) { return Atom{Symbol(pred), {a, b}}; }

}  // namespace

MovieDomain make_movie_domain(const MovieDomainConfig& config) {
  if (config.persons < 2 || config.movies < 1 || config.genres < 1 || config.actors_per_movie < 1 ||
      config.actors_per_movie > config.persons || config.positives < 1 || config.neg_ratio < 0 ||
      config.noise < 0 || config.noise > 1) {
    throw ConfigError("invalid movie domain configuration");
  }
  std::mt19937_64 rng(config.seed);
  auto uniform = [&](int n) { return std::uniform_int_distribution<int>(0, n - 1)(rng); };

  MovieDomain dom;
  dom.modes_text = kMovieModes;
  dom.schema = parse_modes(dom.modes_text);

  std::vector<Term> person, movie, genre;
  for (int i = 0; i < config.persons; ++i) person.push_back(Term::constant(name('p', i), "person"));
  for (int i = 0; i < config.movies; ++i) movie.push_back(Term::constant(name('m', i), "movie"));
  for (int i = 0; i < config.genres; ++i) genre.push_back(Term::constant(name('g', i), "genre"));

  const auto np = static_cast<std::size_t>(config.persons);
  std::vector<std::vector<int>> actors(static_cast<std::size_t>(config.movies));
  std::vector<int> director(static_cast<std::size_t>(config.movies));
  std::vector<std::set<int>> alias(np);

  std::vector<int> everyone(np);
  for (std::size_t i = 0; i < np; ++i) everyone[i] = static_cast<int>(i);
  for (int m = 0; m < config.movies; ++m) {
    const auto mi = static_cast<std::size_t>(m);
    director[mi] = uniform(config.persons);
    dom.kb.add_fact(fact("directedby", movie[mi], person[static_cast<std::size_t>(director[mi])]));
    dom.kb.add_fact(fact("ingenre", movie[mi], genre[static_cast<std::size_t>(uniform(config.genres))]));
    std::ranges::shuffle(everyone, rng);
    for (int a = 0; a < config.actors_per_movie; ++a) {
      actors[mi].push_back(everyone[static_cast<std::size_t>(a)]);
      dom.kb.add_fact(fact("actedin", person[static_cast<std::size_t>(everyone[static_cast<std::size_t>(a)])], movie[mi]));
    }
  }
  // Everyone acts somewhere, so every person is a known constant of the facts.
  std::vector<bool> seen(np, false);
  for (int m = 0; m < config.movies; ++m) {
    seen[static_cast<std::size_t>(director[static_cast<std::size_t>(m)])] = true;
    for (int a : actors[static_cast<std::size_t>(m)]) seen[static_cast<std::size_t>(a)] = true;
  }
  for (std::size_t p = 0; p < np; ++p) {
    if (seen[p]) continue;
    const auto m = static_cast<std::size_t>(uniform(config.movies));
    actors[m].push_back(static_cast<int>(p));
    dom.kb.add_fact(fact("actedin", person[p], movie[m]));
  }
  for (int k = 0; k < config.alias_pairs; ++k) {
    const int a = uniform(config.persons);
    const int b = uniform(config.persons);
    if (a == b) continue;
    alias[static_cast<std::size_t>(a)].insert(b);
    alias[static_cast<std::size_t>(b)].insert(a);
    dom.kb.add_fact(fact("sameperson", person[static_cast<std::size_t>(a)], person[static_cast<std::size_t>(b)]));
    dom.kb.add_fact(fact("sameperson", person[static_cast<std::size_t>(b)], person[static_cast<std::size_t>(a)]));
  }
  for (const auto& g : genre) dom.kb.add_fact(fact("samegenre", g, g));

  // Pairs covered by the generating clauses, computed directly from the
  // tables above rather than through the logic engine.
  std::vector<std::vector<bool>> covered(np, std::vector<bool>(np, false));
  for (int m = 0; m < config.movies; ++m) {
    const auto& cast = actors[static_cast<std::size_t>(m)];
    const auto d = static_cast<std::size_t>(director[static_cast<std::size_t>(m)]);
    for (int a : cast) {
      for (int b : cast) covered[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)] = true;
      covered[static_cast<std::size_t>(a)][d] = true;
      for (int b : alias[static_cast<std::size_t>(a)]) covered[d][static_cast<std::size_t>(b)] = true;
    }
  }

  std::vector<std::pair<int, int>> yes, no;
  for (int a = 0; a < config.persons; ++a) {
    for (int b = 0; b < config.persons; ++b) {
      if (a == b) continue;
      (covered[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)] ? yes : no).emplace_back(a, b);
    }
  }
  const auto n_pos = std::min(yes.size(), static_cast<std::size_t>(config.positives));
  const auto n_neg = std::min(no.size(), static_cast<std::size_t>(std::llround(config.neg_ratio * static_cast<double>(n_pos))));
  std::ranges::shuffle(yes, rng);
  std::ranges::shuffle(no, rng);

  struct Drawn {
    Atom atom;
    int rule = 0;
    int label = 0;
  };
  std::vector<Drawn> drawn;
  auto collab = [&](std::pair<int, int> p) {
    return fact("collab", person[static_cast<std::size_t>(p.first)], person[static_cast<std::size_t>(p.second)]);
  };
  for (std::size_t i = 0; i < n_pos; ++i) drawn.push_back({collab(yes[i]), 1, 1});
  for (std::size_t i = 0; i < n_neg; ++i) drawn.push_back({collab(no[i]), 0, 0});
  std::bernoulli_distribution corrupt(config.noise), coin(0.5);
  for (auto& d : drawn) {
    if (corrupt(rng)) d.label = coin(rng) ? 1 : 0;
  }

  std::vector<Atom> pos, neg;
  std::vector<int> pos_rule, neg_rule;
  for (const auto& d : drawn) {
    (d.label ? pos : neg).push_back(d.atom);
    (d.label ? pos_rule : neg_rule).push_back(d.rule);
  }
  dom.examples = make_example_set(Symbol("collab"), std::move(pos), std::move(neg), dom.kb);
  dom.rule_labels = std::move(pos_rule);
  dom.rule_labels.insert(dom.rule_labels.end(), neg_rule.begin(), neg_rule.end());
  return dom;
}

}  // namespace lrbm
