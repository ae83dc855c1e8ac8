#include <algorithm>
#include <set>

#include "doctest.h"
#include "lrbm/dataset.hpp"
#include "lrbm/errors.hpp"
#include "lrbm/parser.hpp"

using namespace lrbm;

namespace {

const char* kModes = "mode: collab(+person,+person).\nmode: actedin(-person,-movie).\n";

std::vector<Atom> atoms(const std::string& text, const Schema& schema) { return parse_atoms(text, schema); }

std::vector<Atom> people_pairs(int n, const Schema& schema) {
  std::string text;
  for (int i = 0; i < n; ++i) text += "collab(p" + std::to_string(i) + ",q" + std::to_string(i) + ").\n";
  return atoms(text, schema);
}

}  // namespace

TEST_CASE("parse_facts basics") {
  const auto schema = parse_modes(kModes);
  CHECK(parse_facts("actedin(p1, m1).", schema).size() == 1);
  CHECK(parse_facts("", schema).size() == 0);
  CHECK(parse_facts("actedin(p1,m1).\nactedin(p1,m1).", schema).size() == 1);
  CHECK_THROWS_AS(parse_facts("actedin(p1,m1).\nactedin(m1,p1).", schema), TypeError);
}

TEST_CASE("alias walkthrough facts support h2") {
  const auto schema = parse_modes(
      "mode: collab(+person,+person).\nmode: directedby(-movie,-person).\nmode: actedin(-person,-movie).\n"
      "mode: ingenre(-movie,-genre).\nmode: sameperson(-person,-person).\n");
  const auto kb = parse_facts(
      "directedby(m1,p1).\ningenre(m1,g1).\nactedin(p2,m2).\ningenre(m2,g2).\n"
      "directedby(m01,p01).\nactedin(p03,m01).\nsameperson(p03,p02).\n",
      schema);
  CHECK(kb.size() == 7);
  const auto h2 = parse_clause("directedby(M1,P1) ∧ actedin(P3,M1) ∧ sameperson(P3,P2) ⇒ collab(P1,P2)", schema);
  auto s = unify(h2.head, parse_atom("collab(p01,p02)", schema));
  REQUIRE(s);
  CHECK(satisfy(h2.body, *s, kb).satisfied);
}

TEST_CASE("example sets validate their invariants") {
  const auto schema = parse_modes(kModes);
  const auto kb = parse_facts("actedin(p1,m1). actedin(p2,m1). actedin(p3,m2).", schema);
  const auto pos = atoms("collab(p1,p2).", schema);
  const auto neg = atoms("collab(p1,p3).", schema);
  const auto set = make_example_set(Symbol("collab"), pos, neg, kb);
  CHECK(set.size() == 2);
  CHECK(set.labeled()[0].label == 1);
  CHECK(set.at(1).label == 0);
  CHECK_THROWS_AS(make_example_set(Symbol("collab"), pos, pos, kb), DataError);
  CHECK_THROWS_AS(make_example_set(Symbol("collab"), atoms("collab(p1,p9).", schema), {}, kb), DataError);
  CHECK_THROWS_AS(make_example_set(Symbol("collab"), atoms("actedin(p1,m1).", schema), {}, kb), DataError);
}

TEST_CASE("negative sampling") {
  const auto schema = parse_modes(kModes);
  const Atom head = schema.head(Symbol("collab"));

  SUBCASE("1:2 ratio on a large domain, disjoint and deterministic") {
    std::string facts;
    for (int i = 0; i < 30; ++i) facts += "actedin(p" + std::to_string(i) + ",m1).\n";
    const auto kb = parse_facts(facts, schema);
    const auto pos = atoms("collab(p1,p2). collab(p3,p4). collab(p5,p6). collab(p7,p8).", schema);
    const auto a = generate_negatives(kb, head, pos, 2.0, 42);
    CHECK(a.atoms.size() == 8);
    CHECK_FALSE(a.warning);
    for (const auto& n : a.atoms) CHECK(std::ranges::find(pos, n) == pos.end());
    std::set<std::string> distinct;
    for (const auto& n : a.atoms) distinct.insert(to_string(n));
    CHECK(distinct.size() == 8);
    const auto b = generate_negatives(kb, head, pos, 2.0, 42);
    CHECK(serialize_atoms(a.atoms) == serialize_atoms(b.atoms));
    const auto c = generate_negatives(kb, head, pos, 2.0, 42, NegativeStrategy::corrupt);
    CHECK(c.atoms.size() == 8);
    for (const auto& n : c.atoms) CHECK(std::ranges::find(pos, n) == pos.end());
  }
  SUBCASE("no positives, no negatives") {
    const auto kb = parse_facts("actedin(p1,m1). actedin(p2,m1).", schema);
    CHECK(generate_negatives(kb, head, {}, 2.0, 1).atoms.empty());
  }
  SUBCASE("shortfall returns what exists plus a warning") {
    // 3 persons -> 9 groundings; 4 positives leave exactly 5.
    const auto kb = parse_facts("actedin(p1,m1). actedin(p2,m1). actedin(p3,m1).", schema);
    const auto pos = atoms("collab(p1,p2). collab(p2,p3). collab(p3,p1). collab(p1,p1).", schema);
    const auto r = generate_negatives(kb, head, pos, 2.0, 3);
    CHECK(r.atoms.size() == 5);
    CHECK(r.warning);
    // Oracle: all groundings minus positives.
    std::set<std::string> expected;
    for (const char* a : {"p1", "p2", "p3"}) {
      for (const char* b : {"p1", "p2", "p3"}) {
        const auto t = std::string("collab(") + a + "," + b + ")";
        if (std::ranges::none_of(pos, [&](const Atom& p) { return to_string(p) == t; })) expected.insert(t);
      }
    }
    std::set<std::string> got;
    for (const auto& n : r.atoms) got.insert(to_string(n));
    CHECK(got == expected);
  }
}

TEST_CASE("stratified folds") {
  const auto schema = parse_modes(kModes);
  auto build = [&](int npos, int nneg) {
    std::string facts;
    for (int i = 0; i < npos + nneg; ++i) facts += "actedin(p" + std::to_string(i) + ",m1). actedin(q" + std::to_string(i) + ",m1).\n";
    const auto kb = parse_facts(facts, schema);
    auto all = people_pairs(npos + nneg, schema);
    std::vector<Atom> pos(all.begin(), all.begin() + npos), neg(all.begin() + npos, all.end());
    return make_example_set(Symbol("collab"), pos, neg, kb);
  };

  SUBCASE("exact division") {
    const auto set = build(10, 20);
    const auto folds = split_folds(set, 5, 9);
    for (int f = 0; f < 5; ++f) {
      const auto test = folds.test_indices(f);
      const auto npos = std::ranges::count_if(test, [](std::size_t i) { return i < 10; });
      CHECK(npos == 2);
      CHECK(test.size() - static_cast<std::size_t>(npos) == 4);
      CHECK(folds.train_indices(f).size() == 24);
    }
    CHECK(split_folds(set, 5, 9).assignments == folds.assignments);
  }
  SUBCASE("uneven division over many seeds") {
    const auto set = build(11, 22);
    for (std::uint64_t seed = 0; seed < 25; ++seed) {
      const auto folds = split_folds(set, 5, seed);
      for (int f = 0; f < 5; ++f) {
        const auto test = folds.test_indices(f);
        const auto npos = static_cast<std::size_t>(std::ranges::count_if(test, [](std::size_t i) { return i < 11; }));
        CHECK((npos == 2 || npos == 3));
        CHECK((test.size() - npos == 4 || test.size() - npos == 5));
        // Stratification bound.
        const double frac = static_cast<double>(npos) / static_cast<double>(test.size());
        CHECK(std::abs(frac - 1.0 / 3.0) < 1.0 / static_cast<double>(test.size()));
      }
    }
  }
  SUBCASE("too few examples per class") {
    CHECK_THROWS_AS(split_folds(build(3, 10), 5, 1), DataError);
    CHECK_THROWS_AS(split_folds(build(10, 10), 1, 1), ConfigError);
  }
  SUBCASE("subset keeps labels") {
    const auto set = build(4, 6);
    std::vector<std::size_t> idx = {0, 5, 9};
    const auto sub = subset(set, idx);
    CHECK(sub.positives.size() == 1);
    CHECK(sub.negatives.size() == 2);
  }
}
