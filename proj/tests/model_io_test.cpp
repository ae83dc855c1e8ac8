#include <cstdio>
#include <filesystem>

#include "doctest.h"
#include "lrbm/errors.hpp"
#include "lrbm/model_io.hpp"
#include "lrbm/synthetic.hpp"

using namespace lrbm;

namespace {

BoostedModel trained_model(const MovieDomain& dom) {
  TrainConfig c;
  c.n_trees = 4;
  c.seed = 77;
  c.psi0 = -0.1;
  return train(dom.kb, dom.schema, dom.examples, c);
}

MovieDomain domain() {
  MovieDomainConfig cfg;
  cfg.persons = 25;
  cfg.movies = 15;
  cfg.positives = 40;
  return make_movie_domain(cfg);
}

}  // namespace

TEST_CASE("models round-trip byte for byte") {
  const auto dom = domain();
  const auto model = trained_model(dom);
  const auto text = serialize_model(model);
  const auto back = parse_model(text);
  CHECK(serialize_model(back) == text);
  CHECK(back.psi0 == model.psi0);
  CHECK(back.config.seed == 77);
  REQUIRE(back.trees.size() == model.trees.size());
  for (std::size_t t = 0; t < model.trees.size(); ++t) {
    CHECK(back.trees[t].leaf_count() == model.trees[t].leaf_count());
    const auto a = model.trees[t].path_clauses();
    const auto b = back.trees[t].path_clauses();
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(to_string(a[i]) == to_string(b[i]));
  }
  for (const auto& e : dom.examples.labeled()) {
    CHECK(predict(back, e.query, dom.kb).psi == predict(model, e.query, dom.kb).psi);
  }
  CHECK(text.find("\"version\": 1") != std::string::npos);
}

TEST_CASE("awkward doubles survive") {
  const auto dom = domain();
  BoostedModel m{dom.schema.head(Symbol("collab")), dom.schema, 0.1 + 0.2, {}, {}};
  m.trees.emplace_back(m.head, LeafParams{1e-300, -0.0, 1.0 / 3.0, 123456789.123456789, -2.5e-17});
  const auto back = parse_model(serialize_model(m));
  CHECK(back.psi0 == 0.1 + 0.2);
  CHECK(back.trees[0].node(0).params == m.trees[0].node(0).params);
  CHECK(serialize_model(back) == serialize_model(m));
}

TEST_CASE("files") {
  const auto dom = domain();
  const auto model = trained_model(dom);
  const auto path = (std::filesystem::temp_directory_path() / "lrbm_model_io_test.json").string();
  save_model(model, path);
  CHECK(serialize_model(load_model(path)) == serialize_model(model));
  std::filesystem::remove(path);
  CHECK_THROWS_AS(load_model(path), DataError);
}

TEST_CASE("malformed documents") {
  CHECK_THROWS_AS(parse_model("{"), ParseError);
  CHECK_THROWS_AS(parse_model("{}"), ParseError);
  const auto dom = domain();
  auto text = serialize_model(trained_model(dom));
  auto bumped = text;
  bumped.replace(bumped.find("\"version\": 1"), 12, "\"version\": 9");
  CHECK_THROWS_AS(parse_model(bumped), ParseError);
  auto broken = text;
  broken.replace(broken.find("\"leaf\""), 6, "\"leif\"");
  CHECK_THROWS(parse_model(broken));
}
