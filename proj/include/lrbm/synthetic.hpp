#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "lrbm/dataset.hpp"
#include "lrbm/schema.hpp"

namespace lrbm {

// Movie-style domain labelled by three known clauses over collab(A,B):
//   actedin(A,M) ∧ actedin(B,M)                                  (co-actors)
//   directedby(M,A) ∧ actedin(P,M) ∧ sameperson(P,B)              (directed an alias)
//   directedby(M,B) ∧ actedin(A,M)                                (acted for B)
// Positives are drawn from pairs the clauses cover, negatives from pairs they
// do not. Noise then replaces each label, with probability `noise`, by a fair
// coin flip.
struct MovieDomainConfig {
  int persons = 60;
  int movies = 40;
  int genres = 5;
  int actors_per_movie = 3;
  int alias_pairs = 10;
  int positives = 200;
  double neg_ratio = 2.0;
  double noise = 0.05;
  std::uint64_t seed = 7;
};

struct MovieDomain {
  std::string modes_text;
  Schema schema;
  KnowledgeBase kb;
  ExampleSet examples;            // labels after noise
  std::vector<int> rule_labels;   // noise-free labels, aligned with examples.labeled()
};

inline constexpr const char* kMovieModes =
    "mode: collab(+person,+person).\n"
    "mode: actedin(-person,-movie).\n"
    "mode: directedby(-movie,-person).\n"
    "mode: ingenre(+movie,-genre).\n"
    "mode: sameperson(-person,-person).\n"
    "mode: samegenre(+genre,+genre).\n";

MovieDomain make_movie_domain(const MovieDomainConfig& config = {});

}  // namespace lrbm
