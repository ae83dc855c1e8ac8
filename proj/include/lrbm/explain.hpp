#pragma once

#include <span>
#include <string>
#include <vector>

#include "lrbm/boosting.hpp"

namespace lrbm {

// Clause-valued hidden unit of a lifted RBM.
struct HiddenNode {
  Clause clause;
  LeafParams params;
  int tree = -1;  // source tree and path (leaf order); -1 when built by hand
  int path = -1;
};

// Visible predicates connect only to the hidden nodes whose clause body
// mentions them; every hidden node connects to both output units through
// (U1, U0).
struct LiftedRBMNetwork {
  Atom head;
  double psi0 = 0.0;
  double psi_clamp = kDefaultPsiClamp;
  std::vector<Symbol> visible;
  std::vector<HiddenNode> hidden;
  std::vector<std::vector<std::size_t>> edges;  // hidden index -> sorted visible indices
};

// Body predicates, including those inside negations, in first-occurrence order.
std::vector<Symbol> body_predicates(const Clause& clause);

// Derives the visible layer and sparse edges from the clause bodies.
LiftedRBMNetwork make_network(Atom head, std::vector<HiddenNode> hidden, double psi0 = 0.0,
                              double psi_clamp = kDefaultPsiClamp);

// One hidden node per root-to-leaf path of every tree, carrying that leaf's
// parameters. Per tree exactly one path clause holds for any query, so the
// network potential equals the ensemble potential.
LiftedRBMNetwork paths_to_lrbm(const BoostedModel& model);

// Fits one tree of depth <= max_depth to the ensemble's psi on `examples`,
// refitting leaf parameters against those targets. Returned as a one-tree
// model with psi0 = 0.
BoostedModel distill_single_tree(const BoostedModel& model, std::span<const LabeledExample> examples,
                                 const KnowledgeBase& kb, int max_depth = 10);

struct InferenceResult {
  double probability = 0.5;
  double psi = 0.0;
  std::vector<std::size_t> activated;
  std::vector<Substitution> witnesses;  // first grounding found, per activated node
  std::vector<SearchStats> stats;       // per hidden node
};

// Unifies the query with each clause head, then searches the body for a first
// grounding. Throws DataError on queries that do not ground the head or use
// unknown constants.
InferenceResult lrbm_inference(const LiftedRBMNetwork& net, const Atom& query, const KnowledgeBase& kb,
                               int jobs = 1);

// Graphviz rendering: visible, hidden and output vertices with their edges.
std::string export_dot(const LiftedRBMNetwork& net);
// Clauses ranked by |U1 - U0|.
std::string export_text(const LiftedRBMNetwork& net);
std::string network_json(const LiftedRBMNetwork& net);

}  // namespace lrbm
