#pragma once

#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "lrbm/logic.hpp"
#include "lrbm/potential.hpp"
#include "lrbm/schema.hpp"

namespace lrbm {

// A ground target atom, its label and the value the next tree should fit
// (the pointwise functional gradient while boosting).
struct RegressionExample {
  Atom query;
  int label = 0;
  double gradient = 0.0;
};

struct TreeNode {
  // Clause body of the path from the root: positive tests taken on true
  // branches, negations for false branches.
  std::vector<Literal> body;
  // Positive literals of `body`; these bind the variables later tests may reuse.
  std::vector<Literal> context;
  std::optional<Literal> test;  // set on internal nodes
  int true_child = -1;
  int false_child = -1;
  int depth = 0;
  LeafParams params;  // meaningful on leaves

  bool is_leaf() const { return !test.has_value(); }
};

// Binary tree over literal tests. An example goes down the true branch of a
// node iff (node context ∧ test) is satisfiable under the example's head
// substitution, so each root-to-leaf clause holds for exactly the examples
// routed to that leaf.
class RelationalRegressionTree {
 public:
  RelationalRegressionTree() = default;
  explicit RelationalRegressionTree(Atom head, LeafParams root_params = {});

  const Atom& head() const { return head_; }
  Symbol target() const { return head_.predicate; }
  std::span<const TreeNode> nodes() const { return nodes_; }
  const TreeNode& node(int index) const { return nodes_.at(static_cast<std::size_t>(index)); }

  // Turns leaf `index` into an internal node testing `test`; returns the
  // (true, false) child indices.
  std::pair<int, int> split(int index, Literal test, LeafParams true_params = {},
                            LeafParams false_params = {});
  void set_params(int index, const LeafParams& params);

  std::size_t leaf_count() const;
  int depth() const;
  // Leaves in depth-first order, true branch first.
  std::vector<int> leaves() const;
  // Root-to-leaf clauses in leaves() order.
  std::vector<Clause> path_clauses() const;

  // Index of the leaf `query` reaches. Throws DataError when `query` does not
  // unify with the head.
  int route(const Atom& query, const KnowledgeBase& kb) const;

 private:
  Atom head_;
  std::vector<TreeNode> nodes_;
};

// Body of the child reached through `branch` after testing `test` below a node
// with body `parent`. The false branch negates the test together with the
// context literals it chains through; their non-head variables are renamed
// apart with the suffix "_<depth>" so they stay local to the negation.
std::vector<Literal> branch_body(const Atom& head, std::span<const Literal> parent, const Literal& test,
                                 bool branch, int depth);

struct TreeConfig {
  std::size_t max_leaves = 4;
  int max_depth = std::numeric_limits<int>::max();
  int max_new_vars = 1;
  std::size_t beam_width = 0;  // 0 = unbounded
  CoordinateDescentConfig cd;
  int jobs = 1;
};

// Mode-guided refinements of a node: every literal of a declared non-target
// predicate whose `+` slots hold variables (of matching type) from the head or
// the positive context, and whose `-` slots hold such variables or at most
// `max_new_vars` distinct fresh ones (a fresh variable may fill several slots).
// Fresh variables take the first unused canonical names in slot order, so
// candidates are unique up to renaming. Literals already in the context are
// skipped.
std::vector<Literal> generate_candidates(const Atom& head, std::span<const Literal> context,
                                         const Schema& schema, int max_new_vars);

struct Partition {
  std::vector<std::size_t> left;   // (context ∧ candidate) satisfiable
  std::vector<std::size_t> right;  // the rest
};

Partition partition(const Atom& head, std::span<const Literal> context, const Literal& candidate,
                    std::span<const RegressionExample> examples, const KnowledgeBase& kb);

// Sum of squared errors of the two fitted leaves against their gradients.
double score_split(const LeafParams& left, const LeafParams& right, std::span<const double> left_gradients,
                   std::span<const double> right_gradients);

// Greedy best-first induction (see TreeConfig). Each candidate split is scored
// by fitting both children with coordinate descent and summing their SSE; the
// expandable leaf with the largest SSE reduction is split next.
RelationalRegressionTree fit_regression_tree(std::span<const RegressionExample> examples, const Atom& head,
                                             const Schema& schema, const KnowledgeBase& kb,
                                             const TreeConfig& config);

// Potential of the leaf `query` reaches.
double evaluate_tree(const RelationalRegressionTree& tree, const Atom& query, const KnowledgeBase& kb);

// Head substitution for a query; throws DataError when they do not unify.
Substitution head_substitution(const Atom& head, const Atom& query);

}  // namespace lrbm
