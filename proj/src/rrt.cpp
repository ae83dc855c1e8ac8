#include "lrbm/rrt.hpp"

#include <algorithm>
#include <unordered_set>

#include "lrbm/errors.hpp"
#include "lrbm/parallel.hpp"

namespace lrbm {

namespace {

std::vector<Literal> positives_of(std::span<const Literal> body) {
  std::vector<Literal> out;
  for (const auto& lit : body) {
    if (!lit.negated) out.push_back(lit);
  }
  return out;
}

bool shares_any(const Atom& atom, const std::unordered_set<Term, TermHash>& vars) {
  return std::ranges::any_of(atom.args, [&](const Term& t) { return t.is_variable() && vars.contains(t); });
}

std::vector<Literal> with_test(std::span<const Literal> context, const Literal& test) {
  std::vector<Literal> conj(context.begin(), context.end());
  conj.push_back(test);
  return conj;
}

}  // namespace

Substitution head_substitution(const Atom& head, const Atom& query) {
  auto s = unify(head, query);
  if (!s) throw DataError("query " + to_string(query) + " does not match target " + to_string(head));
  return *s;
}

std::vector<Literal> branch_body(const Atom& head, std::span<const Literal> parent, const Literal& test,
                                 bool branch, int depth) {
  std::vector<Literal> body(parent.begin(), parent.end());
  if (branch) {
    body.push_back(test);
    return body;
  }

  std::unordered_set<Term, TermHash> head_vars(head.args.begin(), head.args.end());
  std::unordered_set<Term, TermHash> linked;
  auto absorb = [&](const Atom& atom) {
    for (const auto& t : atom.args) {
      if (t.is_variable() && !head_vars.contains(t)) linked.insert(t);
    }
  };
  for (const auto& a : test.atoms) absorb(a);

  // Grow the set of context literals reachable from the test through
  // non-head variables.
  const auto context = positives_of(parent);
  std::vector<bool> taken(context.size(), false);
  for (bool grew = true; grew;) {
    grew = false;
    for (std::size_t i = 0; i < context.size(); ++i) {
      if (taken[i] || !shares_any(context[i].atom(), linked)) continue;
      taken[i] = true;
      absorb(context[i].atom());
      grew = true;
    }
  }

  std::vector<Atom> conj;
  for (std::size_t i = 0; i < context.size(); ++i) {
    if (taken[i]) conj.push_back(context[i].atom());
  }
  conj.insert(conj.end(), test.atoms.begin(), test.atoms.end());

  Substitution rename;
  const std::string suffix = "_" + std::to_string(depth);
  for (const auto& v : linked) rename.push_unchecked(v, Term::variable(v.name.str() + suffix, v.type.str()));
  for (auto& a : conj) a = apply(rename, a);
  body.push_back(Literal::negation(std::move(conj)));
  return body;
}

RelationalRegressionTree::RelationalRegressionTree(Atom head, LeafParams root_params) : head_(std::move(head)) {
  TreeNode root;
  root.params = root_params;
  nodes_.push_back(std::move(root));
}

std::pair<int, int> RelationalRegressionTree::split(int index, Literal test, LeafParams true_params,
                                                    LeafParams false_params) {
  if (test.negated) throw ConfigError("tree tests must be positive literals");
  TreeNode& parent = nodes_.at(static_cast<std::size_t>(index));
  if (!parent.is_leaf()) throw ConfigError("node " + std::to_string(index) + " is already split");

  TreeNode yes;
  yes.depth = parent.depth + 1;
  yes.body = branch_body(head_, parent.body, test, true, yes.depth);
  yes.context = parent.context;
  yes.context.push_back(test);
  yes.params = true_params;

  TreeNode no;
  no.depth = parent.depth + 1;
  no.body = branch_body(head_, parent.body, test, false, no.depth);
  no.context = parent.context;
  no.params = false_params;

  const int yes_index = static_cast<int>(nodes_.size());
  parent.test = std::move(test);
  parent.true_child = yes_index;
  parent.false_child = yes_index + 1;
  parent.params = {};
  nodes_.push_back(std::move(yes));
  nodes_.push_back(std::move(no));
  return {yes_index, yes_index + 1};
}

void RelationalRegressionTree::set_params(int index, const LeafParams& params) {
  nodes_.at(static_cast<std::size_t>(index)).params = params;
}

std::size_t RelationalRegressionTree::leaf_count() const {
  return static_cast<std::size_t>(std::ranges::count_if(nodes_, [](const TreeNode& n) { return n.is_leaf(); }));
}

int RelationalRegressionTree::depth() const {
  int d = 0;
  for (const auto& n : nodes_) d = std::max(d, n.depth);
  return d;
}

std::vector<int> RelationalRegressionTree::leaves() const {
  std::vector<int> out;
  if (nodes_.empty()) return out;
  std::vector<int> stack{0};
  while (!stack.empty()) {
    const int i = stack.back();
    stack.pop_back();
    const auto& n = node(i);
    if (n.is_leaf()) {
      out.push_back(i);
    } else {
      stack.push_back(n.false_child);
      stack.push_back(n.true_child);
    }
  }
  return out;
}

std::vector<Clause> RelationalRegressionTree::path_clauses() const {
  std::vector<Clause> out;
  for (int leaf : leaves()) out.push_back(Clause{head_, node(leaf).body});
  return out;
}

int RelationalRegressionTree::route(const Atom& query, const KnowledgeBase& kb) const {
  const Substitution s = head_substitution(head_, query);
  const SatisfyOptions options{kb.cutoff_for(query), nullptr};
  int i = 0;
  while (!node(i).is_leaf()) {
    const auto& n = node(i);
    const auto conj = with_test(n.context, *n.test);
    i = satisfy(conj, s, kb, options).satisfied ? n.true_child : n.false_child;
  }
  return i;
}

std::vector<Literal> generate_candidates(const Atom& head, std::span<const Literal> context,
                                         const Schema& schema, int max_new_vars) {
  std::vector<Term> bound;
  collect_variables(head, bound);
  for (const auto& lit : context) {
    if (!lit.negated) collect_variables(lit.atom(), bound);
  }
  std::unordered_set<std::string> used;
  for (const auto& v : bound) used.insert(v.name.str());
  std::vector<std::string> fresh_names;
  for (std::size_t i = 0; static_cast<int>(fresh_names.size()) < max_new_vars; ++i) {
    auto name = variable_name(i);
    if (!used.contains(name)) fresh_names.push_back(std::move(name));
  }

  std::vector<Literal> out;
  for (const auto& decl : schema.declarations()) {
    if (decl.predicate == head.predicate) continue;
    Atom atom{decl.predicate, std::vector<Term>(decl.arity())};
    int fresh_used = 0;
    auto fill = [&](auto&& self, std::size_t slot) -> void {
      if (slot == decl.arity()) {
        auto lit = Literal::positive(atom);
        if (std::ranges::find(context, lit) == context.end()) out.push_back(std::move(lit));
        return;
      }
      const auto& spec = decl.args[slot];
      for (const auto& v : bound) {
        if (v.type != spec.type) continue;
        atom.args[slot] = v;
        self(self, slot + 1);
      }
      if (spec.mode != ArgMode::free) return;
      // Fresh variables already introduced by earlier slots of this literal.
      for (std::size_t s = 0; s < slot; ++s) {
        const Term& prev = atom.args[s];
        const bool fresh = std::ranges::find(bound, prev) == bound.end();
        const bool first = std::find(atom.args.begin(), atom.args.begin() + static_cast<std::ptrdiff_t>(s), prev) ==
                           atom.args.begin() + static_cast<std::ptrdiff_t>(s);
        if (fresh && first && prev.type == spec.type) {
          atom.args[slot] = prev;
          self(self, slot + 1);
        }
      }
      if (fresh_used < max_new_vars) {
        atom.args[slot] = Term::variable(fresh_names[static_cast<std::size_t>(fresh_used)], spec.type.str());
        ++fresh_used;
        self(self, slot + 1);
        --fresh_used;
      }
    };
    fill(fill, 0);
  }
  return out;
}

Partition partition(const Atom& head, std::span<const Literal> context, const Literal& candidate,
                    std::span<const RegressionExample> examples, const KnowledgeBase& kb) {
  const auto conj = with_test(context, candidate);
  Partition p;
  for (std::size_t i = 0; i < examples.size(); ++i) {
    const auto& q = examples[i].query;
    const SatisfyOptions options{kb.cutoff_for(q), nullptr};
    const bool hit = satisfy(conj, head_substitution(head, q), kb, options).satisfied;
    (hit ? p.left : p.right).push_back(i);
  }
  return p;
}

double score_split(const LeafParams& left, const LeafParams& right, std::span<const double> left_gradients,
                   std::span<const double> right_gradients) {
  double sse = 0.0;
  const double vl = leaf_potential(left);
  for (double g : left_gradients) sse += (vl - g) * (vl - g);
  const double vr = leaf_potential(right);
  for (double g : right_gradients) sse += (vr - g) * (vr - g);
  return sse;
}

namespace {

struct Prepared {
  Substitution head;
  std::optional<std::int64_t> cutoff;
};

struct SplitChoice {
  Literal test;
  std::vector<std::size_t> left;
  std::vector<std::size_t> right;
  LeafParams left_params;
  LeafParams right_params;
  double sse = 0.0;
};

struct Frontier {
  int node = 0;
  std::vector<std::size_t> members;
  SplitChoice split;
  double reduction = 0.0;
  std::size_t order = 0;
};

class TreeBuilder {
 public:
  TreeBuilder(std::span<const RegressionExample> examples, const Atom& head, const Schema& schema,
              const KnowledgeBase& kb, const TreeConfig& config)
      : examples_(examples), head_(head), schema_(schema), kb_(kb), config_(config) {
    prepared_.reserve(examples.size());
    for (const auto& ex : examples) {
      prepared_.push_back({head_substitution(head, ex.query), kb.cutoff_for(ex.query)});
    }
  }

  RelationalRegressionTree build() {
    std::vector<std::size_t> all(examples_.size());
    for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
    RelationalRegressionTree tree(head_, fit(all, LeafParams{}));
    std::vector<Frontier> frontier;
    consider(tree, 0, std::move(all), frontier);

    while (tree.leaf_count() < config_.max_leaves && !frontier.empty()) {
      auto best = std::ranges::max_element(frontier, [](const Frontier& a, const Frontier& b) {
        if (a.reduction != b.reduction) return a.reduction < b.reduction;
        return a.order > b.order;
      });
      Frontier f = std::move(*best);
      frontier.erase(best);
      auto [yes, no] = tree.split(f.node, f.split.test, f.split.left_params, f.split.right_params);
      consider(tree, yes, std::move(f.split.left), frontier);
      consider(tree, no, std::move(f.split.right), frontier);
    }
    return tree;
  }

 private:
  std::vector<double> gradients(std::span<const std::size_t> members) const {
    std::vector<double> g;
    g.reserve(members.size());
    for (auto i : members) g.push_back(examples_[i].gradient);
    return g;
  }

  LeafParams fit(std::span<const std::size_t> members, const LeafParams& start) const {
    return coordinate_descent(gradients(members), start, config_.cd);
  }

  bool holds(const std::vector<Literal>& conj, std::size_t i) const {
    const SatisfyOptions options{prepared_[i].cutoff, nullptr};
    return satisfy(conj, prepared_[i].head, kb_, options).satisfied;
  }

  void consider(const RelationalRegressionTree& tree, int index, std::vector<std::size_t> members,
                std::vector<Frontier>& frontier) {
    const TreeNode& node = tree.node(index);
    if (node.depth >= config_.max_depth || members.size() < 2) return;
    const auto g = gradients(members);
    const double leaf_sse = score_split(node.params, node.params, g, {});
    if (leaf_sse <= 1e-12) return;

    const auto candidates = generate_candidates(head_, node.context, schema_, config_.max_new_vars);
    std::vector<std::optional<SplitChoice>> scored(candidates.size());
    parallel_for(candidates.size(), config_.jobs, [&](std::size_t c) {
      std::vector<Literal> conj = node.context;
      conj.push_back(candidates[c]);
      SplitChoice choice{candidates[c], {}, {}, {}, {}, 0.0};
      for (auto i : members) (holds(conj, i) ? choice.left : choice.right).push_back(i);
      if (choice.left.empty() || choice.right.empty()) return;
      choice.left_params = fit(choice.left, node.params);
      choice.right_params = fit(choice.right, node.params);
      choice.sse = score_split(choice.left_params, choice.right_params, gradients(choice.left),
                               gradients(choice.right));
      scored[c] = std::move(choice);
    });

    std::optional<SplitChoice> best;
    for (auto& s : scored) {
      if (s && (!best || s->sse < best->sse)) best = std::move(s);
    }
    if (!best) return;
    const double reduction = leaf_sse - best->sse;
    frontier.push_back(Frontier{index, std::move(members), std::move(*best), reduction, next_order_++});
    if (config_.beam_width > 0 && frontier.size() > config_.beam_width) {
      auto worst = std::ranges::min_element(frontier, [](const Frontier& a, const Frontier& b) {
        if (a.reduction != b.reduction) return a.reduction < b.reduction;
        return a.order > b.order;
      });
      frontier.erase(worst);
    }
  }

  std::span<const RegressionExample> examples_;
  const Atom& head_;
  const Schema& schema_;
  const KnowledgeBase& kb_;
  const TreeConfig& config_;
  std::vector<Prepared> prepared_;
  std::size_t next_order_ = 0;
};

}  // namespace

RelationalRegressionTree fit_regression_tree(std::span<const RegressionExample> examples, const Atom& head,
                                             const Schema& schema, const KnowledgeBase& kb,
                                             const TreeConfig& config) {
  if (examples.empty()) throw DataError("cannot fit a regression tree to zero examples");
  if (config.max_leaves < 1) throw ConfigError("max_leaves must be at least 1");
  return TreeBuilder(examples, head, schema, kb, config).build();
}

double evaluate_tree(const RelationalRegressionTree& tree, const Atom& query, const KnowledgeBase& kb) {
  return leaf_potential(tree.node(tree.route(query, kb)).params);
}

}  // namespace lrbm
