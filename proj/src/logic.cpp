#include "lrbm/logic.hpp"

#include <algorithm>
#include <charconv>

#include "lrbm/errors.hpp"

namespace lrbm {

bool Atom::is_ground() const {
  return std::all_of(args.begin(), args.end(), [](const Term& t) { return t.is_constant(); });
}

std::size_t AtomHash::operator()(const Atom& a) const noexcept {
  std::size_t h = a.predicate.id();
  TermHash th;
  for (const Term& t : a.args) h = h * 0x100000001b3ULL ^ th(t);
  return h;
}

// ---------------------------------------------------------------------------
// Substitution

Substitution::Substitution(std::initializer_list<Binding> bindings) {
  for (const auto& [var, value] : bindings) {
    if (!bind(var, value)) throw TypeError("invalid binding for " + to_string(var));
  }
}

const Term* Substitution::find(const Term& var) const {
  for (const auto& [v, value] : bindings_) {
    if (v == var) return &value;
  }
  return nullptr;
}

Term Substitution::resolve(const Term& t) const {
  Term current = t;
  while (current.is_variable()) {
    const Term* next = find(current);
    if (next == nullptr) break;
    current = *next;
  }
  return current;
}

bool Substitution::bind(const Term& var, const Term& value) {
  if (!var.is_variable() || var.type != value.type || find(var) != nullptr) return false;
  if (resolve(value) == var) return false;  // would create a cycle
  bindings_.emplace_back(var, value);
  return true;
}

bool operator==(const Substitution& a, const Substitution& b) {
  if (a.size() != b.size()) return false;
  for (const auto& [var, value] : a.bindings_) {
    if (b.find(var) == nullptr || a.resolve(var) != b.resolve(var)) return false;
  }
  return true;
}

Term apply(const Substitution& s, const Term& t) { return s.resolve(t); }

Atom apply(const Substitution& s, const Atom& a) {
  Atom out{a.predicate, {}};
  out.args.reserve(a.args.size());
  for (const Term& t : a.args) out.args.push_back(s.resolve(t));
  return out;
}

Literal apply(const Substitution& s, const Literal& l) {
  Literal out{l.negated, {}};
  out.atoms.reserve(l.atoms.size());
  for (const Atom& a : l.atoms) out.atoms.push_back(apply(s, a));
  return out;
}

std::optional<Substitution> unify(const Atom& a, const Atom& b, const Substitution& seed) {
  if (a.predicate != b.predicate || a.arity() != b.arity()) return std::nullopt;
  Substitution s = seed;
  for (std::size_t i = 0; i < a.arity(); ++i) {
    const Term x = s.resolve(a.args[i]);
    const Term y = s.resolve(b.args[i]);
    if (x == y) continue;
    if (x.type != y.type) return std::nullopt;
    if (x.is_variable()) {
      s.push_unchecked(x, y);
    } else if (y.is_variable()) {
      s.push_unchecked(y, x);
    } else {
      return std::nullopt;
    }
  }
  return s;
}

// ---------------------------------------------------------------------------
// Rendering

std::string to_string(const Term& t) { return t.name.str(); }

std::string to_string(const Atom& a) {
  std::string out = a.predicate.str();
  out += '(';
  for (std::size_t i = 0; i < a.args.size(); ++i) {
    if (i > 0) out += ',';
    out += a.args[i].name.str();
  }
  out += ')';
  return out;
}

std::string to_string(const Literal& l) {
  if (!l.negated) return to_string(l.atom());
  if (l.atoms.size() == 1) return "¬" + to_string(l.atom());
  std::string out = "¬(";
  for (std::size_t i = 0; i < l.atoms.size(); ++i) {
    if (i > 0) out += " ∧ ";
    out += to_string(l.atoms[i]);
  }
  return out + ")";
}

std::string to_string(const Clause& c) {
  std::string out;
  if (c.body.empty()) out = "true";
  for (std::size_t i = 0; i < c.body.size(); ++i) {
    if (i > 0) out += " ∧ ";
    out += to_string(c.body[i]);
  }
  return out + " ⇒ " + to_string(c.head);
}

std::string to_string(const Substitution& s) {
  std::vector<std::pair<std::string, std::string>> items;
  for (const auto& [var, value] : s.bindings()) {
    items.emplace_back(var.name.str(), s.resolve(var).name.str());
  }
  std::sort(items.begin(), items.end());
  std::string out = "{";
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i > 0) out += ", ";
    out += items[i].first + "/" + items[i].second;
  }
  return out + "}";
}

void collect_variables(const Atom& a, std::vector<Term>& out) {
  for (const Term& t : a.args) {
    if (t.is_variable() && std::find(out.begin(), out.end(), t) == out.end()) out.push_back(t);
  }
}

std::vector<Term> variables_of(const Atom& a) {
  std::vector<Term> out;
  collect_variables(a, out);
  return out;
}

// ---------------------------------------------------------------------------
// KnowledgeBase

bool KnowledgeBase::add_fact(const Atom& fact) {
  if (!fact.is_ground()) throw TypeError("fact is not ground: " + to_string(fact));
  std::vector<Symbol> types;
  types.reserve(fact.arity());
  for (const Term& t : fact.args) types.push_back(t.type);

  auto [it, inserted] = predicates_.try_emplace(fact.predicate);
  PredicateIndex& index = it->second;
  if (inserted) {
    index.types = types;
    index.by_position.resize(fact.arity());
  } else if (index.types != types) {
    throw TypeError("signature conflict for predicate " + fact.predicate.str() + " in " +
                    to_string(fact));
  }
  for (const Term& t : fact.args) {
    auto known = constant_types_.find(t.name);
    if (known != constant_types_.end() && known->second != t.type) {
      throw TypeError("constant " + t.name.str() + " used as " + t.type.str() +
                      " but previously as " + known->second.str());
    }
  }
  if (fact_set_.contains(fact)) return false;

  for (const Term& t : fact.args) add_constant(t);
  const auto id = static_cast<FactId>(facts_.size());
  facts_.push_back(fact);
  fact_set_.insert(fact);
  index.all.push_back(id);
  for (std::size_t i = 0; i < fact.arity(); ++i) index.by_position[i][fact.args[i].name].push_back(id);
  if (has_temporal_filter()) {
    if (fact.predicate == stamp_predicate_) {
      set_temporal_filter(stamp_predicate_);
    } else {
      fact_times_.push_back(timestamp_of(fact));
    }
  }
  return true;
}

void KnowledgeBase::add_constant(const Term& constant) {
  if (!constant.is_constant()) throw TypeError("not a constant: " + to_string(constant));
  auto [it, inserted] = constant_types_.try_emplace(constant.name, constant.type);
  if (!inserted) {
    if (it->second != constant.type) {
      throw TypeError("constant " + constant.name.str() + " used as " + constant.type.str() +
                      " but previously as " + it->second.str());
    }
    return;
  }
  auto [u, fresh_type] = universes_.try_emplace(constant.type);
  if (fresh_type) type_order_.push_back(constant.type);
  u->second.push_back(constant);
}

std::span<const FactId> KnowledgeBase::facts_of(Symbol predicate) const {
  auto it = predicates_.find(predicate);
  if (it == predicates_.end()) return {};
  return it->second.all;
}

std::span<const FactId> KnowledgeBase::facts_with(Symbol predicate, std::size_t position,
                                                  Symbol constant) const {
  auto it = predicates_.find(predicate);
  if (it == predicates_.end() || position >= it->second.by_position.size()) return {};
  const auto& slot = it->second.by_position[position];
  auto hit = slot.find(constant);
  if (hit == slot.end()) return {};
  return hit->second;
}

std::span<const Term> KnowledgeBase::universe(Symbol type) const {
  auto it = universes_.find(type);
  if (it == universes_.end()) return {};
  return it->second;
}

bool KnowledgeBase::knows(const Term& constant) const {
  auto it = constant_types_.find(constant.name);
  return it != constant_types_.end() && it->second == constant.type;
}

std::optional<Symbol> KnowledgeBase::type_of(Symbol constant_name) const {
  auto it = constant_types_.find(constant_name);
  if (it == constant_types_.end()) return std::nullopt;
  return it->second;
}

const std::vector<Symbol>* KnowledgeBase::signature(Symbol predicate) const {
  auto it = predicates_.find(predicate);
  return it == predicates_.end() ? nullptr : &it->second.types;
}

void KnowledgeBase::set_temporal_filter(Symbol stamp_predicate) {
  stamp_predicate_ = stamp_predicate;
  stamps_.clear();
  fact_times_.assign(facts_.size(), std::nullopt);
  if (stamp_predicate.empty()) return;
  for (FactId id : facts_of(stamp_predicate)) {
    const Atom& f = facts_[id];
    if (f.arity() != 2) throw TypeError("timestamp predicate must be binary: " + to_string(f));
    const std::string& text = f.args[1].name.str();
    std::int64_t value = 0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc() || ptr != text.data() + text.size()) {
      throw TypeError("timestamp is not an integer: " + to_string(f));
    }
    stamps_[f.args[0].name] = value;
  }
  for (std::size_t id = 0; id < facts_.size(); ++id) fact_times_[id] = timestamp_of(facts_[id]);
}

std::optional<std::int64_t> KnowledgeBase::timestamp_of(const Atom& atom) const {
  std::optional<std::int64_t> t;
  for (const Term& arg : atom.args) {
    if (auto s = stamps_.find(arg.name); s != stamps_.end()) t = std::max(t.value_or(s->second), s->second);
  }
  return t;
}

std::optional<std::int64_t> KnowledgeBase::cutoff_for(const Atom& query) const {
  if (!has_temporal_filter()) return std::nullopt;
  return timestamp_of(query);
}

bool KnowledgeBase::visible(FactId id, std::optional<std::int64_t> cutoff) const {
  if (!cutoff || id >= fact_times_.size()) return true;
  const auto& t = fact_times_[id];
  return !t || *t <= *cutoff;
}

bool operator==(const KnowledgeBase& a, const KnowledgeBase& b) {
  if (a.facts_.size() != b.facts_.size()) return false;
  for (const Atom& f : a.facts_) {
    if (!b.contains(f)) return false;
  }
  return true;
}

// ---------------------------------------------------------------------------
// Satisfaction

namespace {

class Solver {
 public:
  Solver(std::span<const Literal> body, const Substitution& partial, const KnowledgeBase& kb,
         const SatisfyOptions& options)
      : kb_(kb), options_(options), subst_(partial) {
    body_.reserve(body.size());
    for (const Literal& l : body) body_.push_back(apply(partial, l));
    schedule_negations();
  }

  // Runs the search; `visit` returns true to keep enumerating.
  template <class Visit>
  void run(Visit&& visit) {
    step(0, visit);
  }

 private:
  // A negation is checked right after the positive literal that binds the last
  // of its outer variables (those shared with positive literals).
  void schedule_negations() {
    checks_.assign(body_.size(), {});
    std::vector<Term> positive_vars;
    for (const Literal& l : body_) {
      if (!l.negated) collect_variables(l.atom(), positive_vars);
    }
    std::vector<Term> bound;
    std::vector<std::size_t> pending;
    auto ready = [&](std::size_t j) {
      for (const Atom& a : body_[j].atoms) {
        for (const Term& t : a.args) {
          if (!t.is_variable()) continue;
          bool outer = std::find(positive_vars.begin(), positive_vars.end(), t) != positive_vars.end();
          if (outer && std::find(bound.begin(), bound.end(), t) == bound.end()) return false;
        }
      }
      return true;
    };
    for (std::size_t k = 0; k < body_.size(); ++k) {
      if (body_[k].negated) {
        pending.push_back(k);
      } else {
        collect_variables(body_[k].atom(), bound);
      }
      std::vector<std::size_t> waiting;
      for (std::size_t j : pending) (ready(j) ? checks_[k] : waiting).push_back(j);
      pending = std::move(waiting);
    }
  }

  bool negation_holds(const Literal& neg) const {
    std::vector<Literal> conj;
    conj.reserve(neg.atoms.size());
    for (const Atom& a : neg.atoms) conj.push_back(Literal::positive(apply(subst_, a)));
    Solver inner(conj, Substitution{}, kb_, SatisfyOptions{options_.time_cutoff, nullptr});
    bool found = false;
    inner.run([&](const Substitution&) {
      found = true;
      return false;
    });
    return !found;
  }

  bool checks_pass(std::size_t k) const {
    for (std::size_t j : checks_[k]) {
      if (!negation_holds(body_[j])) return false;
    }
    return true;
  }

  std::span<const FactId> candidates(const Atom& goal) const {
    for (std::size_t i = 0; i < goal.arity(); ++i) {
      const Term t = subst_.resolve(goal.args[i]);
      if (t.is_constant()) return kb_.facts_with(goal.predicate, i, t.name);
    }
    return kb_.facts_of(goal.predicate);
  }

  bool match(const Atom& goal, const Atom& fact) {
    if (goal.arity() != fact.arity()) return false;
    for (std::size_t i = 0; i < goal.arity(); ++i) {
      const Term t = subst_.resolve(goal.args[i]);
      const Term& f = fact.args[i];
      if (t.is_variable()) {
        if (t.type != f.type) return false;
        subst_.push_unchecked(t, f);
      } else if (t != f) {
        return false;
      }
    }
    return true;
  }

  // Returns true when the search must stop.
  template <class Visit>
  bool step(std::size_t k, Visit& visit) {
    if (k == body_.size()) {
      found_ = true;
      if (options_.stats != nullptr) ++options_.stats->solutions;
      return !visit(subst_);
    }
    const Literal& lit = body_[k];
    if (lit.negated) return checks_pass(k) && step(k + 1, visit);

    const Atom& goal = lit.atom();
    for (FactId id : candidates(goal)) {
      if (!kb_.visible(id, options_.time_cutoff)) continue;
      const std::size_t mark = subst_.size();
      if (match(goal, kb_.fact(id))) {
        if (options_.stats != nullptr) {
          ++options_.stats->groundings_visited;
          if (found_) ++options_.stats->visited_after_witness;
        }
        if (checks_pass(k) && step(k + 1, visit)) return true;
      }
      subst_.truncate(mark);
    }
    return false;
  }

  const KnowledgeBase& kb_;
  SatisfyOptions options_;
  std::vector<Literal> body_;
  std::vector<std::vector<std::size_t>> checks_;
  Substitution subst_;
  bool found_ = false;
};

}  // namespace

Satisfaction satisfy(std::span<const Literal> body, const Substitution& partial,
                     const KnowledgeBase& kb, const SatisfyOptions& options) {
  Satisfaction result;
  Solver solver(body, partial, kb, options);
  solver.run([&](const Substitution& s) {
    result.satisfied = true;
    result.witness = s;
    return false;
  });
  return result;
}

std::size_t for_each_solution(std::span<const Literal> body, const Substitution& partial,
                              const KnowledgeBase& kb,
                              const std::function<bool(const Substitution&)>& visit,
                              const SatisfyOptions& options) {
  std::size_t n = 0;
  Solver solver(body, partial, kb, options);
  solver.run([&](const Substitution& s) {
    ++n;
    return visit(s);
  });
  return n;
}

}  // namespace lrbm
