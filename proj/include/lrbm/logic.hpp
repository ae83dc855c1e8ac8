#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include "lrbm/symbol.hpp"

namespace lrbm {

enum class TermKind : std::uint8_t { constant, variable };

// A typed constant or logical variable. Equality is (kind, name, type).
struct Term {
  TermKind kind = TermKind::constant;
  Symbol name;
  Symbol type;

  static Term constant(std::string_view name, std::string_view type) {
    return {TermKind::constant, Symbol(name), Symbol(type)};
  }
  static Term variable(std::string_view name, std::string_view type) {
    return {TermKind::variable, Symbol(name), Symbol(type)};
  }

  bool is_variable() const { return kind == TermKind::variable; }
  bool is_constant() const { return kind == TermKind::constant; }

  friend bool operator==(const Term&, const Term&) = default;
};

struct TermHash {
  std::size_t operator()(const Term& t) const noexcept {
    std::size_t h = t.name.id();
    h = h * 0x9e3779b97f4a7c15ULL + t.type.id();
    return h * 2 + static_cast<std::size_t>(t.kind);
  }
};

struct Atom {
  Symbol predicate;
  std::vector<Term> args;

  std::size_t arity() const { return args.size(); }
  bool is_ground() const;

  friend bool operator==(const Atom&, const Atom&) = default;
};

struct AtomHash {
  std::size_t operator()(const Atom& a) const noexcept;
};

// A positive literal holds exactly one atom. A negated literal holds the
// conjunction it negates (negation as failure): it is true iff no extension of
// the current bindings grounds every atom to a fact. Variables that occur only
// inside the negation are existentially scoped inside it.
struct Literal {
  bool negated = false;
  std::vector<Atom> atoms;

  static Literal positive(Atom atom) { return {false, {std::move(atom)}}; }
  static Literal negation(std::vector<Atom> conjunction) { return {true, std::move(conjunction)}; }

  const Atom& atom() const { return atoms.front(); }

  friend bool operator==(const Literal&, const Literal&) = default;
};

// Triangular substitution; lookups resolve chains so apply() is idempotent.
class Substitution {
 public:
  using Binding = std::pair<Term, Term>;

  Substitution() = default;
  Substitution(std::initializer_list<Binding> bindings);

  // Direct binding of `var`, if any.
  const Term* find(const Term& var) const;
  // Follows variable bindings until reaching a constant or an unbound variable.
  Term resolve(const Term& t) const;
  // Fails when `var` is already bound, is not a variable, or types differ.
  bool bind(const Term& var, const Term& value);

  std::size_t size() const { return bindings_.size(); }
  bool empty() const { return bindings_.empty(); }
  std::span<const Binding> bindings() const { return bindings_; }
  void truncate(std::size_t n) { bindings_.resize(n); }
  // Caller guarantees `var` is an unbound variable of value's type.
  void push_unchecked(const Term& var, const Term& value) { bindings_.emplace_back(var, value); }

  // Set equality of the fully resolved bindings.
  friend bool operator==(const Substitution& a, const Substitution& b);

 private:
  std::vector<Binding> bindings_;
};

Term apply(const Substitution& s, const Term& t);
Atom apply(const Substitution& s, const Atom& a);
Literal apply(const Substitution& s, const Literal& l);

// Most general unifier of `a` and `b` extending `seed`, or nullopt on a clash of
// predicate, arity, type tag or constant.
std::optional<Substitution> unify(const Atom& a, const Atom& b, const Substitution& seed = {});

struct Clause {
  Atom head;
  std::vector<Literal> body;
};

std::string to_string(const Term& t);
std::string to_string(const Atom& a);
std::string to_string(const Literal& l);
// Body-first rendering: "p(A,B) ∧ ¬q(B) ⇒ t(A)".
std::string to_string(const Clause& c);
std::string to_string(const Substitution& s);

// Variables in first-occurrence order.
std::vector<Term> variables_of(const Atom& a);
void collect_variables(const Atom& a, std::vector<Term>& out);

using FactId = std::uint32_t;

// Closed-world store of ground facts with a per-predicate extension and a
// (predicate, position, constant) index. Constants carry exactly one type tag.
class KnowledgeBase {
 public:
  // Returns false for duplicates. Throws TypeError on non-ground atoms, on a
  // constant reused with another type, or on a predicate signature conflict.
  bool add_fact(const Atom& fact);
  // Registers a constant in its type universe without asserting any fact.
  void add_constant(const Term& constant);

  std::size_t size() const { return facts_.size(); }
  const Atom& fact(FactId id) const { return facts_[id]; }
  std::span<const Atom> facts() const { return facts_; }

  // Insertion-ordered extension of `predicate`; empty when unknown.
  std::span<const FactId> facts_of(Symbol predicate) const;
  std::span<const FactId> facts_with(Symbol predicate, std::size_t position, Symbol constant) const;
  bool contains(const Atom& ground) const { return fact_set_.contains(ground); }

  // Constants of `type` in first-seen order.
  std::span<const Term> universe(Symbol type) const;
  // Type tags in first-seen order.
  std::span<const Symbol> types() const { return type_order_; }
  bool knows(const Term& constant) const;
  std::optional<Symbol> type_of(Symbol constant_name) const;
  // Argument types recorded for `predicate`, if any fact used it.
  const std::vector<Symbol>* signature(Symbol predicate) const;

  // Temporal visibility: facts `stamp_predicate(entity, t)` give integer
  // timestamps to entities; a fact mentioning an entity stamped later than a
  // query's cutoff is hidden from that query.
  void set_temporal_filter(Symbol stamp_predicate);
  bool has_temporal_filter() const { return !stamp_predicate_.empty(); }
  std::optional<std::int64_t> cutoff_for(const Atom& query) const;
  bool visible(FactId id, std::optional<std::int64_t> cutoff) const;

  friend bool operator==(const KnowledgeBase& a, const KnowledgeBase& b);

 private:
  std::optional<std::int64_t> timestamp_of(const Atom& atom) const;

  struct PredicateIndex {
    std::vector<Symbol> types;
    std::vector<FactId> all;
    std::vector<std::unordered_map<Symbol, std::vector<FactId>>> by_position;
  };

  std::vector<Atom> facts_;
  std::unordered_set<Atom, AtomHash> fact_set_;
  std::unordered_map<Symbol, PredicateIndex> predicates_;
  std::unordered_map<Symbol, Symbol> constant_types_;
  std::unordered_map<Symbol, std::vector<Term>> universes_;
  std::vector<Symbol> type_order_;

  Symbol stamp_predicate_;
  std::unordered_map<Symbol, std::int64_t> stamps_;
  std::vector<std::optional<std::int64_t>> fact_times_;
};

struct SearchStats {
  std::size_t groundings_visited = 0;     // successful fact matches during the search
  std::size_t visited_after_witness = 0;  // matches made after the first solution
  std::size_t solutions = 0;
};

struct SatisfyOptions {
  std::optional<std::int64_t> time_cutoff;
  SearchStats* stats = nullptr;
};

struct Satisfaction {
  bool satisfied = false;
  std::optional<Substitution> witness;
  explicit operator bool() const { return satisfied; }
};

// Depth-first, left-to-right search for a grounding of `body` extending
// `partial`; stops at the first solution. Negated literals are checked as soon
// as every variable they share with positive literals is bound.
Satisfaction satisfy(std::span<const Literal> body, const Substitution& partial,
                     const KnowledgeBase& kb, const SatisfyOptions& options = {});

// Same search order as satisfy(), but keeps going while `visit` returns true.
// Returns the number of solutions visited.
std::size_t for_each_solution(std::span<const Literal> body, const Substitution& partial,
                              const KnowledgeBase& kb,
                              const std::function<bool(const Substitution&)>& visit,
                              const SatisfyOptions& options = {});

}  // namespace lrbm
