#pragma once

#include <span>
#include <string>
#include <vector>

#include "lrbm/logic.hpp"

namespace lrbm {

// `+` slots must reuse a bound variable; `-` slots may introduce a new one.
enum class ArgMode : char { bound = '+', free = '-' };

struct ArgSpec {
  Symbol type;
  ArgMode mode = ArgMode::free;

  friend bool operator==(const ArgSpec&, const ArgSpec&) = default;
};

struct ModeDeclaration {
  Symbol predicate;
  std::vector<ArgSpec> args;

  std::size_t arity() const { return args.size(); }
  // "pred(+type,-type)"
  std::string to_string() const;

  friend bool operator==(const ModeDeclaration&, const ModeDeclaration&) = default;
};

// Predicate vocabulary: one mode declaration per predicate, in declaration order.
class Schema {
 public:
  // Throws TypeError on a second declaration for the same predicate.
  void add(ModeDeclaration decl);

  const ModeDeclaration* find(Symbol predicate) const;
  // Throws TypeError for undeclared predicates.
  const ModeDeclaration& at(Symbol predicate) const;
  std::span<const ModeDeclaration> declarations() const { return decls_; }
  bool empty() const { return decls_.empty(); }

  // Head atom for `target` with variables A, B, C, ... typed from its declaration.
  Atom head(Symbol target) const;
  // Checks arity and argument type tags of `atom` against its declaration.
  void check(const Atom& atom) const;

  friend bool operator==(const Schema&, const Schema&) = default;

 private:
  std::vector<ModeDeclaration> decls_;
};

// Canonical variable names: A..Z, then V26, V27, ...
std::string variable_name(std::size_t index);

}  // namespace lrbm
