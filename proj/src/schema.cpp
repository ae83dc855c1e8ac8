#include "lrbm/schema.hpp"

#include <algorithm>

#include "lrbm/errors.hpp"

namespace lrbm {

std::string ModeDeclaration::to_string() const {
  std::string out = predicate.str() + "(";
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (i > 0) out += ',';
    out += static_cast<char>(args[i].mode);
    out += args[i].type.str();
  }
  return out + ")";
}

void Schema::add(ModeDeclaration decl) {
  if (find(decl.predicate) != nullptr) {
    throw TypeError("duplicate mode declaration for " + decl.predicate.str());
  }
  decls_.push_back(std::move(decl));
}

const ModeDeclaration* Schema::find(Symbol predicate) const {
  auto it = std::find_if(decls_.begin(), decls_.end(),
                         [&](const ModeDeclaration& d) { return d.predicate == predicate; });
  return it == decls_.end() ? nullptr : &*it;
}

const ModeDeclaration& Schema::at(Symbol predicate) const {
  const ModeDeclaration* d = find(predicate);
  if (d == nullptr) throw TypeError("no mode declaration for predicate " + predicate.str());
  return *d;
}

Atom Schema::head(Symbol target) const {
  const ModeDeclaration& d = at(target);
  Atom head{target, {}};
  for (std::size_t i = 0; i < d.arity(); ++i) {
    head.args.push_back(Term{TermKind::variable, Symbol(variable_name(i)), d.args[i].type});
  }
  return head;
}

void Schema::check(const Atom& atom) const {
  const ModeDeclaration& d = at(atom.predicate);
  if (d.arity() != atom.arity()) {
    throw TypeError("arity mismatch for " + lrbm::to_string(atom) + ": expected " +
                    std::to_string(d.arity()));
  }
  for (std::size_t i = 0; i < d.arity(); ++i) {
    if (atom.args[i].type != d.args[i].type) {
      throw TypeError("argument " + std::to_string(i + 1) + " of " + lrbm::to_string(atom) +
                      " must have type " + d.args[i].type.str());
    }
  }
}

std::string variable_name(std::size_t index) {
  if (index < 26) return std::string(1, static_cast<char>('A' + index));
  return "V" + std::to_string(index);
}

}  // namespace lrbm
