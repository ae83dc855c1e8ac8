#include "lrbm/parser.hpp"

#include <cctype>
#include <optional>
#include <unordered_map>

#include "lrbm/errors.hpp"

namespace lrbm {
namespace {

enum class Tok { ident, quoted, lparen, rparen, comma, period, colon, implies, arrow, conj, neg, plus, minus, end };

struct Token {
  Tok kind = Tok::end;
  std::string text;
  std::size_t line = 1;
};

class Lexer {
 public:
  explicit Lexer(std::string_view text) : text_(text) { advance(); }

  const Token& peek() const { return current_; }

  Token take() {
    Token t = current_;
    advance();
    return t;
  }

  Token expect(Tok kind, const char* what) {
    if (current_.kind != kind) {
      throw ParseError(std::string("expected ") + what + describe(current_), current_.line);
    }
    return take();
  }

  static std::string describe(const Token& t) {
    if (t.kind == Tok::end) return " at end of input";
    return " near '" + t.text + "'";
  }

 private:
  bool starts_with(std::string_view s) const { return text_.substr(pos_, s.size()) == s; }

  void skip_space() {
    while (pos_ < text_.size()) {
      const char c = text_[pos_];
      if (c == '\n') {
        ++line_;
        ++pos_;
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        ++pos_;
      } else if (c == '%') {
        while (pos_ < text_.size() && text_[pos_] != '\n') ++pos_;
      } else {
        break;
      }
    }
  }

  void advance() {
    skip_space();
    current_ = Token{Tok::end, "", line_};
    if (pos_ >= text_.size()) return;
    auto symbol = [&](Tok kind, std::string_view s) {
      current_.kind = kind;
      current_.text = std::string(s);
      pos_ += s.size();
    };
    const char c = text_[pos_];
    if (starts_with(":-")) return symbol(Tok::implies, ":-");
    if (starts_with("\\+")) return symbol(Tok::neg, "\\+");
    if (starts_with("¬")) return symbol(Tok::neg, "¬");
    if (starts_with("∧")) return symbol(Tok::conj, "∧");
    if (starts_with("⇒")) return symbol(Tok::arrow, "⇒");
    switch (c) {
      case '(': return symbol(Tok::lparen, "(");
      case ')': return symbol(Tok::rparen, ")");
      case ',': return symbol(Tok::comma, ",");
      case '.': return symbol(Tok::period, ".");
      case ':': return symbol(Tok::colon, ":");
      case '+': return symbol(Tok::plus, "+");
      case '-': return symbol(Tok::minus, "-");
      default: break;
    }
    if (c == '"' || c == '\'') {
      const std::size_t start = pos_++;
      while (pos_ < text_.size() && text_[pos_] != c && text_[pos_] != '\n') ++pos_;
      if (pos_ >= text_.size() || text_[pos_] != c) throw ParseError("unterminated quoted constant", line_);
      ++pos_;
      current_.kind = Tok::quoted;
      current_.text = std::string(text_.substr(start, pos_ - start));
      return;
    }
    if (std::isalnum(static_cast<unsigned char>(c)) || c == '_') {
      const std::size_t start = pos_;
      while (pos_ < text_.size() &&
             (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_')) {
        ++pos_;
      }
      current_.kind = Tok::ident;
      current_.text = std::string(text_.substr(start, pos_ - start));
      return;
    }
    throw ParseError(std::string("unexpected character '") + c + "'", line_);
  }

  std::string_view text_;
  std::size_t pos_ = 0;
  std::size_t line_ = 1;
  Token current_;
};

bool is_variable_name(const std::string& s) {
  return !s.empty() && (std::isupper(static_cast<unsigned char>(s[0])) || s[0] == '_');
}

bool is_functor(const std::string& s) {
  return !s.empty() && std::islower(static_cast<unsigned char>(s[0]));
}

// Parses atoms against a schema; tracks variable types within one clause.
class AtomReader {
 public:
  AtomReader(Lexer& lex, const Schema& schema) : lex_(lex), schema_(schema) {}

  Atom read(bool allow_variables) {
    const Token name = lex_.expect(Tok::ident, "predicate name");
    if (!is_functor(name.text)) {
      throw ParseError("predicate must start with a lower-case letter: " + name.text, name.line);
    }
    const ModeDeclaration* decl = schema_.find(Symbol(name.text));
    if (decl == nullptr) {
      throw TypeError("line " + std::to_string(name.line) + ": no mode declaration for predicate " +
                      name.text);
    }
    lex_.expect(Tok::lparen, "'('");
    Atom atom{decl->predicate, {}};
    while (true) {
      const Token arg = lex_.take();
      if (arg.kind != Tok::ident && arg.kind != Tok::quoted) {
        throw ParseError("expected argument" + Lexer::describe(arg), arg.line);
      }
      const std::size_t i = atom.args.size();
      if (i >= decl->arity()) {
        throw TypeError("line " + std::to_string(arg.line) + ": too many arguments for " + name.text +
                        "/" + std::to_string(decl->arity()));
      }
      const Symbol type = decl->args[i].type;
      if (arg.kind == Tok::ident && is_variable_name(arg.text)) {
        if (!allow_variables) throw ParseError("variable " + arg.text + " in ground atom", arg.line);
        auto [it, inserted] = var_types_.try_emplace(arg.text, type);
        if (!inserted && it->second != type) {
          throw TypeError("line " + std::to_string(arg.line) + ": variable " + arg.text +
                          " used as " + type.str() + " and " + it->second.str());
        }
        atom.args.push_back(Term{TermKind::variable, Symbol(arg.text), type});
      } else {
        atom.args.push_back(Term{TermKind::constant, Symbol(arg.text), type});
      }
      const Token sep = lex_.take();
      if (sep.kind == Tok::rparen) break;
      if (sep.kind != Tok::comma) throw ParseError("expected ',' or ')'" + Lexer::describe(sep), sep.line);
    }
    if (atom.arity() != decl->arity()) {
      throw TypeError("line " + std::to_string(name.line) + ": " + name.text + " expects " +
                      std::to_string(decl->arity()) + " arguments, got " +
                      std::to_string(atom.arity()));
    }
    return atom;
  }

 private:
  Lexer& lex_;
  const Schema& schema_;
  std::unordered_map<std::string, Symbol> var_types_;
};

bool is_separator(Tok k) { return k == Tok::comma || k == Tok::conj; }

Literal read_literal(Lexer& lex, AtomReader& reader) {
  if (lex.peek().kind != Tok::neg) return Literal::positive(reader.read(true));
  lex.take();
  if (lex.peek().kind != Tok::lparen) return Literal::negation({reader.read(true)});
  lex.take();
  std::vector<Atom> conj{reader.read(true)};
  while (is_separator(lex.peek().kind)) {
    lex.take();
    conj.push_back(reader.read(true));
  }
  lex.expect(Tok::rparen, "')'");
  return Literal::negation(std::move(conj));
}

}  // namespace

Schema parse_modes(std::string_view text) {
  Schema schema;
  Lexer lex(text);
  while (lex.peek().kind != Tok::end) {
    const Token kw = lex.expect(Tok::ident, "'mode'");
    if (kw.text != "mode") throw ParseError("expected 'mode:' declaration, got " + kw.text, kw.line);
    lex.expect(Tok::colon, "':'");
    const Token name = lex.expect(Tok::ident, "predicate name");
    if (!is_functor(name.text)) {
      throw ParseError("predicate must start with a lower-case letter: " + name.text, name.line);
    }
    lex.expect(Tok::lparen, "'('");
    ModeDeclaration decl{Symbol(name.text), {}};
    while (true) {
      const Token mode = lex.take();
      ArgMode m;
      if (mode.kind == Tok::plus) {
        m = ArgMode::bound;
      } else if (mode.kind == Tok::minus) {
        m = ArgMode::free;
      } else {
        throw ParseError("expected '+' or '-'" + Lexer::describe(mode), mode.line);
      }
      const Token type = lex.expect(Tok::ident, "type name");
      decl.args.push_back(ArgSpec{Symbol(type.text), m});
      const Token sep = lex.take();
      if (sep.kind == Tok::rparen) break;
      if (sep.kind != Tok::comma) throw ParseError("expected ',' or ')'" + Lexer::describe(sep), sep.line);
    }
    lex.expect(Tok::period, "'.'");
    try {
      schema.add(std::move(decl));
    } catch (const TypeError& e) {
      throw TypeError("line " + std::to_string(name.line) + ": " + e.what());
    }
  }
  return schema;
}

std::string serialize_modes(const Schema& schema) {
  std::string out;
  for (const ModeDeclaration& d : schema.declarations()) out += "mode: " + d.to_string() + ".\n";
  return out;
}

KnowledgeBase parse_facts(std::string_view text, const Schema& schema) {
  KnowledgeBase kb;
  Lexer lex(text);
  AtomReader reader(lex, schema);
  while (lex.peek().kind != Tok::end) {
    const std::size_t line = lex.peek().line;
    Atom fact = reader.read(false);
    lex.expect(Tok::period, "'.'");
    try {
      kb.add_fact(fact);
    } catch (const TypeError& e) {
      throw TypeError("line " + std::to_string(line) + ": " + e.what());
    }
  }
  return kb;
}

std::string serialize_atoms(std::span<const Atom> atoms) {
  std::string out;
  for (const Atom& a : atoms) out += to_string(a) + ".\n";
  return out;
}

std::string serialize_facts(const KnowledgeBase& kb) { return serialize_atoms(kb.facts()); }

std::vector<Atom> parse_atoms(std::string_view text, const Schema& schema) {
  std::vector<Atom> atoms;
  Lexer lex(text);
  AtomReader reader(lex, schema);
  while (lex.peek().kind != Tok::end) {
    atoms.push_back(reader.read(false));
    lex.expect(Tok::period, "'.'");
  }
  return atoms;
}

Atom parse_atom(std::string_view text, const Schema& schema) {
  Lexer lex(text);
  AtomReader reader(lex, schema);
  Atom atom = reader.read(true);
  if (lex.peek().kind == Tok::period) lex.take();
  if (lex.peek().kind != Tok::end) throw ParseError("trailing input" + Lexer::describe(lex.peek()), lex.peek().line);
  return atom;
}

Clause parse_clause(std::string_view text, const Schema& schema) {
  Lexer lex(text);
  AtomReader reader(lex, schema);
  Clause clause;
  auto read_body = [&](std::vector<Literal>& body) {
    if (lex.peek().kind == Tok::ident && lex.peek().text == "true") {
      lex.take();
      return;
    }
    body.push_back(read_literal(lex, reader));
    while (is_separator(lex.peek().kind)) {
      lex.take();
      body.push_back(read_literal(lex, reader));
    }
  };
  if (lex.peek().kind == Tok::neg || (lex.peek().kind == Tok::ident && lex.peek().text == "true")) {
    read_body(clause.body);
    lex.expect(Tok::arrow, "'⇒'");
    clause.head = reader.read(true);
  } else {
    Literal first = read_literal(lex, reader);
    if (lex.peek().kind == Tok::implies) {
      lex.take();
      clause.head = first.atom();
      read_body(clause.body);
    } else {
      clause.body.push_back(std::move(first));
      while (is_separator(lex.peek().kind)) {
        lex.take();
        clause.body.push_back(read_literal(lex, reader));
      }
      lex.expect(Tok::arrow, "'⇒' or ':-'");
      clause.head = reader.read(true);
    }
  }
  if (lex.peek().kind == Tok::period) lex.take();
  if (lex.peek().kind != Tok::end) throw ParseError("trailing input" + Lexer::describe(lex.peek()), lex.peek().line);
  return clause;
}

}  // namespace lrbm
