#ifndef MSA_TEXT_HPP
#define MSA_TEXT_HPP

// Line-oriented text formats for varieties, finite algebras, equation systems and word
// systems. `#` starts a comment, `;` separates statements like a newline.
//
//   variety  := [ "variety" NAME ] { sorts | op | identity }
//   sorts    := "sorts" SORT { SORT }
//   op       := "op" NAME ":" { SORT } "->" SORT
//   identity := "identity" NAME ":" "forall" { VAR ":" SORT } "." term "=" term
//
//   algebra  := [ "algebra" NAME ] { carrier | table }
//   carrier  := "carrier" SORT ":" { ELEM }
//   table    := "table" OP { { ELEM } "->" ELEM } "end"
//
//   system   := "X" ":" { VAR ":" SORT } { "eq" term "=" term }
//   words    := { OP ":=" term }                      (terms over x1..xn)
//
//   term     := VAR | CONST [ "(" ")" ] | OP "(" term { "," term } ")"

#include <map>
#include <memory>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "msa/error.hpp"
#include "msa/finite_algebra.hpp"
#include "msa/signature.hpp"
#include "msa/term.hpp"
#include "msa/variety.hpp"
#include "msa/words.hpp"

namespace msa {

namespace text {

struct Token {
  std::string text;
  bool ident = false;
  std::size_t line = 0;
  std::size_t col = 0;
};

struct Statement {
  std::vector<Token> tokens;
  std::size_t line = 0;
};

inline bool is_ident_char(char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '_' ||
         c == '\'';
}

inline std::vector<Statement> tokenize(std::string_view src) {
  std::vector<Statement> out;
  Statement cur;
  std::size_t line = 1;
  std::size_t col = 1;
  auto flush = [&] {
    if (!cur.tokens.empty()) out.push_back(std::move(cur));
    cur = Statement{};
  };
  std::size_t i = 0;
  while (i < src.size()) {
    const char c = src[i];
    if (c == '\n') {
      flush();
      ++line;
      col = 1;
      ++i;
      continue;
    }
    if (c == '#') {
      while (i < src.size() && src[i] != '\n') ++i;
      continue;
    }
    if (c == ';') {
      flush();
      ++i;
      ++col;
      continue;
    }
    if (c == ' ' || c == '\t' || c == '\r') {
      ++i;
      ++col;
      continue;
    }
    if (cur.tokens.empty()) cur.line = line;
    if (is_ident_char(c)) {
      std::size_t j = i;
      while (j < src.size() && is_ident_char(src[j])) ++j;
      cur.tokens.push_back(Token{std::string(src.substr(i, j - i)), true, line, col});
      col += j - i;
      i = j;
      continue;
    }
    if (i + 1 < src.size()) {
      std::string two(src.substr(i, 2));
      if (two == "->" || two == ":=") {
        cur.tokens.push_back(Token{two, false, line, col});
        i += 2;
        col += 2;
        continue;
      }
    }
    static const std::string punct = "():,=.";
    if (punct.find(c) == std::string::npos) {
      throw ParseError(line, col, std::string("unexpected character '") + c + "'");
    }
    cur.tokens.push_back(Token{std::string(1, c), false, line, col});
    ++i;
    ++col;
  }
  flush();
  return out;
}

/** Sequential reader over one statement. */
class Cursor {
 public:
  explicit Cursor(const Statement& st) : st_(st) {}

  bool at_end() const { return pos_ >= st_.tokens.size(); }
  const Token* peek() const { return at_end() ? nullptr : &st_.tokens[pos_]; }
  bool peek_is(std::string_view t) const { return !at_end() && st_.tokens[pos_].text == t; }

  const Token& next(const std::set<std::string>& expected) {
    if (at_end()) fail("unexpected end of statement", expected);
    return st_.tokens[pos_++];
  }

  const Token& expect(std::string_view text) {
    const Token& t = next({std::string(text)});
    if (t.text != text) fail_at(t, "unexpected '" + t.text + "'", {std::string(text)});
    return t;
  }

  const Token& expect_ident(const std::string& what) {
    const Token& t = next({what});
    if (!t.ident) fail_at(t, "unexpected '" + t.text + "'", {what});
    return t;
  }

  void expect_end() {
    if (!at_end()) fail_at(st_.tokens[pos_], "unexpected '" + st_.tokens[pos_].text + "'", {"end of line"});
  }

  [[noreturn]] void fail(const std::string& msg, const std::set<std::string>& expected = {}) const {
    if (at_end()) {
      std::size_t col = 1;
      if (!st_.tokens.empty()) col = st_.tokens.back().col + st_.tokens.back().text.size();
      throw ParseError(st_.line, col, msg, expected);
    }
    fail_at(st_.tokens[pos_], msg, expected);
  }

  [[noreturn]] static void fail_at(const Token& t, const std::string& msg,
                                   const std::set<std::string>& expected = {}) {
    throw ParseError(t.line, t.col, msg, expected);
  }

 private:
  const Statement& st_;
  std::size_t pos_ = 0;
};

inline Term parse_term(Cursor& cur, const Signature& sig, const SortedAlphabet& alphabet) {
  const Token& head = cur.expect_ident("term");
  if (cur.peek_is("(")) {
    const OpDecl* op = sig.find_op(head.text);
    if (!op) Cursor::fail_at(head, "undeclared operation '" + head.text + "'");
    cur.expect("(");
    std::vector<Term> children;
    if (!cur.peek_is(")")) {
      children.push_back(parse_term(cur, sig, alphabet));
      while (cur.peek_is(",")) {
        cur.expect(",");
        children.push_back(parse_term(cur, sig, alphabet));
      }
    }
    cur.expect(")");
    try {
      return mk_app(sig, op->name, std::move(children));
    } catch (const SortError& e) {
      Cursor::fail_at(head, e.what());
    }
  }
  if (auto idx = alphabet.find(head.text)) return mk_var(head.text, alphabet[*idx].sort);
  if (const OpDecl* op = sig.find_op(head.text)) {
    if (op->type.arity() != 0) {
      Cursor::fail_at(head, "operation '" + head.text + "' needs " +
                                std::to_string(op->type.arity()) + " arguments");
    }
    return Term::application(op->name, op->type.result, {});
  }
  Cursor::fail_at(head, "unknown symbol '" + head.text + "'");
}

inline TermPair parse_equation(Cursor& cur, const Signature& sig, const SortedAlphabet& alphabet) {
  const Token* start = cur.peek();
  Term lhs = parse_term(cur, sig, alphabet);
  cur.expect("=");
  Term rhs = parse_term(cur, sig, alphabet);
  if (lhs.sort() != rhs.sort()) {
    Cursor::fail_at(*start, "sides have different sorts '" + lhs.sort() + "' and '" + rhs.sort() + "'");
  }
  return TermPair{std::move(lhs), std::move(rhs)};
}

inline SortedAlphabet parse_alphabet(Cursor& cur, const Signature& sig,
                                     std::string_view terminator) {
  SortedAlphabet x;
  while (!cur.at_end() && !cur.peek_is(terminator)) {
    const Token& name = cur.expect_ident("variable");
    cur.expect(":");
    const Token& sort = cur.expect_ident("sort");
    if (!sig.has_sort(sort.text)) Cursor::fail_at(sort, "undeclared sort '" + sort.text + "'");
    if (x.find(name.text)) Cursor::fail_at(name, "variable '" + name.text + "' declared twice");
    x.add(name.text, sort.text);
  }
  return x;
}

}  // namespace text

inline VarietySpec parse_variety(std::string_view src) {
  using namespace text;
  auto statements = tokenize(src);
  VarietySpec v;
  std::vector<std::string> sorts;
  std::map<std::string, std::size_t> sort_line;
  std::vector<OpDecl> ops;
  std::set<std::string> op_names;
  std::vector<const Statement*> identity_lines;
  std::vector<std::pair<const Token*, std::string>> sort_refs;

  for (const auto& st : statements) {
    Cursor cur(st);
    const Token& kw = cur.expect_ident("keyword");
    if (kw.text == "variety") {
      v.name = cur.expect_ident("name").text;
      cur.expect_end();
    } else if (kw.text == "sorts" || kw.text == "sort") {
      if (cur.at_end()) cur.fail("missing sort name", {"sort"});
      while (!cur.at_end()) {
        const Token& s = cur.expect_ident("sort");
        if (sort_line.count(s.text)) Cursor::fail_at(s, "duplicate sort '" + s.text + "'");
        sort_line[s.text] = s.line;
        sorts.push_back(s.text);
      }
    } else if (kw.text == "op") {
      const Token& name = cur.expect_ident("operation name");
      if (!op_names.insert(name.text).second) {
        Cursor::fail_at(name, "duplicate operation '" + name.text + "'");
      }
      cur.expect(":");
      OpDecl d{name.text, {}};
      while (!cur.peek_is("->")) {
        const Token& s = cur.expect_ident("sort");
        sort_refs.emplace_back(&s, s.text);
        d.type.args.push_back(s.text);
      }
      cur.expect("->");
      const Token& r = cur.expect_ident("sort");
      sort_refs.emplace_back(&r, r.text);
      d.type.result = r.text;
      cur.expect_end();
      ops.push_back(std::move(d));
    } else if (kw.text == "identity") {
      identity_lines.push_back(&st);
    } else {
      Cursor::fail_at(kw, "unknown declaration '" + kw.text + "'",
                      {"variety", "sorts", "op", "identity"});
    }
  }
  if (sorts.empty()) throw ParseError(1, 1, "no sorts declared", {"sorts"});
  for (const auto& [tok, s] : sort_refs) {
    if (!sort_line.count(s)) Cursor::fail_at(*tok, "undeclared sort '" + s + "'");
  }
  v.signature = Signature(std::move(sorts), std::move(ops));

  std::set<std::string> identity_names;
  for (const Statement* st : identity_lines) {
    Cursor cur(*st);
    cur.expect("identity");
    const Token& name = cur.expect_ident("identity name");
    if (!identity_names.insert(name.text).second) {
      Cursor::fail_at(name, "duplicate identity '" + name.text + "'");
    }
    cur.expect(":");
    cur.expect("forall");
    SortedAlphabet x = parse_alphabet(cur, v.signature, ".");
    cur.expect(".");
    TermPair eq = parse_equation(cur, v.signature, x);
    cur.expect_end();
    v.identities.push_back(Identity{name.text, std::move(x), std::move(eq.lhs), std::move(eq.rhs)});
  }
  auto report = validate_variety(v);
  if (!report.ok()) throw ParseError(1, 1, report.violations.front());
  return v;
}

inline std::string print_term_list(const std::vector<std::string>& xs) {
  std::string out;
  for (const auto& x : xs) out += " " + x;
  return out;
}

inline std::string print_variety(const VarietySpec& v) {
  std::ostringstream out;
  if (!v.name.empty()) out << "variety " << v.name << "\n";
  out << "sorts" << print_term_list(v.signature.sorts()) << "\n";
  for (const auto& op : v.signature.ops()) {
    out << "op " << op.name << " :" << print_term_list(op.type.args) << " -> " << op.type.result
        << "\n";
  }
  for (const auto& id : v.identities) {
    out << "identity " << id.name << " : forall";
    for (const auto& var : id.alphabet) out << " " << var.name << ":" << var.sort;
    out << " . " << render(id.lhs) << " = " << render(id.rhs) << "\n";
  }
  return out.str();
}

/**
 * Parses an algebra over the variety's signature. Membership in the variety is not
 * checked here; see first_variety_violation.
 */
inline FiniteAlgebra parse_algebra(std::string_view src, const VarietySpec& v) {
  using namespace text;
  const Signature& sig = v.signature;
  auto statements = tokenize(src);
  std::vector<std::optional<std::vector<std::string>>> carriers(sig.sorts().size());
  struct Row {
    std::vector<const Token*> args;
    const Token* result;
  };
  std::map<std::string, std::pair<const Token*, std::vector<Row>>> tables;

  for (std::size_t i = 0; i < statements.size(); ++i) {
    Cursor cur(statements[i]);
    const Token& kw = cur.expect_ident("keyword");
    if (kw.text == "algebra") {
      cur.expect_ident("name");
      cur.expect_end();
    } else if (kw.text == "carrier") {
      const Token& s = cur.expect_ident("sort");
      auto idx = sig.sort_index(s.text);
      if (!idx) Cursor::fail_at(s, "undeclared sort '" + s.text + "'");
      if (carriers[*idx]) Cursor::fail_at(s, "carrier of sort '" + s.text + "' declared twice");
      cur.expect(":");
      std::vector<std::string> elems;
      std::set<std::string> seen;
      while (!cur.at_end()) {
        const Token& e = cur.expect_ident("element");
        if (!seen.insert(e.text).second) Cursor::fail_at(e, "element '" + e.text + "' listed twice");
        elems.push_back(e.text);
      }
      carriers[*idx] = std::move(elems);
    } else if (kw.text == "table") {
      const Token& op = cur.expect_ident("operation");
      const OpDecl* decl = sig.find_op(op.text);
      if (!decl) Cursor::fail_at(op, "undeclared operation '" + op.text + "'");
      if (tables.count(op.text)) Cursor::fail_at(op, "table of '" + op.text + "' given twice");
      cur.expect_end();
      auto& entry = tables[op.text];
      entry.first = &op;
      bool closed = false;
      for (++i; i < statements.size(); ++i) {
        Cursor row(statements[i]);
        if (row.peek_is("end")) {
          row.expect("end");
          row.expect_end();
          closed = true;
          break;
        }
        Row r;
        while (!row.peek_is("->")) r.args.push_back(&row.expect_ident("element"));
        row.expect("->");
        r.result = &row.expect_ident("element");
        row.expect_end();
        entry.second.push_back(r);
      }
      if (!closed) Cursor::fail_at(op, "table of '" + op.text + "' is missing 'end'", {"end"});
    } else {
      Cursor::fail_at(kw, "unknown declaration '" + kw.text + "'", {"algebra", "carrier", "table"});
    }
  }

  std::vector<std::vector<std::string>> final_carriers;
  for (std::size_t s = 0; s < carriers.size(); ++s) {
    if (!carriers[s]) {
      throw ParseError(1, 1, "no carrier declared for sort '" + sig.sorts()[s] + "'", {"carrier"});
    }
    final_carriers.push_back(*carriers[s]);
  }
  auto lookup = [&](std::size_t s, const Token& t) {
    for (std::size_t e = 0; e < final_carriers[s].size(); ++e) {
      if (final_carriers[s][e] == t.text) return static_cast<Elem>(e);
    }
    Cursor::fail_at(t, "element '" + t.text + "' is not in the carrier of sort '" + sig.sorts()[s] + "'");
  };

  std::vector<std::vector<Elem>> final_tables;
  for (const auto& op : sig.ops()) {
    auto it = tables.find(op.name);
    std::vector<std::size_t> arg_sorts;
    std::size_t count = 1;
    for (const auto& a : op.type.args) {
      arg_sorts.push_back(*sig.sort_index(a));
      count *= final_carriers[arg_sorts.back()].size();
    }
    const std::size_t rs = *sig.sort_index(op.type.result);
    if (it == tables.end()) {
      if (count == 0) {
        final_tables.emplace_back();
        continue;
      }
      throw ParseError(1, 1, "no table given for operation '" + op.name + "'", {"table"});
    }
    std::vector<std::optional<Elem>> table(count);
    for (const Row& r : it->second.second) {
      if (r.args.size() != arg_sorts.size()) {
        const Token& at = r.args.empty() ? *r.result : *r.args.front();
        Cursor::fail_at(at, "row of '" + op.name + "' has " + std::to_string(r.args.size()) +
                                " arguments, expected " + std::to_string(arg_sorts.size()));
      }
      std::size_t idx = 0;
      for (std::size_t k = 0; k < arg_sorts.size(); ++k) {
        idx = idx * final_carriers[arg_sorts[k]].size() + lookup(arg_sorts[k], *r.args[k]);
      }
      if (table[idx]) {
        Cursor::fail_at(r.args.empty() ? *r.result : *r.args.front(), "duplicate row in table of '" + op.name + "'");
      }
      table[idx] = lookup(rs, *r.result);
    }
    std::vector<Elem> dense;
    for (std::size_t idx = 0; idx < count; ++idx) {
      if (!table[idx]) {
        std::string tuple;
        std::size_t rest = idx;
        std::vector<std::string> names(arg_sorts.size());
        for (std::size_t k = arg_sorts.size(); k > 0; --k) {
          const std::size_t n = final_carriers[arg_sorts[k - 1]].size();
          names[k - 1] = final_carriers[arg_sorts[k - 1]][rest % n];
          rest /= n;
        }
        for (const auto& n : names) tuple += (tuple.empty() ? "" : " ") + n;
        const Token& at = *it->second.first;
        throw ParseError(at.line, at.col,
                         "table of '" + op.name + "' is missing row (" + tuple + ")");
      }
      dense.push_back(*table[idx]);
    }
    final_tables.push_back(std::move(dense));
  }
  try {
    return FiniteAlgebra(std::make_shared<const Signature>(sig), std::move(final_carriers),
                         std::move(final_tables));
  } catch (const ModelError& e) {
    throw ParseError(1, 1, e.what());
  }
}

inline std::string print_algebra(const FiniteAlgebra& a, const std::string& name = "") {
  std::ostringstream out;
  const Signature& sig = a.signature();
  if (!name.empty()) out << "algebra " << name << "\n";
  for (std::size_t s = 0; s < a.sort_count(); ++s) {
    out << "carrier " << sig.sorts()[s] << " :" << print_term_list(a.carrier(s)) << "\n";
  }
  for (std::size_t o = 0; o < sig.ops().size(); ++o) {
    const auto& sorts = a.arg_sorts(o);
    const auto& table = a.table(o);
    if (table.empty()) continue;
    out << "table " << sig.ops()[o].name << "\n";
    for (std::size_t idx = 0; idx < table.size(); ++idx) {
      std::vector<std::string> names(sorts.size());
      std::size_t rest = idx;
      for (std::size_t k = sorts.size(); k > 0; --k) {
        const std::size_t n = a.carrier_size(sorts[k - 1]);
        names[k - 1] = a.element_name(sorts[k - 1], static_cast<Elem>(rest % n));
        rest /= n;
      }
      out << " ";
      for (const auto& n : names) out << " " << n;
      out << " -> " << a.element_name(a.result_sort(o), table[idx]) << "\n";
    }
    out << "end\n";
  }
  return out.str();
}

inline EquationSystem parse_equations(std::string_view src, const Signature& sig) {
  using namespace text;
  auto statements = tokenize(src);
  EquationSystem t;
  bool have_alphabet = false;
  for (const auto& st : statements) {
    Cursor cur(st);
    const Token& kw = cur.expect_ident("keyword");
    if (kw.text == "X") {
      if (have_alphabet) Cursor::fail_at(kw, "alphabet declared twice");
      cur.expect(":");
      t.alphabet = parse_alphabet(cur, sig, "");
      have_alphabet = true;
    } else if (kw.text == "eq") {
      if (!have_alphabet) Cursor::fail_at(kw, "equation before the alphabet", {"X"});
      t.pairs.push_back(parse_equation(cur, sig, t.alphabet));
      cur.expect_end();
    } else {
      Cursor::fail_at(kw, "unknown declaration '" + kw.text + "'", {"X", "eq"});
    }
  }
  if (!have_alphabet) throw ParseError(1, 1, "no alphabet declared", {"X"});
  return t;
}

inline std::string print_alphabet(const SortedAlphabet& x) {
  std::string out;
  for (const auto& v : x) out += " " + v.name + ":" + v.sort;
  return out;
}

inline std::string print_equations(const EquationSystem& t) {
  std::ostringstream out;
  out << "X:" << print_alphabet(t.alphabet) << "\n";
  for (const auto& p : t.pairs) out << "eq " << render(p) << "\n";
  return out.str();
}

/** Parses `lhs = rhs` over an alphabet, for command-line queries. */
inline TermPair parse_query(std::string_view src, const Signature& sig, const SortedAlphabet& x) {
  using namespace text;
  auto statements = tokenize(src);
  if (statements.size() != 1) throw ParseError(1, 1, "expected exactly one equation");
  Cursor cur(statements.front());
  TermPair p = parse_equation(cur, sig, x);
  cur.expect_end();
  return p;
}

inline WordSystem parse_words(std::string_view src, const Signature& sig) {
  using namespace text;
  auto statements = tokenize(src);
  WordSystem w;
  for (const auto& st : statements) {
    Cursor cur(st);
    const Token& op = cur.expect_ident("operation");
    const OpDecl* decl = sig.find_op(op.text);
    if (!decl) Cursor::fail_at(op, "undeclared operation '" + op.text + "'");
    if (w.count(op.text)) Cursor::fail_at(op, "word for '" + op.text + "' given twice");
    cur.expect(":=");
    const Token* start = cur.peek();
    Term body = parse_term(cur, sig, designated_alphabet(decl->type));
    cur.expect_end();
    if (body.sort() != decl->type.result) {
      Cursor::fail_at(*start, "word for '" + op.text + "' has sort '" + body.sort() + "', expected '" +
                                  decl->type.result + "'");
    }
    w.emplace(op.text, Word{decl->type, std::move(body)});
  }
  for (const auto& op : sig.ops()) {
    if (!w.count(op.name)) throw ParseError(1, 1, "no word given for operation '" + op.name + "'");
  }
  return w;
}

inline std::string print_words(const WordSystem& w) {
  std::ostringstream out;
  for (const auto& [op, word] : w) out << op << " := " << render(word.body) << "\n";
  return out.str();
}

}  // namespace msa

#endif  // MSA_TEXT_HPP
