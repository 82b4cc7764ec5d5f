#ifndef MSA_TERM_HPP
#define MSA_TERM_HPP

#include <algorithm>
#include <compare>
#include <cstddef>
#include <functional>
#include <map>
#include <memory>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "msa/error.hpp"
#include "msa/signature.hpp"

namespace msa {

/**
 * Immutable sorted term: a variable or an operation applied to children.
 *
 * Terms share structure through reference-counted nodes, so copies are cheap. Equality,
 * ordering and hashing are structural. The ordering puts variables before applications,
 * then compares names, sorts and children lexicographically.
 */
class Term {
 public:
  enum class Kind { variable, application };

  static Term variable(std::string name, std::string sort) {
    auto node = std::make_shared<Node>();
    node->kind = Kind::variable;
    node->name = std::move(name);
    node->sort = std::move(sort);
    node->hash = combine(std::hash<std::string>{}(node->name), std::hash<std::string>{}(node->sort));
    node->depth = 0;
    node->leaves = 1;
    return Term(std::move(node));
  }

  /** Unchecked constructor; mk_app is the checked one. */
  static Term application(std::string op, std::string sort, std::vector<Term> children) {
    auto node = std::make_shared<Node>();
    node->kind = Kind::application;
    node->name = std::move(op);
    node->sort = std::move(sort);
    std::size_t h = combine(std::hash<std::string>{}(node->name), 0x9e3779b9u);
    std::size_t depth = 0;
    std::size_t leaves = 0;
    for (const auto& c : children) {
      h = combine(h, c.hash());
      depth = std::max(depth, c.depth() + 1);
      leaves += c.leaves();
    }
    node->hash = h;
    node->depth = depth;
    node->leaves = leaves;
    node->children = std::move(children);
    return Term(std::move(node));
  }

  Kind kind() const { return node_->kind; }
  bool is_variable() const { return node_->kind == Kind::variable; }
  /** Variable name or operation name. */
  const std::string& name() const { return node_->name; }
  const std::string& sort() const { return node_->sort; }
  std::span<const Term> children() const { return node_->children; }
  std::size_t hash() const { return node_->hash; }
  /** Height of the tree; variables and constants have depth 0. */
  std::size_t depth() const { return node_->depth; }
  /** Number of variable occurrences. */
  std::size_t leaves() const { return node_->leaves; }

  friend bool operator==(const Term& a, const Term& b) {
    if (a.node_ == b.node_) return true;
    if (a.hash() != b.hash()) return false;
    return (a <=> b) == std::strong_ordering::equal;
  }

  friend std::strong_ordering operator<=>(const Term& a, const Term& b) {
    if (a.node_ == b.node_) return std::strong_ordering::equal;
    if (a.kind() != b.kind()) {
      return a.is_variable() ? std::strong_ordering::less : std::strong_ordering::greater;
    }
    if (auto c = a.name() <=> b.name(); c != 0) return c;
    if (auto c = a.sort() <=> b.sort(); c != 0) return c;
    auto ac = a.children();
    auto bc = b.children();
    for (std::size_t i = 0; i < std::min(ac.size(), bc.size()); ++i) {
      if (auto c = ac[i] <=> bc[i]; c != 0) return c;
    }
    return ac.size() <=> bc.size();
  }

 private:
  struct Node {
    Kind kind = Kind::variable;
    std::string name;
    std::string sort;
    std::vector<Term> children;
    std::size_t hash = 0;
    std::size_t depth = 0;
    std::size_t leaves = 0;
  };

  explicit Term(std::shared_ptr<const Node> node) : node_(std::move(node)) {}

  static std::size_t combine(std::size_t seed, std::size_t v) {
    return seed ^ (v + 0x9e3779b97f4a7c15ull + (seed << 6) + (seed >> 2));
  }

  std::shared_ptr<const Node> node_;
};

struct TermHash {
  std::size_t operator()(const Term& t) const { return t.hash(); }
};

/** A same-sorted pair of terms: an equation or an identity body. */
struct TermPair {
  Term lhs;
  Term rhs;

  friend auto operator<=>(const TermPair&, const TermPair&) = default;
  friend bool operator==(const TermPair&, const TermPair&) = default;
};

/** Sort-preserving map from variable names to terms. */
using TermAssignment = std::map<std::string, Term>;

inline Term mk_var(std::string name, std::string sort) {
  return Term::variable(std::move(name), std::move(sort));
}

inline Term mk_app(const Signature& sig, std::string_view op, std::vector<Term> children) {
  const OpDecl& decl = sig.require_op(op);
  if (children.size() != decl.type.arity()) {
    throw SortError("operation '" + decl.name + "' expects " + std::to_string(decl.type.arity()) +
                    " arguments, got " + std::to_string(children.size()));
  }
  for (std::size_t i = 0; i < children.size(); ++i) {
    if (children[i].sort() != decl.type.args[i]) {
      throw SortError("argument " + std::to_string(i) + " of '" + decl.name + "' has sort '" +
                      children[i].sort() + "', expected '" + decl.type.args[i] + "'");
    }
  }
  return Term::application(decl.name, decl.type.result, std::move(children));
}

/** Recursive validator for the application invariant. Returns an empty string when sound. */
inline std::string check_sorts(const Signature& sig, const Term& t) {
  if (t.is_variable()) {
    return sig.has_sort(t.sort()) ? "" : "variable '" + t.name() + "' has undeclared sort";
  }
  const OpDecl* decl = sig.find_op(t.name());
  if (!decl) return "undeclared operation '" + t.name() + "'";
  if (decl->type.result != t.sort()) return "wrong result sort on '" + t.name() + "'";
  if (decl->type.arity() != t.children().size()) return "arity mismatch on '" + t.name() + "'";
  for (std::size_t i = 0; i < t.children().size(); ++i) {
    if (t.children()[i].sort() != decl->type.args[i]) {
      return "argument " + std::to_string(i) + " of '" + t.name() + "' has wrong sort";
    }
    if (auto e = check_sorts(sig, t.children()[i]); !e.empty()) return e;
  }
  return "";
}

namespace detail {
inline void collect_vars(const Term& t, std::map<std::string, std::string>& out) {
  if (t.is_variable()) {
    auto [it, inserted] = out.emplace(t.name(), t.sort());
    if (!inserted && it->second != t.sort()) {
      throw SortError("variable '" + t.name() + "' used with sorts '" + it->second + "' and '" +
                      t.sort() + "'");
    }
    return;
  }
  for (const auto& c : t.children()) collect_vars(c, out);
}
}  // namespace detail

/** Variables occurring in t, ordered by name. */
inline SortedAlphabet vars_of(const Term& t) {
  std::map<std::string, std::string> seen;
  detail::collect_vars(t, seen);
  SortedAlphabet out;
  for (auto& [name, sort] : seen) out.add(name, sort);
  return out;
}

inline bool occurs(const Term& t, std::string_view var) {
  if (t.is_variable()) return t.name() == var;
  for (const auto& c : t.children()) {
    if (occurs(c, var)) return true;
  }
  return false;
}

inline Term substitute(const Term& t, const TermAssignment& a) {
  if (t.is_variable()) {
    auto it = a.find(t.name());
    if (it == a.end()) throw UnboundVariable(t.name());
    if (it->second.sort() != t.sort()) {
      throw SortError("binding for '" + t.name() + "' has sort '" + it->second.sort() +
                      "', expected '" + t.sort() + "'");
    }
    return it->second;
  }
  std::vector<Term> children;
  children.reserve(t.children().size());
  for (const auto& c : t.children()) children.push_back(substitute(c, a));
  return Term::application(t.name(), t.sort(), std::move(children));
}

/**
 * All well-sorted terms over the alphabet of depth <= max_depth, each once. Order is
 * depth-major, then the structural term order within a depth.
 */
inline std::vector<Term> enumerate_terms(const Signature& sig, const SortedAlphabet& alphabet,
                                         std::size_t max_depth,
                                         std::size_t max_terms = 5'000'000) {
  std::vector<Term> out;
  // by_sort[s] holds every term found so far; level_start[s] marks the first term of the
  // previous depth, which every new application must use at least once.
  std::map<std::string, std::vector<Term>> by_sort;
  std::map<std::string, std::size_t> prev_start;

  std::vector<Term> level;
  for (const auto& v : alphabet) level.push_back(mk_var(v.name, v.sort));
  for (const auto& op : sig.ops()) {
    if (op.type.arity() == 0) level.push_back(Term::application(op.name, op.type.result, {}));
  }
  std::sort(level.begin(), level.end());
  for (std::size_t depth = 0;; ++depth) {
    for (const auto& s : sig.sorts()) prev_start[s] = by_sort[s].size();
    for (const auto& t : level) by_sort[t.sort()].push_back(t);
    out.insert(out.end(), level.begin(), level.end());
    if (out.size() > max_terms) throw BudgetExceeded("term enumeration", out.size(), max_terms);
    if (depth == max_depth) break;

    level.clear();
    for (const auto& op : sig.ops()) {
      const std::size_t n = op.type.arity();
      if (n == 0) continue;
      std::vector<const std::vector<Term>*> pools;
      bool empty = false;
      for (const auto& s : op.type.args) {
        pools.push_back(&by_sort[s]);
        if (by_sort[s].empty()) empty = true;
      }
      if (empty) continue;
      std::vector<std::size_t> idx(n, 0);
      while (true) {
        bool uses_previous_level = false;
        for (std::size_t i = 0; i < n; ++i) {
          if (idx[i] >= prev_start[op.type.args[i]]) uses_previous_level = true;
        }
        if (uses_previous_level) {
          std::vector<Term> children;
          for (std::size_t i = 0; i < n; ++i) children.push_back((*pools[i])[idx[i]]);
          level.push_back(Term::application(op.name, op.type.result, std::move(children)));
          if (out.size() + level.size() > max_terms) {
            throw BudgetExceeded("term enumeration", out.size() + level.size(), max_terms);
          }
        }
        std::size_t k = n;
        while (k > 0) {
          --k;
          if (++idx[k] < pools[k]->size()) break;
          idx[k] = 0;
          if (k == 0) {
            k = n + 1;
            break;
          }
        }
        if (k == n + 1) break;
      }
    }
    if (level.empty()) break;
    std::sort(level.begin(), level.end());
  }
  return out;
}

/** Renders `op(child,...)`, bare variable names, and `c` for constants. */
inline std::string render(const Term& t) {
  if (t.is_variable() || t.children().empty()) return t.name();
  std::string out = t.name() + "(";
  for (std::size_t i = 0; i < t.children().size(); ++i) {
    if (i) out += ",";
    out += render(t.children()[i]);
  }
  return out + ")";
}

inline std::string render(const TermPair& p) { return render(p.lhs) + " = " + render(p.rhs); }

}  // namespace msa

#endif  // MSA_TERM_HPP
