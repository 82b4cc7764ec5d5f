#ifndef MSA_SIGNATURE_HPP
#define MSA_SIGNATURE_HPP

#include <algorithm>
#include <compare>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "msa/error.hpp"

namespace msa {

/** Type (i1,...,in; j) of an operation symbol. An empty argument list is a constant. */
struct OpType {
  std::vector<std::string> args;
  std::string result;

  std::size_t arity() const { return args.size(); }
  friend auto operator<=>(const OpType&, const OpType&) = default;
};

struct OpDecl {
  std::string name;
  OpType type;

  friend auto operator<=>(const OpDecl&, const OpDecl&) = default;
};

/**
 * A finite many-sorted signature.
 *
 * Sorts and operations are kept in lexicographic order of their names, which is the
 * canonical order used by every enumeration in the library. Duplicates are kept so that
 * validate_signature can report them; lookups return the first match.
 */
class Signature {
 public:
  Signature() = default;

  Signature(std::vector<std::string> sorts, std::vector<OpDecl> ops)
      : sorts_(std::move(sorts)), ops_(std::move(ops)) {
    std::stable_sort(sorts_.begin(), sorts_.end());
    std::stable_sort(ops_.begin(), ops_.end(),
                     [](const OpDecl& a, const OpDecl& b) { return a.name < b.name; });
  }

  const std::vector<std::string>& sorts() const { return sorts_; }
  const std::vector<OpDecl>& ops() const { return ops_; }

  std::optional<std::size_t> sort_index(std::string_view name) const {
    auto it = std::lower_bound(sorts_.begin(), sorts_.end(), name);
    if (it == sorts_.end() || *it != name) return std::nullopt;
    return static_cast<std::size_t>(it - sorts_.begin());
  }

  std::size_t require_sort(std::string_view name) const {
    auto idx = sort_index(name);
    if (!idx) throw SortError("undeclared sort '" + std::string(name) + "'");
    return *idx;
  }

  bool has_sort(std::string_view name) const { return sort_index(name).has_value(); }

  std::optional<std::size_t> op_index(std::string_view name) const {
    auto it = std::lower_bound(ops_.begin(), ops_.end(), name,
                               [](const OpDecl& d, std::string_view n) { return d.name < n; });
    if (it == ops_.end() || it->name != name) return std::nullopt;
    return static_cast<std::size_t>(it - ops_.begin());
  }

  const OpDecl* find_op(std::string_view name) const {
    auto idx = op_index(name);
    return idx ? &ops_[*idx] : nullptr;
  }

  const OpDecl& require_op(std::string_view name) const {
    const OpDecl* d = find_op(name);
    if (!d) throw SortError("undeclared operation '" + std::string(name) + "'");
    return *d;
  }

  friend bool operator==(const Signature&, const Signature&) = default;

 private:
  std::vector<std::string> sorts_;
  std::vector<OpDecl> ops_;
};

struct Variable {
  std::string name;
  std::string sort;

  friend auto operator<=>(const Variable&, const Variable&) = default;
};

/**
 * A finite sorted set of variables (the sorting X -> sorts). Positional: the order of
 * insertion is the order generators are listed in, and assignments are aligned with it.
 */
class SortedAlphabet {
 public:
  SortedAlphabet() = default;
  SortedAlphabet(std::initializer_list<Variable> vars) {
    for (const auto& v : vars) add(v.name, v.sort);
  }

  /** Throws SortError if the name is already declared. */
  void add(std::string name, std::string sort) {
    if (find(name)) throw SortError("variable '" + name + "' declared twice");
    vars_.push_back(Variable{std::move(name), std::move(sort)});
  }

  std::optional<std::size_t> find(std::string_view name) const {
    for (std::size_t i = 0; i < vars_.size(); ++i) {
      if (vars_[i].name == name) return i;
    }
    return std::nullopt;
  }

  const Variable& operator[](std::size_t i) const { return vars_[i]; }
  std::size_t size() const { return vars_.size(); }
  bool empty() const { return vars_.empty(); }
  auto begin() const { return vars_.begin(); }
  auto end() const { return vars_.end(); }
  const std::vector<Variable>& vars() const { return vars_; }

  friend bool operator==(const SortedAlphabet&, const SortedAlphabet&) = default;

 private:
  std::vector<Variable> vars_;
};

struct ValidationReport {
  std::vector<std::string> violations;

  bool ok() const { return violations.empty(); }
};

inline ValidationReport validate_signature(const Signature& sig) {
  ValidationReport report;
  if (sig.sorts().empty()) report.violations.push_back("no sorts declared");
  const auto& sorts = sig.sorts();
  for (std::size_t i = 1; i < sorts.size(); ++i) {
    if (sorts[i] == sorts[i - 1]) report.violations.push_back("duplicate sort '" + sorts[i] + "'");
  }
  const auto& ops = sig.ops();
  for (std::size_t i = 0; i < ops.size(); ++i) {
    if (i > 0 && ops[i].name == ops[i - 1].name) {
      report.violations.push_back("duplicate operation '" + ops[i].name + "'");
    }
    for (const auto& s : ops[i].type.args) {
      if (!sig.has_sort(s)) {
        report.violations.push_back("undeclared sort '" + s + "' in operation '" + ops[i].name + "'");
      }
    }
    if (!sig.has_sort(ops[i].type.result)) {
      report.violations.push_back("undeclared sort '" + ops[i].type.result + "' in operation '" +
                                  ops[i].name + "'");
    }
  }
  return report;
}

}  // namespace msa

#endif  // MSA_SIGNATURE_HPP
