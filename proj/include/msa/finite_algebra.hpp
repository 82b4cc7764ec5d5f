#ifndef MSA_FINITE_ALGEBRA_HPP
#define MSA_FINITE_ALGEBRA_HPP

#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "msa/error.hpp"
#include "msa/signature.hpp"
#include "msa/term.hpp"
#include "msa/variety.hpp"

namespace msa {

using Elem = std::uint32_t;

/** Explicit bounds on enumerations and constructions. Exceeding one throws BudgetExceeded. */
struct Budget {
  /** Candidate maps, assignments or models examined by one enumeration. */
  std::uint64_t max_maps = 1'000'000;
  /** Elements of one constructed carrier (products, generated subalgebras). */
  std::uint64_t max_elements = 1'000'000;
};

namespace detail {
inline std::uint64_t saturating_mul(std::uint64_t a, std::uint64_t b) {
  if (a == 0 || b == 0) return 0;
  if (a > std::numeric_limits<std::uint64_t>::max() / b) return std::numeric_limits<std::uint64_t>::max();
  return a * b;
}

inline std::uint64_t saturating_pow(std::uint64_t base, std::uint64_t exp) {
  std::uint64_t r = 1;
  for (std::uint64_t i = 0; i < exp; ++i) {
    r = saturating_mul(r, base);
    if (r == 0) return 0;
  }
  return r;
}
}  // namespace detail

/**
 * A finite algebra over a signature. Carriers may be empty. Elements of each sort are the
 * ids 0..n-1, each with a display name unique within its sort. Every operation has a total
 * table indexed by argument tuples in lexicographic order (first argument most significant).
 */
class FiniteAlgebra {
 public:
  FiniteAlgebra(std::shared_ptr<const Signature> sig,
                std::vector<std::vector<std::string>> carriers,
                std::vector<std::vector<Elem>> tables)
      : sig_(std::move(sig)), carriers_(std::move(carriers)), tables_(std::move(tables)) {
    if (!sig_) throw ModelError("algebra without signature");
    if (carriers_.size() != sig_->sorts().size()) {
      throw ModelError("expected " + std::to_string(sig_->sorts().size()) + " carriers, got " +
                       std::to_string(carriers_.size()));
    }
    if (tables_.size() != sig_->ops().size()) {
      throw ModelError("expected " + std::to_string(sig_->ops().size()) + " tables, got " +
                       std::to_string(tables_.size()));
    }
    for (std::size_t s = 0; s < carriers_.size(); ++s) {
      std::set<std::string> seen;
      for (const auto& n : carriers_[s]) {
        if (!seen.insert(n).second) {
          throw ModelError("element '" + n + "' listed twice in sort '" + sig_->sorts()[s] + "'");
        }
      }
    }
    arg_sorts_.resize(tables_.size());
    result_sort_.resize(tables_.size());
    for (std::size_t o = 0; o < tables_.size(); ++o) {
      const OpDecl& op = sig_->ops()[o];
      std::uint64_t expected = 1;
      for (const auto& a : op.type.args) {
        std::size_t s = sig_->require_sort(a);
        arg_sorts_[o].push_back(s);
        expected *= carriers_[s].size();
      }
      result_sort_[o] = sig_->require_sort(op.type.result);
      if (tables_[o].size() != expected) {
        throw ModelError("table of '" + op.name + "' has " + std::to_string(tables_[o].size()) +
                         " entries, expected " + std::to_string(expected));
      }
      const std::size_t out_size = carriers_[result_sort_[o]].size();
      if (expected > 0 && out_size == 0) {
        throw ModelError("operation '" + op.name + "' maps into the empty carrier of sort '" +
                         op.type.result + "'");
      }
      for (Elem e : tables_[o]) {
        if (e >= out_size) throw ModelError("table of '" + op.name + "' leaves its result carrier");
      }
    }
  }

  const Signature& signature() const { return *sig_; }
  const std::shared_ptr<const Signature>& signature_ptr() const { return sig_; }

  std::size_t sort_count() const { return carriers_.size(); }
  std::size_t carrier_size(std::size_t sort) const { return carriers_[sort].size(); }
  std::size_t carrier_size(std::string_view sort) const {
    return carriers_[sig_->require_sort(sort)].size();
  }
  const std::vector<std::string>& carrier(std::size_t sort) const { return carriers_[sort]; }
  const std::vector<std::vector<std::string>>& carriers() const { return carriers_; }
  const std::string& element_name(std::size_t sort, Elem e) const { return carriers_[sort][e]; }

  std::optional<Elem> find_element(std::size_t sort, std::string_view name) const {
    for (std::size_t i = 0; i < carriers_[sort].size(); ++i) {
      if (carriers_[sort][i] == name) return static_cast<Elem>(i);
    }
    return std::nullopt;
  }

  std::size_t total_size() const {
    std::size_t n = 0;
    for (const auto& c : carriers_) n += c.size();
    return n;
  }

  const std::vector<std::size_t>& arg_sorts(std::size_t op) const { return arg_sorts_[op]; }
  std::size_t result_sort(std::size_t op) const { return result_sort_[op]; }
  const std::vector<Elem>& table(std::size_t op) const { return tables_[op]; }
  const std::vector<std::vector<Elem>>& tables() const { return tables_; }

  std::size_t table_index(std::size_t op, std::span<const Elem> args) const {
    std::size_t idx = 0;
    const auto& sorts = arg_sorts_[op];
    for (std::size_t i = 0; i < sorts.size(); ++i) idx = idx * carriers_[sorts[i]].size() + args[i];
    return idx;
  }

  Elem apply(std::size_t op, std::span<const Elem> args) const {
    return tables_[op][table_index(op, args)];
  }

  /** Same carriers (by size and name) and same tables; signatures compared by value. */
  friend bool operator==(const FiniteAlgebra& a, const FiniteAlgebra& b) {
    return *a.sig_ == *b.sig_ && a.carriers_ == b.carriers_ && a.tables_ == b.tables_;
  }

  /** Same carrier sizes and tables, ignoring element names. */
  bool same_tables(const FiniteAlgebra& other) const {
    if (!(*sig_ == *other.sig_) || tables_ != other.tables_) return false;
    for (std::size_t s = 0; s < carriers_.size(); ++s) {
      if (carriers_[s].size() != other.carriers_[s].size()) return false;
    }
    return true;
  }

 private:
  std::shared_ptr<const Signature> sig_;
  std::vector<std::vector<std::string>> carriers_;
  std::vector<std::vector<Elem>> tables_;
  std::vector<std::vector<std::size_t>> arg_sorts_;
  std::vector<std::size_t> result_sort_;
};

/** Variable name to element id; each id lives in the carrier of the variable's sort. */
using Assignment = std::map<std::string, Elem>;

/**
 * A term flattened into a postfix program against a fixed alphabet, so it can be
 * evaluated repeatedly under alphabet-aligned assignments without name lookups.
 */
class CompiledTerm {
 public:
  CompiledTerm(const Signature& sig, const Term& t, const SortedAlphabet& alphabet) {
    sort_ = sig.require_sort(t.sort());
    compile(sig, t, alphabet);
  }

  Elem eval(const FiniteAlgebra& alg, std::span<const Elem> values) const {
    std::vector<Elem> stack;
    stack.reserve(code_.size());
    for (const auto& ins : code_) {
      if (ins.op < 0) {
        stack.push_back(values[ins.slot]);
      } else {
        const std::size_t n = ins.slot;
        Elem r = alg.apply(static_cast<std::size_t>(ins.op),
                           std::span<const Elem>(stack.data() + stack.size() - n, n));
        stack.resize(stack.size() - n);
        stack.push_back(r);
      }
    }
    return stack.back();
  }

  std::size_t sort() const { return sort_; }

 private:
  struct Instruction {
    long op;           // < 0: load variable
    std::size_t slot;  // variable slot, or operation arity
  };

  void compile(const Signature& sig, const Term& t, const SortedAlphabet& alphabet) {
    if (t.is_variable()) {
      auto idx = alphabet.find(t.name());
      if (!idx) throw UnboundVariable(t.name());
      if (alphabet[*idx].sort != t.sort()) {
        throw SortError("variable '" + t.name() + "' has sort '" + t.sort() + "' but '" +
                        alphabet[*idx].sort + "' in the alphabet");
      }
      code_.push_back({-1, *idx});
      return;
    }
    for (const auto& c : t.children()) compile(sig, c, alphabet);
    auto op = sig.op_index(t.name());
    if (!op) throw SortError("undeclared operation '" + t.name() + "'");
    code_.push_back({static_cast<long>(*op), t.children().size()});
  }

  std::vector<Instruction> code_;
  std::size_t sort_ = 0;
};

/** Number of assignments of the alphabet into alg (saturating). */
inline std::uint64_t assignment_count(const FiniteAlgebra& alg, const SortedAlphabet& alphabet) {
  std::uint64_t n = 1;
  for (const auto& v : alphabet) {
    n = detail::saturating_mul(n, alg.carrier_size(v.sort));
  }
  return n;
}

/**
 * Calls fn for every alphabet-aligned assignment into alg, in lexicographic order, until fn
 * returns false. No calls happen when a needed carrier is empty.
 */
template <class Fn>
void for_each_assignment(const FiniteAlgebra& alg, const SortedAlphabet& alphabet,
                         const Budget& budget, Fn&& fn) {
  const std::uint64_t total = assignment_count(alg, alphabet);
  if (total == 0) return;
  if (total > budget.max_maps) throw BudgetExceeded("assignment enumeration", total, budget.max_maps);
  std::vector<std::size_t> sizes;
  for (const auto& v : alphabet) sizes.push_back(alg.carrier_size(v.sort));
  std::vector<Elem> cur(alphabet.size(), 0);
  while (true) {
    if (!fn(std::span<const Elem>(cur))) return;
    std::size_t k = cur.size();
    while (k > 0) {
      --k;
      if (++cur[k] < sizes[k]) break;
      cur[k] = 0;
      if (k == 0) return;
    }
    if (cur.empty()) return;
  }
}

inline std::vector<Elem> to_values(const SortedAlphabet& alphabet, const Assignment& a) {
  std::vector<Elem> values;
  for (const auto& v : alphabet) {
    auto it = a.find(v.name);
    if (it == a.end()) throw UnboundVariable(v.name);
    values.push_back(it->second);
  }
  return values;
}

inline Assignment to_assignment(const SortedAlphabet& alphabet, std::span<const Elem> values) {
  Assignment a;
  for (std::size_t i = 0; i < alphabet.size(); ++i) a[alphabet[i].name] = values[i];
  return a;
}

inline Elem eval(const FiniteAlgebra& alg, const Term& t, const Assignment& a) {
  const Signature& sig = alg.signature();
  if (t.is_variable()) {
    auto it = a.find(t.name());
    if (it == a.end()) throw UnboundVariable(t.name());
    const std::size_t s = sig.require_sort(t.sort());
    if (it->second >= alg.carrier_size(s)) {
      throw SortError("value of '" + t.name() + "' is outside the carrier of sort '" + t.sort() + "'");
    }
    return it->second;
  }
  auto op = sig.op_index(t.name());
  if (!op) throw SortError("undeclared operation '" + t.name() + "'");
  std::vector<Elem> args;
  args.reserve(t.children().size());
  for (const auto& c : t.children()) args.push_back(eval(alg, c, a));
  return alg.apply(*op, args);
}

/** Alphabet-aligned assignment on which an identity fails, if any. */
inline std::optional<std::vector<Elem>> find_identity_violation(const FiniteAlgebra& alg,
                                                                const Identity& id,
                                                                const Budget& budget = {}) {
  const Signature& sig = alg.signature();
  CompiledTerm lhs(sig, id.lhs, id.alphabet);
  CompiledTerm rhs(sig, id.rhs, id.alphabet);
  std::optional<std::vector<Elem>> found;
  for_each_assignment(alg, id.alphabet, budget, [&](std::span<const Elem> values) {
    if (lhs.eval(alg, values) != rhs.eval(alg, values)) {
      found.emplace(values.begin(), values.end());
      return false;
    }
    return true;
  });
  return found;
}

inline bool satisfies_identity(const FiniteAlgebra& alg, const Identity& id,
                               const Budget& budget = {}) {
  return !find_identity_violation(alg, id, budget).has_value();
}

struct VarietyViolation {
  std::size_t identity;
  std::vector<Elem> assignment;
};

inline std::optional<VarietyViolation> first_variety_violation(const FiniteAlgebra& alg,
                                                               const VarietySpec& v,
                                                               const Budget& budget = {}) {
  for (std::size_t i = 0; i < v.identities.size(); ++i) {
    if (auto bad = find_identity_violation(alg, v.identities[i], budget)) {
      return VarietyViolation{i, std::move(*bad)};
    }
  }
  return std::nullopt;
}

inline bool in_variety(const FiniteAlgebra& alg, const VarietySpec& v, const Budget& budget = {}) {
  return !first_variety_violation(alg, v, budget).has_value();
}

/** A per-sort function between carriers; entry [s][e] is the image of element e of sort s. */
struct SortedMap {
  std::vector<std::vector<Elem>> images;

  friend auto operator<=>(const SortedMap&, const SortedMap&) = default;
};

inline SortedMap identity_map(const FiniteAlgebra& a) {
  SortedMap m;
  for (std::size_t s = 0; s < a.sort_count(); ++s) {
    std::vector<Elem> row(a.carrier_size(s));
    for (std::size_t e = 0; e < row.size(); ++e) row[e] = static_cast<Elem>(e);
    m.images.push_back(std::move(row));
  }
  return m;
}

/** Witness that a sorted map is not a homomorphism. */
struct HomViolation {
  std::size_t op;
  std::vector<Elem> args;  // in the domain
  Elem image_of_result;    // phi(op_A(args))
  Elem result_of_images;   // op_B(phi(args))
};

/** Checks that phi is a well-formed sorted map A -> B (right shape, values in range). */
inline bool is_sorted_map(const SortedMap& phi, const FiniteAlgebra& a, const FiniteAlgebra& b) {
  if (phi.images.size() != a.sort_count() || b.sort_count() != a.sort_count()) return false;
  for (std::size_t s = 0; s < a.sort_count(); ++s) {
    if (phi.images[s].size() != a.carrier_size(s)) return false;
    for (Elem e : phi.images[s]) {
      if (e >= b.carrier_size(s)) return false;
    }
  }
  return true;
}

inline std::optional<HomViolation> find_hom_violation(const SortedMap& phi, const FiniteAlgebra& a,
                                                      const FiniteAlgebra& b) {
  if (!is_sorted_map(phi, a, b)) throw ModelError("not a sorted map between the given carriers");
  for (std::size_t o = 0; o < a.signature().ops().size(); ++o) {
    const auto& sorts = a.arg_sorts(o);
    const auto& table = a.table(o);
    std::vector<Elem> args(sorts.size(), 0);
    std::vector<Elem> mapped(sorts.size(), 0);
    for (std::size_t idx = 0; idx < table.size(); ++idx) {
      // decode idx into args, first argument most significant
      std::size_t rest = idx;
      for (std::size_t i = sorts.size(); i > 0; --i) {
        const std::size_t n = a.carrier_size(sorts[i - 1]);
        args[i - 1] = static_cast<Elem>(rest % n);
        rest /= n;
      }
      for (std::size_t i = 0; i < sorts.size(); ++i) mapped[i] = phi.images[sorts[i]][args[i]];
      const Elem lhs = phi.images[a.result_sort(o)][table[idx]];
      const Elem rhs = b.apply(o, mapped);
      if (lhs != rhs) return HomViolation{o, args, lhs, rhs};
    }
  }
  return std::nullopt;
}

inline bool is_homomorphism(const SortedMap& phi, const FiniteAlgebra& a, const FiniteAlgebra& b) {
  return !find_hom_violation(phi, a, b).has_value();
}

inline bool is_embedding(const SortedMap& phi, const FiniteAlgebra& a, const FiniteAlgebra& b) {
  if (!is_homomorphism(phi, a, b)) return false;
  for (const auto& row : phi.images) {
    std::set<Elem> seen(row.begin(), row.end());
    if (seen.size() != row.size()) return false;
  }
  return true;
}

/** Every homomorphism A -> B, in lexicographic order of their image vectors. */
inline std::vector<SortedMap> enumerate_homs(const FiniteAlgebra& a, const FiniteAlgebra& b,
                                             const Budget& budget = {}) {
  std::uint64_t total = 1;
  std::vector<std::pair<std::size_t, Elem>> cells;  // (sort, element) in map order
  for (std::size_t s = 0; s < a.sort_count(); ++s) {
    total = detail::saturating_mul(
        total, detail::saturating_pow(b.carrier_size(s), a.carrier_size(s)));
    for (std::size_t e = 0; e < a.carrier_size(s); ++e) cells.emplace_back(s, static_cast<Elem>(e));
  }
  std::vector<SortedMap> out;
  if (total == 0) return out;  // some sort is inhabited in A but empty in B
  if (total > budget.max_maps) throw BudgetExceeded("homomorphism enumeration", total, budget.max_maps);
  SortedMap phi;
  for (std::size_t s = 0; s < a.sort_count(); ++s) phi.images.emplace_back(a.carrier_size(s), 0);
  while (true) {
    if (is_homomorphism(phi, a, b)) out.push_back(phi);
    std::size_t k = cells.size();
    bool done = true;
    while (k > 0) {
      --k;
      auto [s, e] = cells[k];
      if (++phi.images[s][e] < b.carrier_size(s)) {
        done = false;
        break;
      }
      phi.images[s][e] = 0;
    }
    if (done) break;
  }
  return out;
}

struct Subalgebra {
  FiniteAlgebra algebra;
  /** Inclusion of the subalgebra into the parent. */
  SortedMap inclusion;
};

/**
 * Least subalgebra containing the seed (per-sort element lists) and closed under every
 * operation, constants included. Elements keep their names and their relative order.
 */
inline Subalgebra generated_subalgebra(const FiniteAlgebra& a,
                                       const std::vector<std::vector<Elem>>& seed) {
  const std::size_t ns = a.sort_count();
  std::vector<std::vector<bool>> member(ns);
  for (std::size_t s = 0; s < ns; ++s) {
    member[s].assign(a.carrier_size(s), false);
    if (s < seed.size()) {
      for (Elem e : seed[s]) {
        if (e >= a.carrier_size(s)) throw ModelError("seed element outside its carrier");
        member[s][e] = true;
      }
    }
  }
  bool changed = true;
  while (changed) {
    changed = false;
    for (std::size_t o = 0; o < a.signature().ops().size(); ++o) {
      const auto& sorts = a.arg_sorts(o);
      std::vector<std::vector<Elem>> pools(sorts.size());
      bool empty = false;
      for (std::size_t i = 0; i < sorts.size(); ++i) {
        for (std::size_t e = 0; e < member[sorts[i]].size(); ++e) {
          if (member[sorts[i]][e]) pools[i].push_back(static_cast<Elem>(e));
        }
        if (pools[i].empty()) empty = true;
      }
      if (empty) continue;
      std::vector<std::size_t> idx(sorts.size(), 0);
      std::vector<Elem> args(sorts.size());
      while (true) {
        for (std::size_t i = 0; i < sorts.size(); ++i) args[i] = pools[i][idx[i]];
        Elem r = a.apply(o, args);
        if (!member[a.result_sort(o)][r]) {
          member[a.result_sort(o)][r] = true;
          changed = true;
        }
        std::size_t k = sorts.size();
        bool done = true;
        while (k > 0) {
          --k;
          if (++idx[k] < pools[k].size()) {
            done = false;
            break;
          }
          idx[k] = 0;
        }
        if (done) break;
      }
    }
  }

  std::vector<std::vector<std::string>> carriers(ns);
  SortedMap inclusion;
  std::vector<std::vector<Elem>> renumber(ns);
  for (std::size_t s = 0; s < ns; ++s) {
    inclusion.images.emplace_back();
    renumber[s].assign(a.carrier_size(s), 0);
    for (std::size_t e = 0; e < a.carrier_size(s); ++e) {
      if (!member[s][e]) continue;
      renumber[s][e] = static_cast<Elem>(carriers[s].size());
      carriers[s].push_back(a.element_name(s, static_cast<Elem>(e)));
      inclusion.images[s].push_back(static_cast<Elem>(e));
    }
  }
  std::vector<std::vector<Elem>> tables;
  for (std::size_t o = 0; o < a.signature().ops().size(); ++o) {
    const auto& sorts = a.arg_sorts(o);
    std::size_t count = 1;
    for (auto s : sorts) count *= carriers[s].size();
    std::vector<Elem> table(count);
    std::vector<Elem> args(sorts.size());
    for (std::size_t idx = 0; idx < count; ++idx) {
      std::size_t rest = idx;
      for (std::size_t i = sorts.size(); i > 0; --i) {
        const std::size_t n = carriers[sorts[i - 1]].size();
        args[i - 1] = inclusion.images[sorts[i - 1]][rest % n];
        rest /= n;
      }
      table[idx] = renumber[a.result_sort(o)][a.apply(o, args)];
    }
    tables.push_back(std::move(table));
  }
  return Subalgebra{FiniteAlgebra(a.signature_ptr(), std::move(carriers), std::move(tables)),
                    std::move(inclusion)};
}

/**
 * Direct product of a nonempty family over one signature. Product elements are ordered
 * lexicographically with the first factor most significant and named `(a,b,...)`.
 */
inline FiniteAlgebra product_algebra(std::span<const FiniteAlgebra> family,
                                     const Budget& budget = {}) {
  if (family.empty()) throw ModelError("product of an empty family");
  const auto& sig = family[0].signature_ptr();
  for (const auto& f : family) {
    if (!(f.signature() == *sig)) throw ModelError("product factors over different signatures");
  }
  const std::size_t ns = sig->sorts().size();
  std::vector<std::vector<std::string>> carriers(ns);
  for (std::size_t s = 0; s < ns; ++s) {
    std::uint64_t n = 1;
    for (const auto& f : family) n = detail::saturating_mul(n, f.carrier_size(s));
    if (n > budget.max_elements) throw BudgetExceeded("product carrier", n, budget.max_elements);
    for (std::uint64_t idx = 0; idx < n; ++idx) {
      std::vector<std::string> parts(family.size());
      std::uint64_t rest = idx;
      for (std::size_t k = family.size(); k > 0; --k) {
        const std::size_t m = family[k - 1].carrier_size(s);
        parts[k - 1] = family[k - 1].element_name(s, static_cast<Elem>(rest % m));
        rest /= m;
      }
      std::string name = "(";
      for (std::size_t k = 0; k < parts.size(); ++k) name += (k ? "," : "") + parts[k];
      carriers[s].push_back(name + ")");
    }
  }
  auto decode = [&](std::size_t s, Elem e, std::size_t factor) {
    std::uint64_t rest = e;
    for (std::size_t k = family.size(); k > 0; --k) {
      const std::size_t m = family[k - 1].carrier_size(s);
      if (k - 1 == factor) return static_cast<Elem>(rest % m);
      rest /= m;
    }
    return Elem{0};
  };
  auto encode = [&](std::size_t s, const std::vector<Elem>& parts) {
    std::uint64_t idx = 0;
    for (std::size_t k = 0; k < family.size(); ++k) idx = idx * family[k].carrier_size(s) + parts[k];
    return static_cast<Elem>(idx);
  };
  std::vector<std::vector<Elem>> tables;
  for (std::size_t o = 0; o < sig->ops().size(); ++o) {
    const auto& sorts = family[0].arg_sorts(o);
    const std::size_t rs = family[0].result_sort(o);
    std::size_t count = 1;
    for (auto s : sorts) count *= carriers[s].size();
    std::vector<Elem> table(count);
    std::vector<Elem> args(sorts.size());
    std::vector<Elem> factor_args(sorts.size());
    std::vector<Elem> parts(family.size());
    for (std::size_t idx = 0; idx < count; ++idx) {
      std::size_t rest = idx;
      for (std::size_t i = sorts.size(); i > 0; --i) {
        const std::size_t n = carriers[sorts[i - 1]].size();
        args[i - 1] = static_cast<Elem>(rest % n);
        rest /= n;
      }
      for (std::size_t k = 0; k < family.size(); ++k) {
        for (std::size_t i = 0; i < sorts.size(); ++i) factor_args[i] = decode(sorts[i], args[i], k);
        parts[k] = family[k].apply(o, factor_args);
      }
      table[idx] = encode(rs, parts);
    }
    tables.push_back(std::move(table));
  }
  return FiniteAlgebra(sig, std::move(carriers), std::move(tables));
}

/**
 * Every algebra of the variety with at most max_size elements per sort. Carrier sizes run
 * from 0 (or 1 for sorts with constants) up to max_size; elements are named e0, e1, ...
 * Order: carrier-size vectors lexicographically, then tables lexicographically.
 */
inline std::vector<FiniteAlgebra> enumerate_models(const VarietySpec& v, std::size_t max_size,
                                                   const Budget& budget = {},
                                                   std::size_t min_size = 0) {
  auto sig = std::make_shared<const Signature>(v.signature);
  const std::size_t ns = sig->sorts().size();
  std::vector<std::size_t> lower(ns, min_size);
  for (const auto& op : sig->ops()) {
    if (op.type.arity() == 0) {
      auto s = sig->require_sort(op.type.result);
      lower[s] = std::max<std::size_t>(lower[s], 1);
    }
  }
  std::vector<FiniteAlgebra> out;
  std::uint64_t examined = 0;
  std::vector<std::size_t> sizes = lower;
  for (auto l : lower) {
    if (l > max_size) return out;
  }
  while (true) {
    std::vector<std::vector<std::string>> carriers(ns);
    for (std::size_t s = 0; s < ns; ++s) {
      for (std::size_t e = 0; e < sizes[s]; ++e) carriers[s].push_back("e" + std::to_string(e));
    }
    std::vector<std::size_t> table_len;
    std::vector<std::size_t> out_size;
    std::uint64_t combos = 1;
    bool impossible = false;
    for (const auto& op : sig->ops()) {
      std::size_t len = 1;
      for (const auto& a : op.type.args) len *= sizes[sig->require_sort(a)];
      const std::size_t o = sizes[sig->require_sort(op.type.result)];
      if (len > 0 && o == 0) impossible = true;
      table_len.push_back(len);
      out_size.push_back(o);
      combos = detail::saturating_mul(combos, detail::saturating_pow(o, len));
    }
    if (!impossible) {
      examined += combos;
      if (examined > budget.max_maps) {
        throw BudgetExceeded("model enumeration", examined, budget.max_maps);
      }
      std::vector<std::vector<Elem>> tables(table_len.size());
      for (std::size_t o = 0; o < tables.size(); ++o) tables[o].assign(table_len[o], 0);
      while (true) {
        FiniteAlgebra alg(sig, carriers, tables);
        if (in_variety(alg, v, budget)) out.push_back(std::move(alg));
        // odometer over all table cells, last op's last cell fastest
        bool done = true;
        for (std::size_t o = tables.size(); o > 0 && done; --o) {
          for (std::size_t c = tables[o - 1].size(); c > 0; --c) {
            if (++tables[o - 1][c - 1] < out_size[o - 1]) {
              done = false;
              break;
            }
            tables[o - 1][c - 1] = 0;
          }
        }
        if (done) break;
      }
    }
    std::size_t k = ns;
    bool done = true;
    while (k > 0) {
      --k;
      if (++sizes[k] <= max_size) {
        done = false;
        break;
      }
      sizes[k] = lower[k];
    }
    if (done) break;
  }
  return out;
}

}  // namespace msa

#endif  // MSA_FINITE_ALGEBRA_HPP
