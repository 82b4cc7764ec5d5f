#ifndef MSA_CLOSURE_HPP
#define MSA_CLOSURE_HPP

// Solution sets, algebraic closures and geometric equivalence over finite algebras.
//
// A closed congruence over H is stored as the set S of assignments defining it and the
// subalgebra D of H^S generated by the generator tuples; the congruence is the kernel of
// the diagonal map F(X) -> D. Comparisons never touch pair sets.

#include <algorithm>
#include <cstdint>
#include <deque>
#include <future>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include "msa/diagonal.hpp"
#include "msa/error.hpp"
#include "msa/finite_algebra.hpp"
#include "msa/free_forms.hpp"
#include "msa/term.hpp"
#include "msa/words.hpp"

namespace msa {

struct SolutionSet {
  SortedAlphabet alphabet;
  /** Alphabet-aligned assignments, lexicographic. */
  std::vector<std::vector<Elem>> assignments;

  std::size_t size() const { return assignments.size(); }
  bool empty() const { return assignments.empty(); }
};

namespace detail {
inline void check_system(const Signature& sig, const EquationSystem& t) {
  for (const auto& v : t.alphabet) sig.require_sort(v.sort);
  for (const auto& p : t.pairs) {
    if (p.lhs.sort() != p.rhs.sort()) throw SortError("equation '" + render(p) + "' mixes sorts");
  }
}

struct CompiledPair {
  CompiledTerm lhs;
  CompiledTerm rhs;
};

inline std::vector<CompiledPair> compile_pairs(const Signature& sig, const SortedAlphabet& x,
                                               const std::vector<TermPair>& pairs) {
  std::vector<CompiledPair> out;
  for (const auto& p : pairs) out.push_back({CompiledTerm(sig, p.lhs, x), CompiledTerm(sig, p.rhs, x)});
  return out;
}
}  // namespace detail

/** T'_H: the assignments X -> H equalizing every pair of T. */
inline SolutionSet solutions(const EquationSystem& t, const FiniteAlgebra& h, const Budget& budget = {}) {
  detail::check_system(h.signature(), t);
  const auto compiled = detail::compile_pairs(h.signature(), t.alphabet, t.pairs);
  SolutionSet s{t.alphabet, {}};
  for_each_assignment(h, t.alphabet, budget, [&](std::span<const Elem> a) {
    for (const auto& p : compiled) {
      if (p.lhs.eval(h, a) != p.rhs.eval(h, a)) return true;
    }
    s.assignments.emplace_back(a.begin(), a.end());
    return true;
  });
  return s;
}

/** Whether the pair lies in T''_H. Vacuously true when T has no solutions. */
inline bool closure_member(const EquationSystem& t, const FiniteAlgebra& h, const TermPair& pair,
                           const Budget& budget = {}) {
  if (pair.lhs.sort() != pair.rhs.sort()) throw SortError("query '" + render(pair) + "' mixes sorts");
  const SolutionSet s = solutions(t, h, budget);
  const CompiledTerm l(h.signature(), pair.lhs, t.alphabet);
  const CompiledTerm r(h.signature(), pair.rhs, t.alphabet);
  return std::all_of(s.assignments.begin(), s.assignments.end(),
                     [&](const auto& a) { return l.eval(h, a) == r.eval(h, a); });
}

/** The closed congruence cut out by a set of assignments into H. */
struct ClosedCongruence {
  SortedAlphabet alphabet;
  std::shared_ptr<const FiniteAlgebra> target;
  std::vector<std::vector<Elem>> witnesses;
  GeneratedAlgebra diagonal;

  bool contains(const TermPair& p) const {
    const Signature& sig = target->signature();
    const CompiledTerm l(sig, p.lhs, alphabet);
    const CompiledTerm r(sig, p.rhs, alphabet);
    return std::all_of(witnesses.begin(), witnesses.end(),
                       [&](const auto& a) { return l.eval(*target, a) == r.eval(*target, a); });
  }
};

inline ClosedCongruence closed_congruence(const FiniteAlgebra& h, const SortedAlphabet& x,
                                          std::vector<std::vector<Elem>> assignments,
                                          const Budget& budget = {}) {
  auto target = std::make_shared<const FiniteAlgebra>(h);
  GeneratedAlgebra d = generate_diagonal(*target, x, assignments, budget);
  return ClosedCongruence{x, std::move(target), std::move(assignments), std::move(d)};
}

/** T''_H as a closed congruence. */
inline ClosedCongruence algebraic_closure(const EquationSystem& t, const FiniteAlgebra& h,
                                          const Budget& budget = {}) {
  return closed_congruence(h, t.alphabet, solutions(t, h, budget).assignments, budget);
}

/**
 * Outcome of comparing two congruences. When they differ, `witness` lies in exactly one
 * of them: the first when `in_first` is set, otherwise the second.
 */
struct ClosureComparison {
  bool equal = true;
  std::optional<TermPair> witness;
  bool in_first = false;
};

namespace detail {
inline ClosureComparison compare_blocks(const Signature& sig, const SortedAlphabet& x,
                                        std::span<const Component> comps, std::size_t split, const Budget& budget) {
  if (auto hit = first_block_collision(sig, x, comps, split, budget)) return {false, hit->pair, hit->first_block};
  return {};
}
}  // namespace detail

/** Compares the kernels of two generated algebras over the same alphabet. */
inline ClosureComparison compare_kernels(const GeneratedAlgebra& d1, const GeneratedAlgebra& d2,
                                         const Budget& budget = {}) {
  if (!(d1.alphabet == d2.alphabet)) throw Error("comparing congruences over different alphabets");
  const Component comps[] = {d1.as_component(), d2.as_component()};
  return detail::compare_blocks(d1.algebra.signature(), d1.alphabet, comps, 1, budget);
}

/**
 * Exact comparison of T''_{H1} and T''_{H2}: the product over both solution sets is
 * generated without tables, stopping at the first element that one side cannot separate
 * from an earlier one.
 */
inline ClosureComparison closure_equal(const EquationSystem& t, const FiniteAlgebra& h1,
                                       const FiniteAlgebra& h2, const Budget& budget = {}) {
  if (!(h1.signature() == h2.signature())) throw SortError("algebras over different signatures");
  const SolutionSet s1 = solutions(t, h1, budget);
  const SolutionSet s2 = solutions(t, h2, budget);
  std::vector<Component> comps;
  for (const auto& a : s1.assignments) comps.push_back(Component{&h1, a});
  for (const auto& a : s2.assignments) comps.push_back(Component{&h2, a});
  return detail::compare_blocks(h1.signature(), t.alphabet, comps, s1.size(), budget);
}

/** A pair of the congruence that the homomorphisms into H fail to separate. */
struct ClosednessReport {
  bool closed = true;
  std::optional<TermPair> witness;
};

/**
 * Whether the kernel of F(X) -> q is closed over h: the homomorphisms q -> h, i.e. the
 * assignments factoring through q, separate the elements of q.
 */
inline ClosednessReport closed_over(const GeneratedAlgebra& q, const FiniteAlgebra& h,
                                    const Budget& budget = {}) {
  const std::size_t ns = q.algebra.sort_count();
  // signature of each element: its images under the factoring homomorphisms
  std::vector<std::vector<std::vector<Elem>>> sig(ns);
  for (std::size_t s = 0; s < ns; ++s) sig[s].resize(q.algebra.carrier_size(s));
  std::vector<std::size_t> classes(ns, 0);
  auto separated = [&] {
    for (std::size_t s = 0; s < ns; ++s) {
      if (classes[s] != sig[s].size()) return false;
    }
    return true;
  };
  auto count_classes = [&] {
    for (std::size_t s = 0; s < ns; ++s) {
      std::set<std::vector<Elem>> distinct(sig[s].begin(), sig[s].end());
      classes[s] = distinct.size();
    }
  };
  count_classes();
  if (!separated()) {
    for_each_assignment(h, q.alphabet, budget, [&](std::span<const Elem> a) {
      auto f = factor_through(q, h, a);
      if (!f) return true;
      for (std::size_t s = 0; s < ns; ++s) {
        for (std::size_t e = 0; e < sig[s].size(); ++e) sig[s][e].push_back(f->images[s][e]);
      }
      count_classes();
      return !separated();
    });
  }
  for (std::size_t s = 0; s < ns; ++s) {
    std::map<std::vector<Elem>, std::size_t> first;
    for (std::size_t e = 0; e < sig[s].size(); ++e) {
      auto [it, inserted] = first.emplace(sig[s][e], e);
      if (!inserted) return {false, TermPair{q.reach[s][it->second], q.reach[s][e]}};
    }
  }
  return {};
}

namespace detail {
/** Ground congruence closure on the subterms of a fixed set of terms. */
class CongruenceClosure {
 public:
  std::size_t intern(const Term& t) {
    auto it = ids_.find(t);
    if (it != ids_.end()) return it->second;
    std::vector<std::size_t> kids;
    for (const auto& c : t.children()) kids.push_back(intern(c));
    const std::size_t id = nodes_.size();
    nodes_.push_back({t.is_variable() ? "$" + t.name() : t.name(), std::move(kids)});
    parent_.push_back(id);
    ids_.emplace(t, id);
    return id;
  }

  void merge(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a != b) parent_[std::max(a, b)] = std::min(a, b);
  }

  std::size_t find(std::size_t a) {
    while (parent_[a] != a) a = parent_[a] = parent_[parent_[a]];
    return a;
  }

  void close() {
    bool changed = true;
    while (changed) {
      changed = false;
      std::map<std::pair<std::string, std::vector<std::size_t>>, std::size_t> table;
      for (std::size_t i = 0; i < nodes_.size(); ++i) {
        if (nodes_[i].children.empty()) continue;
        std::vector<std::size_t> kids;
        for (auto c : nodes_[i].children) kids.push_back(find(c));
        auto [it, inserted] = table.emplace(std::make_pair(nodes_[i].op, std::move(kids)), i);
        if (!inserted && find(it->second) != find(i)) {
          merge(it->second, i);
          changed = true;
        }
      }
    }
  }

 private:
  struct Node {
    std::string op;
    std::vector<std::size_t> children;
  };
  std::vector<Node> nodes_;
  std::vector<std::size_t> parent_;
  std::unordered_map<Term, std::size_t, TermHash> ids_;
};
}  // namespace detail

/** Whether each query pair lies in the congruence of the term algebra generated by T. */
inline std::vector<bool> entailed(const EquationSystem& t, const std::vector<TermPair>& queries) {
  detail::CongruenceClosure cc;
  std::vector<std::pair<std::size_t, std::size_t>> q;
  for (const auto& p : queries) q.emplace_back(cc.intern(p.lhs), cc.intern(p.rhs));
  for (const auto& p : t.pairs) cc.merge(cc.intern(p.lhs), cc.intern(p.rhs));
  cc.close();
  std::vector<bool> out;
  for (auto [a, b] : q) out.push_back(cc.find(a) == cc.find(b));
  return out;
}

/**
 * Whether T, read as the congruence it generates on the term algebra over its alphabet,
 * equals its closure over H. T is contained in its closure, so it suffices that a finite
 * presentation of the closure is entailed by T. The witness is a non-entailed pair of it.
 */
inline ClosednessReport is_closed_report(const EquationSystem& t, const FiniteAlgebra& h,
                                         const Budget& budget = {}) {
  const ClosedCongruence c = algebraic_closure(t, h, budget);
  const EquationSystem pres = presentation(c.diagonal);
  const auto ok = entailed(t, pres.pairs);
  for (std::size_t i = 0; i < ok.size(); ++i) {
    if (!ok[i]) return {false, pres.pairs[i]};
  }
  return {};
}

inline bool is_closed(const EquationSystem& t, const FiniteAlgebra& h, const Budget& budget = {}) {
  return is_closed_report(t, h, budget).closed;
}

/** Whether a congruence closed over its own target is also closed over h. */
inline bool is_closed(const ClosedCongruence& c, const FiniteAlgebra& h, const Budget& budget = {}) {
  return closed_over(c.diagonal, h, budget).closed;
}

/** Generator counts per sort, in signature sort order. */
using AlphabetShape = std::vector<std::size_t>;

inline std::string generator_name(const Signature& sig, std::size_t sort, std::size_t k) {
  static const char* letters[] = {"x", "y", "z"};
  std::string base = sort < 3 ? letters[sort] : "v" + sig.sorts()[sort] + "_";
  return k == 0 ? base : base + std::to_string(k);
}

inline SortedAlphabet shape_alphabet(const Signature& sig, const AlphabetShape& shape) {
  SortedAlphabet x;
  for (std::size_t s = 0; s < shape.size(); ++s) {
    for (std::size_t k = 0; k < shape[s]; ++k) x.add(generator_name(sig, s, k), sig.sorts()[s]);
  }
  return x;
}

/** Every shape with at most max_per_sort generators per sort, by total size then lexicographically. */
inline std::vector<AlphabetShape> alphabet_shapes(std::size_t sorts, std::size_t max_per_sort) {
  std::vector<AlphabetShape> out;
  AlphabetShape cur(sorts, 0);
  while (true) {
    out.push_back(cur);
    std::size_t k = sorts;
    bool done = true;
    while (k > 0) {
      --k;
      if (++cur[k] <= max_per_sort) {
        done = false;
        break;
      }
      cur[k] = 0;
    }
    if (done) break;
  }
  std::stable_sort(out.begin(), out.end(), [](const AlphabetShape& a, const AlphabetShape& b) {
    std::size_t ta = 0;
    std::size_t tb = 0;
    for (auto v : a) ta += v;
    for (auto v : b) tb += v;
    return ta < tb;
  });
  return out;
}

/**
 * Every congruence on F(X) closed over h, as generated algebras, in discovery order.
 * These form the intersection-closed family of kernels of diagonal maps; the first entry
 * is the total congruence (no assignments).
 */
inline std::vector<std::unique_ptr<GeneratedAlgebra>> closed_congruences(const FiniteAlgebra& h,
                                                                         const SortedAlphabet& x,
                                                                         const Budget& budget = {}) {
  const auto sig = h.signature_ptr();
  std::vector<std::vector<Elem>> assignments;
  for_each_assignment(h, x, budget, [&](std::span<const Elem> a) {
    assignments.emplace_back(a.begin(), a.end());
    return true;
  });
  std::vector<std::unique_ptr<GeneratedAlgebra>> out;
  std::unordered_set<std::vector<std::uint32_t>, KeyHash> seen;
  out.push_back(std::make_unique<GeneratedAlgebra>(generate(sig, x, std::span<const Component>(), budget)));
  seen.insert(out.back()->canonical_key());
  std::uint64_t work = 0;
  for (std::size_t i = 0; i < out.size(); ++i) {
    for (const auto& a : assignments) {
      if (factor_through(*out[i], h, a)) continue;
      if (++work > budget.max_maps) throw BudgetExceeded("closed congruence enumeration", work, budget.max_maps);
      const Component comps[] = {out[i]->as_component(), Component{&h, a}};
      auto next = std::make_unique<GeneratedAlgebra>(generate(sig, x, comps, budget));
      if (seen.insert(next->canonical_key()).second) out.push_back(std::move(next));
    }
  }
  return out;
}

/**
 * A congruence T closed over one algebra but not the other. `pair` is in the closure of T
 * over the other algebra and not over `closed_side` (0: first algebra, 1: second).
 */
struct GeometricWitness {
  SortedAlphabet alphabet;
  EquationSystem system;
  TermPair pair;
  int closed_side = 0;
};

struct GeometricVerdict {
  bool equivalent = true;
  std::optional<GeometricWitness> witness;
  std::size_t max_generators = 0;
  std::size_t alphabets_checked = 0;
  std::size_t congruences_checked = 0;
};

namespace detail {
struct ShapeResult {
  std::optional<GeometricWitness> witness;
  std::size_t congruences = 0;
};

/**
 * Congruences closed over h are the intersections of kernels of single assignments into h,
 * and closedness over the other side survives intersections (the total congruence, the
 * empty intersection, is closed over anything). So the distinct single-assignment kernels
 * decide each direction.
 */
inline ShapeResult check_shape(const FiniteAlgebra& h1, const FiniteAlgebra& h2, const SortedAlphabet& x,
                               const Budget& budget) {
  ShapeResult r;
  const FiniteAlgebra* sides[] = {&h1, &h2};
  const auto sig = h1.signature_ptr();
  for (int side = 0; side < 2; ++side) {
    std::unordered_set<std::vector<std::uint32_t>, KeyHash> seen;
    for_each_assignment(*sides[side], x, budget, [&](std::span<const Elem> a) {
      const Component comp{sides[side], std::vector<Elem>(a.begin(), a.end())};
      const GeneratedAlgebra q = generate(sig, x, std::span<const Component>(&comp, 1), budget);
      if (!seen.insert(q.canonical_key()).second) return true;
      ++r.congruences;
      const ClosednessReport c = closed_over(q, *sides[1 - side], budget);
      if (c.closed) return true;
      r.witness = GeometricWitness{x, presentation(q), *c.witness, side};
      return false;
    });
    if (r.witness) return r;
  }
  return r;
}
}  // namespace detail

/**
 * Compares the closed congruences of h1 and h2 on every F(X) with at most max_generators
 * generators per sort. Alphabets are checked in canonical order; with jobs > 1 they run
 * concurrently and the first witness in that order is reported.
 */
inline GeometricVerdict geom_equivalent(const FiniteAlgebra& h1, const FiniteAlgebra& h2,
                                        std::size_t max_generators, const Budget& budget = {},
                                        std::size_t jobs = 1) {
  if (!(h1.signature() == h2.signature())) throw SortError("algebras over different signatures");
  const Signature& sig = h1.signature();
  const auto shapes = alphabet_shapes(sig.sorts().size(), max_generators);
  GeometricVerdict v;
  v.max_generators = max_generators;
  jobs = std::max<std::size_t>(jobs, 1);
  for (std::size_t start = 0; start < shapes.size(); start += jobs) {
    const std::size_t stop = std::min(shapes.size(), start + jobs);
    std::vector<std::future<detail::ShapeResult>> pending;
    for (std::size_t i = start; i < stop; ++i) {
      const SortedAlphabet x = shape_alphabet(sig, shapes[i]);
      pending.push_back(std::async(jobs > 1 ? std::launch::async : std::launch::deferred,
                                   [&h1, &h2, x, &budget] { return detail::check_shape(h1, h2, x, budget); }));
    }
    std::vector<detail::ShapeResult> results;
    for (auto& f : pending) results.push_back(f.get());
    for (auto& r : results) {
      ++v.alphabets_checked;
      v.congruences_checked += r.congruences;
      if (r.witness) {
        v.equivalent = false;
        v.witness = std::move(r.witness);
        return v;
      }
    }
  }
  return v;
}

/** Independent replay of a geometric witness against both algebras. */
inline bool verify_geometric_witness(const GeometricWitness& w, const FiniteAlgebra& h1,
                                     const FiniteAlgebra& h2, const Budget& budget = {}) {
  const FiniteAlgebra& closed = w.closed_side == 0 ? h1 : h2;
  const FiniteAlgebra& other = w.closed_side == 0 ? h2 : h1;
  return is_closed(w.system, closed, budget) && closure_member(w.system, other, w.pair, budget) &&
         !closure_member(w.system, closed, w.pair, budget);
}

/** Image of T under a fragment map of a built-in free algebra. */
inline EquationSystem transport_closure(BuiltinId id, const FragmentMap& s, const EquationSystem& t) {
  auto map_term = [&](const Term& u) {
    const NormalForm f = nf_eval(id, u);
    auto it = s.find(f);
    if (it == s.end()) throw Error("term '" + render(u) + "' lies outside the fragment");
    return to_term(id, it->second);
  };
  EquationSystem out{t.alphabet, {}};
  for (const auto& p : t.pairs) out.pairs.push_back(TermPair{map_term(p.lhs), map_term(p.rhs)});
  return out;
}

}  // namespace msa

#endif  // MSA_CLOSURE_HPP
