#ifndef MSA_DIAGONAL_HPP
#define MSA_DIAGONAL_HPP

// Subalgebras of finite products generated by tuples of generator images.
//
// For assignments phi_1..phi_k of an alphabet X into finite algebras, the subalgebra of
// the product generated by the tuples (phi_1(x),...,phi_k(x)) is the image of the term
// algebra over X under the diagonal map, so it is isomorphic to F(X) / (ker phi_1 ∩ ... ∩
// ker phi_k). Elements are found in rounds; an element first seen in round r is reached
// by a term of depth r and by no shallower one, and that term is recorded.

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "msa/error.hpp"
#include "msa/finite_algebra.hpp"
#include "msa/term.hpp"
#include "msa/words.hpp"

namespace msa {

/** One factor of a diagonal: an algebra and the images of the generators in it. */
struct Component {
  const FiniteAlgebra* algebra;
  std::vector<Elem> generators;
};

struct ElementRef {
  std::size_t sort;
  Elem elem;
};

/** Provenance of a generated element: a generator, or an operation applied to earlier elements. */
struct Origin {
  long op = -1;              // < 0: generator
  std::size_t generator = 0;
  std::vector<Elem> args;
};

/** A finite algebra generated by an alphabet, with reach terms and component coordinates. */
struct GeneratedAlgebra {
  SortedAlphabet alphabet;
  FiniteAlgebra algebra;
  std::vector<Elem> generators;
  std::vector<std::vector<Term>> reach;
  std::vector<std::vector<std::vector<Elem>>> coords;
  std::vector<std::vector<Origin>> origin;
  std::vector<ElementRef> discovery;

  std::size_t size() const { return algebra.total_size(); }

  /** Identical for two generations iff their kernels on the term algebra coincide. */
  std::vector<std::uint32_t> canonical_key() const {
    std::vector<std::uint32_t> key;
    for (std::size_t s = 0; s < algebra.sort_count(); ++s) key.push_back(static_cast<std::uint32_t>(algebra.carrier_size(s)));
    key.insert(key.end(), generators.begin(), generators.end());
    for (const auto& t : algebra.tables()) {
      key.push_back(0xffffffffu);
      key.insert(key.end(), t.begin(), t.end());
    }
    return key;
  }

  /** Component view, for feeding this algebra into another generation. */
  Component as_component() const { return Component{&algebra, generators}; }
};

struct KeyHash {
  std::size_t operator()(const std::vector<std::uint32_t>& v) const {
    std::size_t h = v.size();
    for (auto x : v) h ^= x + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
    return h;
  }
};

namespace detail {

/** State of a saturation run over a product of components. */
struct Saturation {
  std::vector<std::vector<std::vector<Elem>>> coords;
  std::vector<std::vector<Term>> reach;
  std::vector<std::vector<Origin>> origin;
  std::vector<ElementRef> discovery;
  std::vector<Elem> generators;
  // per op, flattened (args..., result) records of every application evaluated
  std::vector<std::vector<Elem>> cells;
  bool stopped = false;
};

/**
 * Closes the generator tuples and constants of a product under the operations, round by
 * round. `on_insert(sort, elem, state)` is called for every new element and may stop the
 * run by returning true. Application records are kept only when `record` is set, and
 * their number is charged against the budget at 16 cells per element.
 */
template <class OnInsert>
Saturation saturate(const Signature& sig, const SortedAlphabet& x, std::span<const Component> components,
                    const Budget& budget, bool record, OnInsert&& on_insert) {
  const std::size_t ns = sig.sorts().size();
  const std::size_t nc = components.size();
  std::vector<std::size_t> var_sort;
  for (const auto& v : x) var_sort.push_back(sig.require_sort(v.sort));
  for (const auto& c : components) {
    if (c.generators.size() != x.size()) throw ModelError("component does not assign every generator");
    for (std::size_t i = 0; i < x.size(); ++i) {
      if (c.generators[i] >= c.algebra->carrier_size(var_sort[i])) {
        throw ModelError("generator image outside its carrier");
      }
    }
  }

  const auto& ops = sig.ops();
  Saturation st;
  st.coords.resize(ns);
  st.reach.resize(ns);
  st.origin.resize(ns);
  st.cells.resize(ops.size());
  std::vector<std::unordered_map<std::vector<Elem>, Elem, KeyHash>> index(ns);
  std::uint64_t total = 0;
  std::uint64_t cells = 0;
  const std::uint64_t max_cells = budget.max_elements > UINT64_MAX / 16 ? UINT64_MAX : budget.max_elements * 16;

  auto insert = [&](std::size_t s, std::vector<Elem> tuple, const std::function<Term()>& make_term,
                    Origin org) -> Elem {
    auto it = index[s].find(tuple);
    if (it != index[s].end()) return it->second;
    if (++total > budget.max_elements) {
      throw BudgetExceeded("generated subalgebra", total, budget.max_elements);
    }
    const Elem e = static_cast<Elem>(st.coords[s].size());
    index[s].emplace(tuple, e);
    st.coords[s].push_back(std::move(tuple));
    st.reach[s].push_back(make_term());
    st.origin[s].push_back(std::move(org));
    st.discovery.push_back({s, e});
    if (on_insert(s, e, static_cast<const Saturation&>(st))) st.stopped = true;
    return e;
  };

  st.generators.resize(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    std::vector<Elem> tuple(nc);
    for (std::size_t c = 0; c < nc; ++c) tuple[c] = components[c].generators[i];
    Origin org;
    org.generator = i;
    st.generators[i] = insert(var_sort[i], std::move(tuple), [&] { return mk_var(x[i].name, x[i].sort); }, org);
    if (st.stopped) return st;
  }

  std::vector<std::vector<std::size_t>> arg_sorts(ops.size());
  std::vector<std::size_t> res_sort(ops.size());
  for (std::size_t o = 0; o < ops.size(); ++o) {
    for (const auto& a : ops[o].type.args) arg_sorts[o].push_back(sig.require_sort(a));
    res_sort[o] = sig.require_sort(ops[o].type.result);
  }

  std::vector<Elem> cargs;
  for (std::size_t o = 0; o < ops.size(); ++o) {
    if (!arg_sorts[o].empty()) continue;
    std::vector<Elem> tuple(nc);
    for (std::size_t c = 0; c < nc; ++c) tuple[c] = components[c].algebra->apply(o, cargs);
    Origin org;
    org.op = static_cast<long>(o);
    Elem r = insert(res_sort[o], std::move(tuple),
                    [&] { return Term::application(ops[o].name, ops[o].type.result, {}); }, org);
    if (record) st.cells[o].push_back(r);
    if (st.stopped) return st;
  }

  std::vector<std::size_t> prev(ns, 0);
  while (true) {
    std::vector<std::size_t> snap(ns);
    for (std::size_t s = 0; s < ns; ++s) snap[s] = st.coords[s].size();
    for (std::size_t o = 0; o < ops.size(); ++o) {
      const auto& sorts = arg_sorts[o];
      const std::size_t n = sorts.size();
      if (n == 0) continue;
      bool empty = false;
      bool fresh = false;
      for (auto s : sorts) {
        if (snap[s] == 0) empty = true;
        if (snap[s] > prev[s]) fresh = true;
      }
      if (empty || !fresh) continue;
      std::vector<Elem> args(n, 0);
      std::vector<Elem> cvals(n);
      while (true) {
        bool uses_fresh = false;
        for (std::size_t i = 0; i < n; ++i) {
          if (args[i] >= prev[sorts[i]]) uses_fresh = true;
        }
        if (uses_fresh) {
          std::vector<Elem> tuple(nc);
          for (std::size_t c = 0; c < nc; ++c) {
            for (std::size_t i = 0; i < n; ++i) cvals[i] = st.coords[sorts[i]][args[i]][c];
            tuple[c] = components[c].algebra->apply(o, cvals);
          }
          Origin org;
          org.op = static_cast<long>(o);
          org.args = args;
          Elem r = insert(res_sort[o], std::move(tuple),
                          [&] {
                            std::vector<Term> children;
                            for (std::size_t i = 0; i < n; ++i) children.push_back(st.reach[sorts[i]][args[i]]);
                            return Term::application(ops[o].name, ops[o].type.result, std::move(children));
                          },
                          std::move(org));
          if (st.stopped) return st;
          if (record) {
            if (++cells > max_cells) throw BudgetExceeded("generated operation tables", cells, max_cells);
            st.cells[o].insert(st.cells[o].end(), args.begin(), args.end());
            st.cells[o].push_back(r);
          }
        }
        std::size_t k = n;
        bool done = true;
        while (k > 0) {
          --k;
          if (++args[k] < snap[sorts[k]]) {
            done = false;
            break;
          }
          args[k] = 0;
        }
        if (done) break;
      }
    }
    bool grew = false;
    for (std::size_t s = 0; s < ns; ++s) {
      if (st.coords[s].size() != snap[s]) grew = true;
    }
    prev = snap;
    if (!grew) break;
  }
  return st;
}

}  // namespace detail

/**
 * Generates the subalgebra of the product of the components spanned by the generator
 * tuples and constants. With no components every sort collapses to at most one element.
 */
inline GeneratedAlgebra generate(std::shared_ptr<const Signature> sig, const SortedAlphabet& x,
                                 std::span<const Component> components, const Budget& budget = {}) {
  detail::Saturation st =
      detail::saturate(*sig, x, components, budget, true, [](std::size_t, Elem, const detail::Saturation&) { return false; });
  const std::size_t ns = sig->sorts().size();
  const auto& ops = sig->ops();
  std::vector<std::vector<std::string>> carriers(ns);
  for (std::size_t s = 0; s < ns; ++s) {
    for (std::size_t e = 0; e < st.coords[s].size(); ++e) carriers[s].push_back("d" + std::to_string(e));
  }
  std::vector<std::vector<Elem>> tables(ops.size());
  for (std::size_t o = 0; o < ops.size(); ++o) {
    std::vector<std::size_t> sizes;
    std::size_t count = 1;
    for (const auto& a : ops[o].type.args) {
      sizes.push_back(st.coords[sig->require_sort(a)].size());
      count *= sizes.back();
    }
    tables[o].assign(count, 0);
    const std::size_t n = sizes.size();
    const auto& rec = st.cells[o];
    for (std::size_t at = 0; at < rec.size(); at += n + 1) {
      std::size_t idx = 0;
      for (std::size_t i = 0; i < n; ++i) idx = idx * sizes[i] + rec[at + i];
      tables[o][idx] = rec[at + n];
    }
    std::vector<Elem>().swap(st.cells[o]);
  }
  return GeneratedAlgebra{x,
                          FiniteAlgebra(sig, std::move(carriers), std::move(tables)),
                          std::move(st.generators),
                          std::move(st.reach),
                          std::move(st.coords),
                          std::move(st.origin),
                          std::move(st.discovery)};
}

/**
 * Generates the product of two blocks of components, components [0, split) and
 * [split, end), and stops at the first element agreeing with an earlier one on one block.
 * The reach terms of the two elements form a pair in the kernel of that block and outside
 * the kernel of the other; `first_block` tells which block they agree on.
 */
struct BlockCollision {
  TermPair pair;
  bool first_block;
};

inline std::optional<BlockCollision> first_block_collision(const Signature& sig, const SortedAlphabet& x,
                                                           std::span<const Component> components,
                                                           std::size_t split, const Budget& budget = {}) {
  const std::size_t ns = sig.sorts().size();
  std::vector<std::unordered_map<std::vector<Elem>, Elem, KeyHash>> left(ns);
  std::vector<std::unordered_map<std::vector<Elem>, Elem, KeyHash>> right(ns);
  std::optional<BlockCollision> hit;
  detail::saturate(sig, x, components, budget, false, [&](std::size_t s, Elem e, const detail::Saturation& st) {
    const auto& c = st.coords[s][e];
    const auto mid = c.begin() + static_cast<long>(split);
    auto [l, lnew] = left[s].emplace(std::vector<Elem>(c.begin(), mid), e);
    if (!lnew) {
      hit = BlockCollision{TermPair{st.reach[s][l->second], st.reach[s][e]}, true};
      return true;
    }
    auto [r, rnew] = right[s].emplace(std::vector<Elem>(mid, c.end()), e);
    if (!rnew) {
      hit = BlockCollision{TermPair{st.reach[s][r->second], st.reach[s][e]}, false};
      return true;
    }
    return false;
  });
  return hit;
}

/** Convenience: the diagonal of a list of assignments into one algebra. */
inline GeneratedAlgebra generate_diagonal(const FiniteAlgebra& h, const SortedAlphabet& x,
                                          const std::vector<std::vector<Elem>>& assignments,
                                          const Budget& budget = {}) {
  std::vector<Component> comps;
  for (const auto& a : assignments) comps.push_back(Component{&h, a});
  return generate(h.signature_ptr(), x, comps, budget);
}

/**
 * The homomorphism q -> h sending generators to `values`, if one exists; that is, if the
 * assignment's kernel contains the kernel of q. Returned as per-sort image vectors.
 */
inline std::optional<SortedMap> factor_through(const GeneratedAlgebra& q, const FiniteAlgebra& h,
                                               std::span<const Elem> values) {
  const std::size_t ns = q.algebra.sort_count();
  SortedMap f;
  f.images.resize(ns);
  for (std::size_t s = 0; s < ns; ++s) {
    if (q.algebra.carrier_size(s) > 0 && h.carrier_size(s) == 0) return std::nullopt;
    f.images[s].assign(q.algebra.carrier_size(s), 0);
  }
  std::vector<Elem> args;
  for (const auto& ref : q.discovery) {
    const Origin& org = q.origin[ref.sort][ref.elem];
    if (org.op < 0) {
      f.images[ref.sort][ref.elem] = values[org.generator];
    } else {
      const auto o = static_cast<std::size_t>(org.op);
      args.clear();
      const auto& sorts = q.algebra.arg_sorts(o);
      for (std::size_t i = 0; i < org.args.size(); ++i) args.push_back(f.images[sorts[i]][org.args[i]]);
      f.images[ref.sort][ref.elem] = h.apply(o, args);
    }
  }
  for (std::size_t i = 0; i < q.generators.size(); ++i) {
    const std::size_t s = q.algebra.signature().require_sort(q.alphabet[i].sort);
    if (f.images[s][q.generators[i]] != values[i]) return std::nullopt;
  }
  if (!is_homomorphism(f, q.algebra, h)) return std::nullopt;
  return f;
}

/**
 * Two elements of one sort that agree on the selected component coordinates but differ
 * elsewhere, reported as the pair of their reach terms.
 */
inline std::optional<TermPair> projection_collision(const GeneratedAlgebra& g, std::size_t first,
                                                    std::size_t count) {
  for (std::size_t s = 0; s < g.coords.size(); ++s) {
    std::unordered_map<std::vector<Elem>, Elem, KeyHash> seen;
    for (std::size_t e = 0; e < g.coords[s].size(); ++e) {
      const auto& c = g.coords[s][e];
      std::vector<Elem> part(c.begin() + static_cast<long>(first), c.begin() + static_cast<long>(first + count));
      auto [it, inserted] = seen.emplace(std::move(part), static_cast<Elem>(e));
      if (!inserted) return TermPair{g.reach[s][it->second], g.reach[s][e]};
    }
  }
  return std::nullopt;
}

/**
 * Presentation of a generated algebra: a finite set of equations whose generated
 * congruence on the term algebra is exactly the kernel of the diagonal map.
 */
inline EquationSystem presentation(const GeneratedAlgebra& g) {
  EquationSystem t;
  t.alphabet = g.alphabet;
  const Signature& sig = g.algebra.signature();
  for (std::size_t i = 0; i < g.generators.size(); ++i) {
    const std::size_t s = sig.require_sort(g.alphabet[i].sort);
    Term x = mk_var(g.alphabet[i].name, g.alphabet[i].sort);
    const Term& r = g.reach[s][g.generators[i]];
    if (!(x == r)) t.pairs.push_back(TermPair{x, r});
  }
  for (std::size_t o = 0; o < sig.ops().size(); ++o) {
    const auto& sorts = g.algebra.arg_sorts(o);
    const auto& table = g.algebra.table(o);
    std::vector<Term> children(sorts.size(), mk_var("_", "_"));
    for (std::size_t idx = 0; idx < table.size(); ++idx) {
      std::size_t rest = idx;
      for (std::size_t i = sorts.size(); i > 0; --i) {
        const std::size_t n = g.algebra.carrier_size(sorts[i - 1]);
        children[i - 1] = g.reach[sorts[i - 1]][rest % n];
        rest /= n;
      }
      Term lhs = Term::application(sig.ops()[o].name, sig.ops()[o].type.result, children);
      const Term& rhs = g.reach[g.algebra.result_sort(o)][table[idx]];
      if (!(lhs == rhs)) t.pairs.push_back(TermPair{std::move(lhs), rhs});
    }
  }
  return t;
}

}  // namespace msa

#endif  // MSA_DIAGONAL_HPP
