#ifndef MSA_TESTS_SUPPORT_HPP
#define MSA_TESTS_SUPPORT_HPP

#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "msa/msa.hpp"
#include "msa/cli.hpp"

namespace msa::fixture {

inline std::string sample_path(const std::string& name) { return std::string(MSA_SAMPLES_DIR) + "/" + name; }

inline std::string read_sample(const std::string& name) { return cli::read_file(sample_path(name)); }

inline VarietySpec sample_variety(const std::string& name) { return parse_variety(read_sample(name)); }

inline FiniteAlgebra sample_algebra(const std::string& name, const VarietySpec& v) {
  return parse_algebra(read_sample(name), v);
}

inline const VarietySpec& act() { return builtin_spec(BuiltinId::act); }
inline const VarietySpec& automaton() { return builtin_spec(BuiltinId::automaton); }

inline VarietySpec semigroup() {
  return parse_variety(
      "variety semigroup\nsorts 1\nop mul : 1 1 -> 1\n"
      "identity assoc : forall x:1 y:1 z:1 . mul(mul(x,y),z) = mul(x,mul(y,z))\n");
}

/** Single-sorted two-element projection semigroups: left (xy = x) or right (xy = y). */
inline FiniteAlgebra projection_semigroup(bool left) {
  auto sig = std::make_shared<const Signature>(semigroup().signature);
  return FiniteAlgebra(sig, {{"a", "b"}}, {left ? std::vector<Elem>{0, 0, 1, 1} : std::vector<Elem>{0, 1, 0, 1}});
}

/** Random algebra over sig with carrier sizes in [min_size, max_size]; not necessarily in any variety. */
inline FiniteAlgebra random_algebra(const Signature& sig, std::size_t min_size, std::size_t max_size, std::mt19937& rng) {
  auto shared = std::make_shared<const Signature>(sig);
  const std::size_t ns = sig.sorts().size();
  std::vector<std::size_t> sizes(ns);
  std::uniform_int_distribution<std::size_t> size_dist(min_size, max_size);
  for (auto& s : sizes) s = size_dist(rng);
  for (const auto& op : sig.ops()) {
    if (op.type.arity() == 0 && sizes[sig.require_sort(op.type.result)] == 0) sizes[sig.require_sort(op.type.result)] = 1;
  }
  // an operation into an empty sort needs an empty argument sort
  bool changed = true;
  while (changed) {
    changed = false;
    for (const auto& op : sig.ops()) {
      std::size_t len = 1;
      for (const auto& a : op.type.args) len *= sizes[sig.require_sort(a)];
      auto& r = sizes[sig.require_sort(op.type.result)];
      if (len > 0 && r == 0) {
        r = 1;
        changed = true;
      }
    }
  }
  std::vector<std::vector<std::string>> carriers(ns);
  for (std::size_t s = 0; s < ns; ++s) {
    for (std::size_t e = 0; e < sizes[s]; ++e) carriers[s].push_back(std::string(1, char('a' + e)));
  }
  std::vector<std::vector<Elem>> tables;
  for (const auto& op : sig.ops()) {
    std::size_t len = 1;
    for (const auto& a : op.type.args) len *= sizes[sig.require_sort(a)];
    const std::size_t out = sizes[sig.require_sort(op.type.result)];
    std::vector<Elem> t(len);
    for (auto& c : t) c = static_cast<Elem>(std::uniform_int_distribution<std::size_t>(0, out - 1)(rng));
    tables.push_back(std::move(t));
  }
  return FiniteAlgebra(shared, std::move(carriers), std::move(tables));
}

/** Random term of the given sort over x, or nullopt when none of depth <= depth exists. */
inline std::optional<Term> random_term(const Signature& sig, const SortedAlphabet& x, const std::string& sort,
                                       std::size_t depth, std::mt19937& rng) {
  std::vector<Term> leaves;
  for (const auto& v : x) {
    if (v.sort == sort) leaves.push_back(mk_var(v.name, v.sort));
  }
  std::vector<const OpDecl*> ops;
  for (const auto& op : sig.ops()) {
    if (op.type.result == sort) ops.push_back(&op);
  }
  const bool branch = depth > 0 && !ops.empty() && (leaves.empty() || rng() % 2 == 0);
  if (branch) {
    const OpDecl* op = ops[rng() % ops.size()];
    std::vector<Term> kids;
    bool ok = true;
    for (const auto& a : op->type.args) {
      auto k = random_term(sig, x, a, depth - 1, rng);
      if (!k) {
        ok = false;
        break;
      }
      kids.push_back(*k);
    }
    if (ok) return mk_app(sig, op->name, std::move(kids));
  }
  if (leaves.empty()) return std::nullopt;
  return leaves[rng() % leaves.size()];
}

inline EquationSystem random_system(const Signature& sig, const SortedAlphabet& x, std::size_t max_pairs,
                                    std::size_t depth, std::mt19937& rng) {
  EquationSystem t{x, {}};
  const std::size_t n = rng() % (max_pairs + 1);
  for (std::size_t i = 0; i < n * 4 && t.pairs.size() < n; ++i) {
    const std::string& sort = sig.sorts()[rng() % sig.sorts().size()];
    auto l = random_term(sig, x, sort, depth, rng);
    auto r = random_term(sig, x, sort, depth, rng);
    if (l && r) t.pairs.push_back(TermPair{*l, *r});
  }
  return t;
}

/**
 * Brute-force closure oracle: the solutions of T by tree evaluation over every
 * assignment, and for each term the vector of its values under those solutions.
 */
inline std::vector<Assignment> oracle_solutions(const EquationSystem& t, const FiniteAlgebra& h) {
  std::vector<Assignment> all{Assignment{}};
  for (const auto& v : t.alphabet) {
    std::vector<Assignment> next;
    for (const auto& a : all) {
      for (std::size_t e = 0; e < h.carrier_size(v.sort); ++e) {
        Assignment b = a;
        b[v.name] = static_cast<Elem>(e);
        next.push_back(std::move(b));
      }
    }
    all = std::move(next);
  }
  std::vector<Assignment> out;
  for (const auto& a : all) {
    bool ok = true;
    for (const auto& p : t.pairs) {
      if (eval(h, p.lhs, a) != eval(h, p.rhs, a)) {
        ok = false;
        break;
      }
    }
    if (ok) out.push_back(a);
  }
  return out;
}

inline std::vector<Elem> oracle_profile(const FiniteAlgebra& h, const std::vector<Assignment>& sols, const Term& term) {
  std::vector<Elem> v;
  for (const auto& a : sols) v.push_back(eval(h, term, a));
  return v;
}

/** Whether T''_{H1} and T''_{H2} agree on every pair of terms of depth <= depth. */
inline bool oracle_closure_equal(const EquationSystem& t, const FiniteAlgebra& h1, const FiniteAlgebra& h2,
                                 std::size_t depth) {
  const auto terms = enumerate_terms(h1.signature(), t.alphabet, depth);
  const auto s1 = oracle_solutions(t, h1);
  const auto s2 = oracle_solutions(t, h2);
  std::map<std::pair<std::string, std::vector<Elem>>, std::vector<Elem>> forward;
  std::map<std::pair<std::string, std::vector<Elem>>, std::vector<Elem>> backward;
  for (const auto& term : terms) {
    auto p1 = oracle_profile(h1, s1, term);
    auto p2 = oracle_profile(h2, s2, term);
    auto [f, fi] = forward.emplace(std::make_pair(term.sort(), p1), p2);
    if (!fi && f->second != p2) return false;
    auto [b, bi] = backward.emplace(std::make_pair(term.sort(), p2), p1);
    if (!bi && b->second != p1) return false;
  }
  return true;
}

/** Oracle closure membership by tree evaluation. */
inline bool oracle_member(const EquationSystem& t, const FiniteAlgebra& h, const TermPair& p) {
  for (const auto& a : oracle_solutions(t, h)) {
    if (eval(h, p.lhs, a) != eval(h, p.rhs, a)) return false;
  }
  return true;
}

/** Three-element act algebras from a fixed seed: a few semigroups and random actions in the variety. */
inline std::vector<FiniteAlgebra> act_corpus_three(std::size_t count, unsigned seed = 7) {
  auto sig = std::make_shared<const Signature>(act().signature);
  // mul tables on {e0,e1,e2}: cyclic group, left zero, null with zero e0, semilattice chain
  const std::vector<std::vector<Elem>> muls = {
      {0, 1, 2, 1, 2, 0, 2, 0, 1},
      {0, 0, 0, 1, 1, 1, 2, 2, 2},
      {0, 0, 0, 0, 0, 0, 0, 0, 0},
      {0, 0, 0, 0, 1, 1, 0, 1, 2},
  };
  std::mt19937 rng(seed);
  std::vector<FiniteAlgebra> out;
  std::size_t attempts = 0;
  while (out.size() < count && attempts < 200000) {
    ++attempts;
    const auto& mul = muls[attempts % muls.size()];
    const std::size_t states = 1 + rng() % 3;
    std::vector<Elem> actt(3 * states);
    for (auto& c : actt) c = static_cast<Elem>(rng() % states);
    std::vector<std::string> st;
    for (std::size_t i = 0; i < states; ++i) st.push_back("s" + std::to_string(i));
    FiniteAlgebra h(sig, {{"e0", "e1", "e2"}, st}, {actt, mul});
    if (in_variety(h, act())) out.push_back(std::move(h));
  }
  return out;
}

}  // namespace msa::fixture

#endif  // MSA_TESTS_SUPPORT_HPP
