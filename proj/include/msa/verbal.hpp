#ifndef MSA_VERBAL_HPP
#define MSA_VERBAL_HPP

// Verbal operations, derived algebras H_W* and the induced maps s_F on free fragments.

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "msa/error.hpp"
#include "msa/finite_algebra.hpp"
#include "msa/free_forms.hpp"
#include "msa/term.hpp"
#include "msa/variety.hpp"
#include "msa/words.hpp"

namespace msa {

/** w*_H(args): the body of w evaluated in H with x_k bound to the k-th argument. */
inline Elem verbal_apply(const FiniteAlgebra& h, const Word& w, std::span<const Elem> args) {
  const Signature& sig = h.signature();
  if (args.size() != w.type.arity()) {
    throw SortError("word of arity " + std::to_string(w.type.arity()) + " applied to " +
                    std::to_string(args.size()) + " arguments");
  }
  for (std::size_t k = 0; k < args.size(); ++k) {
    const std::size_t s = sig.require_sort(w.type.args[k]);
    if (h.carrier_size(s) == 0) {
      throw ModelError("verbal operation needs an element of the empty sort '" + w.type.args[k] + "'");
    }
    if (args[k] >= h.carrier_size(s)) {
      throw SortError("argument " + std::to_string(k + 1) + " is outside the carrier of sort '" +
                      w.type.args[k] + "'");
    }
  }
  return CompiledTerm(sig, w.body, designated_alphabet(w.type)).eval(h, args);
}

/** H_W*: the carriers of H with every operation replaced by its verbal operation. */
inline FiniteAlgebra derive_algebra(const FiniteAlgebra& h, const WordSystem& w) {
  const Signature& sig = h.signature();
  if (auto r = validate_word_system(sig, w); !r.ok()) throw SortError(r.violations.front());
  std::vector<std::vector<Elem>> tables;
  for (std::size_t o = 0; o < sig.ops().size(); ++o) {
    const OpDecl& op = sig.ops()[o];
    const Word& word = w.at(op.name);
    const CompiledTerm body(sig, word.body, designated_alphabet(word.type));
    const auto& sorts = h.arg_sorts(o);
    std::size_t count = 1;
    for (auto s : sorts) count *= h.carrier_size(s);
    std::vector<Elem> table(count);
    std::vector<Elem> args(sorts.size(), 0);
    for (std::size_t idx = 0; idx < count; ++idx) {
      std::size_t rest = idx;
      for (std::size_t i = sorts.size(); i > 0; --i) {
        args[i - 1] = static_cast<Elem>(rest % h.carrier_size(sorts[i - 1]));
        rest /= h.carrier_size(sorts[i - 1]);
      }
      table[idx] = body.eval(h, args);
    }
    tables.push_back(std::move(table));
  }
  return FiniteAlgebra(h.signature_ptr(), h.carriers(), std::move(tables));
}

/** First identity of v failing in H_W*, with its assignment. */
inline std::optional<VarietyViolation> derived_violation(const FiniteAlgebra& h, const WordSystem& w,
                                                         const VarietySpec& v, const Budget& budget = {}) {
  return first_variety_violation(derive_algebra(h, w), v, budget);
}

inline bool check_derived_in_variety(const FiniteAlgebra& h, const WordSystem& w, const VarietySpec& v,
                                     const Budget& budget = {}) {
  return !derived_violation(h, w, v, budget);
}

/** Whether phi: H1 -> H2 is also a homomorphism (H1)_W* -> (H2)_W*. */
inline bool naturality_check(const FiniteAlgebra& h1, const FiniteAlgebra& h2, const SortedMap& phi,
                             const WordSystem& w) {
  return is_homomorphism(phi, derive_algebra(h1, w), derive_algebra(h2, w));
}

/** Generator occurrences in a word. */
inline std::size_t word_size(const Word& w) { return w.body.leaves(); }

/** Whether the body uses every designated variable. */
inline bool uses_all_variables(const Word& w) {
  const SortedAlphabet used = vars_of(w.body);
  return used.size() == w.type.arity();
}

enum class InducedVerdict { bounded_ok, rejected };
enum class RejectReason { none, not_injective, not_surjective, not_homomorphic };

inline std::string_view reason_name(RejectReason r) {
  switch (r) {
    case RejectReason::not_injective: return "not_injective";
    case RejectReason::not_surjective: return "not_surjective";
    case RejectReason::not_homomorphic: return "not_homomorphic";
    default: return "none";
  }
}

/**
 * s_F on the normal forms of size at most `bound`, with the first failure found.
 *
 *  - not_injective: s(first) = s(second) with first != second.
 *  - not_surjective: `missing` has no preimage in the fragment. Only reported when every
 *    word uses every variable, since s is then size-nondecreasing.
 *  - not_homomorphic: s(op(args)) = `first` but w_op[s(args)] = `second`.
 */
struct InducedMap {
  InducedVerdict verdict = InducedVerdict::bounded_ok;
  RejectReason reason = RejectReason::none;
  FragmentMap map;
  std::size_t bound = 0;
  NormalForm first;
  NormalForm second;
  NormalForm missing;
  std::string op;
  std::vector<NormalForm> args;
};

namespace detail {
inline NormalForm induced_on_term(BuiltinId id, const Term& t, const WordSystem& w) {
  if (t.is_variable()) return generator_form(id, Variable{t.name(), t.sort()});
  const Word& word = w.at(t.name());
  NormalFormEnv env;
  for (std::size_t k = 0; k < t.children().size(); ++k) {
    env.emplace(designated_var(k + 1), induced_on_term(id, t.children()[k], w));
  }
  return nf_eval(id, word.body, env);
}

inline NormalForm apply_word(BuiltinId id, const Word& word, std::span<const NormalForm> args) {
  NormalFormEnv env;
  for (std::size_t k = 0; k < args.size(); ++k) env.emplace(designated_var(k + 1), args[k]);
  return nf_eval(id, word.body, env);
}
}  // namespace detail

/**
 * The map s: F(X) -> F(X)_W* fixing X, computed along canonical terms, checked on the
 * fragment of normal forms of size <= bound. Rejection is definitive; acceptance holds
 * only up to the bound.
 */
inline InducedMap induced_s(BuiltinId id, const SortedAlphabet& x, const WordSystem& w, std::size_t bound = 6) {
  const Signature& sig = builtin_spec(id).signature;
  if (auto r = validate_word_system(sig, w); !r.ok()) throw SortError(r.violations.front());
  InducedMap out;
  out.bound = bound;
  const auto fragment = free_elements_up_to(id, x, bound);
  std::map<NormalForm, NormalForm> inverse;
  for (const auto& f : fragment) {
    NormalForm image = detail::induced_on_term(id, to_term(id, f), w);
    auto [it, inserted] = inverse.emplace(image, f);
    if (!inserted) {
      out.verdict = InducedVerdict::rejected;
      out.reason = RejectReason::not_injective;
      out.first = it->second;
      out.second = f;
      out.map.emplace(f, image);
      out.map.emplace(it->second, image);
      return out;
    }
    out.map.emplace(f, std::move(image));
  }

  const bool monotone = std::all_of(w.begin(), w.end(), [](const auto& e) { return uses_all_variables(e.second); });
  if (monotone) {
    for (const auto& g : fragment) {
      if (!inverse.contains(g)) {
        out.verdict = InducedVerdict::rejected;
        out.reason = RejectReason::not_surjective;
        out.missing = g;
        return out;
      }
    }
  }

  std::map<std::string, std::vector<const NormalForm*>> by_sort;
  for (const auto& f : fragment) by_sort[f.sort].push_back(&f);
  for (const auto& op : sig.ops()) {
    const Word& word = w.at(op.name);
    const std::size_t n = op.type.arity();
    std::vector<const std::vector<const NormalForm*>*> pools;
    bool empty = false;
    for (const auto& s : op.type.args) {
      auto it = by_sort.find(s);
      if (it == by_sort.end()) {
        empty = true;
        break;
      }
      pools.push_back(&it->second);
    }
    if (empty) continue;
    std::vector<std::size_t> idx(n, 0);
    std::vector<NormalForm> args(n);
    std::vector<NormalForm> images(n);
    while (true) {
      std::size_t total = 0;
      for (std::size_t i = 0; i < n; ++i) total += (*pools[i])[idx[i]]->size();
      if (total <= bound) {
        for (std::size_t i = 0; i < n; ++i) {
          args[i] = *(*pools[i])[idx[i]];
          images[i] = out.map.at(args[i]);
        }
        // automaton signals are letters; longer sort-1 forms are not in the free algebra's image
        bool applicable = true;
        if (id == BuiltinId::automaton && args[0].word.size() != 1) applicable = false;
        if (applicable) {
          const NormalForm result = free_apply(id, op.name, args);
          if (result.size() <= bound) {
            const NormalForm lhs = out.map.at(result);
            const NormalForm rhs = detail::apply_word(id, word, images);
            if (lhs != rhs) {
              out.verdict = InducedVerdict::rejected;
              out.reason = RejectReason::not_homomorphic;
              out.op = op.name;
              out.args = args;
              out.first = lhs;
              out.second = rhs;
              return out;
            }
          }
        }
      }
      std::size_t k = n;
      bool done = true;
      while (k > 0) {
        --k;
        if (++idx[k] < pools[k]->size()) {
          done = false;
          break;
        }
        idx[k] = 0;
      }
      if (done) break;
    }
  }
  return out;
}

/** One B-condition check: whether a composite map is a homomorphism on a fragment. */
struct BCheck {
  std::string description;
  bool passed = false;
  bool skipped = false;
  std::string reason;
};

struct BReport {
  std::vector<BCheck> checks;

  bool ok() const {
    return std::all_of(checks.begin(), checks.end(), [](const BCheck& c) { return c.passed || c.skipped; });
  }
};

namespace detail {
inline NormalForm apply_morphism(BuiltinId id, const NormalFormEnv& mu, const NormalForm& f) {
  return nf_eval(id, to_term(id, f), mu);
}

inline std::string render_env(const NormalFormEnv& env) {
  std::string s;
  for (const auto& [k, v] : env) s += (s.empty() ? "" : ", ") + k + "->" + render(v);
  return s;
}
}  // namespace detail

/**
 * Samples morphisms mu: F(A) -> F(B) between the given free algebras (generators sent to
 * forms of size <= 2, at most `max_morphisms` per pair) and checks that s_B mu s_A^-1 and
 * s_B^-1 mu s_A are homomorphisms on the fragment of size <= bound.
 */
inline BReport check_b_conditions(BuiltinId id, const WordSystem& w, const std::vector<SortedAlphabet>& alphabets,
                                  std::size_t bound = 3, std::size_t max_morphisms = 8) {
  BReport report;
  const Signature& sig = builtin_spec(id).signature;
  std::vector<InducedMap> s;
  for (const auto& a : alphabets) s.push_back(induced_s(id, a, w, 2 * bound + 2));
  for (std::size_t ai = 0; ai < alphabets.size(); ++ai) {
    for (std::size_t bi = 0; bi < alphabets.size(); ++bi) {
      const std::string pair_name = "A" + std::to_string(ai) + "->B" + std::to_string(bi);
      if (s[ai].verdict == InducedVerdict::rejected || s[bi].verdict == InducedVerdict::rejected) {
        report.checks.push_back({pair_name, false, true, "word system rejected by induced_s"});
        continue;
      }
      std::map<NormalForm, NormalForm> inv_a;
      std::map<NormalForm, NormalForm> inv_b;
      for (const auto& [f, g] : s[ai].map) inv_a.emplace(g, f);
      for (const auto& [f, g] : s[bi].map) inv_b.emplace(g, f);
      // candidate images per generator
      const auto targets = free_elements_up_to(id, alphabets[bi], 2);
      std::vector<std::vector<NormalForm>> choices;
      bool empty = false;
      for (const auto& v : alphabets[ai]) {
        std::vector<NormalForm> c;
        for (const auto& t : targets) {
          if (t.sort == v.sort) c.push_back(t);
        }
        if (c.empty()) empty = true;
        choices.push_back(std::move(c));
      }
      if (empty) {
        report.checks.push_back({pair_name, false, true, "no morphisms between the samples"});
        continue;
      }
      const auto fragment = free_elements_up_to(id, alphabets[ai], bound);
      std::vector<std::size_t> idx(choices.size(), 0);
      for (std::size_t m = 0; m < max_morphisms; ++m) {
        NormalFormEnv mu;
        for (std::size_t i = 0; i < choices.size(); ++i) mu.emplace(alphabets[ai][i].name, choices[i][idx[i]]);
        const std::string name = pair_name + " mu{" + detail::render_env(mu) + "}";
        // g1 = s_B mu s_A^-1 and g2 = s_B^-1 mu s_A, where defined
        auto g1 = [&](const NormalForm& f) -> std::optional<NormalForm> {
          auto pre = inv_a.find(f);
          if (pre == inv_a.end()) return std::nullopt;
          auto it = s[bi].map.find(detail::apply_morphism(id, mu, pre->second));
          if (it == s[bi].map.end()) return std::nullopt;
          return it->second;
        };
        auto g2 = [&](const NormalForm& f) -> std::optional<NormalForm> {
          auto img = s[ai].map.find(f);
          if (img == s[ai].map.end()) return std::nullopt;
          auto it = inv_b.find(detail::apply_morphism(id, mu, img->second));
          if (it == inv_b.end()) return std::nullopt;
          return it->second;
        };
        for (int which = 0; which < 2; ++which) {
          BCheck check{name + (which == 0 ? " s_B.mu.s_A^-1" : " s_B^-1.mu.s_A"), true, false, ""};
          std::size_t undefined = 0;
          std::size_t tested = 0;
          for (const auto& op : sig.ops()) {
            if (op.type.arity() != 2) continue;
            for (const auto& a : fragment) {
              if (a.sort != op.type.args[0]) continue;
              if (id == BuiltinId::automaton && a.word.size() != 1) continue;
              for (const auto& b : fragment) {
                if (b.sort != op.type.args[1]) continue;
                const NormalForm args[] = {a, b};
                const NormalForm r = free_apply(id, op.name, args);
                auto lhs = which == 0 ? g1(r) : g2(r);
                auto ga = which == 0 ? g1(a) : g2(a);
                auto gb = which == 0 ? g1(b) : g2(b);
                if (!lhs || !ga || !gb) {
                  ++undefined;
                  continue;
                }
                if (id == BuiltinId::automaton && ga->word.size() != 1) {
                  ++undefined;
                  continue;
                }
                ++tested;
                const NormalForm img[] = {*ga, *gb};
                if (*lhs != free_apply(id, op.name, img)) {
                  check.passed = false;
                  check.reason = op.name + "(" + render(a) + ", " + render(b) + ")";
                  break;
                }
              }
              if (!check.passed) break;
            }
            if (!check.passed) break;
          }
          if (check.passed && tested == 0) {
            check.passed = false;
            check.skipped = true;
            check.reason = "inverse not found on the fragment";
          } else if (check.passed && undefined > 0) {
            check.reason = std::to_string(undefined) + " instances outside the fragment";
          }
          report.checks.push_back(std::move(check));
        }
        std::size_t k = idx.size();
        bool done = true;
        while (k > 0) {
          --k;
          if (++idx[k] < choices[k].size()) {
            done = false;
            break;
          }
          idx[k] = 0;
        }
        if (done) break;
      }
    }
  }
  return report;
}

}  // namespace msa

#endif  // MSA_VERBAL_HPP
