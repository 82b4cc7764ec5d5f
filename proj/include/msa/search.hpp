#ifndef MSA_SEARCH_HPP
#define MSA_SEARCH_HPP

// Word-system enumeration and classification, and automorphic equivalence of finite
// algebras by reduction to geometric equivalence against derived algebras.

#include <algorithm>
#include <future>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "msa/closure.hpp"
#include "msa/error.hpp"
#include "msa/finite_algebra.hpp"
#include "msa/free_forms.hpp"
#include "msa/verbal.hpp"
#include "msa/words.hpp"

namespace msa {

struct SearchConfig {
  VarietySpec variety;
  /** Generator occurrences per word. */
  std::size_t max_word_size = 3;
  /** Normal-form size bound for the induced map checks. */
  std::size_t fragment_bound = 6;
  /** Elements per sort of the probe models. */
  std::size_t probe_size = 2;
  /** Generators per sort for geometric comparisons. */
  std::size_t max_generators = 2;
  /** Keep words that are a bare variable. */
  bool include_degenerate = false;
  std::size_t jobs = 1;
  Budget budget;
};

inline void validate_config(const SearchConfig& cfg) {
  if (cfg.max_word_size < 1 || cfg.fragment_bound < 1 || cfg.probe_size < 1 || cfg.max_generators < 1) {
    throw Error("search bounds must be at least 1");
  }
}

/** Candidate words for one operation, in canonical order, without duplicates. */
inline std::vector<Word> candidate_words(const VarietySpec& v, const OpDecl& op, std::size_t max_size,
                                         bool include_degenerate) {
  const Signature& sig = v.signature;
  const SortedAlphabet x = designated_alphabet(op.type);
  std::vector<Word> out;
  if (auto id = match_builtin(v)) {
    for (const auto& f : free_elements_up_to(*id, x, max_size)) {
      if (f.sort != op.type.result) continue;
      out.push_back(Word{op.type, to_term(*id, f)});
    }
  } else {
    for (const auto& t : enumerate_terms(sig, x, max_size)) {
      if (t.sort() != op.type.result || t.leaves() > max_size) continue;
      out.push_back(Word{op.type, t});
    }
    std::stable_sort(out.begin(), out.end(), [](const Word& a, const Word& b) {
      return a.body.leaves() < b.body.leaves();
    });
  }
  if (!include_degenerate) {
    std::erase_if(out, [](const Word& w) { return w.body.is_variable(); });
  }
  return out;
}

/** Every word system with words of size <= max_word_size, first operation most significant. */
inline std::vector<WordSystem> enumerate_word_systems(const SearchConfig& cfg) {
  validate_config(cfg);
  const auto& ops = cfg.variety.signature.ops();
  std::vector<std::vector<Word>> pools;
  for (const auto& op : ops) {
    pools.push_back(candidate_words(cfg.variety, op, cfg.max_word_size, cfg.include_degenerate));
    if (pools.back().empty()) return {};
  }
  std::vector<WordSystem> out;
  std::vector<std::size_t> idx(ops.size(), 0);
  while (true) {
    if (out.size() >= cfg.budget.max_maps) throw BudgetExceeded("word system enumeration", out.size() + 1, cfg.budget.max_maps);
    WordSystem w;
    for (std::size_t i = 0; i < ops.size(); ++i) w.emplace(ops[i].name, pools[i][idx[i]]);
    out.push_back(std::move(w));
    std::size_t k = ops.size();
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
  return out;
}

/** Why a candidate was rejected; enough to replay the failing check. */
struct Rejection {
  WordSystem words;
  /** "variety_identity", or an induced map reason. */
  std::string reason;
  /** Probe model and failing identity, for variety_identity. */
  std::optional<FiniteAlgebra> model;
  std::optional<VarietyViolation> violation;
  /** Induced map failure, otherwise. */
  std::optional<InducedMap> induced;
  SortedAlphabet alphabet;
};

struct ClassificationReport {
  std::size_t examined = 0;
  std::vector<Rejection> rejected;
  std::vector<WordSystem> accepted;
  std::size_t probe_models = 0;
  SortedAlphabet probe_alphabet;
};

/**
 * Alphabet for the induced map checks: as many generators of each sort as any operation
 * takes arguments of that sort, at least one.
 */
inline SortedAlphabet probe_alphabet(const Signature& sig) {
  SortedAlphabet x;
  static const char* letters[] = {"x", "y", "z"};
  for (std::size_t s = 0; s < sig.sorts().size(); ++s) {
    std::size_t need = 1;
    for (const auto& op : sig.ops()) {
      need = std::max<std::size_t>(need, std::count(op.type.args.begin(), op.type.args.end(), sig.sorts()[s]));
    }
    const std::string base = s < 3 ? letters[s] : "v" + sig.sorts()[s] + "_";
    for (std::size_t k = 1; k <= need; ++k) x.add(base + std::to_string(k), sig.sorts()[s]);
  }
  return x;
}

namespace detail {
inline std::optional<Rejection> assess(const SearchConfig& cfg, BuiltinId id, const SortedAlphabet& x,
                                       const std::vector<FiniteAlgebra>& probes, const WordSystem& w) {
  for (const auto& h : probes) {
    if (auto v = derived_violation(h, w, cfg.variety, cfg.budget)) {
      return Rejection{w, "variety_identity", h, *v, std::nullopt, {}};
    }
  }
  InducedMap s = induced_s(id, x, w, cfg.fragment_bound);
  if (s.verdict == InducedVerdict::rejected) {
    std::string reason(reason_name(s.reason));
    s.map.clear();
    return Rejection{w, std::move(reason), std::nullopt, std::nullopt, std::move(s), x};
  }
  return std::nullopt;
}
}  // namespace detail

/**
 * Sorts every candidate into rejected (with a replayable witness) or accepted up to the
 * bounds: first by the identities of the variety on derived probe models, then by the
 * induced map on a free fragment.
 */
inline ClassificationReport classify_strongly_stable(const SearchConfig& cfg) {
  validate_config(cfg);
  auto id = match_builtin(cfg.variety);
  if (!id) throw UnsupportedVariety("classification needs a built-in variety; '" + cfg.variety.name + "' is not one");
  const auto candidates = enumerate_word_systems(cfg);
  const auto probes = enumerate_models(cfg.variety, cfg.probe_size, cfg.budget);
  ClassificationReport report;
  report.examined = candidates.size();
  report.probe_models = probes.size();
  report.probe_alphabet = probe_alphabet(cfg.variety.signature);
  const std::size_t jobs = std::max<std::size_t>(cfg.jobs, 1);
  std::vector<std::optional<Rejection>> results(candidates.size());
  for (std::size_t start = 0; start < candidates.size(); start += jobs) {
    const std::size_t stop = std::min(candidates.size(), start + jobs);
    std::vector<std::future<std::optional<Rejection>>> pending;
    for (std::size_t i = start; i < stop; ++i) {
      pending.push_back(std::async(jobs > 1 ? std::launch::async : std::launch::deferred, [&, i] {
        return detail::assess(cfg, *id, report.probe_alphabet, probes, candidates[i]);
      }));
    }
    for (std::size_t i = start; i < stop; ++i) results[i] = pending[i - start].get();
  }
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    if (results[i]) {
      report.rejected.push_back(std::move(*results[i]));
    } else {
      report.accepted.push_back(candidates[i]);
    }
  }
  return report;
}

/** Re-runs the check cited by a rejection; true when it fails again. */
inline bool replay_rejection(const Rejection& r, const VarietySpec& v) {
  if (r.reason == "variety_identity") {
    if (!r.model || !r.violation) return false;
    const FiniteAlgebra derived = derive_algebra(*r.model, r.words);
    if (r.violation->identity >= v.identities.size()) return false;
    const Identity& id = v.identities[r.violation->identity];
    const CompiledTerm lhs(v.signature, id.lhs, id.alphabet);
    const CompiledTerm rhs(v.signature, id.rhs, id.alphabet);
    return in_variety(*r.model, v) &&
           lhs.eval(derived, r.violation->assignment) != rhs.eval(derived, r.violation->assignment);
  }
  auto id = match_builtin(v);
  if (!id || !r.induced) return false;
  const InducedMap again = induced_s(*id, r.alphabet, r.words, r.induced->bound);
  return again.verdict == InducedVerdict::rejected && again.reason == r.induced->reason &&
         again.first == r.induced->first && again.second == r.induced->second &&
         again.missing == r.induced->missing;
}

struct AutoVerdict {
  bool yes = false;
  std::optional<WordSystem> words;
  /** Per candidate W, the geometric witness against (H2)_W*. */
  std::vector<std::pair<WordSystem, GeometricWitness>> witnesses;
  std::size_t candidates = 0;
};

/** Automorphic equivalence, given the admissible word systems. */
inline AutoVerdict auto_equivalent(const FiniteAlgebra& h1, const FiniteAlgebra& h2, const SearchConfig& cfg,
                                   const std::vector<WordSystem>& accepted) {
  for (const FiniteAlgebra* h : {&h1, &h2}) {
    if (auto v = first_variety_violation(*h, cfg.variety, cfg.budget)) {
      throw ModelError("algebra is not in variety '" + cfg.variety.name + "': identity '" +
                       cfg.variety.identities[v->identity].name + "' fails");
    }
  }
  AutoVerdict out;
  out.candidates = accepted.size();
  for (const auto& w : accepted) {
    const FiniteAlgebra derived = derive_algebra(h2, w);
    GeometricVerdict g = geom_equivalent(h1, derived, cfg.max_generators, cfg.budget, cfg.jobs);
    if (g.equivalent) {
      out.yes = true;
      out.words = w;
      return out;
    }
    out.witnesses.emplace_back(w, std::move(*g.witness));
  }
  return out;
}

inline AutoVerdict auto_equivalent(const FiniteAlgebra& h1, const FiniteAlgebra& h2, const SearchConfig& cfg) {
  return auto_equivalent(h1, h2, cfg, classify_strongly_stable(cfg).accepted);
}

struct CounterexampleHit {
  FiniteAlgebra model;
  FiniteAlgebra derived;
  GeometricWitness witness;
  bool verified = false;
};

struct CounterexampleResult {
  std::optional<CounterexampleHit> hit;
  std::size_t models_scanned = 0;
};

/**
 * Scans the models of the variety with at most max_model_size elements per sort for one
 * not geometrically equivalent to its derived algebra. A hit is re-verified before it is
 * returned; a hit whose witness does not replay is an internal error.
 */
inline CounterexampleResult counterexample_search(const VarietySpec& v, const WordSystem& w,
                                                  std::size_t max_model_size, std::size_t max_generators,
                                                  const Budget& budget = {}, std::size_t jobs = 1) {
  CounterexampleResult out;
  for (const auto& h : enumerate_models(v, max_model_size, budget)) {
    ++out.models_scanned;
    const FiniteAlgebra d = derive_algebra(h, w);
    if (!in_variety(d, v, budget)) continue;
    GeometricVerdict g = geom_equivalent(h, d, max_generators, budget, jobs);
    if (g.equivalent) continue;
    const bool ok = verify_geometric_witness(*g.witness, h, d, budget);
    if (!ok) throw Error("counterexample witness failed re-verification");
    out.hit = CounterexampleHit{h, d, std::move(*g.witness), ok};
    return out;
  }
  return out;
}

}  // namespace msa

#endif  // MSA_SEARCH_HPP
