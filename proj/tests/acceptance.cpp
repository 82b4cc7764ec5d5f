// Acceptance gate: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "support.hpp"

using namespace msa;

namespace {

constexpr double kActSearchSeconds = 60.0;
constexpr double kAutomatonSearchSeconds = 120.0;
constexpr std::size_t kOracleInstances = 60;
constexpr std::size_t kMinOracleInstances = 50;
constexpr std::size_t kOracleDepth = 3;
constexpr std::size_t kLawInstances = 120;
constexpr std::size_t kMinLawInstances = 100;
constexpr std::size_t kMaxElementsPerSort = 3;
constexpr std::size_t kNaturalityWordSize = 2;
constexpr std::size_t kReductionPairs = 10;

struct Outcome {
  bool pass = false;
  std::string detail;
};

double seconds_since(std::chrono::steady_clock::time_point t) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t).count();
}

cli::CommandResult run_cli(std::vector<std::string> args) {
  args.insert(args.begin(), "msa");
  std::ostringstream out;
  std::ostringstream err;
  return cli::run_command(args, out, err);
}

bool is_identity_only(const cli::Json& accepted, const Signature& sig) {
  if (accepted.size() != 1) return false;
  for (const auto& op : sig.ops()) {
    std::string expect = op.name + "(";
    for (std::size_t k = 0; k < op.type.arity(); ++k) expect += (k ? "," : "") + designated_var(k + 1);
    expect += ")";
    if (accepted[0].value(op.name, "") != expect) return false;
  }
  return true;
}

/** Small algebras of a signature, as a fixed corpus. */
std::vector<FiniteAlgebra> random_corpus(const Signature& sig, std::size_t count, unsigned seed) {
  std::mt19937 rng(seed);
  std::vector<FiniteAlgebra> out;
  for (std::size_t i = 0; i < count; ++i) out.push_back(fixture::random_algebra(sig, 1, kMaxElementsPerSort, rng));
  return out;
}

std::vector<FiniteAlgebra> act_corpus() {
  std::vector<FiniteAlgebra> out;
  auto twos = enumerate_models(fixture::act(), 2);
  for (std::size_t i = 0; i < twos.size(); i += 3) out.push_back(twos[i]);
  for (auto& h : fixture::act_corpus_three(8)) out.push_back(std::move(h));
  return out;
}

std::vector<FiniteAlgebra> automaton_corpus() {
  std::vector<FiniteAlgebra> out = random_corpus(fixture::automaton().signature, 8, 5);
  out.push_back(fixture::sample_algebra("toggle.alg", fixture::automaton()));
  return out;
}

SortedAlphabet random_alphabet(const Signature& sig, std::mt19937& rng) {
  SortedAlphabet x;
  const std::size_t n = 1 + rng() % 2;
  for (std::size_t i = 0; i < n; ++i) x.add("x" + std::to_string(i + 1), sig.sorts()[rng() % sig.sorts().size()]);
  return x;
}

Outcome classification(const std::string& variety, double limit) {
  const auto start = std::chrono::steady_clock::now();
  auto r = run_cli({"search-words", "--variety", variety, "--max-word-size", "3"});
  const double took = seconds_since(start);
  const VarietySpec& v = builtin_spec(require_builtin(variety));
  std::ostringstream d;
  d << "examined " << r.report["result"].value("examined", 0) << ", accepted "
    << r.report["result"]["accepted"].size() << ", " << took << "s (limit " << limit << "s)";
  bool ok = r.exit_code == cli::kExitOk && took < limit && is_identity_only(r.report["result"]["accepted"], v.signature);
  // every rejection replays from the library
  SearchConfig cfg;
  cfg.variety = v;
  cfg.max_word_size = 3;
  const ClassificationReport rep = classify_strongly_stable(cfg);
  std::size_t replayed = 0;
  for (const auto& rj : rep.rejected) replayed += replay_rejection(rj, v);
  ok = ok && replayed == rep.rejected.size();
  d << ", replayed " << replayed << "/" << rep.rejected.size();
  if (variety == "act") {
    const WordSystem swap = parse_words(fixture::read_sample("act_swap.words"), v.signature);
    bool found = false;
    for (const auto& rj : rep.rejected) {
      if (rj.words == swap && rj.reason == "variety_identity" && rj.violation &&
          v.identities[rj.violation->identity].name == "mixed" && replay_rejection(rj, v)) {
        found = true;
      }
    }
    ok = ok && found;
    d << ", swapped-product mixed witness " << (found ? "replays" : "missing");
  }
  return {ok, d.str()};
}

Outcome oracle_equivalence() {
  std::mt19937 rng(301);
  std::size_t instances = 0;
  std::size_t disagreements = 0;
  std::size_t unequal = 0;
  const Signature* sigs[] = {&fixture::act().signature, &fixture::automaton().signature};
  for (std::size_t i = 0; i < kOracleInstances; ++i) {
    const Signature& sig = *sigs[i % 2];
    FiniteAlgebra h1 = fixture::random_algebra(sig, 1, kMaxElementsPerSort, rng);
    FiniteAlgebra h2 = fixture::random_algebra(sig, 1, kMaxElementsPerSort, rng);
    SortedAlphabet x = random_alphabet(sig, rng);
    EquationSystem t = fixture::random_system(sig, x, 3, 2, rng);
    const bool exact = closure_equal(t, h1, h2).equal;
    const bool oracle = fixture::oracle_closure_equal(t, h1, h2, kOracleDepth);
    ++instances;
    unequal += !exact;
    if (exact != oracle) ++disagreements;
  }
  std::ostringstream d;
  d << instances << " instances, " << unequal << " unequal, " << disagreements << " disagreements";
  return {instances >= kMinOracleInstances && disagreements == 0, d.str()};
}

Outcome closure_laws() {
  std::mt19937 rng(401);
  std::size_t instances = 0;
  std::size_t violations = 0;
  const Signature* sigs[] = {&fixture::act().signature, &fixture::automaton().signature};
  for (std::size_t i = 0; i < kLawInstances; ++i) {
    const Signature& sig = *sigs[i % 2];
    FiniteAlgebra h = fixture::random_algebra(sig, 0, kMaxElementsPerSort, rng);
    SortedAlphabet x = random_alphabet(sig, rng);
    EquationSystem t = fixture::random_system(sig, x, 3, 2, rng);
    ++instances;
    for (const auto& p : t.pairs) violations += !closure_member(t, h, p);
    EquationSystem sub{x, {}};
    for (std::size_t k = 1; k < t.pairs.size(); ++k) sub.pairs.push_back(t.pairs[k]);
    const auto big = solutions(t, h).assignments;
    const auto small = solutions(sub, h).assignments;
    for (const auto& a : big) violations += std::find(small.begin(), small.end(), a) == small.end();
    std::vector<std::vector<Elem>> all;
    for_each_assignment(h, x, {}, [&](std::span<const Elem> a) {
      all.emplace_back(a.begin(), a.end());
      return true;
    });
    if (!all.empty()) {
      const ClosedCongruence c = closed_congruence(h, x, {all[rng() % all.size()]});
      violations += !is_closed(presentation(c.diagonal), h);
    }
  }
  std::ostringstream d;
  d << instances << " instances, " << violations << " violations";
  return {instances >= kMinLawInstances && violations == 0, d.str()};
}

Outcome naturality() {
  const auto corpus = act_corpus();
  SearchConfig cfg;
  cfg.variety = fixture::act();
  cfg.max_word_size = kNaturalityWordSize;
  cfg.include_degenerate = true;
  const auto systems = enumerate_word_systems(cfg);
  std::size_t checks = 0;
  std::size_t violations = 0;
  for (const auto& w : systems) {
    std::vector<bool> valid;
    for (const auto& h : corpus) valid.push_back(check_derived_in_variety(h, w, fixture::act()));
    for (std::size_t i = 0; i < corpus.size(); ++i) {
      for (std::size_t j = 0; j < corpus.size(); ++j) {
        if (!valid[i] || !valid[j]) continue;
        for (const auto& phi : enumerate_homs(corpus[i], corpus[j])) {
          ++checks;
          violations += !naturality_check(corpus[i], corpus[j], phi, w);
        }
      }
    }
  }
  std::ostringstream d;
  d << corpus.size() << " algebras, " << systems.size() << " word systems, " << checks << " hom checks, "
    << violations << " violations";
  return {checks > 0 && violations == 0, d.str()};
}

Outcome derived_identities(const std::vector<WordSystem>& act_accepted, const std::vector<WordSystem>& aut_accepted) {
  std::size_t checks = 0;
  std::size_t violations = 0;
  auto run = [&](const VarietySpec& v, const std::vector<FiniteAlgebra>& corpus, const std::vector<WordSystem>& accepted) {
    for (const auto& h : corpus) {
      ++checks;
      violations += !(derive_algebra(h, identity_word_system(h.signature())) == h);
      for (const auto& w : accepted) {
        ++checks;
        violations += !check_derived_in_variety(h, w, v);
      }
    }
  };
  run(fixture::act(), act_corpus(), act_accepted);
  run(fixture::automaton(), automaton_corpus(), aut_accepted);
  std::ostringstream d;
  d << checks << " checks, " << violations << " violations";
  return {checks > 0 && violations == 0, d.str()};
}

Outcome reduction(const std::vector<WordSystem>& act_accepted, const std::vector<WordSystem>& aut_accepted) {
  std::size_t checks = 0;
  std::size_t disagreements = 0;
  auto run = [&](const VarietySpec& v, const std::vector<FiniteAlgebra>& corpus, const std::vector<WordSystem>& accepted) {
    SearchConfig cfg;
    cfg.variety = v;
    for (const auto& h : corpus) {
      for (const auto& w : accepted) {
        ++checks;
        const AutoVerdict a = auto_equivalent(h, derive_algebra(h, w), cfg, accepted);
        disagreements += !(a.yes && a.words && *a.words == w);
      }
    }
  };
  run(fixture::act(), act_corpus(), act_accepted);
  run(fixture::automaton(), automaton_corpus(), aut_accepted);
  // auto and geometric verdicts coincide on a fixed set of act pairs
  const auto corpus = act_corpus();
  SearchConfig cfg;
  cfg.variety = fixture::act();
  std::size_t pairs = 0;
  std::size_t unequal = 0;
  for (std::size_t k = 0; pairs < kReductionPairs; ++k) {
    const auto& a = corpus[(3 * k) % corpus.size()];
    const auto& b = corpus[(7 * k + 1) % corpus.size()];
    const bool autov = auto_equivalent(a, b, cfg, act_accepted).yes;
    const bool geo = geom_equivalent(a, b, cfg.max_generators).equivalent;
    unequal += !geo;
    disagreements += autov != geo;
    ++pairs;
  }
  std::ostringstream d;
  d << checks << " derived checks, " << pairs << " act pairs (" << unequal << " inequivalent), " << disagreements
    << " disagreements";
  return {checks > 0 && pairs >= kReductionPairs && disagreements == 0, d.str()};
}

Outcome determinism() {
  using fixture::sample_path;
  const std::vector<std::vector<std::string>> commands = {
      {"validate", "--variety", sample_path("act.var"), sample_path("left_zero.alg"), sample_path("empty_states.alg")},
      {"homs", "--variety", "act", sample_path("semilattice.alg"), sample_path("left_zero.alg")},
      {"closure", "--variety", "act", "--model", sample_path("left_zero.alg"), "--system", sample_path("act_mul.eq")},
      {"closure", "--variety", "act", "--model", sample_path("empty_states.alg"), "--system", sample_path("act_state.eq"),
       "--query", "x1 = mul(x1,x1)"},
      {"geom-eq", "--variety", "act", sample_path("left_zero.alg"), sample_path("right_zero.alg")},
      {"derive", "--variety", "act", "--model", sample_path("semilattice.alg"), "--words", sample_path("act_swap.words")},
      {"search-words", "--variety", "act"},
      {"search-words", "--variety", "automaton"},
      {"auto-eq", "--variety", "act", sample_path("left_zero.alg"), sample_path("semilattice.alg")},
      {"counterexample", "--variety", sample_path("c3.var"), "--words", sample_path("c3_inverse.words")},
  };
  std::size_t runs = 0;
  std::size_t mismatches = 0;
  for (const auto& c : commands) {
    std::string first;
    for (const char* jobs : {"1", "1", "4", "4"}) {
      auto args = c;
      args.insert(args.end(), {"--jobs", jobs});
      auto r = run_cli(args);
      r.report.erase("timing");
      const std::string dump = r.report.dump();
      ++runs;
      if (first.empty()) {
        first = dump;
      } else if (dump != first) {
        ++mismatches;
      }
    }
  }
  std::ostringstream d;
  d << commands.size() << " commands, " << runs << " runs, " << mismatches << " mismatches";
  return {mismatches == 0, d.str()};
}

Outcome empty_sorts() {
  const VarietySpec& v = fixture::act();
  const FiniteAlgebra h = fixture::sample_algebra("empty_states.alg", v);
  std::size_t failures = 0;
  // no assignment of a state generator
  failures += !solutions(EquationSystem{{{"y", "2"}}, {}}, h).assignments.empty();
  // sort-1 generators alone still have solutions
  failures += solutions(EquationSystem{{{"x1", "1"}}, {}}, h).assignments.size() != 2;
  // every pair is in the closure of a system needing a state
  const EquationSystem t = parse_equations(fixture::read_sample("act_state.eq"), v.signature);
  const auto terms = enumerate_terms(v.signature, t.alphabet, 2);
  std::size_t pairs = 0;
  for (const auto& a : terms) {
    for (const auto& b : terms) {
      if (a.sort() != b.sort()) continue;
      ++pairs;
      failures += !closure_member(t, h, {a, b});
    }
  }
  const ClosedCongruence c = algebraic_closure(t, h);
  failures += c.diagonal.algebra.carrier_size(std::size_t{0}) != 1 || c.diagonal.algebra.carrier_size(std::size_t{1}) != 1;
  failures += !is_closed(presentation(c.diagonal), h);
  // no homomorphism into the algebra from one with states
  failures += !enumerate_homs(fixture::sample_algebra("left_zero.alg", v), h).empty();
  failures += first_variety_violation(h, v).has_value();
  auto r = run_cli({"closure", "--variety", "act", "--model", fixture::sample_path("empty_states.alg"), "--system",
                    fixture::sample_path("act_state.eq"), "--query", "y = act(x1,y)"});
  failures += r.report["verdict"] != "MEMBER" || r.report["result"]["solutions"] != 0;
  std::ostringstream d;
  d << pairs << " closure pairs, " << failures << " failures";
  return {failures == 0, d.str()};
}

}  // namespace

int main() {
  int failed = 0;
  auto report = [&](int n, const std::function<Outcome()>& f) {
    Outcome o;
    try {
      o = f();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    std::cout << "criterion " << n << ": " << (o.pass ? "PASS" : "FAIL") << " (" << o.detail << ")" << std::endl;
    failed += !o.pass;
  };

  SearchConfig act_cfg;
  act_cfg.variety = fixture::act();
  SearchConfig aut_cfg;
  aut_cfg.variety = fixture::automaton();
  const auto act_accepted = classify_strongly_stable(act_cfg).accepted;
  const auto aut_accepted = classify_strongly_stable(aut_cfg).accepted;

  report(1, [] { return classification("act", kActSearchSeconds); });
  report(2, [] { return classification("automaton", kAutomatonSearchSeconds); });
  report(3, oracle_equivalence);
  report(4, closure_laws);
  report(5, naturality);
  report(6, [&] { return derived_identities(act_accepted, aut_accepted); });
  report(7, [&] { return reduction(act_accepted, aut_accepted); });
  report(8, determinism);
  report(9, empty_sorts);
  return failed == 0 ? 0 : 1;
}
