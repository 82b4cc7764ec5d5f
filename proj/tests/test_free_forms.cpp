#include <gtest/gtest.h>

#include <array>
#include <random>

#include "support.hpp"

using namespace msa;

namespace {
const Signature& act_sig() { return fixture::act().signature; }
const Signature& aut_sig() { return fixture::automaton().signature; }
Term v1(const std::string& n) { return mk_var(n, "1"); }
Term v2(const std::string& n) { return mk_var(n, "2"); }

/** All maps of {0,1,2} to itself acting on the points; mul is composition, right factor first. */
FiniteAlgebra transformation_action() {
  std::vector<std::array<Elem, 3>> maps;
  for (Elem a = 0; a < 3; ++a)
    for (Elem b = 0; b < 3; ++b)
      for (Elem c = 0; c < 3; ++c) maps.push_back({a, b, c});
  std::vector<std::string> names;
  for (const auto& m : maps) names.push_back("f" + std::to_string(m[0]) + std::to_string(m[1]) + std::to_string(m[2]));
  auto index = [&](const std::array<Elem, 3>& m) { return static_cast<Elem>(m[0] * 9 + m[1] * 3 + m[2]); };
  std::vector<Elem> act_table;
  for (const auto& m : maps)
    for (Elem v = 0; v < 3; ++v) act_table.push_back(m[v]);
  std::vector<Elem> mul_table;
  for (const auto& f : maps)
    for (const auto& g : maps) mul_table.push_back(index({f[g[0]], f[g[1]], f[g[2]]}));
  return FiniteAlgebra(std::make_shared<const Signature>(act_sig()), {names, {"p0", "p1", "p2"}},
                       {std::move(act_table), std::move(mul_table)});
}
}  // namespace

TEST(NormalForms, ProductIsConcatenation) {
  NormalForm f = nf_eval(BuiltinId::act, mk_app(act_sig(), "mul", {v1("x1"), v1("x2")}));
  EXPECT_EQ(f.word, (std::vector<std::string>{"x1", "x2"}));
  EXPECT_EQ(render(f), "x1.x2");
}

TEST(NormalForms, MixedAssociativityCollapses) {
  Term a = mk_app(act_sig(), "act", {mk_app(act_sig(), "mul", {v1("g"), v1("h")}), v2("v")});
  Term b = mk_app(act_sig(), "act", {v1("g"), mk_app(act_sig(), "act", {v1("h"), v2("v")})});
  EXPECT_EQ(nf_eval(BuiltinId::act, a), nf_eval(BuiltinId::act, b));
  EXPECT_EQ(render(nf_eval(BuiltinId::act, a)), "g.h@v");
}

TEST(NormalForms, AutomatonStepsStackOutermostFirst) {
  Term t = mk_app(aut_sig(), "next", {v1("a"), mk_app(aut_sig(), "next", {v1("b"), v2("q")})});
  NormalForm f = nf_eval(BuiltinId::automaton, t);
  EXPECT_EQ(f.word, (std::vector<std::string>{"a", "b"}));
  EXPECT_EQ(f.base, "q");
  Term o = mk_app(aut_sig(), "out", {v1("c"), t});
  EXPECT_EQ(render(nf_eval(BuiltinId::automaton, o)), "c>a.b@q");
}

TEST(NormalForms, Equality) {
  Term t = mk_app(act_sig(), "mul", {v1("x1"), v1("x2")});
  EXPECT_TRUE(nf_equal(BuiltinId::act, t, t));
  EXPECT_FALSE(nf_equal(BuiltinId::act, t, mk_app(act_sig(), "mul", {v1("x2"), v1("x1")})));
  Term l = mk_app(act_sig(), "mul", {t, v1("x3")});
  Term r = mk_app(act_sig(), "mul", {v1("x1"), mk_app(act_sig(), "mul", {v1("x2"), v1("x3")})});
  EXPECT_TRUE(nf_equal(BuiltinId::act, l, r));
  EXPECT_THROW(nf_equal(BuiltinId::act, t, v2("v")), SortError);
}

TEST(NormalForms, FragmentsOfSmallBounds) {
  auto f = free_elements_up_to(BuiltinId::act, SortedAlphabet{{"x", "1"}}, 2);
  ASSERT_EQ(f.size(), 2u);
  EXPECT_EQ(render(f[0]), "x");
  EXPECT_EQ(render(f[1]), "x.x");
  auto g = free_elements_up_to(BuiltinId::automaton, SortedAlphabet{{"a", "1"}, {"q", "2"}}, 1);
  ASSERT_EQ(g.size(), 2u);
  EXPECT_EQ(render(g[0]), "a");
  EXPECT_EQ(render(g[1]), "@q");
  EXPECT_TRUE(free_elements_up_to(BuiltinId::act, SortedAlphabet{{"x", "1"}}, 0).empty());
}

TEST(NormalForms, FragmentCountsMatchClosedForm) {
  // act over 2 letters and 1 state: sum_{k=1..b} 2^k words plus sum_{k=0..b-1} 2^k acted states
  SortedAlphabet x{{"x1", "1"}, {"x2", "1"}, {"y", "2"}};
  for (std::size_t b = 1; b <= 5; ++b) {
    std::size_t expect = 0;
    for (std::size_t k = 1; k <= b; ++k) expect += std::size_t{1} << k;
    for (std::size_t k = 0; k < b; ++k) expect += std::size_t{1} << k;
    EXPECT_EQ(free_elements_up_to(BuiltinId::act, x, b).size(), expect);
  }
  // automaton over 1 letter, 1 state, 1 output: letters 1, states b, outputs 1 + (b-1)
  SortedAlphabet z{{"a", "1"}, {"q", "2"}, {"o", "3"}};
  for (std::size_t b = 1; b <= 5; ++b) {
    EXPECT_EQ(free_elements_up_to(BuiltinId::automaton, z, b).size(), 1 + b + 1 + (b - 1));
  }
}

TEST(NormalForms, CanonicalTermsRoundTrip) {
  for (BuiltinId id : {BuiltinId::act, BuiltinId::automaton}) {
    SortedAlphabet x{{"x1", "1"}, {"x2", "1"}, {"y", "2"}};
    if (id == BuiltinId::automaton) x.add("z", "3");
    for (const auto& f : free_elements_up_to(id, x, 5)) {
      Term t = to_term(id, f);
      EXPECT_EQ(check_sorts(builtin_spec(id).signature, t), "");
      EXPECT_EQ(nf_eval(id, t), f) << render(f);
      EXPECT_EQ(t.leaves(), f.size());
    }
  }
}

TEST(NormalForms, EvaluationIsHomomorphic) {
  std::mt19937 rng(8);
  SortedAlphabet x{{"g", "1"}, {"h", "1"}, {"v", "2"}};
  for (int i = 0; i < 200; ++i) {
    auto t = fixture::random_term(act_sig(), x, i % 2 ? "1" : "2", 4, rng);
    if (t->is_variable()) continue;
    std::vector<NormalForm> kids;
    for (const auto& c : t->children()) kids.push_back(nf_eval(BuiltinId::act, c));
    EXPECT_EQ(nf_eval(BuiltinId::act, *t), free_apply(BuiltinId::act, t->name(), kids));
  }
}

TEST(NormalForms, SoundAgainstFiniteModels) {
  // equal normal forms imply equal values in every model of the variety
  auto models = enumerate_models(fixture::act(), 2);
  SortedAlphabet x{{"g", "1"}, {"h", "1"}, {"v", "2"}};
  auto terms = enumerate_terms(act_sig(), x, 2);
  std::map<NormalForm, std::vector<Term>> classes;
  for (const auto& t : terms) classes[nf_eval(BuiltinId::act, t)].push_back(t);
  std::size_t checked = 0;
  for (const auto& h : models) {
    for (const auto& [nf, members] : classes) {
      if (members.size() < 2) continue;
      for_each_assignment(h, x, {}, [&](std::span<const Elem> a) {
        const Assignment asg = to_assignment(x, a);
        const Elem first = eval(h, members[0], asg);
        for (const auto& m : members) EXPECT_EQ(eval(h, m, asg), first);
        ++checked;
        return true;
      });
    }
  }
  EXPECT_GT(checked, 0u);
}

TEST(NormalForms, CompletenessProbeWithSmallModels) {
  // distinct normal forms of depth <= 2 are separated by the small models or the full transformation action
  std::vector<FiniteAlgebra> models = enumerate_models(fixture::act(), 2);
  for (auto& h : fixture::act_corpus_three(12)) models.push_back(std::move(h));
  models.push_back(transformation_action());
  ASSERT_TRUE(in_variety(models.back(), fixture::act()));
  SortedAlphabet x{{"g", "1"}, {"h", "1"}, {"v", "2"}};
  auto terms = enumerate_terms(act_sig(), x, 2);
  std::map<NormalForm, Term> reps;
  for (const auto& t : terms) reps.emplace(nf_eval(BuiltinId::act, t), t);
  std::vector<std::pair<NormalForm, Term>> list(reps.begin(), reps.end());
  std::map<std::pair<std::string, std::vector<Elem>>, NormalForm> seen;
  // profile each class over every model and assignment; classes must have distinct profiles
  std::map<NormalForm, std::vector<Elem>> profile;
  for (const auto& h : models) {
    for_each_assignment(h, x, {}, [&](std::span<const Elem> a) {
      const Assignment asg = to_assignment(x, a);
      for (const auto& [nf, t] : list) profile[nf].push_back(eval(h, t, asg));
      return true;
    });
  }
  std::size_t collisions = 0;
  for (const auto& [nf, p] : profile) {
    auto [it, inserted] = seen.emplace(std::make_pair(nf.sort, p), nf);
    if (!inserted) {
      ++collisions;
      ADD_FAILURE() << render(nf) << " and " << render(it->second) << " are not separated";
    }
  }
  EXPECT_EQ(collisions, 0u);
}

TEST(NormalForms, BuiltinsMatchTheirText) {
  EXPECT_EQ(match_builtin(parse_variety(fixture::read_sample("act.var"))), BuiltinId::act);
  EXPECT_EQ(match_builtin(parse_variety(fixture::read_sample("automaton.var"))), BuiltinId::automaton);
  EXPECT_FALSE(match_builtin(fixture::semigroup()));
  EXPECT_THROW(require_builtin("semigroup"), UnsupportedVariety);
}

TEST(NormalForms, SortErrorsAreReported) {
  EXPECT_THROW(generator_form(BuiltinId::act, Variable{"z", "3"}), SortError);
  NormalForm s = generator_form(BuiltinId::act, Variable{"v", "2"});
  NormalForm g = generator_form(BuiltinId::act, Variable{"g", "1"});
  const NormalForm bad[] = {s, g};
  EXPECT_THROW(free_apply(BuiltinId::act, "act", bad), SortError);
}
