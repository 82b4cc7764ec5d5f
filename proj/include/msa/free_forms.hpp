#ifndef MSA_FREE_FORMS_HPP
#define MSA_FREE_FORMS_HPP

#include <algorithm>
#include <compare>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "msa/error.hpp"
#include "msa/term.hpp"
#include "msa/text.hpp"
#include "msa/variety.hpp"

namespace msa {

/** Varieties with a built-in free algebra and decidable word problem. */
enum class BuiltinId { act, automaton };

inline constexpr std::string_view kActVariety = R"(# Actions of semigroups over sets.
variety act
sorts 1 2
op act : 1 2 -> 2
op mul : 1 1 -> 1
identity assoc : forall x1:1 x2:1 x3:1 . mul(mul(x1,x2),x3) = mul(x1,mul(x2,x3))
identity mixed : forall x1:1 x2:1 y:2 . act(mul(x1,x2),y) = act(x1,act(x2,y))
)";

inline constexpr std::string_view kAutomatonVariety = R"(# Automata: input signals, states, output signals.
variety automaton
sorts 1 2 3
op next : 1 2 -> 2
op out : 1 2 -> 3
)";

inline std::string_view builtin_name(BuiltinId id) {
  return id == BuiltinId::act ? "act" : "automaton";
}

inline std::optional<BuiltinId> find_builtin(std::string_view name) {
  if (name == "act") return BuiltinId::act;
  if (name == "automaton") return BuiltinId::automaton;
  return std::nullopt;
}

inline BuiltinId require_builtin(std::string_view name) {
  auto id = find_builtin(name);
  if (!id) throw UnsupportedVariety("no built-in free algebra for variety '" + std::string(name) + "'");
  return *id;
}

inline std::string_view builtin_text(BuiltinId id) {
  return id == BuiltinId::act ? kActVariety : kAutomatonVariety;
}

inline const VarietySpec& builtin_spec(BuiltinId id) {
  static const VarietySpec act = parse_variety(kActVariety);
  static const VarietySpec automaton = parse_variety(kAutomatonVariety);
  return id == BuiltinId::act ? act : automaton;
}

/** The built-in whose signature and identities coincide with v, if any. */
inline std::optional<BuiltinId> match_builtin(const VarietySpec& v) {
  for (BuiltinId id : {BuiltinId::act, BuiltinId::automaton}) {
    const VarietySpec& b = builtin_spec(id);
    if (b.signature == v.signature && b.identities == v.identities) return id;
  }
  return std::nullopt;
}

/**
 * Element of a built-in free algebra.
 *
 *  - sort 1 (both varieties): `word` holds the letters, outermost first; `base` is empty.
 *  - sort 2: `word` acting on the generator `base`; the word may be empty.
 *  - automaton sort 3: either a bare generator `base`, or `emit` applied to (word, base).
 */
struct NormalForm {
  std::string sort;
  std::vector<std::string> word;
  std::string base;
  std::string emit;

  /** Generator occurrences. */
  std::size_t size() const { return word.size() + (base.empty() ? 0 : 1) + (emit.empty() ? 0 : 1); }

  friend auto operator<=>(const NormalForm&, const NormalForm&) = default;
};

/** Canonical order: sort, then size, then structure. */
inline bool canonical_less(const NormalForm& a, const NormalForm& b) {
  if (a.sort != b.sort) return a.sort < b.sort;
  if (a.size() != b.size()) return a.size() < b.size();
  return a < b;
}

/** `x1.x2` for words, `x1.x2@y` for acted generators, `a>x1@q` for automaton outputs. */
inline std::string render(const NormalForm& f) {
  std::string w;
  for (std::size_t i = 0; i < f.word.size(); ++i) w += (i ? "." : "") + f.word[i];
  if (f.base.empty()) return w;
  return (f.emit.empty() ? "" : f.emit + ">") + w + "@" + f.base;
}

inline NormalForm generator_form(BuiltinId id, const Variable& v) {
  if (v.sort == "1") return NormalForm{"1", {v.name}, "", ""};
  if (v.sort == "2" || (id == BuiltinId::automaton && v.sort == "3")) {
    return NormalForm{v.sort, {}, v.name, ""};
  }
  throw SortError("sort '" + v.sort + "' does not exist in variety '" + std::string(builtin_name(id)) + "'");
}

/** The free-algebra operation `op` on normal forms. */
inline NormalForm free_apply(BuiltinId id, std::string_view op, std::span<const NormalForm> args) {
  const VarietySpec& spec = builtin_spec(id);
  const OpDecl& decl = spec.signature.require_op(op);
  if (args.size() != decl.type.arity()) throw SortError("wrong number of arguments for '" + decl.name + "'");
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i].sort != decl.type.args[i]) {
      throw SortError("argument " + std::to_string(i) + " of '" + decl.name + "' has sort '" +
                      args[i].sort + "'");
    }
  }
  NormalForm r;
  r.sort = decl.type.result;
  if (id == BuiltinId::act) {
    r.word = args[0].word;
    r.word.insert(r.word.end(), args[1].word.begin(), args[1].word.end());
    if (decl.name == "act") r.base = args[1].base;
    return r;
  }
  // automaton: the input signal is always a single letter
  if (decl.name == "next") {
    r.word = args[0].word;
    r.word.insert(r.word.end(), args[1].word.begin(), args[1].word.end());
    r.base = args[1].base;
  } else {
    r.emit = args[0].word.front();
    r.word = args[1].word;
    r.base = args[1].base;
  }
  return r;
}

using NormalFormEnv = std::map<std::string, NormalForm>;

/** A map between finite fragments of a free algebra. */
using FragmentMap = std::map<NormalForm, NormalForm>;

/** Normal form of t with each variable replaced by the element bound in env. */
inline NormalForm nf_eval(BuiltinId id, const Term& t, const NormalFormEnv& env) {
  if (t.is_variable()) {
    auto it = env.find(t.name());
    if (it == env.end()) throw UnboundVariable(t.name());
    if (it->second.sort != t.sort()) throw SortError("binding for '" + t.name() + "' has the wrong sort");
    return it->second;
  }
  std::vector<NormalForm> args;
  for (const auto& c : t.children()) args.push_back(nf_eval(id, c, env));
  return free_apply(id, t.name(), args);
}

/** Normal form of t with every variable read as the free generator of the same name. */
inline NormalForm nf_eval(BuiltinId id, const Term& t) {
  NormalFormEnv env;
  for (const auto& v : vars_of(t)) env.emplace(v.name, generator_form(id, v));
  return nf_eval(id, t, env);
}

inline bool nf_equal(BuiltinId id, const Term& a, const Term& b) {
  if (a.sort() != b.sort()) throw SortError("comparing terms of different sorts");
  return nf_eval(id, a) == nf_eval(id, b);
}

/** A canonical term representing f: right-nested products and actions. */
inline Term to_term(BuiltinId id, const NormalForm& f) {
  const Signature& sig = builtin_spec(id).signature;
  auto letter = [](const std::string& x) { return mk_var(x, "1"); };
  if (f.base.empty()) {
    if (f.word.empty()) throw SortError("empty sort-1 normal form");
    if (id == BuiltinId::automaton) return letter(f.word.front());
    Term t = letter(f.word.back());
    for (std::size_t i = f.word.size() - 1; i > 0; --i) t = mk_app(sig, "mul", {letter(f.word[i - 1]), t});
    return t;
  }
  const bool bare_output = id == BuiltinId::automaton && f.sort == "3" && f.emit.empty();
  Term t = mk_var(f.base, bare_output ? "3" : "2");
  const std::string step = id == BuiltinId::act ? "act" : "next";
  for (std::size_t i = f.word.size(); i > 0; --i) t = mk_app(sig, step, {letter(f.word[i - 1]), t});
  if (!f.emit.empty()) t = mk_app(sig, "out", {letter(f.emit), t});
  return t;
}

namespace detail {
inline void words_of_length(const std::vector<std::string>& letters, std::size_t len,
                            std::vector<std::vector<std::string>>& out) {
  std::vector<std::string> cur;
  std::function<void()> rec = [&] {
    if (cur.size() == len) {
      out.push_back(cur);
      return;
    }
    for (const auto& l : letters) {
      cur.push_back(l);
      rec();
      cur.pop_back();
    }
  };
  rec();
}
}  // namespace detail

/** Every normal form over X with at most `bound` generator occurrences, canonically ordered. */
inline std::vector<NormalForm> free_elements_up_to(BuiltinId id, const SortedAlphabet& x,
                                                   std::size_t bound) {
  std::vector<std::string> letters;
  std::vector<std::string> states;
  std::vector<std::string> outputs;
  for (const auto& v : x) {
    if (v.sort == "1") {
      letters.push_back(v.name);
    } else if (v.sort == "2") {
      states.push_back(v.name);
    } else if (id == BuiltinId::automaton && v.sort == "3") {
      outputs.push_back(v.name);
    } else {
      throw SortError("sort '" + v.sort + "' does not exist in variety '" +
                      std::string(builtin_name(id)) + "'");
    }
  }
  std::vector<NormalForm> out;
  auto words = [&](std::size_t len) {
    std::vector<std::vector<std::string>> ws;
    detail::words_of_length(letters, len, ws);
    return ws;
  };
  for (std::size_t size = 1; size <= bound; ++size) {
    if (id == BuiltinId::act || size == 1) {
      for (auto& w : words(size)) out.push_back(NormalForm{"1", std::move(w), "", ""});
    }
    for (const auto& s : states) {
      for (auto& w : words(size - 1)) out.push_back(NormalForm{"2", std::move(w), s, ""});
    }
    if (id == BuiltinId::automaton) {
      if (size == 1) {
        for (const auto& y : outputs) out.push_back(NormalForm{"3", {}, y, ""});
      }
      if (size >= 2) {
        for (const auto& a : letters) {
          for (const auto& s : states) {
            for (auto& w : words(size - 2)) out.push_back(NormalForm{"3", std::move(w), s, a});
          }
        }
      }
    }
  }
  std::sort(out.begin(), out.end(), canonical_less);
  return out;
}

}  // namespace msa

#endif  // MSA_FREE_FORMS_HPP
