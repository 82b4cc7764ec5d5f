#ifndef MSA_WORDS_HPP
#define MSA_WORDS_HPP

#include <map>
#include <string>
#include <vector>

#include "msa/signature.hpp"
#include "msa/term.hpp"

namespace msa {

/** Name of the k-th designated variable (1-based) of a word: x1, x2, ... */
inline std::string designated_var(std::size_t k) { return "x" + std::to_string(k); }

/** The alphabet x1:i1, ..., xn:in of an operation type. */
inline SortedAlphabet designated_alphabet(const OpType& type) {
  SortedAlphabet x;
  for (std::size_t k = 0; k < type.args.size(); ++k) x.add(designated_var(k + 1), type.args[k]);
  return x;
}

/**
 * A word of a given operation type: a term over the designated variables x1..xn. Not every
 * designated variable has to occur in the body.
 */
struct Word {
  OpType type;
  Term body;

  friend bool operator==(const Word&, const Word&) = default;
};

/** Total map from operation names to words of matching type. */
using WordSystem = std::map<std::string, Word>;

inline Word identity_word(const Signature& sig, const OpDecl& op) {
  std::vector<Term> args;
  for (std::size_t k = 0; k < op.type.args.size(); ++k) {
    args.push_back(mk_var(designated_var(k + 1), op.type.args[k]));
  }
  return Word{op.type, mk_app(sig, op.name, std::move(args))};
}

/** The system w_op = op(x1,...,xn) for every operation. */
inline WordSystem identity_word_system(const Signature& sig) {
  WordSystem w;
  for (const auto& op : sig.ops()) w.emplace(op.name, identity_word(sig, op));
  return w;
}

inline bool is_identity_system(const Signature& sig, const WordSystem& w) {
  return w == identity_word_system(sig);
}

/** Checks the word-system shape: total over the ops, types match, bodies over x1..xn. */
inline ValidationReport validate_word_system(const Signature& sig, const WordSystem& w) {
  ValidationReport r;
  for (const auto& op : sig.ops()) {
    auto it = w.find(op.name);
    if (it == w.end()) {
      r.violations.push_back("no word for operation '" + op.name + "'");
      continue;
    }
    const Word& word = it->second;
    if (!(word.type == op.type)) r.violations.push_back("word for '" + op.name + "' has the wrong type");
    if (auto e = check_sorts(sig, word.body); !e.empty()) {
      r.violations.push_back("word for '" + op.name + "': " + e);
      continue;
    }
    if (word.body.sort() != op.type.result) {
      r.violations.push_back("word for '" + op.name + "' has result sort '" + word.body.sort() + "'");
    }
    const SortedAlphabet x = designated_alphabet(op.type);
    for (const auto& v : vars_of(word.body)) {
      auto idx = x.find(v.name);
      if (!idx || x[*idx].sort != v.sort) {
        r.violations.push_back("word for '" + op.name + "' uses variable '" + v.name +
                               "' outside x1..x" + std::to_string(op.type.arity()));
      }
    }
  }
  for (const auto& [name, word] : w) {
    if (!sig.find_op(name)) r.violations.push_back("word for undeclared operation '" + name + "'");
  }
  return r;
}

/** A finite system of same-sorted equations over a declared alphabet X. */
struct EquationSystem {
  SortedAlphabet alphabet;
  std::vector<TermPair> pairs;

  friend bool operator==(const EquationSystem&, const EquationSystem&) = default;
};

}  // namespace msa

#endif  // MSA_WORDS_HPP
