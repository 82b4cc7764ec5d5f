#ifndef MSA_VARIETY_HPP
#define MSA_VARIETY_HPP

#include <string>
#include <vector>

#include "msa/signature.hpp"
#include "msa/term.hpp"

namespace msa {

/**
 * An identity lhs = rhs together with the alphabet it quantifies over. The alphabet is the
 * identity's own, so the same name may have different sorts in different identities.
 */
struct Identity {
  std::string name;
  SortedAlphabet alphabet;
  Term lhs;
  Term rhs;

  friend bool operator==(const Identity&, const Identity&) = default;
};

struct VarietySpec {
  std::string name;
  Signature signature;
  std::vector<Identity> identities;

  friend bool operator==(const VarietySpec&, const VarietySpec&) = default;
};

namespace detail {
inline void check_term_against_alphabet(const Signature& sig, const Term& t,
                                        const SortedAlphabet& alphabet, const std::string& where,
                                        std::vector<std::string>& out) {
  if (auto e = check_sorts(sig, t); !e.empty()) {
    out.push_back(where + ": " + e);
    return;
  }
  std::map<std::string, std::string> used;
  try {
    collect_vars(t, used);
  } catch (const SortError& e) {
    out.push_back(where + ": " + e.what());
    return;
  }
  for (const auto& [name, sort] : used) {
    auto idx = alphabet.find(name);
    if (!idx) {
      out.push_back(where + ": variable '" + name + "' is not declared");
    } else if (alphabet[*idx].sort != sort) {
      out.push_back(where + ": variable '" + name + "' used with sort '" + sort +
                    "' but declared '" + alphabet[*idx].sort + "'");
    }
  }
}
}  // namespace detail

inline ValidationReport validate_variety(const VarietySpec& v) {
  ValidationReport report = validate_signature(v.signature);
  if (!report.ok()) return report;
  for (std::size_t i = 0; i < v.identities.size(); ++i) {
    const Identity& id = v.identities[i];
    const std::string where = "identity '" + (id.name.empty() ? std::to_string(i) : id.name) + "'";
    for (const auto& var : id.alphabet) {
      if (!v.signature.has_sort(var.sort)) {
        report.violations.push_back(where + ": variable '" + var.name + "' has undeclared sort '" +
                                    var.sort + "'");
      }
    }
    detail::check_term_against_alphabet(v.signature, id.lhs, id.alphabet, where, report.violations);
    detail::check_term_against_alphabet(v.signature, id.rhs, id.alphabet, where, report.violations);
    if (id.lhs.sort() != id.rhs.sort()) {
      report.violations.push_back(where + ": sides have different sorts '" + id.lhs.sort() +
                                  "' and '" + id.rhs.sort() + "'");
    }
  }
  return report;
}

}  // namespace msa

#endif  // MSA_VARIETY_HPP
