#ifndef MSA_CLI_HPP
#define MSA_CLI_HPP

// Command-line front end. Every command computes one verdict and emits a JSON report
// whose content, except the timing field, depends only on the inputs.
//
// Exit codes: 0 verdict computed, 1 usage or parse error, 2 budget exceeded.

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "msa/closure.hpp"
#include "msa/error.hpp"
#include "msa/finite_algebra.hpp"
#include "msa/free_forms.hpp"
#include "msa/search.hpp"
#include "msa/text.hpp"
#include "msa/verbal.hpp"

namespace msa::cli {

using Json = nlohmann::ordered_json;

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitBudget = 2;

struct CommandResult {
  int exit_code = kExitOk;
  Json report;
};

inline std::string fnv1a_hex(std::string_view data) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : data) {
    h ^= c;
    h *= 1099511628211ull;
  }
  std::ostringstream s;
  s << std::hex << std::setw(16) << std::setfill('0') << h;
  return s.str();
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read '" + path + "'");
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

/** A file path, or else the id of a built-in variety. */
inline std::string variety_source(const std::string& arg) {
  if (std::filesystem::is_regular_file(arg)) return read_file(arg);
  if (auto id = find_builtin(arg)) return std::string(builtin_text(*id));
  throw Error("'" + arg + "' is neither a file nor a built-in variety");
}

// JSON views

inline Json to_json(const WordSystem& w) {
  Json j = Json::object();
  for (const auto& [op, word] : w) j[op] = render(word.body);
  return j;
}

inline Json to_json(const TermPair& p) { return Json{{"lhs", render(p.lhs)}, {"rhs", render(p.rhs)}}; }

inline Json to_json(const SortedAlphabet& x) {
  Json j = Json::array();
  for (const auto& v : x) j.push_back(v.name + ":" + v.sort);
  return j;
}

inline Json to_json(const EquationSystem& t) {
  Json pairs = Json::array();
  for (const auto& p : t.pairs) pairs.push_back(render(p));
  return Json{{"alphabet", to_json(t.alphabet)}, {"pairs", pairs}};
}

inline Json assignment_json(const FiniteAlgebra& h, const SortedAlphabet& x, std::span<const Elem> values) {
  Json j = Json::object();
  for (std::size_t i = 0; i < x.size(); ++i) {
    j[x[i].name] = h.element_name(h.signature().require_sort(x[i].sort), values[i]);
  }
  return j;
}

inline Json to_json(const GeometricWitness& w) {
  return Json{{"alphabet", to_json(w.alphabet)},
              {"system", to_json(w.system)},
              {"pair", render(w.pair)},
              {"closed_over", w.closed_side == 0 ? "first" : "second"}};
}

inline Json to_json(const GeometricVerdict& g) {
  Json j{{"verdict", g.equivalent ? "EQUIVALENT_UP_TO_BOUND" : "NOT_EQUIVALENT"},
         {"alphabets_checked", g.alphabets_checked},
         {"congruences_checked", g.congruences_checked}};
  if (g.witness) j["witness"] = to_json(*g.witness);
  return j;
}

inline Json to_json(const Rejection& r, const VarietySpec& v) {
  Json j{{"words", to_json(r.words)}, {"reason", r.reason}};
  if (r.model && r.violation) {
    const Identity& id = v.identities[r.violation->identity];
    j["witness"] = Json{{"identity", id.name},
                        {"equation", render(TermPair{id.lhs, id.rhs})},
                        {"assignment", assignment_json(*r.model, id.alphabet, r.violation->assignment)},
                        {"model", print_algebra(*r.model)}};
  } else if (r.induced) {
    const InducedMap& s = *r.induced;
    Json w{{"alphabet", to_json(r.alphabet)}, {"fragment_bound", s.bound}};
    switch (s.reason) {
      case RejectReason::not_injective:
        w["first"] = render(s.first);
        w["second"] = render(s.second);
        break;
      case RejectReason::not_surjective:
        w["missing"] = render(s.missing);
        break;
      case RejectReason::not_homomorphic: {
        Json args = Json::array();
        for (const auto& a : s.args) args.push_back(render(a));
        w["op"] = s.op;
        w["args"] = args;
        w["image_of_result"] = render(s.first);
        w["word_on_images"] = render(s.second);
        break;
      }
      default:
        break;
    }
    j["witness"] = w;
  }
  return j;
}

namespace detail {
struct Options {
  std::string variety;
  std::vector<std::string> models;
  std::string system;
  std::string words;
  std::string query;
  std::string json;
  std::size_t max_generators = 2;
  std::size_t max_word_size = 3;
  std::size_t fragment_bound = 6;
  std::size_t probe_size = 2;
  std::size_t max_model_size = 2;
  std::uint64_t budget = 1'000'000;
  std::size_t jobs = 1;
  bool include_degenerate = false;
};

struct Inputs {
  VarietySpec variety;
  std::string digest_source;

  void note(const std::string& label, const std::string& content) {
    digest_source += label;
    digest_source.push_back('\0');
    digest_source += content;
    digest_source.push_back('\0');
  }
};

inline FiniteAlgebra load_model(Inputs& in, const std::string& path) {
  const std::string src = read_file(path);
  in.note("model", src);
  return parse_algebra(src, in.variety);
}

inline Budget budget_of(const Options& o) { return Budget{o.budget, o.budget}; }

inline SearchConfig config_of(const Options& o, const VarietySpec& v) {
  SearchConfig cfg;
  cfg.variety = v;
  cfg.max_word_size = o.max_word_size;
  cfg.fragment_bound = o.fragment_bound;
  cfg.probe_size = o.probe_size;
  cfg.max_generators = o.max_generators;
  cfg.include_degenerate = o.include_degenerate;
  cfg.jobs = o.jobs;
  cfg.budget = budget_of(o);
  return cfg;
}

inline void need(bool ok, const std::string& what) {
  if (!ok) throw CLI::ValidationError(what);
}

inline Json hom_json(const FiniteAlgebra& a, const FiniteAlgebra& b, const SortedMap& phi) {
  Json j = Json::object();
  const Signature& sig = a.signature();
  for (std::size_t s = 0; s < a.sort_count(); ++s) {
    Json m = Json::object();
    for (std::size_t e = 0; e < a.carrier_size(s); ++e) {
      m[a.element_name(s, static_cast<Elem>(e))] = b.element_name(s, phi.images[s][e]);
    }
    j[sig.sorts()[s]] = m;
  }
  return j;
}

/** Runs one command; fills report fields other than the envelope. */
inline void dispatch(const std::string& command, const Options& o, Inputs& in, Json& r, std::ostream& out) {
  const Budget budget = budget_of(o);
  const Signature& sig = in.variety.signature;
  Json bounds = Json::object();
  Json witnesses = Json::array();
  Json result = Json::object();
  std::string verdict;

  std::vector<FiniteAlgebra> models;
  for (const auto& path : o.models) models.push_back(load_model(in, path));
  auto system = [&] {
    need(!o.system.empty(), "--system is required");
    const std::string src = read_file(o.system);
    in.note("system", src);
    return parse_equations(src, sig);
  };
  auto words = [&] {
    need(!o.words.empty(), "--words is required");
    const std::string src = read_file(o.words);
    in.note("words", src);
    return parse_words(src, sig);
  };

  if (command == "validate") {
    verdict = "VALID";
    result["variety"] = in.variety.name;
    result["sorts"] = sig.sorts();
    result["operations"] = sig.ops().size();
    result["identities"] = in.variety.identities.size();
    Json ms = Json::array();
    for (std::size_t i = 0; i < models.size(); ++i) {
      Json m{{"model", o.models[i]}, {"sizes", Json::array()}};
      for (std::size_t s = 0; s < models[i].sort_count(); ++s) m["sizes"].push_back(models[i].carrier_size(s));
      if (auto v = first_variety_violation(models[i], in.variety, budget)) {
        const Identity& id = in.variety.identities[v->identity];
        m["in_variety"] = false;
        witnesses.push_back(Json{{"model", o.models[i]},
                                 {"identity", id.name},
                                 {"assignment", assignment_json(models[i], id.alphabet, v->assignment)}});
        verdict = "NOT_IN_VARIETY";
      } else {
        m["in_variety"] = true;
      }
      ms.push_back(m);
    }
    result["models"] = ms;
    out << verdict << "\n";
  } else if (command == "homs") {
    need(models.size() == 2, "homs takes two models");
    const auto homs = enumerate_homs(models[0], models[1], budget);
    verdict = "COMPUTED";
    result["count"] = homs.size();
    Json list = Json::array();
    for (const auto& h : homs) list.push_back(hom_json(models[0], models[1], h));
    result["homomorphisms"] = list;
    out << homs.size() << " homomorphisms\n";
  } else if (command == "closure") {
    need(models.size() == 1, "closure takes one model");
    const EquationSystem t = system();
    const SolutionSet s = solutions(t, models[0], budget);
    result["system"] = to_json(t);
    result["solutions"] = s.size();
    if (!o.query.empty()) {
      in.note("query", o.query);
      const TermPair q = parse_query(o.query, sig, t.alphabet);
      const bool member = closure_member(t, models[0], q, budget);
      verdict = member ? "MEMBER" : "NOT_MEMBER";
      result["query"] = render(q);
      result["member"] = member;
    } else {
      const ClosednessReport c = is_closed_report(t, models[0], budget);
      verdict = c.closed ? "CLOSED" : "NOT_CLOSED";
      if (c.witness) witnesses.push_back(Json{{"entailed_by_closure_only", render(*c.witness)}});
    }
    out << verdict << "\n";
  } else if (command == "geom-eq") {
    need(models.size() == 2, "geom-eq takes two models");
    bounds["max_generators"] = o.max_generators;
    const GeometricVerdict g = geom_equivalent(models[0], models[1], o.max_generators, budget, o.jobs);
    verdict = g.equivalent ? "EQUIVALENT_UP_TO_BOUND" : "NOT_EQUIVALENT";
    result = to_json(g);
    result.erase("verdict");
    if (g.witness) {
      result["witness_verified"] = verify_geometric_witness(*g.witness, models[0], models[1], budget);
      witnesses.push_back(to_json(*g.witness));
    }
    out << verdict << "\n";
    if (g.witness) out << "  X:" << print_alphabet(g.witness->alphabet) << "\n  pair: " << render(g.witness->pair) << "\n";
  } else if (command == "derive") {
    need(models.size() == 1, "derive takes one model");
    const WordSystem w = words();
    const FiniteAlgebra d = derive_algebra(models[0], w);
    verdict = "DERIVED";
    result["words"] = to_json(w);
    result["algebra"] = print_algebra(d);
    if (auto v = first_variety_violation(d, in.variety, budget)) {
      const Identity& id = in.variety.identities[v->identity];
      result["in_variety"] = false;
      witnesses.push_back(Json{{"identity", id.name}, {"assignment", assignment_json(d, id.alphabet, v->assignment)}});
    } else {
      result["in_variety"] = true;
    }
    out << print_algebra(d);
  } else if (command == "search-words") {
    const SearchConfig cfg = config_of(o, in.variety);
    bounds["max_word_size"] = o.max_word_size;
    bounds["fragment_bound"] = o.fragment_bound;
    bounds["probe_size"] = o.probe_size;
    bounds["include_degenerate"] = o.include_degenerate;
    const ClassificationReport rep = classify_strongly_stable(cfg);
    verdict = "CLASSIFIED";
    result["examined"] = rep.examined;
    result["probe_models"] = rep.probe_models;
    result["probe_alphabet"] = to_json(rep.probe_alphabet);
    Json acc = Json::array();
    for (const auto& w : rep.accepted) acc.push_back(to_json(w));
    result["accepted"] = acc;
    result["rejected_count"] = rep.rejected.size();
    for (const auto& rj : rep.rejected) witnesses.push_back(to_json(rj, in.variety));
    out << "examined " << rep.examined << ", accepted " << rep.accepted.size() << ", rejected "
        << rep.rejected.size() << "\n";
    for (const auto& w : rep.accepted) out << "accepted:\n" << print_words(w);
  } else if (command == "auto-eq") {
    need(models.size() == 2, "auto-eq takes two models");
    const SearchConfig cfg = config_of(o, in.variety);
    bounds["max_generators"] = o.max_generators;
    std::vector<WordSystem> accepted;
    if (!o.words.empty()) {
      accepted.push_back(words());
      result["candidates_from"] = "words";
    } else {
      bounds["max_word_size"] = o.max_word_size;
      bounds["fragment_bound"] = o.fragment_bound;
      bounds["probe_size"] = o.probe_size;
      accepted = classify_strongly_stable(cfg).accepted;
      result["candidates_from"] = "search";
    }
    const AutoVerdict a = auto_equivalent(models[0], models[1], cfg, accepted);
    verdict = a.yes ? "YES" : "NO_UP_TO_BOUNDS";
    result["candidates"] = a.candidates;
    if (a.words) result["words"] = to_json(*a.words);
    for (const auto& [w, g] : a.witnesses) witnesses.push_back(Json{{"words", to_json(w)}, {"geometric", to_json(g)}});
    out << verdict << "\n";
    if (a.words) out << print_words(*a.words);
  } else if (command == "counterexample") {
    const WordSystem w = words();
    bounds["max_model_size"] = o.max_model_size;
    bounds["max_generators"] = o.max_generators;
    const CounterexampleResult c =
        counterexample_search(in.variety, w, o.max_model_size, o.max_generators, budget, o.jobs);
    verdict = c.hit ? "HIT" : "NONE";
    result["words"] = to_json(w);
    result["models_scanned"] = c.models_scanned;
    if (c.hit) {
      witnesses.push_back(Json{{"model", print_algebra(c.hit->model)},
                               {"derived", print_algebra(c.hit->derived)},
                               {"geometric", to_json(c.hit->witness)},
                               {"verified", c.hit->verified}});
    }
    out << verdict << " (" << c.models_scanned << " models)\n";
  }
  bounds["budget"] = o.budget;
  r["verdict"] = verdict;
  r["result"] = result;
  r["witnesses"] = witnesses;
  r["bounds"] = bounds;
}
}  // namespace detail

/**
 * Parses argv (program name first) and runs the command. Human-readable output goes to
 * `out`, diagnostics to `err`; with `--json -` the report replaces the text on `out`.
 */
inline CommandResult run_command(const std::vector<std::string>& argv, std::ostream& out = std::cout,
                                 std::ostream& err = std::cerr) {
  const auto start = std::chrono::steady_clock::now();
  CLI::App app{"Many-sorted algebra toolkit: closures, geometric and automorphic equivalence", "msa"};
  app.require_subcommand(1);
  detail::Options o;
  struct Spec {
    const char* name;
    const char* help;
  };
  const Spec commands[] = {
      {"validate", "parse a variety and optional models, checking membership"},
      {"homs", "enumerate homomorphisms between two models"},
      {"closure", "closure membership queries and closedness of an equation system"},
      {"geom-eq", "bounded geometric equivalence of two models"},
      {"derive", "derived algebra of a model under a word system"},
      {"search-words", "classify word systems of a built-in variety"},
      {"auto-eq", "automorphic equivalence of two models"},
      {"counterexample", "scan small models for geometric inequivalence with their derived algebra"},
  };
  for (const auto& c : commands) {
    CLI::App* sub = app.add_subcommand(c.name, c.help);
    sub->add_option("--variety", o.variety, "variety file or built-in id (act, automaton)")->required();
    sub->add_option("models", o.models, "model files");
    sub->add_option("--model", o.models, "model file");
    sub->add_option("--system", o.system, "equation system file");
    sub->add_option("--words", o.words, "word system file");
    sub->add_option("--query", o.query, "pair 'lhs = rhs' over the system's alphabet");
    sub->add_option("--max-generators", o.max_generators, "generators per sort")->check(CLI::Range(1, 16));
    sub->add_option("--max-word-size", o.max_word_size, "generator occurrences per word")->check(CLI::Range(1, 16));
    sub->add_option("--fragment-bound", o.fragment_bound, "normal-form size for induced maps")->check(CLI::Range(1, 16));
    sub->add_option("--probe-size", o.probe_size, "elements per sort of probe models")->check(CLI::Range(1, 4));
    sub->add_option("--max-model-size", o.max_model_size, "elements per sort of scanned models")->check(CLI::Range(1, 4));
    sub->add_option("--budget", o.budget, "cap on enumerated maps and constructed elements")->check(CLI::PositiveNumber);
    sub->add_option("--jobs", o.jobs, "worker threads")->check(CLI::Range(1, 256));
    sub->add_flag("--include-degenerate", o.include_degenerate, "keep projection words");
    sub->add_option("--json", o.json, "write the JSON report to a path, or - for stdout");
  }

  CommandResult res;
  std::vector<std::string> args(argv.rbegin(), argv.rend());
  if (!args.empty()) args.pop_back();
  std::ostringstream text;
  std::string command;
  try {
    app.parse(args);
    command = app.get_subcommands().front()->get_name();
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return res;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return res;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    res.exit_code = kExitUsage;
    return res;
  }
  for (auto* sub : app.get_subcommands()) {
    if (sub->get_help_ptr() && sub->get_help_ptr()->count() > 0) {
      out << sub->help();
      return res;
    }
  }

  Json& r = res.report;
  r["schema"] = 1;
  r["command"] = command;
  detail::Inputs in;
  try {
    const std::string src = variety_source(o.variety);
    in.note("variety", src);
    in.variety = parse_variety(src);
    detail::dispatch(command, o, in, r, text);
  } catch (const BudgetExceeded& e) {
    err << "budget exceeded: " << e.what() << "\n";
    r["verdict"] = "BUDGET_EXCEEDED";
    r["result"] = Json{{"what", e.what()}, {"required", e.required()}, {"bound", e.bound()}};
    res.exit_code = kExitBudget;
  } catch (const ParseError& e) {
    err << "parse error: " << e.what() << "\n";
    res.exit_code = kExitUsage;
  } catch (const CLI::Error& e) {
    err << "error: " << e.what() << "\n";
    res.exit_code = kExitUsage;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    res.exit_code = kExitUsage;
  }
  if (res.exit_code == kExitUsage) return res;

  Json ordered;
  ordered["schema"] = 1;
  ordered["command"] = command;
  ordered["inputs_digest"] = fnv1a_hex(in.digest_source);
  for (const char* key : {"verdict", "result", "witnesses", "bounds"}) {
    if (r.contains(key)) ordered[key] = r[key];
  }
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  ordered["timing"] = Json{{"seconds", seconds}};
  r = std::move(ordered);

  if (o.json == "-") {
    out << r.dump(2) << "\n";
  } else {
    out << text.str();
    if (!o.json.empty()) {
      std::ofstream f(o.json, std::ios::binary);
      if (!f) {
        err << "error: cannot write '" << o.json << "'\n";
        res.exit_code = kExitUsage;
        return res;
      }
      f << r.dump(2) << "\n";
    }
  }
  return res;
}

}  // namespace msa::cli

#endif  // MSA_CLI_HPP
