#pragma once

#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "mdl/normalform.hpp"
#include "mdl/syntax.hpp"

namespace mdl {

enum class SystemId { HMT0, HMID, HInql, HK };

inline const char* system_name(SystemId s) {
  switch (s) {
    case SystemId::HMT0: return "HMT0";
    case SystemId::HMID: return "HMID";
    case SystemId::HInql: return "HInql";
    case SystemId::HK: return "HK";
  }
  return "?";
}

inline SystemId system_from_string(const std::string& s) {
  for (auto id : {SystemId::HMT0, SystemId::HMID, SystemId::HInql, SystemId::HK})
    if (s == system_name(id)) return id;
  throw InputError("unknown proof system '" + s + "'");
}

// Fragment whose semantics the system is sound for.
inline Fragment system_fragment(SystemId s) {
  return s == SystemId::HMT0 || s == SystemId::HK ? Fragment::MT0 : Fragment::MID;
}

namespace detail {

inline bool has_op(const Formula& f, Op op) {
  if (f.op() == op) return true;
  for (const auto& k : f.kids())
    if (has_op(k, op)) return true;
  return false;
}

}  // namespace detail

inline bool in_language(const Formula& f, SystemId s) {
  switch (s) {
    case SystemId::HMT0: return well_formed(f, Fragment::MT0);
    case SystemId::HMID: return well_formed(f, Fragment::MID);
    case SystemId::HInql:
      return well_formed(f, Fragment::MID) && !detail::has_op(f, Op::Box) && !detail::has_op(f, Op::Diamond) &&
             !detail::has_op(f, Op::Dep);
    case SystemId::HK: return is_classical(f, Fragment::MT0);
  }
  return false;
}

// Metavariables: phi psi chi theta range over formulas, alpha beta over
// classical formulas. Outside HK negation is read as -> bot.
struct Scheme {
  std::string id;
  std::string text;
};

inline const std::vector<Scheme>& schemes(SystemId s) {
  static const std::vector<Scheme> ipc = {
      {"a", "phi -> (psi -> phi)"},
      {"b", "(phi -> (psi -> chi)) -> ((phi -> psi) -> (phi -> chi))"},
      {"c", "phi & psi -> phi"},
      {"c'", "phi & psi -> psi"},
      {"d", "phi -> (psi -> phi & psi)"},
      {"e", "phi -> phi \\/ psi"},
      {"e'", "psi -> phi \\/ psi"},
      {"f", "(phi -> chi) -> ((psi -> chi) -> (phi \\/ psi -> chi))"},
      {"g", "bot -> phi"},
  };
  auto build = [&](bool tensor) {
    std::vector<Scheme> out;
    for (const auto& x : ipc) out.push_back({"1.1" + x.id, x.text});
    out.push_back({"1.2", "(alpha -> phi \\/ psi) -> (alpha -> phi) \\/ (alpha -> psi)"});
    out.push_back({"1.3", "~~alpha -> alpha"});
    out.push_back({"2.2", "[](phi -> psi) -> ([]phi -> []psi)"});
    out.push_back({"2.3", "[](phi -> psi) -> (<>phi -> <>psi)"});
    out.push_back({"2.4", "~<>bot"});
    out.push_back({"2.5", "<>(phi \\/ psi) -> <>phi \\/ <>psi"});
    out.push_back({"2.6", "(<>phi -> []psi) -> [](phi -> psi)"});
    out.push_back({"3", "=(alpha,...,beta) <-> (alpha \\/ ~alpha) & ... -> beta \\/ ~beta"});
    if (tensor) {
      out.push_back({"4", "phi -> phi | psi"});
      out.push_back({"5", "(phi -> alpha) -> ((psi -> alpha) -> (phi | psi -> alpha))"});
      out.push_back({"6", "(phi -> chi) -> ((psi -> theta) -> (phi | psi -> chi | theta))"});
      out.push_back({"7", "phi | psi -> psi | phi"});
      out.push_back({"8", "phi | (psi | chi) -> (phi | psi) | chi"});
      out.push_back({"9", "phi | (psi \\/ chi) -> (phi | psi) \\/ (phi | chi)"});
    }
    out.push_back({"10", "~[]alpha -> <>~alpha"});
    out.push_back({"11", "[](phi \\/ psi) -> []phi \\/ []psi"});
    return out;
  };
  static const std::vector<Scheme> mt0 = build(true);
  static const std::vector<Scheme> mid = build(false);
  static const std::vector<Scheme> inql = [&] {
    std::vector<Scheme> out;
    for (const auto& x : ipc) out.push_back({"1" + x.id, x.text});
    out.push_back({"2", "(alpha -> phi \\/ psi) -> (alpha -> phi) \\/ (alpha -> psi)"});
    out.push_back({"3", "~~alpha -> alpha"});
    return out;
  }();
  static const std::vector<Scheme> k = {
      {"1", "any classical propositional tautology"},
      {"2", "[](alpha -> beta) -> ([]alpha -> []beta)"},
      {"3", "(<>alpha -> ~[]~alpha) & (~[]~alpha -> <>alpha)"},
  };
  switch (s) {
    case SystemId::HMT0: return mt0;
    case SystemId::HMID: return mid;
    case SystemId::HInql: return inql;
    case SystemId::HK: return k;
  }
  return k;
}

// Leading number of a scheme id: "1.1c'" -> 1, "10" -> 10, "1a" -> 1.
inline int scheme_number(const std::string& id) {
  int n = 0;
  for (char c : id) {
    if (c < '0' || c > '9') break;
    n = n * 10 + (c - '0');
  }
  return n;
}

// Schemes without a pattern: the dependence atom axiom and the HK tautologies.
inline bool is_dep_scheme(SystemId s, const std::string& id) {
  return (s == SystemId::HMT0 || s == SystemId::HMID) && id == "3";
}
inline bool is_tautology_scheme(SystemId s, const std::string& id) { return s == SystemId::HK && id == "1"; }

struct AxiomMatch {
  std::string id;
  std::map<std::string, Formula> bindings;
};

namespace detail {

inline bool is_metavar(const std::string& n) {
  return n == "phi" || n == "psi" || n == "chi" || n == "theta" || n == "alpha" || n == "beta";
}

inline bool match(const Formula& pat, const Formula& f, Fragment frag, std::map<std::string, Formula>& b) {
  if (pat.op() == Op::Prop && is_metavar(pat.name())) {
    if ((pat.name() == "alpha" || pat.name() == "beta") && !is_classical(f, frag)) return false;
    auto [it, fresh] = b.emplace(pat.name(), f);
    return fresh || it->second == f;
  }
  if (pat.op() != f.op() || pat.name() != f.name() || pat.kids().size() != f.kids().size()) return false;
  for (std::size_t i = 0; i < pat.kids().size(); ++i)
    if (!match(pat.kids()[i], f.kids()[i], frag, b)) return false;
  return true;
}

inline Formula iff(const Formula& a, const Formula& b) { return conj(imp(a, b), imp(b, a)); }

// (d -> D) & (D -> d) with D the implication form of the dependence atom d.
inline std::optional<AxiomMatch> match_dep_axiom(const Formula& f) {
  if (f.op() != Op::And || f.lhs().op() != Op::Implies || f.lhs().lhs().op() != Op::Dep) return std::nullopt;
  const Formula& d = f.lhs().lhs();
  if (!(f == iff(d, desugar_neg(dep_implication_form(d))))) return std::nullopt;
  AxiomMatch m{"3", {}};
  for (std::size_t i = 0; i < d.dep_args().size(); ++i) m.bindings["alpha" + std::to_string(i + 1)] = d.dep_args()[i];
  m.bindings["beta"] = d.dep_target();
  return m;
}

// Skeleton truth table: atoms are props and modal subformulas.
inline bool truth(const Formula& f, const std::map<const void*, bool>& atoms) {
  switch (f.op()) {
    case Op::Bot: return false;
    case Op::Neg: return !truth(f.child(), atoms);
    case Op::And: return truth(f.lhs(), atoms) && truth(f.rhs(), atoms);
    case Op::Tensor:
    case Op::Or: return truth(f.lhs(), atoms) || truth(f.rhs(), atoms);
    case Op::Implies: return !truth(f.lhs(), atoms) || truth(f.rhs(), atoms);
    default: return atoms.at(f.id());
  }
}

inline void skeleton_atoms(const Formula& f, std::vector<Formula>& out) {
  switch (f.op()) {
    case Op::Bot: return;
    case Op::Neg:
    case Op::And:
    case Op::Tensor:
    case Op::Or:
    case Op::Implies:
      for (const auto& k : f.kids()) skeleton_atoms(k, out);
      return;
    default:
      for (const auto& a : out)
        if (a == f) return;
      out.push_back(f);
  }
}

}  // namespace detail

// Classical propositional tautology, modal subformulas taken as atoms.
inline bool is_tautology(const Formula& f) {
  std::vector<Formula> atoms;
  detail::skeleton_atoms(f, atoms);
  if (atoms.size() > 16) throw LimitError("tautology check over more than 16 atoms");
  std::map<const void*, bool> v;
  for (std::uint32_t row = 0; row < (1U << atoms.size()); ++row) {
    // map every node equal to an atom, not just the first occurrence
    v.clear();
    std::function<void(const Formula&)> bind = [&](const Formula& g) {
      for (std::size_t i = 0; i < atoms.size(); ++i)
        if (g == atoms[i]) {
          v[g.id()] = (row >> i) & 1U;
          return;
        }
      for (const auto& k : g.kids()) bind(k);
    };
    bind(f);
    if (!detail::truth(f, v)) return false;
  }
  return true;
}

// First scheme of s (in list order) that f instantiates.
inline std::optional<AxiomMatch> match_axiom(const Formula& f, SystemId s) {
  if (!in_language(f, s)) throw FragmentError(std::string("not in the language of ") + system_name(s) + ": " + print(f));
  const Fragment frag = system_fragment(s);
  if (s == SystemId::HK) {
    if (is_tautology(f)) return AxiomMatch{"1", {}};
    for (const auto& sc : schemes(s)) {
      if (sc.id == "1") continue;
      std::map<std::string, Formula> b;
      if (detail::match(parse(sc.text), f, frag, b)) return AxiomMatch{sc.id, b};
    }
    return std::nullopt;
  }
  const Formula fd = desugar_neg(f);
  for (const auto& sc : schemes(s)) {
    if (is_dep_scheme(s, sc.id)) {
      if (auto m = detail::match_dep_axiom(fd)) return m;
      continue;
    }
    std::map<std::string, Formula> b;
    if (detail::match(desugar_neg(parse(sc.text)), fd, frag, b)) return AxiomMatch{sc.id, b};
  }
  return std::nullopt;
}

// Instance of a scheme with a pattern.
inline Formula instantiate(SystemId s, const std::string& id, const std::map<std::string, Formula>& b) {
  for (const auto& sc : schemes(s))
    if (sc.id == id) {
      if (is_tautology_scheme(s, id) || is_dep_scheme(s, id))
        throw InputError("scheme " + id + " has no pattern to instantiate");
      return substitute(parse(sc.text), b);
    }
  throw InputError(std::string("no scheme ") + id + " in " + system_name(s));
}

// Axiom 3 for a given dependence atom.
inline Formula dep_axiom(const Formula& d) { return detail::iff(d, dep_implication_form(d)); }

// ------------------------------------------------------------- derivations

struct Justification {
  enum Kind { Premise, Axiom, MP, Nec, US };
  Kind kind = Premise;
  std::optional<int> premise;           // 1-based; empty = any premise equal to the line
  std::variant<int, std::string> axiom;  // scheme number or exact id
  int a = 0, b = 0;                      // MP: lines a and b = (a -> f); Nec/US: line a
  std::map<std::string, Formula> subst;  // US
};

struct ProofLine {
  Formula f;
  Justification by;
};

struct Derivation {
  SystemId system = SystemId::HMT0;
  std::vector<Formula> premises;
  std::vector<ProofLine> lines;
  std::optional<Formula> conclusion;
};

enum class ProofError {
  None, BadAxiom, BadMP, NecWithDeps, USNotAllowed, USWithDeps, ForwardReference, BadPremise,
  LanguageViolation, ConclusionMismatch
};

inline const char* proof_error_name(ProofError e) {
  switch (e) {
    case ProofError::None: return "None";
    case ProofError::BadAxiom: return "BadAxiom";
    case ProofError::BadMP: return "BadMP";
    case ProofError::NecWithDeps: return "NecWithDeps";
    case ProofError::USNotAllowed: return "USNotAllowed";
    case ProofError::USWithDeps: return "USWithDeps";
    case ProofError::ForwardReference: return "ForwardReference";
    case ProofError::BadPremise: return "BadPremise";
    case ProofError::LanguageViolation: return "LanguageViolation";
    case ProofError::ConclusionMismatch: return "ConclusionMismatch";
  }
  return "?";
}

struct ProofReport {
  bool ok = true;
  int line = 0;  // 1-based; 0 for the derivation as a whole
  ProofError error = ProofError::None;
  std::string message;
  std::vector<std::set<int>> deps;  // premise numbers each line rests on
  std::vector<std::string> axioms;  // matched scheme id per line, empty if not an axiom line
};

namespace detail {

inline ProofReport proof_fail(ProofReport r, int line, ProofError e, std::string msg) {
  r.ok = false;
  r.line = line;
  r.error = e;
  r.message = std::move(msg);
  return r;
}

}  // namespace detail

// Lines are compared up to the reading of ~a as a -> bot (outside HK).
inline ProofReport check_derivation(const Derivation& d) {
  using detail::proof_fail;
  ProofReport r;
  const bool k = d.system == SystemId::HK;
  auto norm = [&](const Formula& f) { return k ? f : desugar_neg(f); };
  for (std::size_t i = 0; i < d.premises.size(); ++i)
    if (!in_language(d.premises[i], d.system))
      return proof_fail(r, 0, ProofError::LanguageViolation, "premise " + std::to_string(i + 1) + " is not in the language");
  std::vector<Formula> seen;
  for (std::size_t idx = 0; idx < d.lines.size(); ++idx) {
    const int n = static_cast<int>(idx) + 1;
    const auto& line = d.lines[idx];
    const Formula f = norm(line.f);
    std::set<int> deps;
    std::string axiom_id;
    if (!in_language(line.f, d.system))
      return proof_fail(r, n, ProofError::LanguageViolation, print(line.f) + " is not in the language of " + system_name(d.system));
    auto ref = [&](int j) { return j >= 1 && j < n; };
    const auto& by = line.by;
    switch (by.kind) {
      case Justification::Premise: {
        if (by.premise) {
          const int p = *by.premise;
          if (p < 1 || p > static_cast<int>(d.premises.size()))
            return proof_fail(r, n, ProofError::BadPremise, "no premise " + std::to_string(p));
          if (!(norm(d.premises[static_cast<std::size_t>(p - 1)]) == f))
            return proof_fail(r, n, ProofError::BadPremise, "line differs from premise " + std::to_string(p));
          deps.insert(p);
        } else {
          int found = 0;
          for (std::size_t p = 0; p < d.premises.size() && !found; ++p)
            if (norm(d.premises[p]) == f) found = static_cast<int>(p) + 1;
          if (!found) return proof_fail(r, n, ProofError::BadPremise, print(line.f) + " is not a premise");
          deps.insert(found);
        }
        break;
      }
      case Justification::Axiom: {
        auto m = match_axiom(line.f, d.system);
        bool ok = false;
        if (m) {
          if (const int* num = std::get_if<int>(&by.axiom)) ok = scheme_number(m->id) == *num;
          else ok = m->id == std::get<std::string>(by.axiom);
          if (!ok) {
            // a later scheme may fit the cited one
            for (const auto& sc : schemes(d.system)) {
              const bool cited = std::holds_alternative<int>(by.axiom) ? scheme_number(sc.id) == std::get<int>(by.axiom)
                                                                       : sc.id == std::get<std::string>(by.axiom);
              if (!cited) continue;
              if (is_tautology_scheme(d.system, sc.id)) ok = is_tautology(line.f);
              else if (is_dep_scheme(d.system, sc.id)) ok = detail::match_dep_axiom(f).has_value();
              else {
                std::map<std::string, Formula> b;
                ok = detail::match(k ? parse(sc.text) : desugar_neg(parse(sc.text)), f, system_fragment(d.system), b);
              }
              if (ok) {
                m->id = sc.id;
                break;
              }
            }
          }
        }
        if (!ok) {
          const std::string cited = std::holds_alternative<int>(by.axiom) ? std::to_string(std::get<int>(by.axiom))
                                                                          : std::get<std::string>(by.axiom);
          return proof_fail(r, n, ProofError::BadAxiom, print(line.f) + " is not an instance of axiom " + cited);
        }
        axiom_id = m->id;
        break;
      }
      case Justification::MP: {
        if (!ref(by.a) || !ref(by.b))
          return proof_fail(r, n, ProofError::ForwardReference, "modus ponens cites a line not before " + std::to_string(n));
        const Formula& a = seen[static_cast<std::size_t>(by.a - 1)];
        const Formula& ab = seen[static_cast<std::size_t>(by.b - 1)];
        if (!(ab.op() == Op::Implies && ab.lhs() == a && ab.rhs() == f))
          return proof_fail(r, n, ProofError::BadMP,
                            "line " + std::to_string(by.b) + " is not line " + std::to_string(by.a) + " -> line " + std::to_string(n));
        deps = r.deps[static_cast<std::size_t>(by.a - 1)];
        deps.insert(r.deps[static_cast<std::size_t>(by.b - 1)].begin(), r.deps[static_cast<std::size_t>(by.b - 1)].end());
        break;
      }
      case Justification::Nec: {
        if (!ref(by.a)) return proof_fail(r, n, ProofError::ForwardReference, "necessitation cites a later line");
        if (!(f.op() == Op::Box && f.child() == seen[static_cast<std::size_t>(by.a - 1)]))
          return proof_fail(r, n, ProofError::BadMP, "line is not [] of line " + std::to_string(by.a));
        if (!r.deps[static_cast<std::size_t>(by.a - 1)].empty())
          return proof_fail(r, n, ProofError::NecWithDeps, "necessitation over a line that rests on premises");
        break;
      }
      case Justification::US: {
        if (!k) return proof_fail(r, n, ProofError::USNotAllowed, std::string("uniform substitution is not a rule of ") + system_name(d.system));
        if (!ref(by.a)) return proof_fail(r, n, ProofError::ForwardReference, "substitution cites a later line");
        if (!r.deps[static_cast<std::size_t>(by.a - 1)].empty())
          return proof_fail(r, n, ProofError::USWithDeps, "substitution over a line that rests on premises");
        for (const auto& [p, g] : by.subst)
          if (!in_language(g, d.system))
            return proof_fail(r, n, ProofError::LanguageViolation, "substituted formula for " + p + " is not classical");
        if (!(substitute(seen[static_cast<std::size_t>(by.a - 1)], by.subst) == f))
          return proof_fail(r, n, ProofError::BadMP, "line is not the substitution instance of line " + std::to_string(by.a));
        break;
      }
    }
    seen.push_back(f);
    r.deps.push_back(std::move(deps));
    r.axioms.push_back(axiom_id);
  }
  if (d.lines.empty()) return proof_fail(r, 0, ProofError::ConclusionMismatch, "empty derivation");
  if (d.conclusion && !(norm(*d.conclusion) == seen.back()))
    return proof_fail(r, static_cast<int>(d.lines.size()), ProofError::ConclusionMismatch,
                      "last line is not " + print(*d.conclusion));
  return r;
}

}  // namespace mdl
