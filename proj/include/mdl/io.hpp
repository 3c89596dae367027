#pragma once
// JSON readers and writers for models, teams and derivations.
//   Kripke model:  {"worlds":3,"rel":[[0,1]],"val":{"p":[0,2]}}
//   Int model:     {"points":n,"geq":[[i,j]],"rel":[[i,j]],"ter":[[i,j,k]]?,"val":{...},"teams":[[...]]?}
//                  geq pairs read "i >= j"; reflexive pairs may be omitted.
//   Derivation:    {"system":"HMT0","premises":["..."],"lines":[{"f":"...","by":J}],"conclusion":"..."?}
//                  J is one of {"premise":k} {"premise":true} {"axiom":11} {"axiom":"1.1c'"}
//                  {"mp":[i,j]} (line j is line i -> f) {"nec":i} {"us":{"line":i,"subst":{"p":"..."}}}

#include <set>
#include <string>

#include "json.hpp"
#include "mdl/hilbert.hpp"
#include "mdl/powerset.hpp"
#include "mdl/teameval.hpp"

namespace mdl {

using json = nlohmann::json;

namespace detail {

inline void only_keys(const json& j, std::initializer_list<const char*> keys, const char* what) {
  if (!j.is_object()) throw InputError(std::string(what) + ": expected an object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool known = false;
    for (const char* k : keys) known = known || it.key() == k;
    if (!known) throw InputError(std::string(what) + ": unknown key '" + it.key() + "'");
  }
}

inline const json& need(const json& j, const char* key, const char* what) {
  if (!j.contains(key)) throw InputError(std::string(what) + ": missing key '" + key + "'");
  return j.at(key);
}

inline int index_in(const json& j, int n, const char* what) {
  if (!j.is_number_integer()) throw InputError(std::string(what) + ": expected an integer index");
  const auto v = j.get<long long>();
  if (v < 0 || v >= n) throw InputError(std::string(what) + ": index " + std::to_string(v) + " out of range");
  return static_cast<int>(v);
}

inline WorldSet set_of(const json& j, int n, const char* what) {
  if (!j.is_array()) throw InputError(std::string(what) + ": expected a list of indices");
  WorldSet s = 0;
  for (const auto& x : j) s |= bit(index_in(x, n, what));
  return s;
}

inline json list_of(WorldSet s) {
  json a = json::array();
  for_each_member(s, [&](int w) { a.push_back(w); });
  return a;
}

inline int count_of(const json& j, const char* key, const char* what) {
  const json& c = need(j, key, what);
  if (!c.is_number_integer() || c.get<long long>() < 1 || c.get<long long>() > 64)
    throw InputError(std::string(what) + ": '" + key + "' must be an integer in 1..64");
  return c.get<int>();
}

inline json parse_json(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw InputError(std::string("malformed JSON: ") + e.what());
  }
}

inline Formula formula_of(const json& j, const char* what) {
  if (!j.is_string()) throw InputError(std::string(what) + ": expected a formula string");
  return parse(j.get<std::string>());
}

}  // namespace detail

// ----------------------------------------------------------- Kripke models

inline json to_json(const KripkeModel& m) {
  json rel = json::array();
  for (int w = 0; w < m.n; ++w)
    for_each_member(m.succ[static_cast<std::size_t>(w)], [&](int v) { rel.push_back({w, v}); });
  json val = json::object();
  for (const auto& [p, s] : m.val) val[p] = detail::list_of(s);
  return {{"worlds", m.n}, {"rel", rel}, {"val", val}};
}

inline KripkeModel kripke_from_json(const json& j) {
  detail::only_keys(j, {"worlds", "rel", "val"}, "model");
  KripkeModel m(detail::count_of(j, "worlds", "model"));
  if (j.contains("rel")) {
    if (!j["rel"].is_array()) throw InputError("model: 'rel' must be a list of pairs");
    for (const auto& e : j["rel"]) {
      if (!e.is_array() || e.size() != 2) throw InputError("model: 'rel' entries must be pairs");
      m.add_edge(detail::index_in(e[0], m.n, "model rel"), detail::index_in(e[1], m.n, "model rel"));
    }
  }
  if (j.contains("val")) {
    if (!j["val"].is_object()) throw InputError("model: 'val' must be an object");
    for (auto it = j["val"].begin(); it != j["val"].end(); ++it) m.val[it.key()] = detail::set_of(*it, m.n, "model val");
  }
  return m;
}

inline KripkeModel load_kripke(const std::string& text) { return kripke_from_json(detail::parse_json(text)); }

inline json to_json(const Witness& w) { return {{"model", to_json(w.model)}, {"team", detail::list_of(w.team)}}; }

inline Witness witness_from_json(const json& j) {
  detail::only_keys(j, {"model", "team"}, "counter");
  Witness w{kripke_from_json(detail::need(j, "model", "counter")), 0};
  w.team = detail::set_of(detail::need(j, "team", "counter"), w.model.n, "counter team");
  return w;
}

// ------------------------------------------------------ intuitionistic models

inline json to_json(const IntModel& im) {
  json geq = json::array(), rel = json::array();
  for (int w = 0; w < im.n; ++w) {
    for_each_member(im.below[static_cast<std::size_t>(w)], [&](int v) {
      if (v != w) geq.push_back({w, v});
    });
    for_each_member(im.succ[static_cast<std::size_t>(w)], [&](int v) { rel.push_back({w, v}); });
  }
  json val = json::object();
  for (const auto& [p, s] : im.val) val[p] = detail::list_of(s);
  json out = {{"points", im.n}, {"geq", geq}, {"rel", rel}, {"val", val}};
  if (im.ter) {
    json t = json::array();
    for (const auto& x : *im.ter) t.push_back({x[0], x[1], x[2]});
    out["ter"] = t;
  }
  if (!im.teams.empty()) {
    json t = json::array();
    for (auto x : im.teams) t.push_back(detail::list_of(x));
    out["teams"] = t;
  }
  return out;
}

// Rejects a non-poset order, a non-monotone valuation, and F1/F2 (and H1
// when ter is given) failures.
inline IntModel int_model_from_json(const json& j) {
  detail::only_keys(j, {"points", "geq", "rel", "ter", "val", "teams"}, "int model");
  IntModel im(detail::count_of(j, "points", "int model"));
  auto pairs = [&](const char* key, auto&& add) {
    if (!j.contains(key)) return;
    if (!j[key].is_array()) throw InputError(std::string("int model: '") + key + "' must be a list");
    for (const auto& e : j[key]) {
      if (!e.is_array() || e.size() != 2) throw InputError(std::string("int model: '") + key + "' entries must be pairs");
      add(detail::index_in(e[0], im.n, key), detail::index_in(e[1], im.n, key));
    }
  };
  pairs("geq", [&](int a, int b) { im.below[static_cast<std::size_t>(a)] |= bit(b); });
  pairs("rel", [&](int a, int b) { im.succ[static_cast<std::size_t>(a)] |= bit(b); });
  if (j.contains("ter")) {
    if (!j["ter"].is_array()) throw InputError("int model: 'ter' must be a list");
    std::vector<std::array<int, 3>> ter;
    for (const auto& e : j["ter"]) {
      if (!e.is_array() || e.size() != 3) throw InputError("int model: 'ter' entries must be triples");
      ter.push_back({detail::index_in(e[0], im.n, "ter"), detail::index_in(e[1], im.n, "ter"), detail::index_in(e[2], im.n, "ter")});
    }
    im.ter = std::move(ter);
  }
  if (j.contains("val")) {
    if (!j["val"].is_object()) throw InputError("int model: 'val' must be an object");
    for (auto it = j["val"].begin(); it != j["val"].end(); ++it) im.val[it.key()] = detail::set_of(*it, im.n, "int model val");
  }
  if (j.contains("teams")) {
    if (!j["teams"].is_array() || static_cast<int>(j["teams"].size()) != im.n)
      throw InputError("int model: 'teams' must list one team per point");
    for (const auto& t : j["teams"]) im.teams.push_back(detail::set_of(t, 64, "int model teams"));
  }
  validate_int_model(im);
  std::vector<Condition> need = {Condition::F1, Condition::F2};
  if (im.ter) need.push_back(Condition::H1);
  for (const auto& r : check_conditions(im, need).results)
    if (!r.holds) {
      std::string w;
      for (int x : r.witness) w += (w.empty() ? "" : ",") + std::to_string(x);
      throw InputError("int model violates " + r.name + " at (" + w + ")");
    }
  return im;
}

inline IntModel load_int_model(const std::string& text) { return int_model_from_json(detail::parse_json(text)); }

inline json to_json(const ConditionReport& rep) {
  json a = json::array();
  for (const auto& r : rep.results) {
    json x = {{"name", r.name}, {"holds", r.holds}};
    if (!r.holds) {
      x["witness"] = r.witness;
      if (!r.prop.empty()) x["prop"] = r.prop;
      if (r.set) x["set"] = detail::list_of(*r.set);
    }
    a.push_back(x);
  }
  return {{"all", rep.all()}, {"results", a}};
}

// ------------------------------------------------------------- derivations

inline Justification justification_from_json(const json& j, int line) {
  const std::string where = "line " + std::to_string(line);
  if (!j.is_object() || j.size() != 1) throw InputError(where + ": 'by' must be an object with one rule");
  Justification by;
  const std::string rule = j.begin().key();
  const json& v = j.begin().value();
  auto positive = [&](const json& x) {
    if (!x.is_number_integer() || x.get<long long>() < 1) throw InputError(where + ": line references are positive integers");
    return x.get<int>();
  };
  if (rule == "premise") {
    by.kind = Justification::Premise;
    if (v.is_number_integer()) by.premise = positive(v);
    else if (!(v.is_boolean() && v.get<bool>())) throw InputError(where + ": 'premise' takes an index or true");
  } else if (rule == "axiom") {
    by.kind = Justification::Axiom;
    if (v.is_number_integer()) by.axiom = v.get<int>();
    else if (v.is_string()) by.axiom = v.get<std::string>();
    else throw InputError(where + ": 'axiom' takes a number or a scheme id");
  } else if (rule == "mp") {
    by.kind = Justification::MP;
    if (!v.is_array() || v.size() != 2) throw InputError(where + ": 'mp' takes two line numbers");
    by.a = positive(v[0]);
    by.b = positive(v[1]);
  } else if (rule == "nec") {
    by.kind = Justification::Nec;
    by.a = positive(v);
  } else if (rule == "us") {
    by.kind = Justification::US;
    detail::only_keys(v, {"line", "subst"}, "us");
    by.a = positive(detail::need(v, "line", "us"));
    const json& s = detail::need(v, "subst", "us");
    if (!s.is_object()) throw InputError(where + ": 'subst' must map props to formulas");
    for (auto it = s.begin(); it != s.end(); ++it) by.subst[it.key()] = detail::formula_of(*it, "subst");
  } else {
    throw InputError(where + ": unknown rule '" + rule + "'");
  }
  return by;
}

inline Derivation derivation_from_json(const json& j) {
  detail::only_keys(j, {"system", "premises", "lines", "conclusion"}, "derivation");
  Derivation d;
  const json& sys = detail::need(j, "system", "derivation");
  if (!sys.is_string()) throw InputError("derivation: 'system' must be a string");
  d.system = system_from_string(sys.get<std::string>());
  if (j.contains("premises")) {
    if (!j["premises"].is_array()) throw InputError("derivation: 'premises' must be a list");
    for (const auto& p : j["premises"]) d.premises.push_back(detail::formula_of(p, "premise"));
  }
  const json& lines = detail::need(j, "lines", "derivation");
  if (!lines.is_array()) throw InputError("derivation: 'lines' must be a list");
  int n = 0;
  for (const auto& l : lines) {
    ++n;
    detail::only_keys(l, {"f", "by"}, "derivation line");
    d.lines.push_back({detail::formula_of(detail::need(l, "f", "derivation line"), "line"),
                       justification_from_json(detail::need(l, "by", "derivation line"), n)});
  }
  if (j.contains("conclusion")) d.conclusion = detail::formula_of(j["conclusion"], "conclusion");
  return d;
}

inline Derivation load_derivation(const std::string& text) { return derivation_from_json(detail::parse_json(text)); }

inline json to_json(const Justification& by) {
  switch (by.kind) {
    case Justification::Premise: return by.premise ? json{{"premise", *by.premise}} : json{{"premise", true}};
    case Justification::Axiom:
      return std::holds_alternative<int>(by.axiom) ? json{{"axiom", std::get<int>(by.axiom)}}
                                                   : json{{"axiom", std::get<std::string>(by.axiom)}};
    case Justification::MP: return {{"mp", {by.a, by.b}}};
    case Justification::Nec: return {{"nec", by.a}};
    case Justification::US: {
      json s = json::object();
      for (const auto& [p, f] : by.subst) s[p] = print(f);
      return {{"us", {{"line", by.a}, {"subst", s}}}};
    }
  }
  return {};
}

inline json to_json(const Derivation& d) {
  json prem = json::array(), lines = json::array();
  for (const auto& p : d.premises) prem.push_back(print(p));
  for (const auto& l : d.lines) lines.push_back({{"f", print(l.f)}, {"by", to_json(l.by)}});
  json out = {{"system", system_name(d.system)}, {"premises", prem}, {"lines", lines}};
  if (d.conclusion) out["conclusion"] = print(*d.conclusion);
  return out;
}

inline json to_json(const ProofReport& r) {
  json out = {{"ok", r.ok}};
  if (!r.ok) {
    out["line"] = r.line;
    out["error"] = proof_error_name(r.error);
    out["message"] = r.message;
  }
  json deps = json::array();
  for (const auto& s : r.deps) deps.push_back(s);
  out["deps"] = deps;
  return out;
}

}  // namespace mdl
