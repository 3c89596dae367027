#pragma once
// Command-line front end. Exit codes: 0 affirmative or success, 1 negative
// verdict, 2 usage or input error.

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "mdl/decide.hpp"
#include "mdl/fotrans.hpp"
#include "mdl/io.hpp"

namespace mdl::cli {

constexpr int kOk = 0;
constexpr int kNo = 1;
constexpr int kUsage = 2;

namespace detail {

inline std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot read " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline std::vector<int> int_list(const std::string& s, const char* what) {
  std::vector<int> out;
  if (s.empty()) return out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    try {
      out.push_back(std::stoi(item, &used));
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != item.size()) throw InputError(std::string("bad ") + what + " '" + s + "'");
  }
  return out;
}

inline json certificate_json(const std::vector<CertificateEntry>& c) {
  json a = json::array();
  for (const auto& e : c) a.push_back({{"premise", print(e.premise)}, {"conclusion", print(e.conclusion)}});
  return a;
}

// Shell-like split: whitespace separates, single and double quotes group,
// backslash escapes only a quote inside double quotes.
inline std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  bool any = false;
  char quote = 0;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quote) {
      if (c == quote) quote = 0;
      else if (quote == '"' && c == '\\' && i + 1 < line.size() && line[i + 1] == '"') cur += line[++i];
      else cur += c;
    } else if (c == '"' || c == '\'') {
      quote = c;
      any = true;
    } else if (c == ' ' || c == '\t') {
      if (any || !cur.empty()) out.push_back(cur);
      cur.clear();
      any = false;
    } else {
      cur += c;
    }
  }
  if (quote) throw InputError("unterminated quote in batch line");
  if (any || !cur.empty()) out.push_back(cur);
  return out;
}

}  // namespace detail

struct Options {
  bool json = false;
  int max_worlds = 3;
  bool batch = false;
  std::string formula, premise, other, fragment = "mt0", model, team, var = "x";
  std::string int_model, src, dst, map, conditions, file, system;
  int point = -1;
  bool full = false, bullet = false, tri = false;
};

namespace detail {

inline int dispatch(CLI::App& app, const Options& o, std::ostream& out) {
  auto frag = [&] { return fragment_from_string(o.fragment); };
  auto formula = [&] { return parse(o.formula); };
  auto verdict = [&](bool yes, const char* pos, const char* negw, json j, const std::optional<Witness>& w) {
    if (o.json) {
      j["verdict"] = yes ? pos : negw;
      if (w) j["counter"] = to_json(*w);
      out << j.dump() << "\n";
    } else {
      out << (yes ? pos : negw) << "\n";
      if (w) out << to_json(*w).dump() << "\n";
    }
    return yes ? kOk : kNo;
  };

  if (app.got_subcommand("parse")) {
    const Formula f = formula();
    json frags = json::object();
    for (auto fr : {Fragment::MD, Fragment::MDplus, Fragment::MDor, Fragment::MID, Fragment::MT0})
      frags[fragment_name(fr)] = well_formed(f, fr);
    bool ok = true;
    json viol = json::array();
    if (app.get_subcommand("parse")->count("--fragment")) {
      for (const auto& v : fragment_check(f, frag())) viol.push_back({{"path", path_string(v.path)}, {"message", v.message}});
      ok = viol.empty();
    }
    if (o.json) {
      out << json{{"formula", print(f)}, {"depth", modal_depth(f)}, {"fragments", frags}, {"violations", viol}}.dump() << "\n";
    } else {
      out << print(f) << "\n";
      for (const auto& v : viol) out << "violation at " << v["path"].get<std::string>() << ": " << v["message"].get<std::string>() << "\n";
    }
    return ok ? kOk : kNo;
  }

  if (app.got_subcommand("eval")) {
    const KripkeModel m = load_kripke(slurp(o.model));
    const Formula f = formula();
    require_fragment(f, frag());
    const WorldSet x = parse_team(o.team, m.n);
    return verdict(eval(m, x, f), "true", "false", {{"team", mdl::detail::list_of(x)}}, std::nullopt);
  }

  if (auto* sub = app.get_subcommand("oracle"); sub->parsed()) {
    const Formula f = formula();
    require_fragment(f, frag());
    if (sub->got_subcommand("valid")) {
      auto v = oracle_valid(f, o.max_worlds);
      return verdict(v.holds, "valid", "invalid", {{"max_worlds", o.max_worlds}}, v.witness);
    }
    if (sub->got_subcommand("entails")) {
      const Formula p = parse(o.premise);
      require_fragment(p, frag());
      auto v = oracle_entails(p, f, o.max_worlds);
      return verdict(v.holds, "entailed", "not entailed", {{"max_worlds", o.max_worlds}}, v.witness);
    }
    if (sub->got_subcommand("equivalent")) {
      const Formula g = parse(o.other);
      require_fragment(g, frag());
      auto v = oracle_equivalent(f, g, o.max_worlds);
      return verdict(v.holds, "equivalent", "not equivalent", {{"max_worlds", o.max_worlds}}, v.witness);
    }
    auto v = oracle_flat(f, o.max_worlds);
    return verdict(v.holds, "flat", "not flat", {{"max_worlds", o.max_worlds}}, v.witness);
  }

  if (app.got_subcommand("dnf")) {
    auto nf = dnf(formula(), frag());
    json ds = json::array();
    for (const auto& d : nf.disjuncts) ds.push_back(print(d));
    if (o.json) out << json{{"count", nf.size()}, {"disjuncts", ds}}.dump() << "\n";
    else
      for (const auto& d : nf.disjuncts) out << print(d) << "\n";
    return kOk;
  }

  if (app.got_subcommand("realize")) {
    const Formula f = formula();
    require_fragment(f, frag());
    json all = json::array();
    for (const auto& [seq, r] : realize_all(f)) {
      json fs = json::array();
      std::string label;
      for (const auto& [p, fn] : seq) {
        std::string table;
        for (bool b : fn.table) table += b ? '1' : '0';
        fs.push_back({{"path", path_string(p)}, {"table", table}});
        label += (label.empty() ? "" : " ") + path_string(p) + ":" + table;
      }
      if (o.json) all.push_back({{"functions", fs}, {"formula", print(r)}});
      else out << (label.empty() ? "-" : label) << "\t" << print(r) << "\n";
    }
    if (o.json) out << json{{"count", all.size()}, {"realizations", all}}.dump() << "\n";
    return kOk;
  }

  if (auto* sub = app.get_subcommand("decide"); sub->parsed()) {
    const Formula f = formula();
    if (sub->got_subcommand("entails")) {
      auto v = decide_entails(parse(o.premise), f, frag());
      return verdict(v.affirmative, "entailed", "not entailed", {{"certificate", certificate_json(v.certificate)}}, v.counter);
    }
    auto v = decide_valid(f, frag());
    return verdict(v.affirmative, "valid", "invalid", {{"certificate", certificate_json(v.certificate)}}, v.counter);
  }

  if (app.got_subcommand("flat")) {
    const Formula f = formula();
    require_fragment(f, frag());
    auto c = flat_characterize(f, frag());
    if (o.json) {
      json j = {{"verdict", c ? "flat" : "not flat"}};
      if (c) j["classical"] = print(*c);
      out << j.dump() << "\n";
    } else {
      out << (c ? "flat" : "not flat") << "\n";
      if (c) out << print(*c) << "\n";
    }
    return c ? kOk : kNo;
  }

  if (auto* sub = app.get_subcommand("powerset"); sub->parsed()) {
    if (sub->got_subcommand("build")) {
      const KripkeModel m = load_kripke(slurp(o.model));
      out << to_json(o.full ? build_full_powerset(m) : build_powerset(m)).dump() << "\n";
      return kOk;
    }
    const IntModel im = load_int_model(slurp(o.int_model));
    if (sub->got_subcommand("sat")) {
      if (o.point < 0 || o.point >= im.n) throw InputError("point out of range");
      const bool yes = o.bullet ? sat_int_bullet(im, o.point, formula()) : sat_int(im, o.point, formula());
      return verdict(yes, "true", "false", {{"point", o.point}}, std::nullopt);
    }
    if (sub->got_subcommand("conditions")) {
      std::vector<Condition> which;
      if (o.conditions.empty()) which = im.ter ? tri_conditions() : bi_conditions();
      else {
        std::stringstream ss(o.conditions);
        std::string c;
        while (std::getline(ss, c, ',')) which.push_back(condition_from_string(c));
      }
      const auto rep = check_conditions(im, which);
      if (o.json) out << to_json(rep).dump() << "\n";
      else
        for (const auto& r : rep.results) {
          out << r.name << " " << (r.holds ? "holds" : "fails");
          if (!r.holds) {
            std::string w;
            for (int x : r.witness) w += (w.empty() ? "" : ",") + std::to_string(x);
            out << " at (" << w << ")";
            if (!r.prop.empty()) out << " for " << r.prop;
          }
          out << "\n";
        }
      return rep.all() ? kOk : kNo;
    }
    if (sub->got_subcommand("pmorphism")) {
      const IntModel dst = load_int_model(slurp(o.dst));
      const auto rep = check_pmorphism(im, dst, int_list(o.map, "point map"), o.tri ? MorphismFlavor::Tri : MorphismFlavor::Bi);
      if (o.json) out << to_json(rep).dump() << "\n";
      else out << (rep.all() ? "p-morphism" : "not a p-morphism: " + [&] {
        std::string s;
        for (const auto& n : rep.failed()) s += (s.empty() ? "" : ",") + n;
        return s;
      }()) << "\n";
      return rep.all() ? kOk : kNo;
    }
    // endpointmap
    const auto em = endpoint_map(im, o.tri ? MorphismFlavor::Tri : MorphismFlavor::Bi);
    json j = {{"ok", em.ok}, {"preconditions", to_json(em.preconditions)}};
    if (em.ok) {
      j["N"] = to_json(em.N);
      j["worlds"] = em.worlds;
      j["target"] = to_json(em.target);
      j["map"] = em.map;
    }
    if (o.json) out << j.dump() << "\n";
    else if (em.ok) {
      out << "N " << to_json(em.N).dump() << "\n";
      std::string s;
      for (std::size_t w = 0; w < em.map.size(); ++w)
        s += (w ? " " : "") + std::to_string(w) + "->" + std::to_string(em.map[w]);
      out << "map " << s << "\n";
    } else {
      std::string s;
      for (const auto& n : em.preconditions.failed()) s += (s.empty() ? "" : ",") + n;
      out << "preconditions fail: " << s << "\n";
    }
    return em.ok ? kOk : kNo;
  }

  if (app.got_subcommand("translate")) {
    const std::string st = standard_translate(formula(), o.var);
    if (o.json) out << json{{"translation", st}}.dump() << "\n";
    else out << st << "\n";
    return kOk;
  }

  // proof check
  Derivation d = load_derivation(slurp(o.file));
  if (!o.system.empty()) d.system = system_from_string(o.system);
  const auto r = check_derivation(d);
  if (o.json) out << to_json(r).dump() << "\n";
  else if (r.ok) out << "accepted\n";
  else out << "rejected at line " << r.line << ": " << proof_error_name(r.error) << ": " << r.message << "\n";
  return r.ok ? kOk : kNo;
}

}  // namespace detail

inline int run(const std::vector<std::string>& args, std::istream& in, std::ostream& out, std::ostream& err) {
  Options o;
  CLI::App app{"Modal dependence logic workbench", "mdl"};
  app.add_flag("--json", o.json, "machine-readable output");
  app.add_option("--max-worlds", o.max_worlds, "oracle search bound")->check(CLI::Range(1, 6));
  app.add_flag("--batch", o.batch, "read one query per line from stdin");
  app.fallthrough();

  auto formula_opt = [&](CLI::App* s, bool required = true) {
    auto* opt = s->add_option("--formula,-f", o.formula, "formula text");
    if (required) opt->required();
  };
  auto frag_opt = [&](CLI::App* s) { s->add_option("--fragment", o.fragment, "md, mdplus, mdor, mid, mt0")->capture_default_str(); };

  auto* parse_cmd = app.add_subcommand("parse", "parse, print and classify a formula");
  formula_opt(parse_cmd);
  frag_opt(parse_cmd);

  auto* eval_cmd = app.add_subcommand("eval", "team satisfaction on a Kripke model");
  eval_cmd->add_option("--model", o.model, "model JSON file")->required();
  eval_cmd->add_option("--team", o.team, "comma-separated worlds")->required();
  formula_opt(eval_cmd);
  frag_opt(eval_cmd);

  auto* oracle = app.add_subcommand("oracle", "brute force over small models");
  oracle->require_subcommand(1);
  for (const char* name : {"valid", "entails", "equivalent", "flat"}) {
    auto* s = oracle->add_subcommand(name);
    formula_opt(s);
    frag_opt(s);
    if (std::string(name) == "entails") s->add_option("--premise", o.premise)->required();
    if (std::string(name) == "equivalent") s->add_option("--other", o.other)->required();
  }

  auto* dnf_cmd = app.add_subcommand("dnf", "disjunctive normal form");
  formula_opt(dnf_cmd);
  frag_opt(dnf_cmd);

  auto* realize_cmd = app.add_subcommand("realize", "all realizations of the dependence atoms");
  formula_opt(realize_cmd);
  frag_opt(realize_cmd);

  auto* decide = app.add_subcommand("decide", "decide validity or entailment");
  decide->require_subcommand(1);
  {
    auto* v = decide->add_subcommand("valid", "validity");
    formula_opt(v);
    frag_opt(v);
    auto* e = decide->add_subcommand("entails", "entailment");
    e->add_option("--premise", o.premise)->required();
    formula_opt(e);
    frag_opt(e);
  }

  auto* flat = app.add_subcommand("flat", "flatness and its classical equivalent");
  formula_opt(flat);
  frag_opt(flat);

  auto* ps = app.add_subcommand("powerset", "intuitionistic models");
  ps->require_subcommand(1);
  {
    auto* b = ps->add_subcommand("build", "powerset model of a Kripke model");
    b->add_option("--model", o.model)->required();
    b->add_flag("--full", o.full, "full powerset model with the ternary relation");
    auto* s = ps->add_subcommand("sat", "single-point satisfaction");
    s->add_option("--int", o.int_model)->required();
    s->add_option("--point", o.point)->required();
    formula_opt(s);
    s->add_flag("--bullet", o.bullet);
    auto* c = ps->add_subcommand("conditions", "check frame and model conditions");
    c->add_option("--int", o.int_model)->required();
    c->add_option("--conditions", o.conditions, "comma-separated names");
    auto* p = ps->add_subcommand("pmorphism", "check a p-morphism");
    p->add_option("--src", o.int_model)->required();
    p->add_option("--dst", o.dst)->required();
    p->add_option("--map", o.map, "image of each source point")->required();
    p->add_flag("--tri", o.tri);
    auto* e = ps->add_subcommand("endpointmap", "map onto the endpoint model");
    e->add_option("--int", o.int_model)->required();
    e->add_flag("--tri", o.tri);
  }

  auto* tr = app.add_subcommand("translate", "standard translation");
  formula_opt(tr);
  tr->add_option("--var", o.var)->capture_default_str();

  auto* proof = app.add_subcommand("proof", "Hilbert derivations");
  proof->require_subcommand(1);
  {
    auto* c = proof->add_subcommand("check", "check a derivation file");
    c->add_option("--file", o.file)->required();
    c->add_option("--system", o.system, "override the file's system");
  }

  std::vector<std::string> rev(args.rbegin(), args.rend());
  try {
    app.parse(rev);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "mdl: " << e.what() << "\n";
    return kUsage;
  }

  if (o.batch) {
    if (!app.get_subcommands().empty()) {
      err << "mdl: --batch takes its queries from stdin\n";
      return kUsage;
    }
    int worst = kOk;
    std::string line;
    while (std::getline(in, line)) {
      if (line.find_first_not_of(" \t") == std::string::npos || line[line.find_first_not_of(" \t")] == '#') continue;
      std::vector<std::string> sub;
      try {
        sub = detail::split_line(line);
      } catch (const InputError& e) {
        err << "mdl: " << e.what() << "\n";
        worst = kUsage;
        continue;
      }
      if (o.json) sub.insert(sub.begin(), "--json");
      sub.insert(sub.begin(), {"--max-worlds", std::to_string(o.max_worlds)});
      std::istringstream none;
      worst = std::max(worst, run(sub, none, out, err));
    }
    return worst;
  }
  if (app.get_subcommands().empty()) {
    err << "mdl: a subcommand is required\n" << app.help();
    return kUsage;
  }

  try {
    return detail::dispatch(app, o, out);
  } catch (const ParseError& e) {
    err << "mdl: " << e.what() << "\n";
  } catch (const InputError& e) {
    err << "mdl: " << e.what() << "\n";
  } catch (const FragmentError& e) {
    err << "mdl: " << e.what() << "\n";
  } catch (const LimitError& e) {
    err << "mdl: " << e.what() << "\n";
  }
  return kUsage;
}

}  // namespace mdl::cli
