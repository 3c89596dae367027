#pragma once

#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include "mdl/kripke.hpp"
#include "mdl/syntax.hpp"

namespace mdl {

struct EvalOptions {
  bool naive_tensor = false;   // all covers Y u Z = X instead of splits
  bool naive_diamond = false;  // all successor teams instead of choice teams
};

// Team semantics on one model. Memo tables live as long as the evaluator.
class TeamEvaluator {
 public:
  explicit TeamEvaluator(const KripkeModel& m, EvalOptions o = {}) : m_(m), o_(o) {}

  bool eval(WorldSet x, const Formula& f) {
    if (!m_.valid_team(x)) throw InputError("team out of range");
    return ev(x, f);
  }

  // {w : {w} satisfies a}
  WorldSet singleton_ext(const Formula& a) {
    auto it = ext_.find(a.id());
    if (it != ext_.end()) return it->second;
    WorldSet s = 0;
    for (int w = 0; w < m_.n; ++w)
      if (ev(bit(w), a)) s |= bit(w);
    ext_.emplace(a.id(), s);
    keep_.push_back(a);
    return s;
  }

 private:
  const KripkeModel& m_;
  EvalOptions o_;
  std::unordered_map<const void*, std::unordered_map<WorldSet, bool>> memo_;
  std::unordered_map<const void*, WorldSet> ext_;
  std::vector<Formula> keep_;  // memo keys are node addresses; keep the nodes alive

  bool ev(WorldSet x, const Formula& f) {
    switch (f.op()) {
      case Op::Prop: return (x & ~m_.V(f.name())) == 0;
      case Op::Bot: return x == 0;
      case Op::And: return ev(x, f.lhs()) && ev(x, f.rhs());
      case Op::Or: return ev(x, f.lhs()) || ev(x, f.rhs());
      case Op::Neg: return (x & singleton_ext(f.child())) == 0;
      case Op::Box: return ev(image(m_, x), f.child());
      default: break;
    }
    auto [slot, fresh] = memo_.try_emplace(f.id());
    if (fresh) keep_.push_back(f);
    auto& tab = slot->second;
    auto it = tab.find(x);
    if (it != tab.end()) return it->second;
    bool r = compound(x, f);
    memo_[f.id()][x] = r;
    return r;
  }

  bool compound(WorldSet x, const Formula& f) {
    switch (f.op()) {
      case Op::Tensor: {
        if (o_.naive_tensor) {
          for (WorldSet y = x;; y = (y - 1) & x) {
            if (ev(y, f.lhs())) {
              for (WorldSet z = x;; z = (z - 1) & x) {
                if ((y | z) == x && ev(z, f.rhs())) return true;
                if (z == 0) break;
              }
            }
            if (y == 0) break;
          }
          return false;
        }
        for (WorldSet y = x;; y = (y - 1) & x) {
          if (ev(y, f.lhs()) && ev(x & ~y, f.rhs())) return true;
          if (y == 0) break;
        }
        return false;
      }
      case Op::Implies:
        for (WorldSet y = x;; y = (y - 1) & x) {
          if (ev(y, f.lhs()) && !ev(y, f.rhs())) return false;
          if (y == 0) break;
        }
        return true;
      case Op::Diamond: return diamond(x, f.child());
      case Op::Dep: return dep_holds(x, f);
      default: throw std::logic_error("unreachable");
    }
  }

  bool diamond(WorldSet x, const Formula& c) {
    if (o_.naive_diamond) {
      const WorldSet r = image(m_, x);
      for (WorldSet y = r;; y = (y - 1) & r) {
        if (is_successor_team(m_, x, y) && ev(y, c)) return true;
        if (y == 0) break;
      }
      return false;
    }
    std::vector<int> members;
    for_each_member(x, [&](int w) { members.push_back(w); });
    for (int w : members)
      if (m_.succ[static_cast<std::size_t>(w)] == 0) return false;
    std::set<WorldSet> seen;
    // odometer over one chosen successor per member
    std::vector<WorldSet> rest(members.size());
    for (std::size_t i = 0; i < members.size(); ++i) rest[i] = m_.succ[static_cast<std::size_t>(members[i])];
    std::vector<WorldSet> cur = rest;
    while (true) {
      WorldSet y = 0;
      for (WorldSet c2 : cur) y |= c2 & -c2;
      if (seen.insert(y).second && ev(y, c)) return true;
      std::size_t i = 0;
      for (; i < cur.size(); ++i) {
        cur[i] &= cur[i] - 1;
        if (cur[i]) break;
        cur[i] = rest[i];
      }
      if (i == cur.size()) return false;
    }
  }

  bool dep_holds(WorldSet x, const Formula& f) {
    std::vector<WorldSet> args;
    for (const auto& a : f.dep_args()) args.push_back(singleton_ext(a));
    const WorldSet t = singleton_ext(f.dep_target());
    std::vector<int> ws;
    for_each_member(x, [&](int w) { ws.push_back(w); });
    for (std::size_t i = 0; i < ws.size(); ++i)
      for (std::size_t j = i + 1; j < ws.size(); ++j) {
        bool agree = true;
        for (WorldSet a : args) agree = agree && has(a, ws[i]) == has(a, ws[j]);
        if (agree && has(t, ws[i]) != has(t, ws[j])) return false;
      }
    return true;
  }
};

inline bool eval(const KripkeModel& m, WorldSet x, const Formula& f, EvalOptions o = {}) {
  require_fragment(f, Fragment::MT0);
  return TeamEvaluator(m, o).eval(x, f);
}

// Ordinary Kripke semantics for classical formulas: the set of worlds where a holds.
inline WorldSet world_extension(const KripkeModel& m, const Formula& a) {
  const WorldSet all = m.all();
  switch (a.op()) {
    case Op::Prop: return m.V(a.name()) & all;
    case Op::Bot: return 0;
    case Op::Neg: return all & ~world_extension(m, a.child());
    case Op::And: return world_extension(m, a.lhs()) & world_extension(m, a.rhs());
    case Op::Tensor: return world_extension(m, a.lhs()) | world_extension(m, a.rhs());
    case Op::Implies: return all & (~world_extension(m, a.lhs()) | world_extension(m, a.rhs()));
    case Op::Box:
    case Op::Diamond: {
      const WorldSet c = world_extension(m, a.child());
      WorldSet r = 0;
      for (int w = 0; w < m.n; ++w) {
        const WorldSet s = m.succ[static_cast<std::size_t>(w)];
        if (a.op() == Op::Box ? (s & ~c) == 0 : (s & c) != 0) r |= bit(w);
      }
      return r;
    }
    default: throw FragmentError("eval_world: formula is not classical: " + print(a));
  }
}

inline bool eval_world(const KripkeModel& m, int w, const Formula& a) {
  if (!is_classical(a, Fragment::MT0)) throw FragmentError("eval_world: formula is not classical: " + print(a));
  if (w < 0 || w >= m.n) throw InputError("world out of range");
  return has(world_extension(m, a), w);
}

// ------------------------------------------------------------- team tables
//
// For models with at most 6 worlds every team fits in 6 bits, so the set of
// teams satisfying a formula fits in one 64-bit word: bit X set iff X |= f.
// Formulas are flattened into a DAG so a sweep evaluates each distinct
// subformula once per model.

using TeamSet = std::uint64_t;

inline bool in(TeamSet s, WorldSet x) { return (s >> x) & 1U; }

class FormulaDag {
 public:
  struct Node {
    Op op;
    std::string name;
    std::vector<int> kids;
  };

  int add(const Formula& f) {
    auto it = index_.find(f);
    if (it != index_.end()) return it->second;
    std::vector<int> kids;
    for (const auto& k : f.kids()) kids.push_back(add(k));
    int id = static_cast<int>(nodes_.size());
    nodes_.push_back({f.op(), f.name(), std::move(kids)});
    formulas_.push_back(f);
    index_.emplace(f, id);
    return id;
  }

  std::size_t size() const { return nodes_.size(); }
  const Node& node(int i) const { return nodes_[static_cast<std::size_t>(i)]; }
  const Formula& formula(int i) const { return formulas_[static_cast<std::size_t>(i)]; }

 private:
  std::unordered_map<Formula, int, FormulaHash> index_;
  std::vector<Node> nodes_;
  std::vector<Formula> formulas_;
};

class TableEvaluator {
 public:
  explicit TableEvaluator(const KripkeModel& m, EvalOptions o = {}) : m_(m), o_(o) {
    if (m.n > 6) throw LimitError("team tables need at most 6 worlds");
    teams_ = 1U << m.n;
    down_.resize(teams_);
    img_.resize(teams_);
    succ_teams_.resize(teams_);
    for (WorldSet x = 0; x < teams_; ++x) {
      TeamSet d = 0;
      for (WorldSet y = x;; y = (y - 1) & x) {
        d |= TeamSet{1} << y;
        if (y == 0) break;
      }
      down_[x] = d;
      img_[x] = image(m, x);
    }
    for (WorldSet x = 0; x < teams_; ++x) {
      TeamSet s = 0;
      for (WorldSet y = img_[x];; y = (y - 1) & img_[x]) {
        if (is_successor_team(m, x, y)) s |= TeamSet{1} << y;
        if (y == 0) break;
      }
      succ_teams_[x] = s;
    }
  }

  int teams() const { return static_cast<int>(teams_); }
  TeamSet down(WorldSet x) const { return down_[x]; }

  // out[i] = table of dag node i; nodes from `from` onwards are (re)computed.
  void run(const FormulaDag& d, std::vector<TeamSet>& out, std::size_t from = 0) const {
    out.resize(d.size());
    for (std::size_t i = from; i < d.size(); ++i) out[i] = node_table(d.node(static_cast<int>(i)), out);
  }

  TeamSet table(const Formula& f) const {
    FormulaDag d;
    int r = d.add(f);
    std::vector<TeamSet> out;
    run(d, out);
    return out[static_cast<std::size_t>(r)];
  }

 private:
  const KripkeModel& m_;
  EvalOptions o_;
  WorldSet teams_ = 0;
  std::vector<TeamSet> down_;
  std::vector<WorldSet> img_;
  std::vector<TeamSet> succ_teams_;

  // worlds w with {w} in the table
  WorldSet singles(TeamSet a) const {
    WorldSet s = 0;
    for (int w = 0; w < m_.n; ++w)
      if (in(a, bit(w))) s |= bit(w);
    return s;
  }

  TeamSet node_table(const FormulaDag::Node& nd, const std::vector<TeamSet>& t) const {
    auto kid = [&](int i) { return t[static_cast<std::size_t>(nd.kids[static_cast<std::size_t>(i)])]; };
    TeamSet r = 0;
    switch (nd.op) {
      case Op::Prop: return down_[m_.V(nd.name) & m_.all()];
      case Op::Bot: return 1;
      case Op::And: return kid(0) & kid(1);
      case Op::Or: return kid(0) | kid(1);
      case Op::Neg: return down_[m_.all() & ~singles(kid(0))];
      case Op::Tensor: {
        const TeamSet a = kid(0), b = kid(1);
        for (WorldSet x = 0; x < teams_; ++x) {
          bool ok = false;
          for (WorldSet y = x; !ok; y = (y - 1) & x) {
            if (in(a, y)) {
              if (o_.naive_tensor) {
                for (WorldSet z = x;; z = (z - 1) & x) {
                  if ((y | z) == x && in(b, z)) ok = true;
                  if (ok || z == 0) break;
                }
              } else {
                ok = in(b, x & ~y);
              }
            }
            if (y == 0) break;
          }
          if (ok) r |= TeamSet{1} << x;
        }
        return r;
      }
      case Op::Implies: {
        const TeamSet bad = kid(0) & ~kid(1);
        for (WorldSet x = 0; x < teams_; ++x)
          if ((down_[x] & bad) == 0) r |= TeamSet{1} << x;
        return r;
      }
      case Op::Box: {
        const TeamSet a = kid(0);
        for (WorldSet x = 0; x < teams_; ++x)
          if (in(a, img_[x])) r |= TeamSet{1} << x;
        return r;
      }
      case Op::Diamond: {
        const TeamSet a = kid(0);
        for (WorldSet x = 0; x < teams_; ++x)
          if (succ_teams_[x] & a) r |= TeamSet{1} << x;
        return r;
      }
      case Op::Dep: {
        const std::size_t k = nd.kids.size() - 1;
        // signature of each world: arg bits, then target bit on top
        std::vector<unsigned> sig(static_cast<std::size_t>(m_.n), 0);
        for (int w = 0; w < m_.n; ++w)
          for (std::size_t i = 0; i <= k; ++i)
            if (in(kid(static_cast<int>(i)), bit(w))) sig[static_cast<std::size_t>(w)] |= 1U << i;
        const unsigned argmask = (1U << k) - 1;
        for (WorldSet x = 0; x < teams_; ++x) {
          bool ok = true;
          for (int u = 0; u < m_.n && ok; ++u)
            for (int v = u + 1; v < m_.n && ok; ++v)
              if (has(x, u) && has(x, v) && ((sig[u] ^ sig[v]) & argmask) == 0 && sig[u] != sig[v]) ok = false;
          if (ok) r |= TeamSet{1} << x;
        }
        return r;
      }
    }
    return r;
  }
};

// Ordinary Kripke semantics over a DAG of classical formulas.
inline void world_extensions(const KripkeModel& m, const FormulaDag& d, std::vector<WorldSet>& out,
                             std::size_t from = 0) {
  out.resize(d.size());
  const WorldSet all = m.all();
  for (std::size_t i = from; i < d.size(); ++i) {
    const auto& nd = d.node(static_cast<int>(i));
    auto kid = [&](int k) { return out[static_cast<std::size_t>(nd.kids[static_cast<std::size_t>(k)])]; };
    WorldSet r = 0;
    switch (nd.op) {
      case Op::Prop: r = m.V(nd.name) & all; break;
      case Op::Bot: break;
      case Op::Neg: r = all & ~kid(0); break;
      case Op::And: r = kid(0) & kid(1); break;
      case Op::Tensor: r = kid(0) | kid(1); break;
      case Op::Implies: r = all & (~kid(0) | kid(1)); break;
      case Op::Box:
      case Op::Diamond:
        for (int w = 0; w < m.n; ++w) {
          const WorldSet s = m.succ[static_cast<std::size_t>(w)];
          if (nd.op == Op::Box ? (s & ~kid(0)) == 0 : (s & kid(0)) != 0) r |= bit(w);
        }
        break;
      default: throw FragmentError("world_extensions: formula is not classical");
    }
    out[i] = r;
  }
}

inline TeamSet team_table(const KripkeModel& m, const Formula& f, EvalOptions o = {}) {
  require_fragment(f, Fragment::MT0);
  return TableEvaluator(m, o).table(f);
}

// ----------------------------------------------------------------- oracles

struct Witness {
  KripkeModel model;
  WorldSet team = 0;
};

struct Verdict {
  bool holds = true;
  std::optional<Witness> witness;
};

namespace detail {

// Calls bad(m, tables) for every model up to max_worlds over props; the first
// team it returns (>= 0) becomes the witness.
template <class F>
Verdict oracle_search(const std::vector<Formula>& fs, int max_worlds, F&& bad) {
  for (const auto& f : fs) require_fragment(f, Fragment::MT0);
  if (max_worlds > 6) throw LimitError("oracle bound above 6 worlds is not supported");
  std::set<std::string> ps;
  for (const auto& f : fs) collect_props(f, ps);
  std::vector<std::string> props(ps.begin(), ps.end());
  FormulaDag dag;
  std::vector<int> roots;
  for (const auto& f : fs) roots.push_back(dag.add(f));
  Verdict v;
  std::vector<TeamSet> t;
  for (int n = 1; n <= max_worlds && v.holds; ++n) {
    for_each_model(n, props, [&](const KripkeModel& m) {
      TableEvaluator te(m);
      te.run(dag, t);
      std::vector<TeamSet> r;
      for (int i : roots) r.push_back(t[static_cast<std::size_t>(i)]);
      long long x = bad(te, r);
      if (x >= 0) {
        v.holds = false;
        v.witness = Witness{m, static_cast<WorldSet>(x)};
        return false;
      }
      return true;
    });
  }
  return v;
}

inline long long lowest(TeamSet s) { return s ? std::countr_zero(s) : -1; }

}  // namespace detail

inline Verdict oracle_entails(const Formula& phi, const Formula& psi, int max_worlds = 3) {
  return detail::oracle_search({phi, psi}, max_worlds, [](const TableEvaluator& te, const std::vector<TeamSet>& r) {
    TeamSet all = te.teams() == 64 ? ~TeamSet{0} : (TeamSet{1} << te.teams()) - 1;
    return detail::lowest(r[0] & ~r[1] & all);
  });
}

inline Verdict oracle_valid(const Formula& f, int max_worlds = 3) {
  return oracle_entails(top(), f, max_worlds);
}

inline Verdict oracle_equivalent(const Formula& f, const Formula& g, int max_worlds = 3) {
  return detail::oracle_search({f, g}, max_worlds, [](const TableEvaluator&, const std::vector<TeamSet>& r) {
    return detail::lowest(r[0] ^ r[1]);
  });
}

// Holds iff f is flat on every model up to the bound.
inline Verdict oracle_flat(const Formula& f, int max_worlds = 3) {
  return detail::oracle_search({f}, max_worlds, [](const TableEvaluator& te, const std::vector<TeamSet>& r) {
    WorldSet s = 0;
    for (int w = 0; (1 << w) < te.teams(); ++w)
      if (in(r[0], bit(w))) s |= bit(w);
    return detail::lowest(r[0] ^ te.down(s));
  });
}

}  // namespace mdl
