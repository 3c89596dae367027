#pragma once

#include <algorithm>
#include <array>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "mdl/kripke.hpp"
#include "mdl/syntax.hpp"

namespace mdl {

// Sets of points of an intuitionistic model, one bit per point.
using PointSet = std::uint64_t;

constexpr int kMaxPoints = 64;
constexpr int kPowersetCap = 5;  // default bound on source worlds

struct IntModel {
  int n = 1;
  std::vector<PointSet> below;  // below[w] = { v : w >= v }, reflexive
  std::vector<PointSet> succ;   // succ[w] = R(w)
  std::optional<std::vector<std::array<int, 3>>> ter;  // S(w,u,v)
  std::map<std::string, PointSet> val;
  std::vector<WorldSet> teams;  // source team of each point, powerset models only

  IntModel() : below(1, 1), succ(1, 0) {}
  explicit IntModel(int points) : n(points) {
    if (points < 1 || points > kMaxPoints) throw LimitError("intuitionistic model size must be in 1..64");
    below.assign(static_cast<std::size_t>(n), 0);
    succ.assign(static_cast<std::size_t>(n), 0);
    for (int w = 0; w < n; ++w) below[static_cast<std::size_t>(w)] = bit(w);
  }

  PointSet all() const { return full_set(n); }
  bool geq(int w, int v) const { return has(below[static_cast<std::size_t>(w)], v); }
  bool rel(int w, int v) const { return has(succ[static_cast<std::size_t>(w)], v); }
  bool is_endpoint(int w) const { return below[static_cast<std::size_t>(w)] == bit(w); }

  PointSet endpoints() const {
    PointSet s = 0;
    for (int w = 0; w < n; ++w)
      if (is_endpoint(w)) s |= bit(w);
    return s;
  }
  // strictly above some endpoint, with only endpoints strictly below
  PointSet second_least() const {
    const PointSet ends = endpoints();
    PointSet s = 0;
    for (int w = 0; w < n; ++w) {
      PointSet strict = below[static_cast<std::size_t>(w)] & ~bit(w);
      if (strict != 0 && (strict & ~ends) == 0) s |= bit(w);
    }
    return s;
  }
  PointSet E(int w) const { return below[static_cast<std::size_t>(w)] & endpoints(); }
  PointSet E_bullet(int w) const { return below[static_cast<std::size_t>(w)] & second_least(); }

  // (>= o R)(w)
  PointSet boxreach(int w) const {
    PointSet r = 0;
    for_each_member(below[static_cast<std::size_t>(w)], [&](int u) { r |= succ[static_cast<std::size_t>(u)]; });
    return r;
  }
  PointSet up(PointSet s) const {
    PointSet r = 0;
    for (int w = 0; w < n; ++w)
      if (below[static_cast<std::size_t>(w)] & s) r |= bit(w);
    return r;
  }
  bool has_ter(int w, int u, int v) const {
    if (!ter) return false;
    return std::find(ter->begin(), ter->end(), std::array<int, 3>{w, u, v}) != ter->end();
  }
};

inline bool operator==(const IntModel& a, const IntModel& b) {
  return a.n == b.n && a.below == b.below && a.succ == b.succ && a.ter == b.ter && a.val == b.val;
}

namespace detail {

inline void check_source_size(const KripkeModel& m, int max_worlds) {
  if (m.n > max_worlds) throw LimitError("powerset construction limited to " + std::to_string(max_worlds) + " worlds");
}

// Point ids for teams: offset 1 skips the empty team in M°.
inline IntModel team_model(const KripkeModel& m, int offset) {
  const int count_points = (1 << m.n) - offset;
  IntModel im(count_points);
  im.teams.resize(static_cast<std::size_t>(count_points));
  for (int i = 0; i < count_points; ++i) im.teams[static_cast<std::size_t>(i)] = static_cast<WorldSet>(i + offset);
  for (int i = 0; i < count_points; ++i) {
    const WorldSet x = im.teams[static_cast<std::size_t>(i)];
    PointSet b = 0, s = 0;
    for (int j = 0; j < count_points; ++j) {
      const WorldSet y = im.teams[static_cast<std::size_t>(j)];
      if ((y & ~x) == 0) b |= bit(j);
      if (is_successor_team(m, x, y)) s |= bit(j);
    }
    im.below[static_cast<std::size_t>(i)] = b;
    im.succ[static_cast<std::size_t>(i)] = s;
  }
  for (const auto& [p, vp] : m.val) {
    PointSet s = 0;
    for (int i = 0; i < count_points; ++i)
      if ((im.teams[static_cast<std::size_t>(i)] & ~vp) == 0) s |= bit(i);
    im.val[p] = s;
  }
  return im;
}

}  // namespace detail

// M°: nonempty teams ordered by superset; point i is the team i+1.
inline IntModel build_powerset(const KripkeModel& m, int max_worlds = kPowersetCap) {
  detail::check_source_size(m, max_worlds);
  return detail::team_model(m, 1);
}

// M•: all teams; point i is the team i, so point 0 is the empty team.
inline IntModel build_full_powerset(const KripkeModel& m, int max_worlds = kPowersetCap) {
  detail::check_source_size(m, max_worlds);
  IntModel im = detail::team_model(m, 0);
  std::vector<std::array<int, 3>> s;
  for (int x = 0; x < im.n; ++x)
    for (int y = 0; y < im.n; ++y)
      for (int z = 0; z < im.n; ++z)
        if ((y | z) == x) s.push_back({x, y, z});
  im.ter = std::move(s);
  return im;
}

inline int team_point(const IntModel& im, WorldSet x) {
  for (int i = 0; i < im.n && i < static_cast<int>(im.teams.size()); ++i)
    if (im.teams[static_cast<std::size_t>(i)] == x) return i;
  throw InputError("team " + std::to_string(x) + " is not a point of the model");
}

// ------------------------------------------------------------ satisfaction

namespace detail {

inline bool contains_op(const Formula& f, Op op) {
  if (f.op() == op) return true;
  for (const auto& k : f.kids())
    if (contains_op(k, op)) return true;
  return false;
}

class IntEvaluator {
 public:
  IntEvaluator(const IntModel& im, bool bullet) : im_(im), bullet_(bullet) {
    if (bullet && !im.ter) throw InputError("single-world bullet semantics needs a ternary relation");
  }

  PointSet ext(const Formula& f) {
    auto it = memo_.find(f.id());
    if (it != memo_.end()) return it->second;
    PointSet r = compute(f);
    memo_.emplace(f.id(), r);
    keep_.push_back(f);
    return r;
  }

 private:
  const IntModel& im_;
  bool bullet_;
  std::unordered_map<const void*, PointSet> memo_;
  std::vector<Formula> keep_;  // memo keys are node addresses; keep the nodes alive

  PointSet compute(const Formula& f) {
    switch (f.op()) {
      case Op::Prop: {
        auto it = im_.val.find(f.name());
        if (it != im_.val.end()) return it->second;
        return bullet_ ? im_.endpoints() : 0;  // as in a powerset model where p is empty
      }
      case Op::Bot: return bullet_ ? im_.endpoints() : 0;
      case Op::And: return ext(f.lhs()) & ext(f.rhs());
      case Op::Or: return ext(f.lhs()) | ext(f.rhs());
      case Op::Neg: return implication(ext(f.child()), bullet_ ? im_.endpoints() : 0);
      case Op::Implies: return implication(ext(f.lhs()), ext(f.rhs()));
      case Op::Diamond: {
        const PointSet a = ext(f.child());
        PointSet r = 0;
        for (int w = 0; w < im_.n; ++w)
          if (im_.succ[static_cast<std::size_t>(w)] & a) r |= bit(w);
        return r;
      }
      case Op::Box: {
        const PointSet a = ext(f.child());
        PointSet r = 0;
        for (int w = 0; w < im_.n; ++w)
          if ((im_.boxreach(w) & ~a) == 0) r |= bit(w);
        return r;
      }
      case Op::Tensor: {
        const PointSet a = ext(f.lhs()), b = ext(f.rhs());
        PointSet r = 0;
        for (const auto& [w, u, v] : *im_.ter)
          if (has(a, u) && has(b, v)) r |= bit(w);
        return r;
      }
      case Op::Dep: break;
    }
    throw FragmentError("no single-world clause for " + print(f));
  }

  PointSet implication(PointSet a, PointSet b) const {
    PointSet r = 0;
    for (int w = 0; w < im_.n; ++w)
      if ((im_.below[static_cast<std::size_t>(w)] & a & ~b) == 0) r |= bit(w);
    return r;
  }
};

inline void require_language(const Formula& f, Fragment frag) {
  if (contains_op(f, Op::Dep)) throw FragmentError("dependence atoms have no single-world clause: " + print(f));
  require_fragment(f, frag);
}

}  // namespace detail

// Extension of f under ⊩ (bullet = false) or ⊩• (bullet = true).
inline PointSet int_extension(const IntModel& im, const Formula& f, bool bullet) {
  detail::require_language(f, bullet ? Fragment::MT0 : Fragment::MID);
  return detail::IntEvaluator(im, bullet).ext(f);
}

inline bool sat_int(const IntModel& im, int w, const Formula& f) { return has(int_extension(im, f, false), w); }
inline bool sat_int_bullet(const IntModel& im, int w, const Formula& f) {
  return has(int_extension(im, f, true), w);
}

// ------------------------------------------------------------- conditions

enum class Condition {
  F1, F2, G1, G1p, G2, H1, H2, H3, H4, Negative, Saturated, WeaklyNegative, WeaklySaturated
};

inline const char* condition_name(Condition c) {
  switch (c) {
    case Condition::F1: return "F1";
    case Condition::F2: return "F2";
    case Condition::G1: return "G1";
    case Condition::G1p: return "G1'";
    case Condition::G2: return "G2";
    case Condition::H1: return "H1";
    case Condition::H2: return "H2";
    case Condition::H3: return "H3";
    case Condition::H4: return "H4";
    case Condition::Negative: return "negative";
    case Condition::Saturated: return "saturated";
    case Condition::WeaklyNegative: return "weakly_negative";
    case Condition::WeaklySaturated: return "weakly_saturated";
  }
  return "?";
}

inline Condition condition_from_string(const std::string& s) {
  for (int i = 0; i <= static_cast<int>(Condition::WeaklySaturated); ++i)
    if (s == condition_name(static_cast<Condition>(i))) return static_cast<Condition>(i);
  throw InputError("unknown condition: " + s);
}

inline const std::vector<Condition>& bi_conditions() {
  static const std::vector<Condition> cs = {Condition::F1, Condition::F2, Condition::G1, Condition::G1p,
                                            Condition::G2, Condition::Negative, Condition::Saturated};
  return cs;
}

inline const std::vector<Condition>& tri_conditions() {
  static const std::vector<Condition> cs = {Condition::F1, Condition::F2, Condition::H1, Condition::G1,
                                            Condition::G1p, Condition::G2, Condition::H2, Condition::H3,
                                            Condition::H4, Condition::WeaklyNegative,
                                            Condition::WeaklySaturated};
  return cs;
}

// A false verdict names points (and a proposition or point set where relevant).
struct ConditionResult {
  std::string name;
  bool holds = true;
  std::vector<int> witness;
  std::string prop;
  std::optional<PointSet> set;
};

struct ConditionReport {
  std::vector<ConditionResult> results;

  bool all() const {
    return std::all_of(results.begin(), results.end(), [](const ConditionResult& r) { return r.holds; });
  }
  const ConditionResult& at(const std::string& name) const {
    for (const auto& r : results)
      if (r.name == name) return r;
    throw InputError("condition not in report: " + name);
  }
  std::vector<std::string> failed() const {
    std::vector<std::string> out;
    for (const auto& r : results)
      if (!r.holds) out.push_back(r.name);
    return out;
  }
};

namespace detail {

inline ConditionResult fail(const char* name, std::vector<int> w, std::string prop = "",
                            std::optional<PointSet> set = std::nullopt) {
  return {name, false, std::move(w), std::move(prop), set};
}

inline constexpr int kSubsetLimit = 20;

// Calls f on every subset of s (empty first); stops when f returns false.
template <class F>
bool for_each_subset(PointSet s, F&& f) {
  if (count(s) > kSubsetLimit) throw LimitError("condition check would enumerate too many subsets");
  PointSet sub = 0;
  while (true) {
    if (!f(sub)) return false;
    if (sub == s) return true;
    sub = (sub - s) & s;
  }
}

inline ConditionResult check_f1(const IntModel& im) {
  for (int w = 0; w < im.n; ++w)
    for (int w2 = 0; w2 < im.n; ++w2) {
      if (!im.geq(w, w2)) continue;
      for (int v = 0; v < im.n; ++v)
        if (im.rel(w, v) && (im.below[static_cast<std::size_t>(v)] & im.succ[static_cast<std::size_t>(w2)]) == 0)
          return fail("F1", {w, w2, v});
    }
  return {"F1"};
}

inline ConditionResult check_f2(const IntModel& im) {
  for (int w = 0; w < im.n; ++w)
    for (int v = 0; v < im.n; ++v) {
      if (!im.rel(w, v)) continue;
      for (int v2 = 0; v2 < im.n; ++v2) {
        if (!im.geq(v, v2)) continue;
        bool found = false;
        for_each_member(im.below[static_cast<std::size_t>(w)], [&](int w2) { found = found || im.rel(w2, v2); });
        if (!found) return fail("F2", {w, v, v2});
      }
    }
  return {"F2"};
}

inline ConditionResult check_g1p(const IntModel& im) {
  for (int w = 0; w < im.n; ++w) {
    const PointSet br = im.boxreach(w);
    for (int u = 0; u < im.n; ++u)
      for (int v = 0; v < im.n; ++v) {
        if (!has(br, u) || !has(br, v)) continue;
        bool found = false;
        for_each_member(br, [&](int t) { found = found || (im.geq(t, u) && im.geq(t, v)); });
        if (!found) return fail("G1'", {w, u, v});
      }
  }
  return {"G1'"};
}

// On a finite carrier it is enough to take X = (>= o R)(w) itself: any upper
// bound of it inside the set bounds every nonempty subset.
inline ConditionResult check_g1(const IntModel& im) {
  for (int w = 0; w < im.n; ++w) {
    const PointSet br = im.boxreach(w);
    if (br == 0) continue;
    bool found = false;
    for_each_member(br, [&](int u) { found = found || (im.below[static_cast<std::size_t>(u)] & br) == br; });
    if (!found) return fail("G1", {w}, "", br);
  }
  return {"G1"};
}

// G2 over endpoints (bi) or second-least points (tri).
inline ConditionResult check_g2(const IntModel& im, bool tri) {
  const PointSet base = tri ? im.second_least() : im.endpoints();
  auto Ew = [&](int w) { return im.below[static_cast<std::size_t>(w)] & base; };
  for (int w = 0; w < im.n; ++w) {
    const PointSet ew = Ew(w);
    PointSet reach = 0;
    for_each_member(ew, [&](int v) { reach |= im.succ[static_cast<std::size_t>(v)]; });
    std::optional<ConditionResult> bad;
    for_each_subset(reach & base, [&](PointSet e) {
      bool pre = true;
      for_each_member(ew, [&](int v) { pre = pre && (e & im.succ[static_cast<std::size_t>(v)]) != 0; });
      if (!pre) return true;
      bool found = false;
      for_each_member(im.succ[static_cast<std::size_t>(w)], [&](int t) { found = found || (Ew(t) & ~e) == 0; });
      if (!found) bad = fail("G2", {w}, "", e);
      return found;
    });
    if (bad) return *bad;
  }
  return {"G2"};
}

inline ConditionResult check_negative(const IntModel& im, bool bullet) {
  const char* name = bullet ? "weakly_negative" : "negative";
  IntEvaluator ev(im, bullet);
  const PointSet ends = im.endpoints();
  for (const auto& [p, vp] : im.val) {
    const PointSet nn = ev.ext(neg(neg(prop(p))));
    if (vp != nn) return fail(name, {std::countr_zero(vp ^ nn)}, p);
    if (bullet && (ends & ~vp) != 0) return fail(name, {std::countr_zero(ends & ~vp)}, p);
  }
  return {name};
}

// k-th subset of s: bit i of k selects the i-th member of s.
inline PointSet deposit(PointSet k, PointSet s) {
  PointSet r = 0;
  for (int i = 0; s; ++i, s &= s - 1)
    if ((k >> i) & 1U) r |= s & -s;
  return r;
}

inline ConditionResult check_saturated(const IntModel& im, bool weak) {
  const char* name = weak ? "weakly_saturated" : "saturated";
  const PointSet base = weak ? im.second_least() : im.endpoints();
  auto Ew = [&](int w) { return im.below[static_cast<std::size_t>(w)] & base; };
  for (int w = 0; w < im.n; ++w) {
    const PointSet ew = Ew(w);
    if (ew == 0 && !(weak && im.is_endpoint(w))) return fail(name, {w});
    std::set<PointSet> seen;
    for_each_member(im.below[static_cast<std::size_t>(w)], [&](int v) { seen.insert(Ew(v)); });
    // the first missing subset in enumeration order; at most |seen|+1 steps
    std::optional<PointSet> missing;
    if (count(ew) <= kSubsetLimit) {
      for_each_subset(ew, [&](PointSet e) {
        if ((e == 0 && !weak) || seen.count(e)) return true;
        missing = e;
        return false;
      });
    } else {
      for (PointSet k = weak ? 0 : 1;; ++k) {
        const PointSet e = deposit(k, ew);
        if (!seen.count(e)) {
          missing = e;
          break;
        }
      }
    }
    if (missing) return fail(name, {w}, "", *missing);
  }
  return {name};
}

inline void require_ter(const IntModel& im, const char* name) {
  if (!im.ter) throw InputError(std::string("condition ") + name + " needs a ternary relation");
}

inline ConditionResult check_h1(const IntModel& im) {
  require_ter(im, "H1");
  for (const auto& [w, u, v] : *im.ter)
    for (int w2 = 0; w2 < im.n; ++w2) {
      if (!im.geq(w, w2)) continue;
      bool found = false;
      for (const auto& [a, b, c] : *im.ter)
        if (a == w2 && im.geq(u, b) && im.geq(v, c)) {
          found = true;
          break;
        }
      if (!found) return fail("H1", {w, u, v, w2});
    }
  return {"H1"};
}

inline ConditionResult check_h2(const IntModel& im) {
  require_ter(im, "H2");
  std::vector<PointSet> e(static_cast<std::size_t>(im.n));
  for (int w = 0; w < im.n; ++w) e[static_cast<std::size_t>(w)] = im.E_bullet(w);
  std::set<std::array<int, 3>> s(im.ter->begin(), im.ter->end());
  for (int w = 0; w < im.n; ++w)
    for (int u = 0; u < im.n; ++u)
      for (int v = 0; v < im.n; ++v) {
        const bool lhs = s.count({w, u, v}) > 0;
        const bool rhs = e[static_cast<std::size_t>(w)] == (e[static_cast<std::size_t>(u)] | e[static_cast<std::size_t>(v)]);
        if (lhs != rhs) return fail("H2", {w, u, v});
      }
  return {"H2"};
}

inline ConditionResult check_h3(const IntModel& im) {
  require_ter(im, "H3");
  for (int e = 0; e < im.n; ++e) {
    if (!im.is_endpoint(e)) continue;
    for (int w = 0; w < im.n; ++w)
      if ((im.rel(e, w) || im.rel(w, e)) && !im.is_endpoint(w)) return fail("H3", {e, w});
  }
  return {"H3"};
}

inline ConditionResult check_h4(const IntModel& im) {
  require_ter(im, "H4");
  for (int e = 0; e < im.n; ++e)
    if (im.is_endpoint(e) && !im.rel(e, e)) return fail("H4", {e});
  return {"H4"};
}

}  // namespace detail

inline ConditionResult check_condition(const IntModel& im, Condition c) {
  switch (c) {
    case Condition::F1: return detail::check_f1(im);
    case Condition::F2: return detail::check_f2(im);
    case Condition::G1: return detail::check_g1(im);
    case Condition::G1p: return detail::check_g1p(im);
    case Condition::G2: return detail::check_g2(im, im.ter.has_value());
    case Condition::H1: return detail::check_h1(im);
    case Condition::H2: return detail::check_h2(im);
    case Condition::H3: return detail::check_h3(im);
    case Condition::H4: return detail::check_h4(im);
    case Condition::Negative: return detail::check_negative(im, false);
    case Condition::Saturated: return detail::check_saturated(im, false);
    case Condition::WeaklyNegative:
      detail::require_ter(im, "weakly_negative");
      return detail::check_negative(im, true);
    case Condition::WeaklySaturated: return detail::check_saturated(im, true);
  }
  return {};
}

inline ConditionReport check_conditions(const IntModel& im, const std::vector<Condition>& which) {
  ConditionReport r;
  for (auto c : which) r.results.push_back(check_condition(im, c));
  return r;
}

// Poset laws and monotone valuation; F1/F2 and H1 are left to check_conditions.
inline void validate_int_model(const IntModel& im) {
  for (int w = 0; w < im.n; ++w) {
    if (!im.geq(w, w)) throw InputError("order is not reflexive at " + std::to_string(w));
    for (int v = 0; v < im.n; ++v) {
      if (v != w && im.geq(w, v) && im.geq(v, w))
        throw InputError("order is not antisymmetric at " + std::to_string(w) + "," + std::to_string(v));
      if (im.geq(w, v) && (im.below[static_cast<std::size_t>(v)] & ~im.below[static_cast<std::size_t>(w)]) != 0)
        throw InputError("order is not transitive at " + std::to_string(w) + "," + std::to_string(v));
    }
  }
  for (const auto& [p, vp] : im.val)
    for_each_member(vp, [&](int w) {
      if (im.below[static_cast<std::size_t>(w)] & ~vp)
        throw InputError("valuation of " + p + " is not monotone at " + std::to_string(w));
    });
}

// -------------------------------------------------------------- p-morphisms

enum class MorphismFlavor { Bi, Tri };

inline ConditionReport check_pmorphism(const IntModel& src, const IntModel& dst, const std::vector<int>& f,
                                       MorphismFlavor flavor) {
  if (static_cast<int>(f.size()) != src.n) throw InputError("point map must be total on the source");
  for (int x : f)
    if (x < 0 || x >= dst.n) throw InputError("point map leaves the target");
  const bool tri = flavor == MorphismFlavor::Tri;
  auto F = [&](int w) { return f[static_cast<std::size_t>(w)]; };
  ConditionReport rep;
  using detail::fail;

  // P1 over the propositions of either model, read as in ⊩ or ⊩•
  {
    std::set<std::string> ps;
    for (const auto& [p, _] : src.val) ps.insert(p);
    for (const auto& [p, _] : dst.val) ps.insert(p);
    ConditionResult r{"P1"};
    for (const auto& p : ps) {
      auto read = [&](const IntModel& m) {
        auto it = m.val.find(p);
        return it != m.val.end() ? it->second : tri ? m.endpoints() : PointSet{0};
      };
      const PointSet a = read(src), b = read(dst);
      for (int w = 0; w < src.n && r.holds; ++w)
        if (has(a, w) != has(b, F(w))) r = fail("P1", {w}, p);
      if (!r.holds) break;
    }
    rep.results.push_back(r);
  }
  auto pairs = [&](const char* name, auto&& rel1, auto&& ok) {
    ConditionResult r{name};
    for (int w = 0; w < src.n && r.holds; ++w)
      for (int v = 0; v < src.n && r.holds; ++v)
        if (rel1(w, v) && !ok(w, v)) r = fail(name, {w, v});
    rep.results.push_back(r);
  };
  pairs("P2", [&](int w, int v) { return src.geq(w, v); }, [&](int w, int v) { return dst.geq(F(w), F(v)); });
  pairs("P3", [&](int w, int v) { return src.rel(w, v); }, [&](int w, int v) { return dst.rel(F(w), F(v)); });
  // back conditions: w in the source, v' in the target
  auto back = [&](const char* name, auto&& rel2, auto&& candidates, auto&& ok) {
    ConditionResult r{name};
    for (int w = 0; w < src.n && r.holds; ++w)
      for (int v2 = 0; v2 < dst.n && r.holds; ++v2) {
        if (!rel2(F(w), v2)) continue;
        bool found = false;
        for_each_member(candidates(w), [&](int v) { found = found || ok(v, v2); });
        if (!found) r = fail(name, {w, v2});
      }
    rep.results.push_back(r);
  };
  back("P4", [&](int a, int b) { return dst.geq(a, b); },
       [&](int w) { return src.below[static_cast<std::size_t>(w)]; }, [&](int v, int v2) { return F(v) == v2; });
  back("P5", [&](int a, int b) { return dst.rel(a, b); },
       [&](int w) { return src.succ[static_cast<std::size_t>(w)]; }, [&](int v, int v2) { return dst.geq(v2, F(v)); });
  back("P6", [&](int a, int b) { return has(dst.boxreach(a), b); }, [&](int w) { return src.boxreach(w); },
       [&](int v, int v2) { return dst.geq(F(v), v2); });

  if (tri) {
    if (!src.ter || !dst.ter) throw InputError("tri p-morphism needs ternary relations on both models");
    ConditionResult q1{"Q1"};
    for (const auto& [w, u, v] : *src.ter)
      if (!dst.has_ter(F(w), F(u), F(v))) {
        q1 = fail("Q1", {w, u, v});
        break;
      }
    rep.results.push_back(q1);
    ConditionResult q2{"Q2"};
    for (int w = 0; w < src.n && q2.holds; ++w)
      for (const auto& [a, u2, v2] : *dst.ter) {
        if (a != F(w)) continue;
        bool found = false;
        for (const auto& [b, u, v] : *src.ter)
          if (b == w && F(u) == u2 && F(v) == v2) {
            found = true;
            break;
          }
        if (!found) {
          q2 = fail("Q2", {w, u2, v2});
          break;
        }
      }
    rep.results.push_back(q2);
    ConditionResult q3{"Q3"};
    for (int e = 0; e < src.n; ++e)
      if (src.is_endpoint(e) != dst.is_endpoint(F(e))) {
        q3 = fail("Q3", {e});
        break;
      }
    rep.results.push_back(q3);
  }
  return rep;
}

// ------------------------------------------------------------ endpoint map

struct EndpointMap {
  ConditionReport preconditions;
  bool ok = false;
  KripkeModel N;
  std::vector<int> worlds;  // point of im behind each world of N
  IntModel target;          // N° or N•
  std::vector<int> map;     // point of im -> point of target
};

// Classical model on the endpoints (bi) or second-least points (tri) of im,
// and the map w -> E_w (or E•_w) into its (full) powerset model.
inline EndpointMap endpoint_map(const IntModel& im, MorphismFlavor flavor) {
  const bool tri = flavor == MorphismFlavor::Tri;
  EndpointMap out;
  out.preconditions = check_conditions(im, tri ? tri_conditions() : bi_conditions());
  if (!out.preconditions.all()) return out;
  const PointSet base = tri ? im.second_least() : im.endpoints();
  for_each_member(base, [&](int w) { out.worlds.push_back(w); });
  if (out.worlds.empty()) {
    out.preconditions.results.push_back(detail::fail(tri ? "weakly_saturated" : "saturated", {}));
    return out;
  }
  if (static_cast<int>(out.worlds.size()) > kPowersetCap)
    throw LimitError("endpoint map: derived model exceeds " + std::to_string(kPowersetCap) + " worlds");
  KripkeModel n(static_cast<int>(out.worlds.size()));
  std::vector<int> index(static_cast<std::size_t>(im.n), -1);
  for (std::size_t i = 0; i < out.worlds.size(); ++i) index[static_cast<std::size_t>(out.worlds[i])] = static_cast<int>(i);
  auto to_team = [&](PointSet s) {
    WorldSet t = 0;
    for_each_member(s, [&](int w) { t |= bit(index[static_cast<std::size_t>(w)]); });
    return t;
  };
  for (std::size_t i = 0; i < out.worlds.size(); ++i)
    n.succ[i] = to_team(im.succ[static_cast<std::size_t>(out.worlds[i])] & base);
  for (const auto& [p, vp] : im.val) n.val[p] = to_team(vp & base);
  out.target = tri ? build_full_powerset(n) : build_powerset(n);
  for (int w = 0; w < im.n; ++w)
    out.map.push_back(team_point(out.target, to_team(im.below[static_cast<std::size_t>(w)] & base)));
  out.N = std::move(n);
  out.ok = true;
  return out;
}

}  // namespace mdl
