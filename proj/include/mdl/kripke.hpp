#pragma once

#include <bit>
#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "mdl/errors.hpp"

namespace mdl {

// Bit i set iff world i is a member. Models are capped at 64 worlds.
using WorldSet = std::uint64_t;
using Team = WorldSet;

constexpr int kMaxWorlds = 64;

inline WorldSet bit(int i) { return WorldSet{1} << i; }
inline bool has(WorldSet s, int i) { return (s >> i) & 1U; }
inline WorldSet full_set(int n) { return n >= 64 ? ~WorldSet{0} : (WorldSet{1} << n) - 1; }
inline int count(WorldSet s) { return std::popcount(s); }

template <class F>
void for_each_member(WorldSet s, F&& f) {
  while (s) {
    int i = std::countr_zero(s);
    f(i);
    s &= s - 1;
  }
}

struct KripkeModel {
  int n = 1;
  std::vector<WorldSet> succ;            // succ[w] = R(w)
  std::map<std::string, WorldSet> val;   // missing props are empty

  KripkeModel() : succ(1, 0) {}
  explicit KripkeModel(int worlds) : n(worlds), succ(static_cast<std::size_t>(worlds), 0) {
    if (worlds < 1 || worlds > kMaxWorlds) throw LimitError("model size must be in 1..64");
  }

  void add_edge(int a, int b) { succ.at(static_cast<std::size_t>(a)) |= bit(b); }
  bool edge(int a, int b) const { return has(succ[static_cast<std::size_t>(a)], b); }
  WorldSet all() const { return full_set(n); }
  WorldSet V(const std::string& p) const {
    auto it = val.find(p);
    return it == val.end() ? 0 : it->second;
  }
  bool valid_team(WorldSet x) const { return (x & ~all()) == 0; }

  friend bool operator==(const KripkeModel& a, const KripkeModel& b) {
    if (a.n != b.n || a.succ != b.succ) return false;
    // empty entries compare equal to missing ones
    auto sub = [](const KripkeModel& x, const KripkeModel& y) {
      for (const auto& [p, s] : x.val)
        if (s != y.V(p)) return false;
      return true;
    };
    return sub(a, b) && sub(b, a);
  }
};

inline WorldSet image(const KripkeModel& m, WorldSet x) {
  WorldSet r = 0;
  for_each_member(x, [&](int w) { r |= m.succ[static_cast<std::size_t>(w)]; });
  return r;
}

inline bool is_successor_team(const KripkeModel& m, WorldSet x, WorldSet y) {
  if ((y & ~image(m, x)) != 0) return false;
  bool ok = true;
  for_each_member(x, [&](int w) { ok = ok && (y & m.succ[static_cast<std::size_t>(w)]) != 0; });
  return ok;
}

// Visits every model on n worlds over props. Order: relation mask (bit i*n+j
// for the edge i->j) outermost, then the valuation mask of each prop in list
// order, the last prop varying fastest. Stops early if f returns false.
template <class F>
bool for_each_model(int n, const std::vector<std::string>& props, F&& f) {
  if (n < 1 || n * n > 62) throw LimitError("enumerate_models: n out of range");
  const std::uint64_t rel_count = std::uint64_t{1} << (n * n);
  const int vbits = n * static_cast<int>(props.size());
  if (vbits > 62) throw LimitError("enumerate_models: too many props");
  const std::uint64_t val_count = std::uint64_t{1} << vbits;
  KripkeModel m(n);
  for (std::uint64_t r = 0; r < rel_count; ++r) {
    for (int i = 0; i < n; ++i) m.succ[static_cast<std::size_t>(i)] = (r >> (i * n)) & full_set(n);
    for (std::uint64_t v = 0; v < val_count; ++v) {
      for (std::size_t k = 0; k < props.size(); ++k) {
        int shift = n * static_cast<int>(props.size() - 1 - k);
        m.val[props[k]] = (v >> shift) & full_set(n);
      }
      if (!f(static_cast<const KripkeModel&>(m))) return false;
    }
  }
  return true;
}

inline std::vector<KripkeModel> enumerate_models(int n, const std::vector<std::string>& props) {
  std::vector<KripkeModel> out;
  for_each_model(n, props, [&](const KripkeModel& m) {
    out.push_back(m);
    return true;
  });
  return out;
}

inline std::pair<KripkeModel, std::vector<int>> disjoint_union(const std::vector<KripkeModel>& ms) {
  int total = 0;
  std::vector<int> offsets;
  for (const auto& m : ms) {
    offsets.push_back(total);
    total += m.n;
  }
  if (total > kMaxWorlds) throw LimitError("disjoint union exceeds 64 worlds");
  KripkeModel u(total);
  for (std::size_t i = 0; i < ms.size(); ++i) {
    const int off = offsets[i];
    for (int w = 0; w < ms[i].n; ++w) u.succ[static_cast<std::size_t>(w + off)] = ms[i].succ[static_cast<std::size_t>(w)] << off;
    for (const auto& [p, s] : ms[i].val) u.val[p] |= s << off;
  }
  return {u, offsets};
}

// "0,2,5" -> {0,2,5}; "" -> empty team.
inline WorldSet parse_team(const std::string& s, int n) {
  WorldSet x = 0;
  std::size_t i = 0;
  while (i < s.size()) {
    std::size_t j = s.find(',', i);
    if (j == std::string::npos) j = s.size();
    std::string tok = s.substr(i, j - i);
    std::size_t used = 0;
    int w = -1;
    try {
      w = std::stoi(tok, &used);
    } catch (const std::exception&) {
      throw InputError("bad team literal '" + s + "'");
    }
    if (used != tok.size() || w < 0 || w >= n) throw InputError("bad world index '" + tok + "' in team literal");
    x |= bit(w);
    i = j + 1;
    if (j + 1 == s.size()) throw InputError("trailing comma in team literal");
  }
  return x;
}

inline std::string team_string(WorldSet x) {
  std::string s;
  for_each_member(x, [&](int w) {
    if (!s.empty()) s += ',';
    s += std::to_string(w);
  });
  return s;
}

}  // namespace mdl
