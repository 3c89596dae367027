#pragma once

#include <optional>
#include <string>
#include <vector>

#include "mdl/kcore.hpp"
#include "mdl/normalform.hpp"
#include "mdl/teameval.hpp"

namespace mdl {

// One step of the reduction to K: premise disjunct entails conclusion disjunct.
// For validity queries the premise is ~bot.
struct CertificateEntry {
  Formula premise;
  Formula conclusion;
};

struct TeamVerdict {
  bool affirmative = true;  // Valid / Entailed
  std::optional<Witness> counter;
  std::vector<CertificateEntry> certificate;
};

namespace detail {

inline bool has_implication(Fragment frag) { return frag == Fragment::MID || frag == Fragment::MT0; }

class Decider {
 public:
  explicit Decider(Fragment frag) : frag_(frag) {}

  // premise empty means a validity query. Returns a counter or nothing.
  std::optional<Witness> solve(const std::optional<Formula>& premise, const Formula& goal,
                               std::vector<CertificateEntry>& cert) {
    // phi |= A & B iff phi |= A and phi |= B
    if (goal.op() == Op::And) {
      if (auto c = solve(premise, goal.lhs(), cert)) return c;
      return solve(premise, goal.rhs(), cert);
    }
    // phi |= A -> B iff phi & A |= B (downward closure)
    if (has_implication(frag_) && !is_classical(goal, frag_) &&
        (goal.op() == Op::Implies || goal.op() == Op::Neg)) {
      const Formula a = goal.op() == Op::Neg ? goal.child() : goal.lhs();
      const Formula b = goal.op() == Op::Neg ? bot() : goal.rhs();
      return solve(premise ? conj(*premise, a) : a, b, cert);
    }
    const auto lhs = premise ? dnf(*premise, frag_).disjuncts : std::vector<Formula>{top()};
    const auto rhs = dnf(goal, frag_).disjuncts;
    for (const auto& a : lhs) {
      std::optional<Formula> match;
      for (const auto& b : rhs)
        if (k_entails(a, b, frag_).valid) {
          match = b;
          break;
        }
      if (match) {
        cert.push_back({a, *match});
        continue;
      }
      return counter(a, rhs);
    }
    return std::nullopt;
  }

 private:
  Fragment frag_;

  // a fails to entail every b: one K counter per b, reusing a point already
  // collected when it falsifies b too. The team of those points satisfies a
  // and falsifies the disjunction of the b's.
  Witness counter(const Formula& a, const std::vector<Formula>& rhs) {
    std::vector<KripkeModel> parts;
    std::vector<std::pair<int, int>> chosen;  // (part, point)
    for (const auto& b : rhs) {
      bool reused = false;
      for (const auto& [pi, w] : chosen)
        if (!eval_world(parts[static_cast<std::size_t>(pi)], w, b)) {
          reused = true;
          break;
        }
      if (reused) continue;
      auto v = k_entails(a, b, frag_);
      parts.push_back(v.counter->first);
      chosen.push_back({static_cast<int>(parts.size() - 1), v.counter->second});
    }
    auto [m, offsets] = disjoint_union(parts);
    WorldSet x = 0;
    for (const auto& [pi, w] : chosen) x |= bit(offsets[static_cast<std::size_t>(pi)] + w);
    return Witness{std::move(m), x};
  }
};

inline void verify_counter(const Witness& w, const std::optional<Formula>& phi, const Formula& psi) {
  if ((phi && !eval(w.model, w.team, *phi)) || eval(w.model, w.team, psi))
    throw std::logic_error("synthesized counter does not verify for " + print(psi));
}

}  // namespace detail

inline TeamVerdict decide_entails(const Formula& phi, const Formula& psi, Fragment frag) {
  require_fragment(phi, frag);
  require_fragment(psi, frag);
  TeamVerdict v;
  if (auto c = detail::Decider(frag).solve(phi, psi, v.certificate)) {
    detail::verify_counter(*c, phi, psi);
    v.affirmative = false;
    v.counter = std::move(c);
  }
  return v;
}

inline TeamVerdict decide_valid(const Formula& f, Fragment frag) {
  require_fragment(f, frag);
  TeamVerdict v;
  if (auto c = detail::Decider(frag).solve(std::nullopt, f, v.certificate)) {
    detail::verify_counter(*c, std::nullopt, f);
    v.affirmative = false;
    v.counter = std::move(c);
  }
  return v;
}

// A classical formula equivalent to f, if f is flat.
inline std::optional<Formula> flat_characterize(const Formula& f, Fragment frag) {
  const auto ds = dnf(f, frag).disjuncts;
  for (const auto& candidate : ds) {
    bool all = true;
    for (const auto& a : ds)
      if (!(a == candidate) && !k_entails(a, candidate, frag).valid) {
        all = false;
        break;
      }
    if (all) return candidate;
  }
  return std::nullopt;
}

}  // namespace mdl
