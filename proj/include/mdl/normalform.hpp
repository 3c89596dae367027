#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "mdl/syntax.hpp"

namespace mdl {

// Guard against the exponential blow-up of the normal form.
constexpr std::size_t kDisjunctCap = std::size_t{1} << 16;

struct NormalForm {
  std::vector<Formula> disjuncts;

  Formula join() const { return fold(Op::Or, disjuncts); }
  std::size_t size() const { return disjuncts.size(); }
};

// Valuations v of k arguments are indexed t = 0 .. 2^k-1 with v(1) the most
// significant position and 1 before 0, so t = 0 is the all-true valuation.
inline bool valuation_bit(unsigned t, int k, int i) { return ((t >> (k - 1 - i)) & 1U) == 0; }

struct RealizingFunction {
  int arity = 0;
  std::vector<bool> table;  // table[t] = f(v_t)

  // Functions ordered lexicographically over table order with 1 before 0.
  static RealizingFunction nth(int arity, std::uint64_t index) {
    RealizingFunction r;
    r.arity = arity;
    const std::size_t rows = std::size_t{1} << arity;
    r.table.resize(rows);
    for (std::size_t t = 0; t < rows; ++t) r.table[t] = ((index >> (rows - 1 - t)) & 1U) == 0;
    return r;
  }
  static std::uint64_t count(int arity) {
    if (arity > 5) throw LimitError("dependence atom with too many arguments");
    return std::uint64_t{1} << (std::uint64_t{1} << arity);
  }

  friend bool operator==(const RealizingFunction&, const RealizingFunction&) = default;
};

using RealizingSequence = std::vector<std::pair<Path, RealizingFunction>>;

inline Formula literal(const Formula& g, bool positive) { return positive ? g : neg(g); }

// (a1 \/ ~a1) & ... & (ak \/ ~ak) -> (b \/ ~b); for k = 0 just b \/ ~b.
inline Formula dep_implication_form(const Formula& d) {
  const Formula& b = d.dep_target();
  Formula rhs = disj(b, neg(b));
  if (d.dep_args().empty()) return rhs;
  std::vector<Formula> cs;
  for (const auto& a : d.dep_args()) cs.push_back(disj(a, neg(a)));
  return imp(fold(Op::And, cs), rhs);
}

// d*_f: tensor over valuations v of (a1^v1 & ... & ak^vk & b^f(v)).
inline Formula realization(const Formula& d, const RealizingFunction& f) {
  const int k = static_cast<int>(d.dep_args().size());
  if (f.arity != k || f.table.size() != (std::size_t{1} << k))
    throw InputError("realizing function arity does not match " + print(d));
  std::vector<Formula> parts;
  for (unsigned t = 0; t < (1U << k); ++t) {
    std::vector<Formula> cs;
    for (int i = 0; i < k; ++i) cs.push_back(literal(d.dep_args()[static_cast<std::size_t>(i)], valuation_bit(t, k, i)));
    cs.push_back(literal(d.dep_target(), f.table[t]));
    parts.push_back(fold(Op::And, cs));
  }
  return fold(Op::Tensor, parts);
}

inline Formula realize(const Formula& f, const RealizingSequence& s) {
  auto paths = dep_paths(f);
  if (paths.size() != s.size()) throw InputError("realizing sequence does not match the dependence atoms");
  Formula out = f;
  std::vector<bool> used(paths.size(), false);
  for (const auto& [p, fn] : s) {
    std::size_t i = 0;
    while (i < paths.size() && paths[i] != p) ++i;
    if (i == paths.size() || used[i]) throw InputError("realizing sequence key " + path_string(p) + " is not a dependence atom");
    used[i] = true;
    out = replace_at(out, p, 0, realization(at_path(f, p), fn));
  }
  return out;
}

// All realizing sequences, first occurrence varying slowest.
inline std::vector<std::pair<RealizingSequence, Formula>> realize_all(const Formula& f,
                                                                      std::size_t cap = kDisjunctCap) {
  auto paths = dep_paths(f);
  std::vector<std::uint64_t> radix;
  std::size_t total = 1;
  for (const auto& p : paths) {
    radix.push_back(RealizingFunction::count(static_cast<int>(at_path(f, p).dep_args().size())));
    if (total > cap / radix.back()) throw LimitError("too many realizations");
    total *= radix.back();
  }
  std::vector<std::pair<RealizingSequence, Formula>> out;
  std::vector<std::uint64_t> digit(paths.size(), 0);
  for (std::size_t n = 0; n < total; ++n) {
    RealizingSequence s;
    for (std::size_t i = 0; i < paths.size(); ++i)
      s.emplace_back(paths[i], RealizingFunction::nth(static_cast<int>(at_path(f, paths[i]).dep_args().size()), digit[i]));
    Formula r = realize(f, s);
    out.emplace_back(std::move(s), r);
    for (std::size_t i = paths.size(); i-- > 0;) {
      if (++digit[i] < radix[i]) break;
      digit[i] = 0;
    }
  }
  return out;
}

namespace detail {

inline std::size_t checked_mul(std::size_t a, std::size_t b, std::size_t cap) {
  if (b != 0 && a > cap / b) throw LimitError("normal form exceeds the disjunct cap");
  return a * b;
}

class NormalFormBuilder {
 public:
  NormalFormBuilder(Fragment frag, std::size_t cap) : frag_(frag), cap_(cap) {}

  std::vector<Formula> run(const Formula& f) {
    if (is_classical(f, frag_)) return {f};
    switch (f.op()) {
      case Op::Dep:
        if (md_family()) {
          std::vector<Formula> out;
          const int k = static_cast<int>(f.dep_args().size());
          const std::uint64_t n = RealizingFunction::count(k);
          if (n > cap_) throw LimitError("normal form exceeds the disjunct cap");
          for (std::uint64_t i = 0; i < n; ++i) out.push_back(realization(f, RealizingFunction::nth(k, i)));
          return out;
        }
        return run(dep_implication_form(f));
      case Op::Neg: return run(imp(f.child(), bot()));
      case Op::Or: {
        auto a = run(f.lhs());
        auto b = run(f.rhs());
        if (a.size() + b.size() > cap_) throw LimitError("normal form exceeds the disjunct cap");
        a.insert(a.end(), b.begin(), b.end());
        return a;
      }
      case Op::And:
      case Op::Tensor: {
        auto a = run(f.lhs());
        auto b = run(f.rhs());
        checked_mul(a.size(), b.size(), cap_);
        std::vector<Formula> out;
        for (const auto& x : a)
          for (const auto& y : b) out.push_back(Formula::binary(f.op(), x, y));
        return out;
      }
      case Op::Box:
      case Op::Diamond: {
        auto a = run(f.child());
        for (auto& x : a) x = Formula::unary(f.op(), x);
        return a;
      }
      case Op::Implies: {
        auto a = run(f.lhs());
        auto b = run(f.rhs());
        std::size_t total = 1;
        for (std::size_t i = 0; i < a.size(); ++i) total = checked_mul(total, b.size(), cap_);
        std::vector<Formula> out;
        std::vector<std::size_t> fn(a.size(), 0);  // fn[0] most significant
        for (std::size_t n = 0; n < total; ++n) {
          std::vector<Formula> cs;
          for (std::size_t i = 0; i < a.size(); ++i) cs.push_back(imp(a[i], b[fn[i]]));
          out.push_back(fold(Op::And, cs));
          for (std::size_t i = a.size(); i-- > 0;) {
            if (++fn[i] < b.size()) break;
            fn[i] = 0;
          }
        }
        return out;
      }
      default: break;
    }
    throw std::logic_error("normal form: unexpected node " + print(f));
  }

 private:
  Fragment frag_;
  std::size_t cap_;

  bool md_family() const {
    return frag_ == Fragment::MD || frag_ == Fragment::MDplus || frag_ == Fragment::MDor;
  }
};

}  // namespace detail

// Disjunctive normal form: an intuitionistic disjunction of classical formulas
// equivalent to f. MID/MT0 route dependence atoms through their implication
// form; the MD family replaces them by their realizations.
inline NormalForm dnf(const Formula& f, Fragment frag, std::size_t cap = kDisjunctCap) {
  require_fragment(f, frag);
  return NormalForm{detail::NormalFormBuilder(frag, cap).run(f)};
}

}  // namespace mdl
