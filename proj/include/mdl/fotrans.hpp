#pragma once

#include <algorithm>
#include <stdexcept>
#include <set>
#include <string>
#include <vector>

#include "mdl/syntax.hpp"

namespace mdl {

// First-order dependence logic terms, printed in an ASCII grammar:
//   P_p(x)   x R y0   bot   ~A   A & B   A | B   A \/ B   A -> B
//   forall y0 ( A )   exists y0 ( A )   =(A1,...,Ak,B)
struct FOFormula {
  enum Kind { Pred, Rel, Bot, Neg, And, Tensor, Or, Implies, Forall, Exists, Dep };
  Kind kind = Bot;
  std::string name;              // predicate symbol or bound variable
  std::vector<std::string> vars;  // Pred: {x}; Rel: {x, y}
  std::vector<FOFormula> kids;
};

namespace detail {

class Translator {
 public:
  FOFormula run(const Formula& f, const std::string& x) {
    FOFormula out;
    switch (f.op()) {
      case Op::Prop:
        out.kind = FOFormula::Pred;
        out.name = "P_" + f.name();
        out.vars = {x};
        return out;
      case Op::Bot: out.kind = FOFormula::Bot; return out;
      case Op::Neg:
        out.kind = FOFormula::Neg;
        out.kids = {run(f.child(), x)};
        return out;
      case Op::And:
      case Op::Tensor:
      case Op::Or:
      case Op::Implies:
        out.kind = f.op() == Op::And      ? FOFormula::And
                   : f.op() == Op::Tensor ? FOFormula::Tensor
                   : f.op() == Op::Or     ? FOFormula::Or
                                          : FOFormula::Implies;
        out.kids.push_back(run(f.lhs(), x));
        out.kids.push_back(run(f.rhs(), x));
        return out;
      case Op::Dep:
        out.kind = FOFormula::Dep;
        for (const auto& k : f.kids()) out.kids.push_back(run(k, x));
        return out;
      case Op::Box:
      case Op::Diamond: {
        const std::string y = "y" + std::to_string(next_++);
        FOFormula rel{FOFormula::Rel, "R", {x, y}, {}};
        FOFormula body;
        if (f.op() == Op::Box) {
          body.kind = FOFormula::Tensor;
          body.kids = {FOFormula{FOFormula::Neg, "", {}, {rel}}, run(f.child(), y)};
        } else {
          body.kind = FOFormula::And;
          body.kids = {rel, run(f.child(), y)};
        }
        out.kind = f.op() == Op::Box ? FOFormula::Forall : FOFormula::Exists;
        out.name = y;
        out.kids = {std::move(body)};
        return out;
      }
    }
    throw std::logic_error("standard translation: unknown node");
  }

 private:
  int next_ = 0;
};

inline int fo_prec(const FOFormula& f) {
  switch (f.kind) {
    case FOFormula::Implies: return 1;
    case FOFormula::Or: return 2;
    case FOFormula::Tensor: return 3;
    case FOFormula::And: return 4;
    case FOFormula::Neg: return 5;
    default: return 6;
  }
}

inline void fo_print(const FOFormula& f, std::string& out, int min_prec) {
  const int p = fo_prec(f);
  if (p < min_prec) out += '(';
  switch (f.kind) {
    case FOFormula::Pred: out += f.name + "(" + f.vars[0] + ")"; break;
    case FOFormula::Rel: out += f.vars[0] + " R " + f.vars[1]; break;
    case FOFormula::Bot: out += "bot"; break;
    case FOFormula::Neg:
      out += '~';
      fo_print(f.kids[0], out, 5);
      break;
    case FOFormula::Forall:
    case FOFormula::Exists:
      out += f.kind == FOFormula::Forall ? "forall " : "exists ";
      out += f.name + " ( ";
      fo_print(f.kids[0], out, 0);
      out += " )";
      break;
    case FOFormula::Dep:
      out += "=(";
      for (std::size_t i = 0; i < f.kids.size(); ++i) {
        if (i) out += ',';
        fo_print(f.kids[i], out, 0);
      }
      out += ')';
      break;
    case FOFormula::Implies:
      fo_print(f.kids[0], out, 2);
      out += " -> ";
      fo_print(f.kids[1], out, 1);
      break;
    default: {
      fo_print(f.kids[0], out, p);
      out += f.kind == FOFormula::And ? " & " : f.kind == FOFormula::Tensor ? " | " : " \\/ ";
      fo_print(f.kids[1], out, p + 1);
      break;
    }
  }
  if (p < min_prec) out += ')';
}

inline void fo_free(const FOFormula& f, std::set<std::string>& bound, std::set<std::string>& out) {
  for (const auto& v : f.vars)
    if (!bound.count(v)) out.insert(v);
  const bool binds = f.kind == FOFormula::Forall || f.kind == FOFormula::Exists;
  const bool fresh = binds && bound.insert(f.name).second;
  for (const auto& k : f.kids) fo_free(k, bound, out);
  if (fresh) bound.erase(f.name);
}

}  // namespace detail

// ST_x; bound variables y0, y1, ... are allocated in pre-order.
inline FOFormula standard_translation(const Formula& f, const std::string& x = "x") {
  require_fragment(f, Fragment::MT0);
  return detail::Translator().run(f, x);
}

inline std::string print(const FOFormula& f) {
  std::string s;
  detail::fo_print(f, s, 0);
  return s;
}

inline std::string standard_translate(const Formula& f, const std::string& x = "x") {
  return print(standard_translation(f, x));
}

inline std::set<std::string> free_variables(const FOFormula& f) {
  std::set<std::string> bound, out;
  detail::fo_free(f, bound, out);
  return out;
}

inline int quantifier_depth(const FOFormula& f) {
  int d = 0;
  for (const auto& k : f.kids) d = std::max(d, quantifier_depth(k));
  return d + (f.kind == FOFormula::Forall || f.kind == FOFormula::Exists ? 1 : 0);
}

}  // namespace mdl
