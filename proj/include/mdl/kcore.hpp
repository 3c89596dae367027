#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "mdl/kripke.hpp"
#include "mdl/syntax.hpp"
#include "mdl/teameval.hpp"

namespace mdl {

struct KVerdict {
  bool valid = true;
  std::optional<std::pair<KripkeModel, int>> counter;  // pointed countermodel
};

namespace detail {

// Negation normal form over literals, and/or, box/diamond. Nodes are
// hash-consed so a tableau label is a set of ints.
class Nnf {
 public:
  enum Kind { Top, Bottom, Pos, NegLit, And, Or, Box, Dia };
  struct Node {
    Kind kind;
    std::string prop;
    int a = -1, b = -1;
    auto key() const { return std::tie(kind, prop, a, b); }
    bool operator<(const Node& o) const { return key() < o.key(); }
  };

  int make(Node n) {
    auto it = ids_.find(n);
    if (it != ids_.end()) return it->second;
    nodes_.push_back(n);
    ids_.emplace(n, static_cast<int>(nodes_.size() - 1));
    return static_cast<int>(nodes_.size() - 1);
  }

  // NNF of f (positive) or of its classical negation.
  int from(const Formula& f, bool pos) {
    switch (f.op()) {
      case Op::Prop: return make({pos ? Pos : NegLit, f.name()});
      case Op::Bot: return make({pos ? Bottom : Top, ""});
      case Op::Neg: return from(f.child(), !pos);
      case Op::And:
        return make({pos ? And : Or, "", from(f.lhs(), pos), from(f.rhs(), pos)});
      case Op::Tensor:
        return make({pos ? Or : And, "", from(f.lhs(), pos), from(f.rhs(), pos)});
      case Op::Implies:
        return make({pos ? Or : And, "", from(f.lhs(), !pos), from(f.rhs(), pos)});
      case Op::Box: return make({pos ? Box : Dia, "", from(f.child(), pos)});
      case Op::Diamond: return make({pos ? Dia : Box, "", from(f.child(), pos)});
      default: throw FragmentError("not classical: " + print(f));
    }
  }

  const Node& operator[](int i) const { return nodes_[static_cast<std::size_t>(i)]; }

  Formula to_formula(int i) const {
    const Node& n = (*this)[i];
    switch (n.kind) {
      case Top: return top();
      case Bottom: return bot();
      case Pos: return prop(n.prop);
      case NegLit: return neg(prop(n.prop));
      case And: return conj(to_formula(n.a), to_formula(n.b));
      case Or: return tensor(to_formula(n.a), to_formula(n.b));
      case Box: return box(to_formula(n.a));
      case Dia: return dia(to_formula(n.a));
    }
    return bot();
  }

 private:
  std::vector<Node> nodes_;
  std::map<Node, int> ids_;
};

struct TableauWorld {
  std::set<std::string> true_props;
  std::vector<TableauWorld> children;
};

class Tableau {
 public:
  explicit Tableau(Nnf& nnf) : nnf_(nnf) {}

  std::optional<TableauWorld> solve(const std::vector<int>& label) {
    std::set<int> done;
    std::vector<int> pending(label.rbegin(), label.rend());  // back = next
    return branch(std::move(pending), std::move(done));
  }

 private:
  Nnf& nnf_;

  // Saturates the branch; Or splits left first. done holds the processed
  // literals and modal formulas of this world.
  std::optional<TableauWorld> branch(std::vector<int> pending, std::set<int> done) {
    while (!pending.empty()) {
      int x = pending.back();
      pending.pop_back();
      if (done.count(x)) continue;
      const auto& n = nnf_[x];
      switch (n.kind) {
        case Nnf::Top: continue;
        case Nnf::Bottom: return std::nullopt;
        case Nnf::Pos:
        case Nnf::NegLit: {
          int comp = nnf_.make({n.kind == Nnf::Pos ? Nnf::NegLit : Nnf::Pos, n.prop});
          if (done.count(comp)) return std::nullopt;
          done.insert(x);
          continue;
        }
        case Nnf::And:
          done.insert(x);
          pending.push_back(n.b);
          pending.push_back(n.a);
          continue;
        case Nnf::Or: {
          done.insert(x);
          int a = n.a, b = n.b;
          auto left = pending;
          left.push_back(a);
          if (auto r = branch(std::move(left), done)) return r;
          pending.push_back(b);
          continue;
        }
        case Nnf::Box:
        case Nnf::Dia: done.insert(x); continue;
      }
    }
    TableauWorld w;
    std::vector<int> boxes, dias;
    for (int x : done) {
      const auto& n = nnf_[x];
      if (n.kind == Nnf::Pos) w.true_props.insert(n.prop);
      if (n.kind == Nnf::Box) boxes.push_back(n.a);
      if (n.kind == Nnf::Dia) dias.push_back(n.a);
    }
    for (int d : dias) {
      std::vector<int> label{d};
      label.insert(label.end(), boxes.begin(), boxes.end());
      auto child = solve(label);
      if (!child) return std::nullopt;
      w.children.push_back(std::move(*child));
    }
    return w;
  }
};

// Worlds numbered in pre-order: a world before its successors.
inline int flatten(const TableauWorld& t, std::vector<std::pair<int, int>>& edges,
                   std::vector<std::set<std::string>>& props) {
  int id = static_cast<int>(props.size());
  props.push_back(t.true_props);
  for (const auto& c : t.children) {
    int cid = flatten(c, edges, props);
    edges.push_back({id, cid});
  }
  return id;
}

inline KripkeModel to_model(const TableauWorld& t, const std::vector<std::string>& alphabet) {
  std::vector<std::pair<int, int>> edges;
  std::vector<std::set<std::string>> props;
  flatten(t, edges, props);
  if (props.size() > static_cast<std::size_t>(kMaxWorlds)) throw LimitError("countermodel exceeds 64 worlds");
  KripkeModel m(static_cast<int>(props.size()));
  for (const auto& [a, b] : edges) m.add_edge(a, b);
  for (const auto& p : alphabet) m.val[p] = 0;
  for (std::size_t w = 0; w < props.size(); ++w)
    for (const auto& p : props[w]) m.val[p] |= bit(static_cast<int>(w));
  return m;
}

inline void require_classical(const Formula& a, Fragment frag) {
  if (!is_classical(a, frag))
    throw FragmentError(std::string("not a classical formula of ") + fragment_name(frag) + ": " + print(a));
}

}  // namespace detail

// Satisfiability of a set of classical formulas; returns a pointed model.
inline std::optional<std::pair<KripkeModel, int>> k_satisfy(const std::vector<Formula>& pos,
                                                            const std::vector<Formula>& negs) {
  detail::Nnf nnf;
  std::vector<int> label;
  std::set<std::string> alpha;
  for (const auto& f : pos) {
    label.push_back(nnf.from(f, true));
    collect_props(f, alpha);
  }
  for (const auto& f : negs) {
    label.push_back(nnf.from(f, false));
    collect_props(f, alpha);
  }
  detail::Tableau tab(nnf);
  auto w = tab.solve(label);
  if (!w) return std::nullopt;
  KripkeModel m = detail::to_model(*w, {alpha.begin(), alpha.end()});
  for (const auto& f : pos)
    if (!eval_world(m, 0, f)) throw std::logic_error("tableau countermodel fails to verify");
  for (const auto& f : negs)
    if (eval_world(m, 0, f)) throw std::logic_error("tableau countermodel fails to verify");
  return std::make_pair(std::move(m), 0);
}

inline KVerdict k_valid(const Formula& a, Fragment frag) {
  detail::require_classical(a, frag);
  KVerdict v;
  if (auto c = k_satisfy({}, {a})) {
    v.valid = false;
    v.counter = std::move(c);
  }
  return v;
}

// Valid iff a -> b is K-valid; the counter satisfies a and falsifies b.
inline KVerdict k_entails(const Formula& a, const Formula& b, Fragment frag) {
  detail::require_classical(a, frag);
  detail::require_classical(b, frag);
  KVerdict v;
  if (auto c = k_satisfy({a}, {b})) {
    v.valid = false;
    v.counter = std::move(c);
  }
  return v;
}

// Classical formula in negation normal form (tensor as the disjunction).
inline Formula nnf(const Formula& a) {
  detail::Nnf n;
  return n.to_formula(n.from(a, true));
}

}  // namespace mdl
