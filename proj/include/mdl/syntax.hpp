#pragma once

#include <algorithm>
#include <cctype>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "mdl/errors.hpp"

namespace mdl {

enum class Op : std::uint8_t { Prop, Bot, Dep, Neg, And, Tensor, Or, Implies, Box, Diamond };

enum class Fragment : std::uint8_t { MD, MDplus, MDor, MID, MT0, K, KArrow };

using Path = std::vector<int>;

class Formula {
 public:
  Formula() : Formula(bot()) {}

  static Formula prop(std::string name) { return Formula(Op::Prop, std::move(name), {}); }
  static Formula bot() {
    static const Formula b(Op::Bot, "", {});
    return b;
  }
  static Formula dep(std::vector<Formula> args, Formula target) {
    args.push_back(std::move(target));
    return Formula(Op::Dep, "", std::move(args));
  }
  static Formula unary(Op op, Formula c) { return Formula(op, "", {std::move(c)}); }
  static Formula binary(Op op, Formula l, Formula r) {
    return Formula(op, "", {std::move(l), std::move(r)});
  }
  // Rebuild a node of the same shape over new children.
  Formula with_kids(std::vector<Formula> kids) const { return Formula(op(), name(), std::move(kids)); }

  Op op() const { return node_->op; }
  const std::string& name() const { return node_->name; }
  const std::vector<Formula>& kids() const { return node_->kids; }
  const Formula& child() const { return node_->kids[0]; }
  const Formula& lhs() const { return node_->kids[0]; }
  const Formula& rhs() const { return node_->kids[1]; }
  std::span<const Formula> dep_args() const {
    return std::span<const Formula>(node_->kids.data(), node_->kids.size() - 1);
  }
  const Formula& dep_target() const { return node_->kids.back(); }

  std::size_t hash() const { return node_->hash; }
  int depth() const { return node_->depth; }
  std::size_t size() const { return node_->size; }
  const void* id() const { return node_.get(); }

  bool is_binary() const {
    Op o = op();
    return o == Op::And || o == Op::Tensor || o == Op::Or || o == Op::Implies;
  }
  bool is_unary() const { return op() == Op::Neg || op() == Op::Box || op() == Op::Diamond; }

  friend bool operator==(const Formula& a, const Formula& b) {
    if (a.node_ == b.node_) return true;
    if (a.hash() != b.hash() || a.op() != b.op() || a.name() != b.name()) return false;
    return a.kids() == b.kids();
  }
  friend bool operator<(const Formula& a, const Formula& b);

 private:
  struct Node {
    Op op;
    std::string name;
    std::vector<Formula> kids;
    std::size_t hash = 0;
    int depth = 1;
    std::size_t size = 1;
  };

  Formula(Op op, std::string name, std::vector<Formula> kids) {
    auto n = std::make_shared<Node>();
    n->op = op;
    n->name = std::move(name);
    n->kids = std::move(kids);
    std::size_t h = std::hash<std::string>()(n->name) * 31 + static_cast<std::size_t>(op) + 0x9e37;
    for (const auto& k : n->kids) {
      h = h * 1000003 ^ k.hash();
      n->depth = std::max(n->depth, k.depth() + 1);
      n->size += k.size();
    }
    n->hash = h;
    node_ = std::move(n);
  }

  std::shared_ptr<const Node> node_;
};

struct FormulaHash {
  std::size_t operator()(const Formula& f) const { return f.hash(); }
};

// Total order, structural. Used for sets of formulas.
inline bool operator<(const Formula& a, const Formula& b) {
  if (a.node_ == b.node_) return false;
  if (a.op() != b.op()) return a.op() < b.op();
  if (a.name() != b.name()) return a.name() < b.name();
  if (a.kids().size() != b.kids().size()) return a.kids().size() < b.kids().size();
  for (std::size_t i = 0; i < a.kids().size(); ++i) {
    if (a.kids()[i] == b.kids()[i]) continue;
    return a.kids()[i] < b.kids()[i];
  }
  return false;
}

inline Formula prop(std::string n) { return Formula::prop(std::move(n)); }
inline Formula bot() { return Formula::bot(); }
inline Formula neg(Formula a) { return Formula::unary(Op::Neg, std::move(a)); }
inline Formula box(Formula a) { return Formula::unary(Op::Box, std::move(a)); }
inline Formula dia(Formula a) { return Formula::unary(Op::Diamond, std::move(a)); }
inline Formula conj(Formula a, Formula b) { return Formula::binary(Op::And, std::move(a), std::move(b)); }
inline Formula tensor(Formula a, Formula b) { return Formula::binary(Op::Tensor, std::move(a), std::move(b)); }
inline Formula disj(Formula a, Formula b) { return Formula::binary(Op::Or, std::move(a), std::move(b)); }
inline Formula imp(Formula a, Formula b) { return Formula::binary(Op::Implies, std::move(a), std::move(b)); }
inline Formula dep(std::vector<Formula> args, Formula t) { return Formula::dep(std::move(args), std::move(t)); }
// ~bot, used wherever a trivially true classical formula is needed.
inline Formula top() { return neg(bot()); }

// Left-associated fold; xs must be nonempty.
inline Formula fold(Op op, const std::vector<Formula>& xs) {
  Formula acc = xs.at(0);
  for (std::size_t i = 1; i < xs.size(); ++i) acc = Formula::binary(op, acc, xs[i]);
  return acc;
}

// ---------------------------------------------------------------- fragments

inline const char* fragment_name(Fragment f) {
  switch (f) {
    case Fragment::MD: return "MD";
    case Fragment::MDplus: return "MDplus";
    case Fragment::MDor: return "MDor";
    case Fragment::MID: return "MID";
    case Fragment::MT0: return "MT0";
    case Fragment::K: return "K";
    case Fragment::KArrow: return "KArrow";
  }
  return "?";
}

// Accepts md, mdplus, md+, mdor, mid, mt0, k, karrow in any case.
inline Fragment fragment_from_string(std::string s) {
  for (auto& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  if (s == "md") return Fragment::MD;
  if (s == "mdplus" || s == "md+") return Fragment::MDplus;
  if (s == "mdor" || s == "mdv") return Fragment::MDor;
  if (s == "mid") return Fragment::MID;
  if (s == "mt0") return Fragment::MT0;
  if (s == "k") return Fragment::K;
  if (s == "karrow") return Fragment::KArrow;
  throw InputError("unknown fragment '" + s + "'");
}

namespace detail {

enum class Grammar { K, KArrow, KFull };

inline Grammar classical_grammar(Fragment frag) {
  switch (frag) {
    case Fragment::MID:
    case Fragment::KArrow: return Grammar::KArrow;
    case Fragment::MT0: return Grammar::KFull;
    default: return Grammar::K;
  }
}

inline bool in_grammar(const Formula& f, Grammar g) {
  switch (f.op()) {
    case Op::Prop:
    case Op::Bot: return true;
    case Op::Neg:
    case Op::Box:
    case Op::Diamond: return in_grammar(f.child(), g);
    case Op::And: return in_grammar(f.lhs(), g) && in_grammar(f.rhs(), g);
    case Op::Tensor:
      return g != Grammar::KArrow && in_grammar(f.lhs(), g) && in_grammar(f.rhs(), g);
    case Op::Implies:
      return g != Grammar::K && in_grammar(f.lhs(), g) && in_grammar(f.rhs(), g);
    case Op::Or:
    case Op::Dep: return false;
  }
  return false;
}

}  // namespace detail

// MT0 uses K extended with ->, the union of the other classical grammars.
inline bool is_classical(const Formula& f, Fragment frag) {
  return detail::in_grammar(f, detail::classical_grammar(frag));
}

inline std::string path_string(const Path& p) {
  if (p.empty()) return "root";
  std::string s;
  for (int i : p) s += "/" + std::to_string(i);
  return s;
}

struct Violation {
  Path path;
  std::string message;
};

namespace detail {

inline void check_rec(const Formula& f, Fragment frag, Path& path, std::vector<Violation>& out) {
  auto bad = [&](std::string msg) { out.push_back({path, std::move(msg)}); };
  auto recurse = [&](int i) {
    path.push_back(i);
    check_rec(f.kids()[i], frag, path, out);
    path.pop_back();
  };
  const Grammar g = classical_grammar(frag);
  const bool classical_only = frag == Fragment::K || frag == Fragment::KArrow;
  const bool md_family = frag == Fragment::MD || frag == Fragment::MDplus || frag == Fragment::MDor;
  switch (f.op()) {
    case Op::Prop:
    case Op::Bot: return;
    case Op::Dep: {
      if (classical_only) {
        bad("dependence atom in a classical fragment");
        return;
      }
      for (std::size_t i = 0; i < f.kids().size(); ++i) {
        const Formula& a = f.kids()[i];
        if (frag == Fragment::MD) {
          if (a.op() != Op::Prop) bad("non-propositional dep argument " + std::to_string(i));
        } else if (!in_grammar(a, g)) {
          bad("non-classical dep argument " + std::to_string(i));
        }
      }
      return;
    }
    case Op::Neg:
      if ((md_family || classical_only) && !in_grammar(f.child(), g)) {
        bad("negation of a non-classical formula");
        return;
      }
      recurse(0);
      return;
    case Op::Box:
    case Op::Diamond: recurse(0); return;
    case Op::And: break;
    case Op::Tensor:
      if (g == Grammar::KArrow) {
        bad(std::string("tensor not in ") + fragment_name(frag));
        return;
      }
      break;
    case Op::Or:
      if (frag != Fragment::MDor && frag != Fragment::MID && frag != Fragment::MT0) {
        bad(std::string("intuitionistic disjunction not in ") + fragment_name(frag));
        return;
      }
      break;
    case Op::Implies:
      if (md_family || frag == Fragment::K) {
        bad(std::string("implication not in ") + fragment_name(frag));
        return;
      }
      break;
  }
  recurse(0);
  recurse(1);
}

}  // namespace detail

inline std::vector<Violation> fragment_check(const Formula& f, Fragment frag) {
  std::vector<Violation> out;
  Path p;
  detail::check_rec(f, frag, p, out);
  return out;
}

inline bool well_formed(const Formula& f, Fragment frag) { return fragment_check(f, frag).empty(); }

// Throws FragmentError describing the first violation.
inline void require_fragment(const Formula& f, Fragment frag) {
  auto v = fragment_check(f, frag);
  if (!v.empty())
    throw FragmentError(std::string("not in ") + fragment_name(frag) + ": " + v[0].message + " at " +
                        path_string(v[0].path));
}

// ----------------------------------------------------------------- printing

namespace detail {

inline int prec(const Formula& f) {
  switch (f.op()) {
    case Op::Implies: return 1;
    case Op::Or: return 2;
    case Op::Tensor: return 3;
    case Op::And: return 4;
    case Op::Neg:
    case Op::Box:
    case Op::Diamond: return 5;
    default: return 6;
  }
}

inline const char* op_token(Op op) {
  switch (op) {
    case Op::And: return " & ";
    case Op::Tensor: return " | ";
    case Op::Or: return " \\/ ";
    case Op::Implies: return " -> ";
    case Op::Neg: return "~";
    case Op::Box: return "[]";
    case Op::Diamond: return "<>";
    default: return "";
  }
}

inline void print_rec(const Formula& f, std::string& out, int min_prec) {
  const int p = prec(f);
  const bool paren = p < min_prec;
  if (paren) out += '(';
  switch (f.op()) {
    case Op::Prop: out += f.name(); break;
    case Op::Bot: out += "bot"; break;
    case Op::Dep:
      out += "=(";
      for (std::size_t i = 0; i < f.kids().size(); ++i) {
        if (i) out += ',';
        print_rec(f.kids()[i], out, 0);
      }
      out += ')';
      break;
    case Op::Neg:
    case Op::Box:
    case Op::Diamond:
      out += op_token(f.op());
      print_rec(f.child(), out, 5);
      break;
    case Op::Implies:
      print_rec(f.lhs(), out, 2);
      out += op_token(f.op());
      print_rec(f.rhs(), out, 1);
      break;
    default:
      print_rec(f.lhs(), out, p);
      out += op_token(f.op());
      print_rec(f.rhs(), out, p + 1);
      break;
  }
  if (paren) out += ')';
}

}  // namespace detail

inline std::string print(const Formula& f) {
  std::string s;
  detail::print_rec(f, s, 0);
  return s;
}

// ------------------------------------------------------------------ parsing

namespace detail {

class Parser {
 public:
  explicit Parser(std::string_view s) : s_(s) {}

  Formula parse_all() {
    Formula f = implication();
    skip();
    if (pos_ != s_.size()) fail({"end of input", "->", "\\/", "|", "&"});
    return f;
  }

 private:
  std::string_view s_;
  std::size_t pos_ = 0;

  [[noreturn]] void fail(std::vector<std::string> expected) {
    std::string msg = "parse error at offset " + std::to_string(pos_) + ": expected ";
    for (std::size_t i = 0; i < expected.size(); ++i) {
      if (i) msg += i + 1 == expected.size() ? " or " : ", ";
      msg += expected[i];
    }
    throw ParseError(pos_, std::move(expected), msg);
  }

  void skip() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }

  bool eat(std::string_view tok) {
    skip();
    if (s_.substr(pos_, tok.size()) == tok) {
      pos_ += tok.size();
      return true;
    }
    return false;
  }

  Formula implication() {
    Formula l = disjunction();
    if (eat("->")) return imp(l, implication());
    return l;
  }

  Formula disjunction() {
    Formula l = tensor_level();
    while (eat("\\/")) l = disj(l, tensor_level());
    return l;
  }

  Formula tensor_level() {
    Formula l = conjunction();
    while (eat("|")) l = tensor(l, conjunction());
    return l;
  }

  Formula conjunction() {
    Formula l = unary_level();
    while (eat("&")) l = conj(l, unary_level());
    return l;
  }

  Formula unary_level() {
    if (eat("~")) return neg(unary_level());
    if (eat("[]")) return box(unary_level());
    if (eat("<>")) return dia(unary_level());
    return atom();
  }

  Formula atom() {
    skip();
    static const std::vector<std::string> kStart = {"proposition", "bot", "=(", "(", "~", "[]", "<>"};
    if (pos_ >= s_.size()) fail(kStart);
    if (eat("=(")) {
      std::vector<Formula> args;
      args.push_back(implication());
      while (eat(",")) args.push_back(implication());
      if (!eat(")")) fail({",", ")"});
      Formula t = args.back();
      args.pop_back();
      return dep(std::move(args), t);
    }
    if (eat("(")) {
      Formula f = implication();
      if (!eat(")")) fail({")"});
      return f;
    }
    char c = s_[pos_];
    if (c >= 'a' && c <= 'z') {
      std::size_t start = pos_;
      while (pos_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_')) ++pos_;
      std::string id(s_.substr(start, pos_ - start));
      if (id == "bot") return bot();
      return prop(id);
    }
    fail(kStart);
  }
};

}  // namespace detail

inline Formula parse(std::string_view text) { return detail::Parser(text).parse_all(); }

// ---------------------------------------------------------------- utilities

inline void collect_props(const Formula& f, std::set<std::string>& out) {
  if (f.op() == Op::Prop) out.insert(f.name());
  for (const auto& k : f.kids()) collect_props(k, out);
}

inline std::vector<std::string> props_of(std::initializer_list<Formula> fs) {
  std::set<std::string> s;
  for (const auto& f : fs) collect_props(f, s);
  return {s.begin(), s.end()};
}

inline int modal_depth(const Formula& f) {
  int d = 0;
  for (const auto& k : f.kids()) d = std::max(d, modal_depth(k));
  return d + (f.op() == Op::Box || f.op() == Op::Diamond ? 1 : 0);
}

inline const Formula& at_path(const Formula& f, const Path& p) {
  const Formula* cur = &f;
  for (int i : p) cur = &cur->kids().at(static_cast<std::size_t>(i));
  return *cur;
}

inline Formula replace_at(const Formula& f, const Path& p, std::size_t depth, const Formula& by) {
  if (depth == p.size()) return by;
  auto kids = f.kids();
  auto& k = kids.at(static_cast<std::size_t>(p[depth]));
  k = replace_at(k, p, depth + 1, by);
  return f.with_kids(std::move(kids));
}

// Dependence atom occurrences in pre-order (left to right).
inline void dep_paths_rec(const Formula& f, Path& cur, std::vector<Path>& out) {
  if (f.op() == Op::Dep) {
    out.push_back(cur);
    return;
  }
  for (std::size_t i = 0; i < f.kids().size(); ++i) {
    cur.push_back(static_cast<int>(i));
    dep_paths_rec(f.kids()[i], cur, out);
    cur.pop_back();
  }
}

inline std::vector<Path> dep_paths(const Formula& f) {
  std::vector<Path> out;
  Path cur;
  dep_paths_rec(f, cur, out);
  return out;
}

// Replace every ~a by a -> bot.
inline Formula desugar_neg(const Formula& f) {
  if (f.op() == Op::Neg) return imp(desugar_neg(f.child()), bot());
  if (f.kids().empty()) return f;
  std::vector<Formula> kids;
  kids.reserve(f.kids().size());
  bool same = true;
  for (const auto& k : f.kids()) {
    kids.push_back(desugar_neg(k));
    same = same && kids.back().id() == k.id();
  }
  return same ? f : f.with_kids(std::move(kids));
}

// Simultaneous substitution of propositions.
inline Formula substitute(const Formula& f, const std::map<std::string, Formula>& s) {
  if (f.op() == Op::Prop) {
    auto it = s.find(f.name());
    return it == s.end() ? f : it->second;
  }
  if (f.kids().empty()) return f;
  std::vector<Formula> kids;
  for (const auto& k : f.kids()) kids.push_back(substitute(k, s));
  return f.with_kids(std::move(kids));
}

}  // namespace mdl
