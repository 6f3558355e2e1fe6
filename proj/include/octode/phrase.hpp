#pragma once

#include <memory>
#include <vector>

#include "algebra.hpp"
#include "linop.hpp"

namespace octode {

struct Node;
using NodePtr = std::shared_ptr<const Node>;

/// Leaf or binary product. The tree shape is the bracketing of the word.
struct Node {
  enum class Kind { Const, Var, ConjVar, Slot, Mul };
  Kind kind = Kind::Const;
  CdNum value;             // Const
  int slot = 0;            // Slot
  bool slot_conj = false;  // Slot
  NodePtr left, right;     // Mul
};

namespace node {

inline NodePtr constant(const CdNum& c) {
  auto n = std::make_shared<Node>();
  n->kind = Node::Kind::Const;
  n->value = c;
  return n;
}
inline NodePtr var() {
  static const NodePtr v = [] {
    auto n = std::make_shared<Node>();
    n->kind = Node::Kind::Var;
    return NodePtr(n);
  }();
  return v;
}
inline NodePtr conj_var() {
  static const NodePtr v = [] {
    auto n = std::make_shared<Node>();
    n->kind = Node::Kind::ConjVar;
    return NodePtr(n);
  }();
  return v;
}
inline NodePtr slot(int index, bool conj) {
  auto n = std::make_shared<Node>();
  n->kind = Node::Kind::Slot;
  n->slot = index;
  n->slot_conj = conj;
  return n;
}
/// Adjacent constants fold into one.
inline NodePtr mul(NodePtr l, NodePtr r) {
  if (l->kind == Node::Kind::Const && r->kind == Node::Kind::Const) return constant(l->value * r->value);
  auto n = std::make_shared<Node>();
  n->kind = Node::Kind::Mul;
  n->left = std::move(l);
  n->right = std::move(r);
  return n;
}
inline NodePtr power(int n) {
  NodePtr t = var();
  for (int i = 1; i < n; ++i) t = mul(t, var());
  return t;
}

inline bool equal(const NodePtr& a, const NodePtr& b) {
  if (a->kind != b->kind) return false;
  switch (a->kind) {
    case Node::Kind::Const: {
      const int r = common_level(a->value, b->value);
      return a->value.promoted(r) == b->value.promoted(r);
    }
    case Node::Kind::Var:
    case Node::Kind::ConjVar: return true;
    case Node::Kind::Slot: return a->slot == b->slot && a->slot_conj == b->slot_conj;
    case Node::Kind::Mul: return equal(a->left, b->left) && equal(a->right, b->right);
  }
  return false;
}

template <class Pred>
int count_if(const NodePtr& t, Pred&& p) {
  if (t->kind == Node::Kind::Mul) return count_if(t->left, p) + count_if(t->right, p);
  return p(*t) ? 1 : 0;
}

inline int max_level(const NodePtr& t) {
  if (t->kind == Node::Kind::Mul) return std::max(max_level(t->left), max_level(t->right));
  return t->kind == Node::Kind::Const ? t->value.level() : 0;
}

inline int max_slot(const NodePtr& t) {
  if (t->kind == Node::Kind::Mul) return std::max(max_slot(t->left), max_slot(t->right));
  return t->kind == Node::Kind::Slot ? t->slot : -1;
}

inline NodePtr conj(const NodePtr& t) {
  switch (t->kind) {
    case Node::Kind::Const: return constant(cd_conj(t->value));
    case Node::Kind::Var: return conj_var();
    case Node::Kind::ConjVar: return var();
    case Node::Kind::Slot: return slot(t->slot, !t->slot_conj);
    case Node::Kind::Mul: return mul(conj(t->right), conj(t->left));
  }
  return t;
}

// Pulls real constants into scale; returns nullptr when the tree vanishes into the scale.
inline NodePtr absorb_real(const NodePtr& t, double& scale) {
  switch (t->kind) {
    case Node::Kind::Const:
      if (t->value.im().norm() == 0.0) {
        scale *= t->value.re();
        return nullptr;
      }
      return t;
    case Node::Kind::Mul: {
      NodePtr l = absorb_real(t->left, scale);
      NodePtr r = absorb_real(t->right, scale);
      if (!l) return r;
      if (!r) return l;
      return mul(l, r);
    }
    default: return t;
  }
}

struct EvalArgs {
  CdNum z, zc;
  const std::vector<CdNum>* slots = nullptr;
};

inline CdNum eval(const NodePtr& t, const EvalArgs& a) {
  switch (t->kind) {
    case Node::Kind::Const: return t->value;
    case Node::Kind::Var: return a.z;
    case Node::Kind::ConjVar: return a.zc;
    case Node::Kind::Slot: {
      if (!a.slots || t->slot >= static_cast<int>(a.slots->size()))
        throw Error(ErrorCode::InvalidArgument, "missing operator argument");
      const CdNum& h = (*a.slots)[t->slot];
      return t->slot_conj ? cd_conj(h) : h;
    }
    case Node::Kind::Mul: return eval(t->left, a) * eval(t->right, a);
  }
  return {};
}

// Every copy of t with exactly one leaf satisfying pred replaced by repl.
template <class Pred>
void replace_each(const NodePtr& t, Pred&& pred, const NodePtr& repl, std::vector<NodePtr>& out) {
  if (t->kind == Node::Kind::Mul) {
    std::vector<NodePtr> sub;
    replace_each(t->left, pred, repl, sub);
    for (auto& s : sub) out.push_back(mul(s, t->right));
    sub.clear();
    replace_each(t->right, pred, repl, sub);
    for (auto& s : sub) out.push_back(mul(t->left, s));
    return;
  }
  if (pred(*t)) out.push_back(repl);
}

}  // namespace node

struct Monomial {
  double scale = 1.0;
  NodePtr tree;
};

/// Finite sum of bracketed words in z, conj(z), constants and operator slots.
class Phrase {
 public:
  Phrase() = default;

  static Phrase zero() { return {}; }
  static Phrase var() { return from_tree(node::var()); }
  static Phrase conj_var() { return from_tree(node::conj_var()); }
  static Phrase constant(const CdNum& c) { return from_tree(node::constant(c)); }
  static Phrase real(double c) { return constant(CdNum(0, c)); }
  static Phrase from_tree(NodePtr t, double scale = 1.0) {
    Phrase p;
    p.add_term(scale, std::move(t));
    return p;
  }

  /// Appends a term after absorbing real constants; zero terms are dropped.
  void add_term(double scale, NodePtr t) {
    NodePtr n = node::absorb_real(t, scale);
    if (scale == 0.0) return;
    if (!n) n = node::constant(CdNum(0, 1.0));
    if (n->kind == Node::Kind::Const && n->value.norm() == 0.0) return;
    terms_.push_back({scale, std::move(n)});
  }

  const std::vector<Monomial>& terms() const { return terms_; }
  bool empty() const { return terms_.empty(); }

  int level() const {
    int r = 0;
    for (const auto& m : terms_) r = std::max(r, node::max_level(m.tree));
    return r;
  }
  int arity() const {
    int s = -1;
    for (const auto& m : terms_) s = std::max(s, node::max_slot(m.tree));
    return s + 1;
  }
  bool has_conj_var() const {
    for (const auto& m : terms_)
      if (node::count_if(m.tree, [](const Node& n) { return n.kind == Node::Kind::ConjVar; })) return true;
    return false;
  }

  CdNum eval(const CdNum& z, const std::vector<CdNum>* slots = nullptr) const {
    const int r = std::max(z.level(), level());
    node::EvalArgs a{z.promoted(r), cd_conj(z.promoted(r)), slots};
    CdNum sum(r);
    for (const auto& m : terms_) sum += node::eval(m.tree, a) * m.scale;
    return sum.promoted(std::max(sum.level(), r));
  }
  CdNum operator()(const CdNum& z) const { return eval(z); }

  Phrase& operator+=(const Phrase& o) {
    for (const auto& m : o.terms_) terms_.push_back(m);
    return *this;
  }
  Phrase& operator-=(const Phrase& o) {
    for (const auto& m : o.terms_) terms_.push_back({-m.scale, m.tree});
    return *this;
  }
  Phrase& operator*=(double s) {
    if (s == 0.0) {
      terms_.clear();
      return *this;
    }
    for (auto& m : terms_) m.scale *= s;
    return *this;
  }

  /// Distributes; each product keeps the bracketing (left)(right).
  friend Phrase operator*(const Phrase& a, const Phrase& b) {
    Phrase p;
    for (const auto& x : a.terms_)
      for (const auto& y : b.terms_) p.add_term(x.scale * y.scale, node::mul(x.tree, y.tree));
    return p;
  }

  Phrase pow(int n) const {
    if (n < 0) throw Error(ErrorCode::InvalidArgument, "negative phrase power");
    if (n == 0) return real(1.0);
    Phrase p = *this;
    for (int i = 1; i < n; ++i) p = p * *this;
    return p;
  }

  Phrase conj() const {
    Phrase p;
    for (const auto& m : terms_) p.add_term(m.scale, node::conj(m.tree));
    return p;
  }

  bool structurally_equal(const Phrase& o) const {
    if (terms_.size() != o.terms_.size()) return false;
    for (size_t i = 0; i < terms_.size(); ++i)
      if (terms_[i].scale != o.terms_[i].scale || !node::equal(terms_[i].tree, o.terms_[i].tree)) return false;
    return true;
  }

 private:
  std::vector<Monomial> terms_;
};

inline Phrase operator+(Phrase a, const Phrase& b) { return a += b; }
inline Phrase operator-(Phrase a, const Phrase& b) { return a -= b; }
inline Phrase operator*(Phrase a, double s) { return a *= s; }
inline Phrase operator*(double s, Phrase a) { return a *= s; }

inline CdNum eval_phrase(const Phrase& p, const CdNum& z) { return p.eval(z); }

/// Phrase with operator slots 0..arity-1, linear in each slot.
struct OperatorPhrase {
  Phrase body;
  int arity = 1;

  CdNum eval(const CdNum& z, const std::vector<CdNum>& h) const { return body.eval(z, &h); }
  CdNum operator()(const CdNum& z, const CdNum& h) const { return eval(z, {h}); }

  /// Matrix of h -> op(z, h) at fixed z (arity 1).
  LinOpR flatten(const CdNum& z) const {
    const int r = std::max(z.level(), body.level());
    return LinOpR::from_columns(r, [&](const CdNum& h) { return eval(z, {h}); });
  }

  friend OperatorPhrase operator+(OperatorPhrase a, const OperatorPhrase& b) {
    a.body += b.body;
    a.arity = std::max(a.arity, b.arity);
    return a;
  }
};

enum class Wrt { Z, ZConj };

namespace detail {
inline Phrase diff_body(const Phrase& p, Wrt wrt, int slot) {
  Phrase out;
  const auto kind = wrt == Wrt::Z ? Node::Kind::Var : Node::Kind::ConjVar;
  const NodePtr repl = node::slot(slot, wrt == Wrt::ZConj);
  for (const auto& m : p.terms()) {
    std::vector<NodePtr> variants;
    node::replace_each(m.tree, [&](const Node& n) { return n.kind == kind; }, repl, variants);
    for (auto& v : variants) out.add_term(m.scale, v);
  }
  return out;
}
}  // namespace detail

/// Leibniz expansion; the new slot takes the next free index.
inline OperatorPhrase diff_phrase(const Phrase& p, Wrt wrt) {
  const int slot = p.arity();
  return {detail::diff_body(p, wrt, slot), slot + 1};
}
inline OperatorPhrase diff_phrase(const OperatorPhrase& p, Wrt wrt) {
  return {detail::diff_body(p.body, wrt, p.arity), p.arity + 1};
}

/// Full derivative: z-leaves take h, conj(z)-leaves take conj(h).
inline OperatorPhrase derivative(const Phrase& p) {
  const int slot = p.arity();
  return {detail::diff_body(p, Wrt::Z, slot) + detail::diff_body(p, Wrt::ZConj, slot), slot + 1};
}
inline OperatorPhrase derivative(const OperatorPhrase& p) {
  return {detail::diff_body(p.body, Wrt::Z, p.arity) + detail::diff_body(p.body, Wrt::ZConj, p.arity),
          p.arity + 1};
}

namespace detail {
inline std::vector<Monomial> expand_subst(const NodePtr& t, const Phrase& inner, const Phrase& inner_conj) {
  switch (t->kind) {
    case Node::Kind::Var: return inner.terms();
    case Node::Kind::ConjVar: return inner_conj.terms();
    case Node::Kind::Mul: {
      auto l = expand_subst(t->left, inner, inner_conj);
      auto r = expand_subst(t->right, inner, inner_conj);
      std::vector<Monomial> out;
      out.reserve(l.size() * r.size());
      for (const auto& a : l)
        for (const auto& b : r) out.push_back({a.scale * b.scale, node::mul(a.tree, b.tree)});
      return out;
    }
    default: return {{1.0, t}};
  }
}
}  // namespace detail

inline Phrase compose_phrase(const Phrase& outer, const Phrase& inner) {
  const Phrase ic = inner.conj();
  Phrase out;
  for (const auto& m : outer.terms())
    for (const auto& e : detail::expand_subst(m.tree, inner, ic)) out.add_term(m.scale * e.scale, e.tree);
  return out;
}

namespace detail {
// Smallest subtree holding every Var leaf.
inline const NodePtr* var_hull(const NodePtr& t) {
  auto has_var = [](const NodePtr& n) {
    return node::count_if(n, [](const Node& x) { return x.kind == Node::Kind::Var; }) > 0;
  };
  const NodePtr* cur = &t;
  while ((*cur)->kind == Node::Kind::Mul) {
    const bool l = has_var((*cur)->left), r = has_var((*cur)->right);
    if (l && r) return cur;
    cur = l ? &(*cur)->left : &(*cur)->right;
  }
  return cur;
}

inline NodePtr replace_subtree(const NodePtr& t, const NodePtr* target, const NodePtr& repl) {
  if (&t == target) return repl;
  if (t->kind != Node::Kind::Mul) return t;
  return node::mul(replace_subtree(t->left, target, repl), replace_subtree(t->right, target, repl));
}
}  // namespace detail

/// Left-algorithm primitive g with derivative(g).1 == p.
inline Phrase antiderivative_left(const Phrase& p) {
  Phrase out;
  for (const auto& m : p.terms()) {
    const auto bad = node::count_if(m.tree, [](const Node& n) {
      return n.kind == Node::Kind::ConjVar || n.kind == Node::Kind::Slot;
    });
    if (bad) throw Error(ErrorCode::NotLeftReducible, "term depends on conj(z) or carries a slot");
    const int n = node::count_if(m.tree, [](const Node& x) { return x.kind == Node::Kind::Var; });
    if (n == 0) {
      out.add_term(m.scale, node::mul(m.tree, node::var()));
      continue;
    }
    const NodePtr* hull = detail::var_hull(m.tree);
    const int leaves = node::count_if(*hull, [](const Node&) { return true; });
    if (leaves != n) throw Error(ErrorCode::NotLeftReducible, "powers of z are separated by constants");
    out.add_term(m.scale / (n + 1), detail::replace_subtree(m.tree, hull, node::power(n + 1)));
  }
  return out;
}

/// The term (a z^n) b of the left algorithm.
struct LeftTerm {
  CdNum a;
  int n = 0;
  CdNum b;
};

inline Phrase left_term_phrase(const LeftTerm& t) {
  if (t.n < 0) throw Error(ErrorCode::NotLeftReducible, "negative power is not a phrase");
  NodePtr tree = t.n == 0 ? node::constant(t.a) : node::mul(node::constant(t.a), node::power(t.n));
  return Phrase::from_tree(node::mul(tree, node::constant(t.b)));
}

inline Phrase antiderivative_left(const LeftTerm& t) {
  if (t.n == -1) throw Error(ErrorCode::NegativePowerOne, "z^-1 integrates to a logarithm");
  return antiderivative_left(left_term_phrase(t));
}

}  // namespace octode
