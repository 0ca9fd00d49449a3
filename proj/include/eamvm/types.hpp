// SPDX-License-Identifier: MIT
//
// Simple types (int and right-associative arrows), their surface syntax,
// and a small first-order unification engine over {int, ->} used by the
// PCF, EPCF and machine type checkers.

#pragma once

#include <cassert>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace eamvm {

// ---------------------------------------------------------------------------
// SimpleType: ground types.
// ---------------------------------------------------------------------------

struct SimpleType;
using TypePtr = std::shared_ptr<const SimpleType>;

struct SimpleType {
  // is_int == true  -> the ground type int (dom/cod are null).
  // is_int == false -> arrow dom -> cod.
  bool is_int;
  TypePtr dom;
  TypePtr cod;
};

inline TypePtr type_int() {
  static const TypePtr t = std::make_shared<SimpleType>(SimpleType{true, nullptr, nullptr});
  return t;
}

inline TypePtr type_arrow(TypePtr dom, TypePtr cod) {
  return std::make_shared<SimpleType>(SimpleType{false, std::move(dom), std::move(cod)});
}

inline bool type_eq(const TypePtr& a, const TypePtr& b) {
  if (a.get() == b.get()) return true;
  if (a->is_int != b->is_int) return false;
  if (a->is_int) return true;
  return type_eq(a->dom, b->dom) && type_eq(a->cod, b->cod);
}

// Builds b1 -> b2 -> ... -> bn -> result.
inline TypePtr type_spine(const std::vector<TypePtr>& domains, TypePtr result) {
  TypePtr t = std::move(result);
  for (auto it = domains.rbegin(); it != domains.rend(); ++it) t = type_arrow(*it, t);
  return t;
}

// Splits a type into its domain spine and final codomain.
inline std::vector<TypePtr> type_domains(TypePtr t, TypePtr* result = nullptr) {
  std::vector<TypePtr> doms;
  while (!t->is_int) {
    doms.push_back(t->dom);
    t = t->cod;
  }
  if (result) *result = t;
  return doms;
}

// Surface syntax: `int`, `a -> b` (right associative), parentheses.
inline std::string print_type(const TypePtr& t) {
  if (t->is_int) return "int";
  std::string lhs = t->dom->is_int ? "int" : "(" + print_type(t->dom) + ")";
  return lhs + " -> " + print_type(t->cod);
}

namespace detail {

struct TypeParser {
  const std::string& src;
  size_t pos = 0;

  explicit TypeParser(const std::string& s) : src(s) {}

  void skip_ws() {
    while (pos < src.size() && (src[pos] == ' ' || src[pos] == '\t' || src[pos] == '\n' ||
                                src[pos] == '\r'))
      ++pos;
  }

  [[noreturn]] void fail(const std::string& what) {
    throw std::runtime_error("type syntax error at offset " + std::to_string(pos) + ": " + what);
  }

  TypePtr parse_atom() {
    skip_ws();
    if (pos < src.size() && src[pos] == '(') {
      ++pos;
      TypePtr t = parse_type();
      skip_ws();
      if (pos >= src.size() || src[pos] != ')') fail("expected ')'");
      ++pos;
      return t;
    }
    if (src.compare(pos, 3, "int") == 0) {
      pos += 3;
      return type_int();
    }
    fail("expected 'int' or '('");
  }

  TypePtr parse_type() {
    TypePtr lhs = parse_atom();
    skip_ws();
    if (pos + 1 < src.size() && src[pos] == '-' && src[pos + 1] == '>') {
      pos += 2;
      return type_arrow(lhs, parse_type());
    }
    return lhs;
  }
};

}  // namespace detail

inline TypePtr parse_type(const std::string& text) {
  detail::TypeParser p(text);
  TypePtr t = p.parse_type();
  p.skip_ws();
  if (p.pos != text.size()) p.fail("trailing input");
  return t;
}

// ---------------------------------------------------------------------------
// Type terms with unification variables, solved by a union-find style
// substitution map. Used internally by the inference algorithms; results are
// grounded to SimpleType at the end (unconstrained variables default to int).
// ---------------------------------------------------------------------------

struct TypeTerm;
using TT = std::shared_ptr<const TypeTerm>;

struct TypeTerm {
  enum Kind { Int, Arrow, Var } kind;
  int var_id = -1;  // Var
  TT dom, cod;      // Arrow
};

class TypeUnifier {
 public:
  TT fresh() {
    auto t = std::make_shared<TypeTerm>();
    t->kind = TypeTerm::Var;
    t->var_id = next_var_++;
    return t;
  }

  static TT tt_int() {
    static const TT t = [] {
      auto n = std::make_shared<TypeTerm>();
      n->kind = TypeTerm::Int;
      return TT(n);
    }();
    return t;
  }

  static TT tt_arrow(TT dom, TT cod) {
    auto t = std::make_shared<TypeTerm>();
    t->kind = TypeTerm::Arrow;
    t->dom = std::move(dom);
    t->cod = std::move(cod);
    return t;
  }

  static TT lift(const TypePtr& t) {
    if (t->is_int) return tt_int();
    return tt_arrow(lift(t->dom), lift(t->cod));
  }

  // Follows the substitution one level.
  TT shallow(TT t) const {
    while (t->kind == TypeTerm::Var) {
      auto it = subst_.find(t->var_id);
      if (it == subst_.end()) break;
      t = it->second;
    }
    return t;
  }

  bool occurs(int var, const TT& t) const {
    TT r = shallow(t);
    switch (r->kind) {
      case TypeTerm::Int: return false;
      case TypeTerm::Var: return r->var_id == var;
      case TypeTerm::Arrow: return occurs(var, r->dom) || occurs(var, r->cod);
    }
    return false;
  }

  // Returns false on clash or occurs-check failure.
  bool unify(const TT& a, const TT& b) {
    TT x = shallow(a), y = shallow(b);
    if (x->kind == TypeTerm::Var && y->kind == TypeTerm::Var && x->var_id == y->var_id) return true;
    if (x->kind == TypeTerm::Var) {
      if (occurs(x->var_id, y)) return false;
      subst_[x->var_id] = y;
      return true;
    }
    if (y->kind == TypeTerm::Var) return unify(y, x);
    if (x->kind != y->kind) return false;
    if (x->kind == TypeTerm::Int) return true;
    return unify(x->dom, y->dom) && unify(x->cod, y->cod);
  }

  // Grounds a type term; unbound variables become int.
  TypePtr ground(const TT& t) const {
    TT r = shallow(t);
    switch (r->kind) {
      case TypeTerm::Int: return type_int();
      case TypeTerm::Var: return type_int();
      case TypeTerm::Arrow: return type_arrow(ground(r->dom), ground(r->cod));
    }
    return type_int();
  }

 private:
  int next_var_ = 0;
  std::map<int, TT> subst_;
};

}  // namespace eamvm
