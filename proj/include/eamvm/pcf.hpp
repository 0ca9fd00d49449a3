// SPDX-License-Identifier: MIT
//
// PCF: abstract syntax (shared with EPCF, which adds the explicit
// substitution constructor), parser and printer, capture-free substitution,
// alpha-equivalence, type assignment, and the deterministic call-by-name
// weak-head small-step and big-step semantics.

#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "eamvm/types.hpp"

namespace eamvm {

// ---------------------------------------------------------------------------
// Terms. Sub(body, name, arg) is the EPCF-only explicit substitution
// body<name := arg>; plain PCF terms never contain it.
// ---------------------------------------------------------------------------

struct Term;
using TermPtr = std::shared_ptr<const Term>;

struct Term {
  enum Kind { Var, Lam, App, Fix, Zero, Pred, Succ, Ifz, Sub } kind;
  std::string name;  // Var, Lam, Sub
  TermPtr a, b, c;   // children: Lam body=a; App fn=a arg=b; Ifz a b c; Sub body=a arg=b
};

inline TermPtr mk_var(std::string x) {
  return std::make_shared<Term>(Term{Term::Var, std::move(x), nullptr, nullptr, nullptr});
}
inline TermPtr mk_lam(std::string x, TermPtr body) {
  return std::make_shared<Term>(Term{Term::Lam, std::move(x), std::move(body), nullptr, nullptr});
}
inline TermPtr mk_app(TermPtr f, TermPtr arg) {
  return std::make_shared<Term>(Term{Term::App, {}, std::move(f), std::move(arg), nullptr});
}
inline TermPtr mk_fix(TermPtr t) {
  return std::make_shared<Term>(Term{Term::Fix, {}, std::move(t), nullptr, nullptr});
}
inline TermPtr mk_zero() {
  static const TermPtr z = std::make_shared<Term>(Term{Term::Zero, {}, nullptr, nullptr, nullptr});
  return z;
}
inline TermPtr mk_pred(TermPtr t) {
  return std::make_shared<Term>(Term{Term::Pred, {}, std::move(t), nullptr, nullptr});
}
inline TermPtr mk_succ(TermPtr t) {
  return std::make_shared<Term>(Term{Term::Succ, {}, std::move(t), nullptr, nullptr});
}
inline TermPtr mk_ifz(TermPtr l, TermPtr m, TermPtr n) {
  return std::make_shared<Term>(Term{Term::Ifz, {}, std::move(l), std::move(m), std::move(n)});
}
inline TermPtr mk_sub(TermPtr body, std::string x, TermPtr arg) {
  return std::make_shared<Term>(Term{Term::Sub, std::move(x), std::move(body), std::move(arg), nullptr});
}

// n-bar = succ^n(0).
inline TermPtr mk_numeral(uint64_t n) {
  TermPtr t = mk_zero();
  for (uint64_t i = 0; i < n; ++i) t = mk_succ(t);
  return t;
}

inline std::optional<uint64_t> as_numeral(const TermPtr& t) {
  uint64_t n = 0;
  const Term* cur = t.get();
  while (cur->kind == Term::Succ) {
    ++n;
    cur = cur->a.get();
  }
  if (cur->kind == Term::Zero) return n;
  return std::nullopt;
}

inline bool is_pcf(const TermPtr& t) {
  if (!t) return true;
  if (t->kind == Term::Sub) return false;
  return is_pcf(t->a) && is_pcf(t->b) && is_pcf(t->c);
}

inline void free_vars(const TermPtr& t, std::set<std::string>& out,
                      std::vector<std::string>& bound) {
  if (!t) return;
  switch (t->kind) {
    case Term::Var: {
      for (auto it = bound.rbegin(); it != bound.rend(); ++it)
        if (*it == t->name) return;
      out.insert(t->name);
      return;
    }
    case Term::Lam:
      bound.push_back(t->name);
      free_vars(t->a, out, bound);
      bound.pop_back();
      return;
    case Term::Sub:
      bound.push_back(t->name);
      free_vars(t->a, out, bound);
      bound.pop_back();
      free_vars(t->b, out, bound);
      return;
    default:
      free_vars(t->a, out, bound);
      free_vars(t->b, out, bound);
      free_vars(t->c, out, bound);
      return;
  }
}

inline std::set<std::string> free_vars(const TermPtr& t) {
  std::set<std::string> out;
  std::vector<std::string> bound;
  free_vars(t, out, bound);
  return out;
}

inline bool is_closed(const TermPtr& t) { return free_vars(t).empty(); }

inline std::string fresh_name(const std::string& base, const std::set<std::string>& avoid) {
  if (!avoid.count(base)) return base;
  std::string cand = base;
  do {
    cand += '\'';
  } while (avoid.count(cand));
  return cand;
}

// Capture-free substitution t[x := s].
inline TermPtr subst(const TermPtr& t, const std::string& x, const TermPtr& s) {
  if (!t) return t;
  switch (t->kind) {
    case Term::Var:
      return t->name == x ? s : t;
    case Term::Zero:
      return t;
    case Term::Lam:
    case Term::Sub: {
      const bool is_lam = t->kind == Term::Lam;
      TermPtr arg = is_lam ? nullptr : subst(t->b, x, s);
      if (t->name == x)  // binder shadows x
        return is_lam ? t : mk_sub(t->a, t->name, arg);
      std::set<std::string> fvs = free_vars(s);
      TermPtr body = t->a;
      std::string binder = t->name;
      if (fvs.count(binder)) {  // rename to avoid capture
        std::set<std::string> avoid = fvs;
        for (const auto& v : free_vars(body)) avoid.insert(v);
        avoid.insert(x);
        std::string nb = fresh_name(binder, avoid);
        body = subst(body, binder, mk_var(nb));
        binder = nb;
      }
      body = subst(body, x, s);
      return is_lam ? mk_lam(binder, body) : mk_sub(body, binder, arg);
    }
    case Term::App:
      return mk_app(subst(t->a, x, s), subst(t->b, x, s));
    case Term::Fix:
      return mk_fix(subst(t->a, x, s));
    case Term::Pred:
      return mk_pred(subst(t->a, x, s));
    case Term::Succ:
      return mk_succ(subst(t->a, x, s));
    case Term::Ifz:
      return mk_ifz(subst(t->a, x, s), subst(t->b, x, s), subst(t->c, x, s));
  }
  throw std::logic_error("unreachable term kind");
}

// Alpha-equivalence via parallel de Bruijn numbering.
namespace detail {
inline bool alpha_eq_rec(const TermPtr& a, const TermPtr& b, std::map<std::string, int>& la,
                         std::map<std::string, int>& lb, int depth) {
  if (!a || !b) return a == b;
  if (a->kind != b->kind) return false;
  switch (a->kind) {
    case Term::Var: {
      auto ia = la.find(a->name), ib = lb.find(b->name);
      if ((ia == la.end()) != (ib == lb.end())) return false;
      if (ia == la.end()) return a->name == b->name;  // both free
      return ia->second == ib->second;
    }
    case Term::Zero:
      return true;
    case Term::Lam:
    case Term::Sub: {
      if (a->kind == Term::Sub && !alpha_eq_rec(a->b, b->b, la, lb, depth)) return false;
      auto oa = la.find(a->name) != la.end() ? std::optional<int>(la[a->name]) : std::nullopt;
      auto ob = lb.find(b->name) != lb.end() ? std::optional<int>(lb[b->name]) : std::nullopt;
      la[a->name] = depth;
      lb[b->name] = depth;
      bool ok = alpha_eq_rec(a->a, b->a, la, lb, depth + 1);
      if (oa) la[a->name] = *oa; else la.erase(a->name);
      if (ob) lb[b->name] = *ob; else lb.erase(b->name);
      return ok;
    }
    case Term::App:
      return alpha_eq_rec(a->a, b->a, la, lb, depth) && alpha_eq_rec(a->b, b->b, la, lb, depth);
    case Term::Fix:
    case Term::Pred:
    case Term::Succ:
      return alpha_eq_rec(a->a, b->a, la, lb, depth);
    case Term::Ifz:
      return alpha_eq_rec(a->a, b->a, la, lb, depth) && alpha_eq_rec(a->b, b->b, la, lb, depth) &&
             alpha_eq_rec(a->c, b->c, la, lb, depth);
  }
  return false;
}
}  // namespace detail

inline bool alpha_eq(const TermPtr& a, const TermPtr& b) {
  std::map<std::string, int> la, lb;
  return detail::alpha_eq_rec(a, b, la, lb, 0);
}

// ---------------------------------------------------------------------------
// Parser. Grammar:
//   term := lam | app
//   lam  := '\' ident+ '.' term
//   app  := postfix+
//   postfix := atom ('[' ident ':=' term ']')*        (EPCF only)
//   atom := ident | natliteral | '(' term ')'
//         | 'fix' postfix | 'pred' postfix | 'succ' postfix
//         | 'ifz' postfix postfix postfix
// '#' starts a line comment; whitespace-insensitive.
// ---------------------------------------------------------------------------

namespace detail {

struct TermParser {
  const std::string& src;
  size_t pos = 0;
  bool allow_sub;

  TermParser(const std::string& s, bool esub) : src(s), allow_sub(esub) {}

  [[noreturn]] void fail(const std::string& what) {
    size_t line = 1, col = 1;
    for (size_t i = 0; i < pos && i < src.size(); ++i) {
      if (src[i] == '\n') { ++line; col = 1; } else ++col;
    }
    throw std::runtime_error("syntax error at line " + std::to_string(line) + ", column " +
                             std::to_string(col) + ": " + what);
  }

  void skip_ws() {
    while (pos < src.size()) {
      char c = src[pos];
      if (c == ' ' || c == '\t' || c == '\n' || c == '\r') {
        ++pos;
      } else if (c == '#') {
        while (pos < src.size() && src[pos] != '\n') ++pos;
      } else {
        break;
      }
    }
  }

  static bool ident_start(char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_';
  }
  static bool ident_char(char c) {
    return ident_start(c) || (c >= '0' && c <= '9') || c == '\'';
  }

  std::optional<std::string> peek_ident() {
    skip_ws();
    if (pos >= src.size() || !ident_start(src[pos])) return std::nullopt;
    size_t end = pos;
    while (end < src.size() && ident_char(src[end])) ++end;
    return src.substr(pos, end - pos);
  }

  std::string read_ident() {
    auto id = peek_ident();
    if (!id) fail("expected identifier");
    if (*id == "fix" || *id == "pred" || *id == "succ" || *id == "ifz")
      fail("'" + *id + "' is a keyword");
    pos += id->size();
    return *id;
  }

  bool eat(char c) {
    skip_ws();
    if (pos < src.size() && src[pos] == c) {
      ++pos;
      return true;
    }
    return false;
  }

  void expect(char c) {
    if (!eat(c)) fail(std::string("expected '") + c + "'");
  }

  bool at_atom_start() {
    skip_ws();
    if (pos >= src.size()) return false;
    char c = src[pos];
    return ident_start(c) || (c >= '0' && c <= '9') || c == '(';
  }

  TermPtr parse_term() {
    skip_ws();
    if (pos < src.size() && src[pos] == '\\') {
      ++pos;
      std::vector<std::string> binders;
      binders.push_back(read_ident());
      while (peek_ident()) binders.push_back(read_ident());
      expect('.');
      TermPtr body = parse_term();
      for (auto it = binders.rbegin(); it != binders.rend(); ++it) body = mk_lam(*it, body);
      return body;
    }
    TermPtr t = parse_postfix();
    while (at_atom_start()) t = mk_app(t, parse_postfix());
    return t;
  }

  TermPtr parse_postfix() {
    TermPtr t = parse_atom();
    skip_ws();
    while (pos < src.size() && src[pos] == '[') {
      if (!allow_sub) fail("explicit substitution is not PCF syntax");
      ++pos;
      std::string x = read_ident();
      skip_ws();
      if (pos + 1 >= src.size() || src[pos] != ':' || src[pos + 1] != '=') fail("expected ':='");
      pos += 2;
      TermPtr arg = parse_term();
      expect(']');
      t = mk_sub(t, x, arg);
      skip_ws();
    }
    return t;
  }

  TermPtr parse_atom() {
    skip_ws();
    if (pos >= src.size()) fail("unexpected end of input");
    char c = src[pos];
    if (c == '(') {
      ++pos;
      TermPtr t = parse_term();
      expect(')');
      return t;
    }
    if (c >= '0' && c <= '9') {
      uint64_t n = 0;
      while (pos < src.size() && src[pos] >= '0' && src[pos] <= '9') {
        n = n * 10 + static_cast<uint64_t>(src[pos] - '0');
        ++pos;
      }
      return mk_numeral(n);
    }
    auto id = peek_ident();
    if (!id) fail("expected a term");
    if (*id == "fix" || *id == "pred" || *id == "succ") {
      pos += id->size();
      TermPtr arg = parse_postfix();
      if (*id == "fix") return mk_fix(arg);
      if (*id == "pred") return mk_pred(arg);
      return mk_succ(arg);
    }
    if (*id == "ifz") {
      pos += id->size();
      TermPtr l = parse_postfix();
      TermPtr m = parse_postfix();
      TermPtr n = parse_postfix();
      return mk_ifz(l, m, n);
    }
    pos += id->size();
    return mk_var(*id);
  }
};

}  // namespace detail

inline TermPtr parse_pcf(const std::string& text) {
  detail::TermParser p(text, /*esub=*/false);
  TermPtr t = p.parse_term();
  p.skip_ws();
  if (p.pos != text.size()) p.fail("trailing input");
  return t;
}

inline TermPtr parse_epcf(const std::string& text) {
  detail::TermParser p(text, /*esub=*/true);
  TermPtr t = p.parse_term();
  p.skip_ws();
  if (p.pos != text.size()) p.fail("trailing input");
  return t;
}

// ---------------------------------------------------------------------------
// Printer: numerals as decimal literals, minimal parentheses.
// ---------------------------------------------------------------------------

namespace detail {
inline void print_rec(const TermPtr& t, std::string& out, bool atom_pos);

inline void print_atomized(const TermPtr& t, std::string& out) { print_rec(t, out, true); }

inline void print_rec(const TermPtr& t, std::string& out, bool atom_pos) {
  if (auto n = as_numeral(t)) {
    out += std::to_string(*n);
    return;
  }
  switch (t->kind) {
    case Term::Var:
      out += t->name;
      return;
    case Term::Zero:
      out += '0';
      return;
    case Term::Lam: {
      if (atom_pos) out += '(';
      out += '\\';
      const Term* cur = t.get();
      out += cur->name;
      while (cur->a->kind == Term::Lam) {
        cur = cur->a.get();
        out += ' ';
        out += cur->name;
      }
      out += ". ";
      print_rec(cur->a, out, false);
      if (atom_pos) out += ')';
      return;
    }
    case Term::App: {
      if (atom_pos) out += '(';
      // Left spine prints without parens.
      std::vector<TermPtr> args;
      TermPtr head = t;
      while (head->kind == Term::App) {
        args.push_back(head->b);
        head = head->a;
      }
      print_atomized(head, out);
      for (auto it = args.rbegin(); it != args.rend(); ++it) {
        out += ' ';
        print_atomized(*it, out);
      }
      if (atom_pos) out += ')';
      return;
    }
    case Term::Fix:
    case Term::Pred:
    case Term::Succ: {
      if (atom_pos) out += '(';
      out += t->kind == Term::Fix ? "fix " : t->kind == Term::Pred ? "pred " : "succ ";
      print_atomized(t->a, out);
      if (atom_pos) out += ')';
      return;
    }
    case Term::Ifz: {
      if (atom_pos) out += '(';
      out += "ifz ";
      print_atomized(t->a, out);
      out += ' ';
      print_atomized(t->b, out);
      out += ' ';
      print_atomized(t->c, out);
      if (atom_pos) out += ')';
      return;
    }
    case Term::Sub: {
      print_atomized(t->a, out);
      out += '[';
      out += t->name;
      out += " := ";
      print_rec(t->b, out, false);
      out += ']';
      return;
    }
  }
}
}  // namespace detail

inline std::string print_term(const TermPtr& t) {
  std::string out;
  detail::print_rec(t, out, false);
  return out;
}

// ---------------------------------------------------------------------------
// Type assignment. One engine serves PCF and EPCF: the (sigma) rule types the
// substitution argument in the empty environment (arguments must be closed).
// ---------------------------------------------------------------------------

using TypeEnv = std::map<std::string, TypePtr>;

namespace detail {
inline bool infer_term(TypeUnifier& u, std::map<std::string, TT>& env, const TermPtr& t,
                       const TT& expected, bool allow_esub, std::string* err) {
  auto clash = [&](const std::string& what) {
    if (err && err->empty()) *err = what;
    return false;
  };
  switch (t->kind) {
    case Term::Var: {
      auto it = env.find(t->name);
      if (it == env.end()) return clash("unbound variable '" + t->name + "'");
      if (!u.unify(it->second, expected)) return clash("type clash at variable '" + t->name + "'");
      return true;
    }
    case Term::Zero:
      if (!u.unify(expected, TypeUnifier::tt_int())) return clash("0 has type int");
      return true;
    case Term::Pred:
    case Term::Succ:
      if (!u.unify(expected, TypeUnifier::tt_int()))
        return clash("pred/succ result must be int");
      return infer_term(u, env, t->a, TypeUnifier::tt_int(), allow_esub, err);
    case Term::Lam: {
      TT dom = u.fresh(), cod = u.fresh();
      if (!u.unify(expected, TypeUnifier::tt_arrow(dom, cod)))
        return clash("abstraction must have arrow type");
      auto prev = env.find(t->name) != env.end() ? std::optional<TT>(env[t->name]) : std::nullopt;
      env[t->name] = dom;
      bool ok = infer_term(u, env, t->a, cod, allow_esub, err);
      if (prev) env[t->name] = *prev; else env.erase(t->name);
      return ok;
    }
    case Term::App: {
      TT dom = u.fresh();
      return infer_term(u, env, t->a, TypeUnifier::tt_arrow(dom, expected), allow_esub, err) &&
             infer_term(u, env, t->b, dom, allow_esub, err);
    }
    case Term::Fix:
      return infer_term(u, env, t->a, TypeUnifier::tt_arrow(expected, expected), allow_esub, err);
    case Term::Ifz:
      return infer_term(u, env, t->a, TypeUnifier::tt_int(), allow_esub, err) &&
             infer_term(u, env, t->b, expected, allow_esub, err) &&
             infer_term(u, env, t->c, expected, allow_esub, err);
    case Term::Sub: {
      if (!allow_esub) return clash("explicit substitution is not a PCF construct");
      if (!is_closed(t->b))
        return clash("explicit substitution argument must be closed");
      TT beta = u.fresh();
      std::map<std::string, TT> empty;
      if (!infer_term(u, empty, t->b, beta, allow_esub, err)) return false;
      auto prev = env.find(t->name) != env.end() ? std::optional<TT>(env[t->name]) : std::nullopt;
      env[t->name] = beta;
      bool ok = infer_term(u, env, t->a, expected, allow_esub, err);
      if (prev) env[t->name] = *prev; else env.erase(t->name);
      return ok;
    }
  }
  return clash("unreachable term kind");
}

inline std::optional<TypePtr> typecheck_impl(const TypeEnv& env, const TermPtr& t, bool allow_esub,
                                             std::string* err) {
  TypeUnifier u;
  std::map<std::string, TT> tenv;
  for (const auto& [x, ty] : env) tenv[x] = TypeUnifier::lift(ty);
  TT result = u.fresh();
  std::string local;
  if (!infer_term(u, tenv, t, result, allow_esub, err ? err : &local)) return std::nullopt;
  return u.ground(result);
}
}  // namespace detail

inline std::optional<TypePtr> typecheck_pcf(const TypeEnv& env, const TermPtr& t,
                                            std::string* err = nullptr) {
  if (err) err->clear();
  if (!is_pcf(t)) {
    if (err) *err = "term contains explicit substitutions";
    return std::nullopt;
  }
  return detail::typecheck_impl(env, t, false, err);
}

inline std::optional<TypePtr> typecheck_epcf(const TypeEnv& env, const TermPtr& t,
                                             std::string* err = nullptr) {
  if (err) err->clear();
  return detail::typecheck_impl(env, t, true, err);
}

// Checks a term against a specific ground type.
inline bool checks_at(const TypeEnv& env, const TermPtr& t, const TypePtr& ty, bool epcf = false) {
  TypeUnifier u;
  std::map<std::string, TT> tenv;
  for (const auto& [x, typ] : env) tenv[x] = TypeUnifier::lift(typ);
  std::string err;
  return detail::infer_term(u, tenv, t, TypeUnifier::lift(ty), epcf, &err);
}

// ---------------------------------------------------------------------------
// PCF weak-head small-step semantics. Evaluation contexts:
//   E ::= [] | E P | pred E | succ E | ifz E P Q
// ---------------------------------------------------------------------------

inline bool is_pcf_value(const TermPtr& t) {
  return t->kind == Term::Lam || as_numeral(t).has_value();
}

// One step, or nullopt when t is a value or a dead end (no rule applies).
inline std::optional<TermPtr> step_pcf(const TermPtr& t) {
  switch (t->kind) {
    case Term::App: {
      if (t->a->kind == Term::Lam) return subst(t->a->a, t->a->name, t->b);  // beta
      if (auto r = step_pcf(t->a)) return mk_app(*r, t->b);
      return std::nullopt;
    }
    case Term::Fix:
      return mk_app(t->a, t);  // fix P -> P (fix P)
    case Term::Pred: {
      if (auto n = as_numeral(t->a)) return mk_numeral(*n == 0 ? 0 : *n - 1);
      if (auto r = step_pcf(t->a)) return mk_pred(*r);
      return std::nullopt;
    }
    case Term::Succ: {
      if (as_numeral(t->a)) return std::nullopt;  // succ n-bar is the numeral n+1: a value
      if (auto r = step_pcf(t->a)) return mk_succ(*r);
      return std::nullopt;
    }
    case Term::Ifz: {
      if (auto n = as_numeral(t->a)) return *n == 0 ? t->b : t->c;
      if (auto r = step_pcf(t->a)) return mk_ifz(*r, t->b, t->c);
      return std::nullopt;
    }
    default:
      return std::nullopt;  // Var, Lam, Zero, Sub
  }
}

// ---------------------------------------------------------------------------
// PCF big-step semantics (rules val, pr0, pr, sc, ifz0, ifz>0, fix, beta_v).
// ---------------------------------------------------------------------------

struct EvalResult {
  enum Kind { Value, OutOfFuel, NoRule } kind;
  TermPtr value;  // Value only
};

inline EvalResult eval_pcf_big(const TermPtr& t, uint64_t fuel) {
  struct Impl {
    uint64_t fuel;
    EvalResult eval(const TermPtr& t) {
      if (fuel == 0) return {EvalResult::OutOfFuel, nullptr};
      --fuel;
      if (is_pcf_value(t)) return {EvalResult::Value, t};  // (val)
      switch (t->kind) {
        case Term::Pred: {
          EvalResult r = eval(t->a);
          if (r.kind != EvalResult::Value) return r;
          auto n = as_numeral(r.value);
          if (!n) return {EvalResult::NoRule, nullptr};
          return {EvalResult::Value, mk_numeral(*n == 0 ? 0 : *n - 1)};
        }
        case Term::Succ: {
          EvalResult r = eval(t->a);
          if (r.kind != EvalResult::Value) return r;
          auto n = as_numeral(r.value);
          if (!n) return {EvalResult::NoRule, nullptr};
          return {EvalResult::Value, mk_numeral(*n + 1)};
        }
        case Term::Ifz: {
          EvalResult r = eval(t->a);
          if (r.kind != EvalResult::Value) return r;
          auto n = as_numeral(r.value);
          if (!n) return {EvalResult::NoRule, nullptr};
          return eval(*n == 0 ? t->b : t->c);
        }
        case Term::Fix:
          return eval(mk_app(t->a, t));
        case Term::App: {
          EvalResult r = eval(t->a);
          if (r.kind != EvalResult::Value) return r;
          if (r.value->kind != Term::Lam) return {EvalResult::NoRule, nullptr};
          return eval(subst(r.value->a, r.value->name, t->b));
        }
        default:
          return {EvalResult::NoRule, nullptr};  // open variable or Sub
      }
    }
  };
  Impl impl{fuel};
  return impl.eval(t);
}

}  // namespace eamvm
