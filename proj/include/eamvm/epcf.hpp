// SPDX-License-Identifier: MIT
//
// EPCF: PCF with closed explicit substitutions. Weak-head reduction split
// into computation (cr) and percolation (pr) steps, big-step evaluation, the
// multiplicative head-size measure that makes percolation strongly
// normalizing, and the collapse map back to PCF.

#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "eamvm/pcf.hpp"

namespace eamvm {

// ---------------------------------------------------------------------------
// Program predicate Prog_E: closed, and every explicit substitution argument
// closed (reduction on closed non-programs is unsound, so we reject them).
// ---------------------------------------------------------------------------

namespace detail {
inline bool subs_args_closed(const TermPtr& t) {
  if (!t) return true;
  if (t->kind == Term::Sub && !is_closed(t->b)) return false;
  return subs_args_closed(t->a) && subs_args_closed(t->b) && subs_args_closed(t->c);
}
}  // namespace detail

inline bool is_epcf_program(const TermPtr& t) {
  return is_closed(t) && detail::subs_args_closed(t);
}

// ---------------------------------------------------------------------------
// Substitution spines. M<x1:=N1>...<xn:=Nn> is peeled into (M, sigma) with
// sigma listed outside-in; sigma(x) looks up the innermost binding, matching
// the scoping of the nested constructors (the variables are pairwise distinct
// in programs, so the choice is normally moot).
// ---------------------------------------------------------------------------

using Subs = std::vector<std::pair<std::string, TermPtr>>;  // [outermost ... innermost]

inline TermPtr peel_subs(TermPtr t, Subs& sigma) {
  sigma.clear();
  while (t->kind == Term::Sub) {
    sigma.emplace_back(t->name, t->b);
    t = t->a;
  }
  // Listed innermost-first for lookup convenience.
  std::reverse(sigma.begin(), sigma.end());
  return t;
}

inline TermPtr wrap_subs(TermPtr t, const Subs& sigma) {
  for (const auto& [x, n] : sigma) t = mk_sub(std::move(t), x, n);
  return t;
}

inline const TermPtr* subs_lookup(const Subs& sigma, const std::string& x) {
  for (const auto& [y, n] : sigma)
    if (y == x) return &n;
  return nullptr;
}

// ---------------------------------------------------------------------------
// Weak-head reduction: one cr or pr step, or nullopt for values/dead ends.
// ---------------------------------------------------------------------------

struct WhStep {
  TermPtr term;
  enum Tag { Cr, Pr } tag;
};

namespace detail {
// Beta into an explicit substitution; alpha-renames the binder if it would
// collide with a variable already bound in the value's suspended sigma.
inline TermPtr beta_esub(const TermPtr& lam_core, const Subs& sigma, const TermPtr& arg) {
  std::string binder = lam_core->name;
  TermPtr body = lam_core->a;
  if (subs_lookup(sigma, binder)) {
    std::set<std::string> avoid = free_vars(body);
    for (const auto& [x, n] : sigma) avoid.insert(x);
    std::string nb = fresh_name(binder, avoid);
    body = subst(body, binder, mk_var(nb));
    binder = nb;
  }
  return mk_sub(wrap_subs(body, sigma), binder, arg);
}
}  // namespace detail

inline std::optional<WhStep> step_wh(const TermPtr& t) {
  Subs sigma;
  TermPtr core = peel_subs(t, sigma);

  if (!sigma.empty()) {
    switch (core->kind) {
      case Term::Lam:
        return std::nullopt;  // (\x.M)^sigma is a value
      case Term::Var: {
        if (const TermPtr* n = subs_lookup(sigma, core->name)) return WhStep{*n, WhStep::Pr};
        return WhStep{core, WhStep::Pr};  // y^sigma -> y when y not in dom(sigma)
      }
      case Term::Zero:
        return WhStep{mk_zero(), WhStep::Pr};
      case Term::App:
        return WhStep{mk_app(wrap_subs(core->a, sigma), wrap_subs(core->b, sigma)), WhStep::Pr};
      case Term::Pred:
        return WhStep{mk_pred(wrap_subs(core->a, sigma)), WhStep::Pr};
      case Term::Succ:
        return WhStep{mk_succ(wrap_subs(core->a, sigma)), WhStep::Pr};
      case Term::Ifz:
        return WhStep{mk_ifz(wrap_subs(core->a, sigma), wrap_subs(core->b, sigma),
                             wrap_subs(core->c, sigma)),
                      WhStep::Pr};
      case Term::Fix:
        return WhStep{mk_fix(wrap_subs(core->a, sigma)), WhStep::Pr};
      case Term::Sub:
        break;  // impossible: peeled
    }
    return std::nullopt;
  }

  switch (core->kind) {
    case Term::App: {
      Subs fsigma;
      TermPtr fcore = peel_subs(core->a, fsigma);
      if (fcore->kind == Term::Lam)
        return WhStep{detail::beta_esub(fcore, fsigma, core->b), WhStep::Cr};
      if (auto r = step_wh(core->a)) return WhStep{mk_app(r->term, core->b), r->tag};
      return std::nullopt;
    }
    case Term::Fix:
      return WhStep{mk_app(core->a, core), WhStep::Cr};
    case Term::Pred: {
      if (auto n = as_numeral(core->a))
        return WhStep{mk_numeral(*n == 0 ? 0 : *n - 1), WhStep::Cr};
      if (auto r = step_wh(core->a)) return WhStep{mk_pred(r->term), r->tag};
      return std::nullopt;
    }
    case Term::Succ: {
      if (as_numeral(core->a)) return std::nullopt;  // numeral: a value
      if (auto r = step_wh(core->a)) return WhStep{mk_succ(r->term), r->tag};
      return std::nullopt;
    }
    case Term::Ifz: {
      if (auto n = as_numeral(core->a)) return WhStep{*n == 0 ? core->b : core->c, WhStep::Cr};
      if (auto r = step_wh(core->a)) return WhStep{mk_ifz(r->term, core->b, core->c), r->tag};
      return std::nullopt;
    }
    default:
      return std::nullopt;  // Var, Lam, Zero
  }
}

inline bool is_epcf_value(const TermPtr& t) {
  Subs sigma;
  TermPtr core = peel_subs(t, sigma);
  if (core->kind == Term::Lam) return true;
  return sigma.empty() && as_numeral(core).has_value();
}

// ---------------------------------------------------------------------------
// Head size: <x> = <0> = 1, unary constructors add 1, <ifz L M N> = <L>+1,
// <M<x:=N>> = <M>·(<N>+1). Multiplicative, so computed in 128 bits.
// ---------------------------------------------------------------------------

using HeadSize = unsigned __int128;

inline HeadSize head_size(const TermPtr& t) {
  switch (t->kind) {
    case Term::Var:
    case Term::Zero:
      return 1;
    case Term::App:
    case Term::Lam:
    case Term::Fix:
    case Term::Pred:
    case Term::Succ:
      return head_size(t->a) + 1;
    case Term::Ifz:
      return head_size(t->a) + 1;
    case Term::Sub:
      return head_size(t->a) * (head_size(t->b) + 1);
  }
  return 1;
}

inline HeadSize head_size_subs(const Subs& sigma) {
  HeadSize h = 1;
  for (const auto& [x, n] : sigma) h *= head_size(n) + 1;
  return h;
}

// ---------------------------------------------------------------------------
// Collapse: performs every explicit substitution as a meta-substitution.
// Identity on PCF terms; maps programs to PCF programs.
// ---------------------------------------------------------------------------

inline TermPtr collapse(const TermPtr& t) {
  switch (t->kind) {
    case Term::Var:
    case Term::Zero:
      return t;
    case Term::Lam:
      return mk_lam(t->name, collapse(t->a));
    case Term::App:
      return mk_app(collapse(t->a), collapse(t->b));
    case Term::Fix:
      return mk_fix(collapse(t->a));
    case Term::Pred:
      return mk_pred(collapse(t->a));
    case Term::Succ:
      return mk_succ(collapse(t->a));
    case Term::Ifz:
      return mk_ifz(collapse(t->a), collapse(t->b), collapse(t->c));
    case Term::Sub:
      return subst(collapse(t->a), t->name, collapse(t->b));
  }
  return t;
}

// ---------------------------------------------------------------------------
// Big-step evaluation (rules natE, lamE, varE, pr0E, prE, scE, ifz0E,
// ifz>0E, fixE, beta_vE).
// ---------------------------------------------------------------------------

inline EvalResult eval_epcf_big(const TermPtr& t, uint64_t fuel) {
  struct Impl {
    uint64_t fuel;
    EvalResult eval(const TermPtr& t) {
      if (fuel == 0) return {EvalResult::OutOfFuel, nullptr};
      --fuel;
      Subs sigma;
      TermPtr core = peel_subs(t, sigma);
      switch (core->kind) {
        case Term::Lam:
          return {EvalResult::Value, t};  // (lamE)
        case Term::Zero:
          return {EvalResult::Value, mk_zero()};  // (natE)
        case Term::Var: {
          if (const TermPtr* n = subs_lookup(sigma, core->name)) return eval(*n);  // (varE)
          return {EvalResult::NoRule, nullptr};
        }
        case Term::Pred: {
          EvalResult r = eval(wrap_subs(core->a, sigma));
          if (r.kind != EvalResult::Value) return r;
          auto n = as_numeral(r.value);
          if (!n) return {EvalResult::NoRule, nullptr};
          return {EvalResult::Value, mk_numeral(*n == 0 ? 0 : *n - 1)};
        }
        case Term::Succ: {
          EvalResult r = eval(wrap_subs(core->a, sigma));
          if (r.kind != EvalResult::Value) return r;
          auto n = as_numeral(r.value);
          if (!n) return {EvalResult::NoRule, nullptr};
          return {EvalResult::Value, mk_numeral(*n + 1)};
        }
        case Term::Ifz: {
          EvalResult r = eval(wrap_subs(core->a, sigma));
          if (r.kind != EvalResult::Value) return r;
          auto n = as_numeral(r.value);
          if (!n) return {EvalResult::NoRule, nullptr};
          return eval(wrap_subs(*n == 0 ? core->b : core->c, sigma));
        }
        case Term::Fix: {
          TermPtr body = wrap_subs(core->a, sigma);
          return eval(mk_app(body, mk_fix(body)));  // (fixE)
        }
        case Term::App: {
          EvalResult r = eval(wrap_subs(core->a, sigma));
          if (r.kind != EvalResult::Value) return r;
          Subs vsigma;
          TermPtr vcore = peel_subs(r.value, vsigma);
          if (vcore->kind != Term::Lam) return {EvalResult::NoRule, nullptr};
          TermPtr arg = wrap_subs(core->b, sigma);
          return eval(detail::beta_esub(vcore, vsigma, arg));  // (beta_vE)
        }
        case Term::Sub:
          break;  // impossible: peeled
      }
      return {EvalResult::NoRule, nullptr};
    }
  };
  Impl impl{fuel};
  return impl.eval(t);
}

}  // namespace eamvm
