// SPDX-License-Identifier: MIT
//
// Reverse translation from typing derivations of machines to PCF programs,
// including the if-converges-then encoding (ifc x y = ifz x y y) that mirrors
// possibly-diverging register updates, plus the bounded round-trip check
// translate(reverse(m)) ~ m over a typed argument corpus.

#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "eamvm/core.hpp"
#include "eamvm/equiv.hpp"
#include "eamvm/pcf.hpp"
#include "eamvm/translate.hpp"
#include "eamvm/types.hpp"
#include "eamvm/typing.hpp"

namespace eamvm {

// ifc{x}{y}: observationally y exactly when x terminates.
inline TermPtr mk_ifc(const TermPtr& x, const TermPtr& y) { return mk_ifz(x, y, y); }

namespace detail {

// Register-indexed variable names: register i is x{i}, with one prime
// appended per shadowing level along the current derivation path.
struct RevNames {
  std::map<int, std::string> current;
  std::map<int, int> level;

  std::string bind(int i) {
    int l = level[i]++;
    std::string name = "x" + std::to_string(i) + std::string(static_cast<size_t>(l), '\'');
    current[i] = name;
    return name;
  }

  TermPtr var(int i) const { return mk_var(current.at(i)); }
};

inline TermPtr rev_machine(const DerivPtr& d);

inline TermPtr rev_prog(const ProgNodePtr& node, RevNames& names) {
  switch (node->rule) {
    case ProgNode::LoadEmpty: {
      std::string xi = names.bind(node->instr.i);
      return mk_lam(xi, rev_prog(node->next, names));
    }
    case ProgNode::LoadTape: {
      TermPtr arg = rev_machine(node->machine_premise);
      std::string xi = names.bind(node->instr.i);
      return mk_app(mk_lam(xi, rev_prog(node->next, names)), arg);
    }
    case ProgNode::Pred:
    case ProgNode::Succ: {
      TermPtr xi = names.var(node->instr.i);
      TermPtr op = node->rule == ProgNode::Pred ? mk_pred(xi) : mk_succ(xi);
      std::string xj = names.bind(node->instr.j);
      return mk_ifc(xi, mk_app(mk_lam(xj, rev_prog(node->next, names)), op));
    }
    case ProgNode::Test: {
      TermPtr xi = names.var(node->instr.i);
      TermPtr branch = mk_ifz(xi, names.var(node->instr.j), names.var(node->instr.k));
      std::string xl = names.bind(node->instr.l);
      return mk_ifc(xi, mk_app(mk_lam(xl, rev_prog(node->next, names)), branch));
    }
    case ProgNode::App: {
      TermPtr app = mk_app(names.var(node->instr.i), names.var(node->instr.j));
      std::string xk = names.bind(node->instr.k);
      return mk_app(mk_lam(xk, rev_prog(node->next, names)), app);
    }
    case ProgNode::Call: {
      TermPtr out = names.var(node->instr.i);
      for (const auto& p : node->call_premises) out = mk_app(out, rev_machine(p));
      return out;
    }
  }
  throw std::logic_error("unreachable program rule in reverse translation");
}

inline TermPtr rev_machine(const DerivPtr& d) {
  switch (d->rule) {
    case Derivation::Nat:
      return mk_numeral(d->nat_value);
    case Derivation::Fix:
      return mk_lam("x", mk_fix(mk_var("x")));
    case Derivation::Regs: {
      RevNames names;
      std::vector<std::string> binders;
      for (const auto& [idx, ty] : d->reg_env) binders.push_back(names.bind(idx));
      TermPtr body = rev_prog(d->prog, names);
      for (auto it = binders.rbegin(); it != binders.rend(); ++it) body = mk_lam(*it, body);
      for (const auto& p : d->reg_premises) body = mk_app(body, rev_machine(p));
      return body;
    }
  }
  throw std::logic_error("unreachable machine rule in reverse translation");
}

}  // namespace detail

inline TermPtr reverse_from_derivation(const DerivPtr& d) { return detail::rev_machine(d); }

struct ReverseResult {
  TypeCheckResult::Status status;
  TermPtr term;       // Ok only
  std::string error;  // Failure only
};

inline ReverseResult reverse_machine(Registry& reg, const Machine& m, const TypePtr& alpha,
                                     uint64_t depth_budget = 10000) {
  TypeCheckResult tc = check_type(reg, m, alpha, depth_budget);
  if (tc.status != TypeCheckResult::Ok) return {tc.status, nullptr, tc.error};
  return {TypeCheckResult::Ok, reverse_from_derivation(tc.derivation), {}};
}

// ---------------------------------------------------------------------------
// Bounded round trip: reverse-translate, re-check the PCF side, translate
// back, and compare with the original over the typed argument corpus.
// ---------------------------------------------------------------------------

inline Verdict roundtrip_check(Registry& reg, const Machine& m, const TypePtr& alpha,
                               uint64_t fuel, const ArgumentCorpus& corpus,
                               uint64_t depth_budget = 10000) {
  ReverseResult rr = reverse_machine(reg, m, alpha, depth_budget);
  Verdict v;
  if (rr.status != TypeCheckResult::Ok) {
    v.kind = Verdict::Unknown;
    v.why = rr.status == TypeCheckResult::BudgetExhausted ? Verdict::Fuel : Verdict::CorpusLimit;
    v.detail = "reverse translation failed: " + rr.error;
    return v;
  }
  std::string terr;
  bool rechecks = checks_at({}, rr.term, alpha);
  if (!rechecks) {
    v.kind = Verdict::Unknown;
    v.detail = "reverse-translated program does not re-check at the declared type" +
               (terr.empty() ? std::string() : ": " + terr);
    return v;
  }
  Machine again = translate(reg, rr.term, {});
  return equiv_at_type(reg, m, again, alpha, fuel, corpus);
}

}  // namespace eamvm
