// SPDX-License-Identifier: MIT
//
// The type system for extended addressing machines: judgements M : a,
// Delta ||-^r (P,T) : a and R |= Delta, realized by a deterministic
// algorithm (numeral and Y machines dispatch by address first, everything
// else through the register rule). Type search at the (load_T)/(R_T) choice
// points uses unification variables; a recursion budget bounds address
// resolution so "don't know" is distinguished from "ill-typed".

#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "eamvm/core.hpp"
#include "eamvm/engine.hpp"
#include "eamvm/types.hpp"

namespace eamvm {

// ---------------------------------------------------------------------------
// Derivations. Program nodes mirror the syntax-directed program rules
// (load_empty, load_tape, pred, succ, test, app, call); machine nodes are
// (nat), (fix) or the register rule.
// ---------------------------------------------------------------------------

struct Derivation;
using DerivPtr = std::shared_ptr<Derivation>;

struct ProgNode;
using ProgNodePtr = std::shared_ptr<ProgNode>;

struct ProgNode {
  enum Rule { LoadEmpty, LoadTape, Pred, Succ, Test, App, Call } rule;
  Instruction instr;
  TypePtr node_type;                  // the type concluded at this point
  TypePtr bound_type;                 // Load: beta; Test: branch type; App: result
  DerivPtr machine_premise;           // LoadTape: typing of the resolved tape head
  std::vector<DerivPtr> call_premises;  // Call: typing of the remaining tape
  ProgNodePtr next;                   // absent for Call

  TT tt_node, tt_bound;  // internal, grounded into node_type/bound_type
};

struct Derivation {
  enum Rule { Nat, Fix, Regs } rule;
  TypePtr type;
  uint64_t nat_value = 0;                         // Nat
  std::vector<std::pair<int, TypePtr>> reg_env;   // Regs: Delta (index, type), ascending
  std::vector<DerivPtr> reg_premises;             // typing of each initialized register
  ProgNodePtr prog;                               // Regs: the program judgement

  TT tt_type;                                     // internal
  std::vector<TT> tt_reg_env;                     // internal
};

struct TypeCheckResult {
  enum Status { Ok, Failure, BudgetExhausted } status;
  DerivPtr derivation;  // Ok only
  std::string error;    // Failure only
};

struct InferResult {
  TypeCheckResult::Status status;
  TypePtr type;       // Ok only
  std::string error;  // Failure only
};

namespace detail {

// Principal-type schemes of closed machines, with canonically numbered free
// variables. Since every machine is closed, its inferred type generalizes:
// no variable can be constrained by the surrounding context, so the scheme
// may be instantiated afresh at every use (ML-style let-polymorphism over
// the address graph). Used to memoize repeated sub-machine typings.
struct TypeScheme {
  TT skeleton;
  int nvars = 0;
};

using SchemeCache = std::unordered_map<uint64_t, TypeScheme>;  // sym id -> scheme

inline TT scheme_snapshot_rec(const TypeUnifier& u, const TT& t, std::map<int, int>& canon,
                              int& next) {
  TT r = u.shallow(t);
  switch (r->kind) {
    case TypeTerm::Int:
      return TypeUnifier::tt_int();
    case TypeTerm::Arrow:
      return TypeUnifier::tt_arrow(scheme_snapshot_rec(u, r->dom, canon, next),
                                   scheme_snapshot_rec(u, r->cod, canon, next));
    case TypeTerm::Var: {
      auto [it, inserted] = canon.emplace(r->var_id, next);
      if (inserted) ++next;
      auto v = std::make_shared<TypeTerm>();
      v->kind = TypeTerm::Var;
      v->var_id = it->second;
      return v;
    }
  }
  return TypeUnifier::tt_int();
}

inline TypeScheme scheme_snapshot(const TypeUnifier& u, const TT& t) {
  TypeScheme s;
  std::map<int, int> canon;
  int next = 0;
  s.skeleton = scheme_snapshot_rec(u, t, canon, next);
  s.nvars = next;
  return s;
}

inline TT scheme_instantiate_rec(const TT& t, const std::vector<TT>& vars) {
  switch (t->kind) {
    case TypeTerm::Int:
      return t;
    case TypeTerm::Var:
      return vars[static_cast<size_t>(t->var_id)];
    case TypeTerm::Arrow:
      return TypeUnifier::tt_arrow(scheme_instantiate_rec(t->dom, vars),
                                   scheme_instantiate_rec(t->cod, vars));
  }
  return t;
}

inline TT scheme_instantiate(TypeUnifier& u, const TypeScheme& s) {
  std::vector<TT> vars;
  vars.reserve(static_cast<size_t>(s.nvars));
  for (int i = 0; i < s.nvars; ++i) vars.push_back(u.fresh());
  return scheme_instantiate_rec(s.skeleton, vars);
}

class MachineTypeChecker {
 public:
  MachineTypeChecker(Registry& reg, uint64_t budget, SchemeCache* cache = nullptr)
      : reg_(reg), budget_(budget), cache_(cache) {}

  Registry& reg_;
  TypeUnifier u_;
  uint64_t budget_;
  SchemeCache* cache_;  // optional fast path; produces opaque premises
  bool exhausted_ = false;
  std::string error_;

  bool fail(const std::string& what) {
    if (error_.empty()) error_ = what;
    return false;
  }

  // Types the machine behind an address. With a scheme cache attached the
  // premise is checked against the memoized principal type and returned as
  // an opaque node (sufficient for yes/no checking, not for reverse
  // translation); without one it recurses structurally.
  DerivPtr infer_addr(const Address& a, const TT& expected) {
    if (!cache_ || a.is_nat() || a == Y_ADDRESS)
      return infer_machine(reg_.resolve(a), expected);
    auto it = cache_->find(a.value);
    if (it == cache_->end()) {
      MachineTypeChecker sub(reg_, budget_, cache_);
      TT v = sub.u_.fresh();
      DerivPtr d = sub.infer_machine(reg_.resolve(a), v);
      budget_ = sub.budget_;
      if (!d) {
        exhausted_ = sub.exhausted_;
        if (!sub.error_.empty()) fail(sub.error_);
        return nullptr;
      }
      it = cache_->emplace(a.value, scheme_snapshot(sub.u_, v)).first;
    }
    if (budget_ == 0) {
      exhausted_ = true;
      return nullptr;
    }
    --budget_;
    if (!u_.unify(expected, scheme_instantiate(u_, it->second))) {
      fail("machine at sym " + std::to_string(a.value) +
           " does not admit the required type instance");
      return nullptr;
    }
    auto d = std::make_shared<Derivation>();
    d->rule = Derivation::Regs;
    d->tt_type = expected;
    return d;
  }

  DerivPtr infer_machine(const Machine& m, const TT& expected) {
    if (budget_ == 0) {
      exhausted_ = true;
      return nullptr;
    }
    --budget_;
    Address a = reg_.intern(m);
    auto d = std::make_shared<Derivation>();
    d->tt_type = expected;
    if (a.is_nat()) {  // rule (nat), highest priority
      if (!u_.unify(expected, TypeUnifier::tt_int())) {
        fail("numeral machine " + std::to_string(a.value) + " only has type int");
        return nullptr;
      }
      d->rule = Derivation::Nat;
      d->nat_value = a.value;
      return d;
    }
    if (a == Y_ADDRESS) {  // rule (fix)
      TT v = u_.fresh();
      if (!u_.unify(expected, TypeUnifier::tt_arrow(TypeUnifier::tt_arrow(v, v), v))) {
        fail("the Y machine only has types of shape (b -> b) -> b");
        return nullptr;
      }
      d->rule = Derivation::Fix;
      return d;
    }
    // Register rule.
    d->rule = Derivation::Regs;
    std::map<int, TT> delta;
    for (size_t i = 0; i < m.regs.size(); ++i) {
      if (!m.regs[i]) continue;
      TT beta = u_.fresh();
      DerivPtr sub = infer_addr(*m.regs[i], beta);
      if (!sub) return nullptr;
      delta[static_cast<int>(i)] = beta;
      d->tt_reg_env.push_back(beta);
      d->reg_env.emplace_back(static_cast<int>(i), nullptr);
      d->reg_premises.push_back(sub);
    }
    d->prog = infer_prog(delta, m, 0, 0, expected);
    if (!d->prog) return nullptr;
    return d;
  }

  ProgNodePtr infer_prog(std::map<int, TT>& delta, const Machine& m, size_t pc, size_t tp,
                         const TT& expected) {
    const auto& instrs = m.prog->instrs;
    if (pc >= instrs.size()) {
      fail("no typing rule concludes a program without a trailing Call");
      return nullptr;
    }
    const Instruction& ins = instrs[pc];
    auto node = std::make_shared<ProgNode>();
    node->instr = ins;
    node->tt_node = expected;
    auto reg_type = [&](int idx) -> TT* {
      auto it = delta.find(idx);
      if (it == delta.end()) {
        fail("register R" + std::to_string(idx) + " is not typed in Delta");
        return nullptr;
      }
      return &it->second;
    };
    switch (ins.op) {
      case Instruction::Load: {
        TT beta = u_.fresh();
        node->tt_bound = beta;
        if (tp >= m.tape.size()) {  // (load_empty)
          node->rule = ProgNode::LoadEmpty;
          TT rest = u_.fresh();
          if (!u_.unify(expected, TypeUnifier::tt_arrow(beta, rest))) {
            fail("Load with empty tape needs an arrow type");
            return nullptr;
          }
          std::map<int, TT> d2 = delta;
          d2[ins.i] = beta;
          node->next = infer_prog(d2, m, pc + 1, tp, rest);
          if (!node->next) return nullptr;
          return node;
        }
        node->rule = ProgNode::LoadTape;  // (load_tape)
        node->machine_premise = infer_addr(m.tape[tp], beta);
        if (!node->machine_premise) return nullptr;
        std::map<int, TT> d2 = delta;
        d2[ins.i] = beta;
        node->next = infer_prog(d2, m, pc + 1, tp + 1, expected);
        if (!node->next) return nullptr;
        return node;
      }
      case Instruction::Pred:
      case Instruction::Succ: {
        node->rule = ins.op == Instruction::Pred ? ProgNode::Pred : ProgNode::Succ;
        TT* ti = reg_type(ins.i);
        if (!ti) return nullptr;
        if (!u_.unify(*ti, TypeUnifier::tt_int())) {
          fail("Pred/Succ scrutinee R" + std::to_string(ins.i) + " must be int");
          return nullptr;
        }
        std::map<int, TT> d2 = delta;
        d2[ins.j] = TypeUnifier::tt_int();
        node->next = infer_prog(d2, m, pc + 1, tp, expected);
        if (!node->next) return nullptr;
        return node;
      }
      case Instruction::Test: {
        node->rule = ProgNode::Test;
        TT* ti = reg_type(ins.i);
        if (!ti) return nullptr;
        if (!u_.unify(*ti, TypeUnifier::tt_int())) {
          fail("Test scrutinee R" + std::to_string(ins.i) + " must be int");
          return nullptr;
        }
        TT* tj = reg_type(ins.j);
        TT* tk = reg_type(ins.k);
        if (!tj || !tk) return nullptr;
        if (!u_.unify(*tj, *tk)) {
          fail("Test branches R" + std::to_string(ins.j) + " and R" + std::to_string(ins.k) +
               " must share a type");
          return nullptr;
        }
        node->tt_bound = *tj;
        std::map<int, TT> d2 = delta;
        d2[ins.l] = *tj;
        node->next = infer_prog(d2, m, pc + 1, tp, expected);
        if (!node->next) return nullptr;
        return node;
      }
      case Instruction::App: {
        node->rule = ProgNode::App;
        TT* ti = reg_type(ins.i);
        TT* tj = reg_type(ins.j);
        if (!ti || !tj) return nullptr;
        TT beta = u_.fresh();
        node->tt_bound = beta;
        if (!u_.unify(*ti, TypeUnifier::tt_arrow(*tj, beta))) {
          fail("App: R" + std::to_string(ins.i) + " must be a function of R" +
               std::to_string(ins.j));
          return nullptr;
        }
        std::map<int, TT> d2 = delta;
        d2[ins.k] = beta;
        node->next = infer_prog(d2, m, pc + 1, tp, expected);
        if (!node->next) return nullptr;
        return node;
      }
      case Instruction::Call: {
        node->rule = ProgNode::Call;
        TT* ti = reg_type(ins.i);
        if (!ti) return nullptr;
        TT spine = expected;
        std::vector<TT> arg_types;
        for (size_t t = tp; t < m.tape.size(); ++t) arg_types.push_back(u_.fresh());
        for (auto it = arg_types.rbegin(); it != arg_types.rend(); ++it)
          spine = TypeUnifier::tt_arrow(*it, spine);
        if (!u_.unify(*ti, spine)) {
          fail("Call: R" + std::to_string(ins.i) +
               " must consume the full remaining tape and yield the result type");
          return nullptr;
        }
        for (size_t t = tp; t < m.tape.size(); ++t) {
          DerivPtr sub = infer_addr(m.tape[t], arg_types[t - tp]);
          if (!sub) return nullptr;
          node->call_premises.push_back(sub);
        }
        return node;
      }
    }
    fail("unreachable instruction in typing");
    return nullptr;
  }

  void ground_deriv(const DerivPtr& d) {
    if (!d) return;
    d->type = u_.ground(d->tt_type);
    for (size_t i = 0; i < d->reg_env.size(); ++i)
      d->reg_env[i].second = u_.ground(d->tt_reg_env[i]);
    for (const auto& p : d->reg_premises) ground_deriv(p);
    for (ProgNodePtr n = d->prog; n; n = n->next) {
      n->node_type = u_.ground(n->tt_node);
      if (n->tt_bound) n->bound_type = u_.ground(n->tt_bound);
      ground_deriv(n->machine_premise);
      for (const auto& p : n->call_premises) ground_deriv(p);
    }
  }
};

}  // namespace detail

inline TypeCheckResult check_type(Registry& reg, const Machine& m, const TypePtr& alpha,
                                  uint64_t depth_budget = 10000) {
  detail::MachineTypeChecker c(reg, depth_budget);
  DerivPtr d = c.infer_machine(m, TypeUnifier::lift(alpha));
  if (!d) {
    if (c.exhausted_) return {TypeCheckResult::BudgetExhausted, nullptr, {}};
    return {TypeCheckResult::Failure, nullptr, c.error_};
  }
  c.ground_deriv(d);
  return {TypeCheckResult::Ok, d, {}};
}

inline InferResult infer_type(Registry& reg, const Machine& m, uint64_t depth_budget = 10000) {
  detail::MachineTypeChecker c(reg, depth_budget);
  TT v = c.u_.fresh();
  DerivPtr d = c.infer_machine(m, v);
  if (!d) {
    if (c.exhausted_) return {TypeCheckResult::BudgetExhausted, nullptr, {}};
    return {TypeCheckResult::Failure, nullptr, c.error_};
  }
  // Unconstrained variables default to int, yielding a checkable ground type.
  return {TypeCheckResult::Ok, c.u_.ground(v), {}};
}

// ---------------------------------------------------------------------------
// Subject reduction: step up to `fuel` times re-checking the declared type.
// ---------------------------------------------------------------------------

struct SubjectReductionReport {
  enum Verdict { AllOk, Violation, BudgetOut } verdict = AllOk;
  uint64_t steps_checked = 0;
  std::string message;
};

inline SubjectReductionReport subject_reduction_check(Registry& reg, Machine m,
                                                      const TypePtr& alpha, uint64_t fuel,
                                                      uint64_t depth_budget = 10000) {
  SubjectReductionReport rep;
  // Successive configurations share almost all sub-machine addresses, so the
  // per-step re-check runs against one scheme cache for the whole trace.
  detail::SchemeCache cache;
  for (uint64_t k = 0; k < fuel; ++k) {
    StepOutcome so = step(reg, m);
    if (so.kind == StepOutcome::Error) {
      rep.verdict = SubjectReductionReport::Violation;
      rep.message = "typed machine reached an error state: " + so.diagnostic;
      return rep;
    }
    if (so.kind != StepOutcome::Next) return rep;
    detail::MachineTypeChecker c(reg, depth_budget, &cache);
    DerivPtr d = c.infer_machine(so.machine, TypeUnifier::lift(alpha));
    TypeCheckResult r{d       ? TypeCheckResult::Ok
                      : c.exhausted_ ? TypeCheckResult::BudgetExhausted
                                     : TypeCheckResult::Failure,
                      nullptr, c.error_};
    if (r.status == TypeCheckResult::Failure) {
      rep.verdict = SubjectReductionReport::Violation;
      rep.message = "type lost after step " + std::to_string(k + 1) + ": " + r.error;
      return rep;
    }
    if (r.status == TypeCheckResult::BudgetExhausted) {
      rep.verdict = SubjectReductionReport::BudgetOut;
      rep.message = "type re-check budget exhausted at step " + std::to_string(k + 1);
      return rep;
    }
    rep.steps_checked = k + 1;
    m = std::move(so.machine);
  }
  return rep;
}

}  // namespace eamvm
