// SPDX-License-Identifier: MIT
//
// The auxiliary machine library (projections, applicators, arithmetic
// machines, fixed-point approximants) and the forward translation from
// (E)PCF terms to extended addressing machines, plus the convergence-witness
// search used to exhibit step-decreasing simulation.

#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <tuple>
#include <unordered_map>
#include <vector>

#include "eamvm/core.hpp"
#include "eamvm/engine.hpp"
#include "eamvm/pcf.hpp"
#include "eamvm/types.hpp"

namespace eamvm {

// ---------------------------------------------------------------------------
// Auxiliary machine specifications.
// ---------------------------------------------------------------------------

struct AuxSpec {
  enum Kind { Proj, AppN, PredM, SuccM, IfzM, YM, FixApprox } kind;
  int k = 0, i = 0, n = 0;

  static AuxSpec proj(int k, int i) {
    if (k <= 0 || i < 1 || i > k) throw std::invalid_argument("Proj(k,i) needs 1 <= i <= k");
    return {Proj, k, i, 0};
  }
  static AuxSpec appn(int n, int k) {
    if (k <= 0 || n < 0) throw std::invalid_argument("AppN(n,k) needs k > 0, n >= 0");
    return {AppN, k, 0, n};
  }
  static AuxSpec pred_m() { return {PredM, 0, 0, 0}; }
  static AuxSpec succ_m() { return {SuccM, 0, 0, 0}; }
  static AuxSpec ifz_m() { return {IfzM, 0, 0, 0}; }
  static AuxSpec y_m() { return {YM, 0, 0, 0}; }
  static AuxSpec fix_approx(int n) {
    if (n < 0) throw std::invalid_argument("FixApprox(n) needs n >= 0");
    return {FixApprox, 0, 0, n};
  }

  friend bool operator<(const AuxSpec& a, const AuxSpec& b) {
    return std::tie(a.kind, a.k, a.i, a.n) < std::tie(b.kind, b.k, b.i, b.n);
  }
};

inline Machine aux_machine(Registry& reg, const AuxSpec& spec);

namespace detail {

inline Machine build_aux(Registry& reg, const AuxSpec& spec) {
  using I = Instruction;
  switch (spec.kind) {
    case AuxSpec::Proj: {
      // <R0, R1, (Load 1)^{i-1}; Load 0; (Load 1)^{k-i}; Call 0, []>
      std::vector<I> p;
      for (int t = 0; t < spec.i - 1; ++t) p.push_back(I::load(1));
      p.push_back(I::load(0));
      for (int t = 0; t < spec.k - spec.i; ++t) p.push_back(I::load(1));
      p.push_back(I::call(0));
      return make_machine({std::nullopt, std::nullopt}, make_program(std::move(p)), {});
    }
    case AuxSpec::PredM:
      return make_machine({std::nullopt},
                          make_program({I::load(0), I::pred(0, 0), I::call(0)}), {});
    case AuxSpec::SuccM:
      return make_machine({std::nullopt},
                          make_program({I::load(0), I::succ(0, 0), I::call(0)}), {});
    case AuxSpec::IfzM:
      return make_machine(
          {std::nullopt, std::nullopt, std::nullopt},
          make_program({I::load(0), I::load(1), I::load(2), I::test(0, 1, 2, 0), I::call(0)}),
          {});
    case AuxSpec::YM:
      return y_machine();
    case AuxSpec::AppN: {
      if (spec.n == 0) return aux_machine(reg, AuxSpec::proj(1, 1));
      // <R0 = #AppN(n-1,k), R1, ..., R_{k+2},
      //  Load (1..k+2); App j (k+2) j for j=2..k+1; App 0 j 0 for j=1..k+1;
      //  Call 0, []>
      const int k = spec.k;
      Address prev = reg.intern(aux_machine(reg, AuxSpec::appn(spec.n - 1, k)));
      std::vector<std::optional<Address>> regs(k + 3, std::nullopt);
      regs[0] = prev;
      std::vector<I> p;
      for (int j = 1; j <= k + 2; ++j) p.push_back(I::load(j));
      for (int j = 2; j <= k + 1; ++j) p.push_back(I::app(j, k + 2, j));
      for (int j = 1; j <= k + 1; ++j) p.push_back(I::app(0, j, 0));
      p.push_back(I::call(0));
      return make_machine(std::move(regs), make_program(std::move(p)), {});
    }
    case AuxSpec::FixApprox: {
      if (spec.n == 0) {
        // fix_0 = the translation of Omega: Y@[#Proj(1,1)].
        Address i = reg.intern(aux_machine(reg, AuxSpec::proj(1, 1)));
        return append_tape(y_machine(), {i});
      }
      Address prev = reg.intern(aux_machine(reg, AuxSpec::fix_approx(spec.n - 1)));
      Machine y = y_machine();
      return Machine{y.regs, y.prog, {prev}};
    }
  }
  throw std::logic_error("unreachable aux spec");
}

}  // namespace detail

// Memoized per (registry, spec); harmless by registry idempotence but keeps
// repeated translations cheap and address-sharing obvious.
inline Machine aux_machine(Registry& reg, const AuxSpec& spec) {
  static std::recursive_mutex mu;  // build_aux recurses into aux_machine
  static std::map<std::pair<uint64_t, AuxSpec>, Machine> cache;
  std::lock_guard<std::recursive_mutex> lock(mu);
  auto key = std::make_pair(reg.uid(), spec);
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;
  Machine m = detail::build_aux(reg, spec);
  return cache.emplace(key, std::move(m)).first->second;
}

// ---------------------------------------------------------------------------
// Forward translation. `free_vars` fixes the order x1..xn; FV(t) must be
// contained in it and every explicit substitution argument must be closed.
// ---------------------------------------------------------------------------

inline Machine translate(Registry& reg, const TermPtr& t, std::vector<std::string> free_vars);

namespace detail {

inline int var_index(const std::vector<std::string>& xs, const std::string& name) {
  for (size_t i = 0; i < xs.size(); ++i)
    if (xs[i] == name) return static_cast<int>(i) + 1;  // 1-based
  throw std::invalid_argument("unbound free variable: " + name);
}

inline Machine translate_impl(Registry& reg, const TermPtr& t,
                              const std::vector<std::string>& xs) {
  const int n = static_cast<int>(xs.size());
  auto addr_of = [&](const TermPtr& s, const std::vector<std::string>& ys) {
    return reg.intern(translate_impl(reg, s, ys));
  };
  switch (t->kind) {
    case Term::Var:
      return aux_machine(reg, AuxSpec::proj(n, var_index(xs, t->name)));
    case Term::Lam: {
      // wlog the binder is not already among the free variables.
      std::string y = t->name;
      TermPtr body = t->a;
      for (const auto& x : xs)
        if (x == y) {
          std::set<std::string> avoid(xs.begin(), xs.end());
          auto fv = free_vars(body);
          avoid.insert(fv.begin(), fv.end());
          std::string ny = fresh_name(y, avoid);
          body = subst(body, y, mk_var(ny));
          y = ny;
          break;
        }
      std::vector<std::string> ys = xs;
      ys.push_back(y);
      return translate_impl(reg, body, ys);
    }
    case Term::Sub: {
      if (!is_closed(t->b))
        throw std::invalid_argument("explicit substitution argument must be closed");
      std::vector<std::string> ys;
      ys.push_back(t->name);
      ys.insert(ys.end(), xs.begin(), xs.end());
      Machine body = translate_impl(reg, t->a, ys);
      return append_tape(body, {addr_of(t->b, {})});
    }
    case Term::App:
      return append_tape(aux_machine(reg, AuxSpec::appn(n, 2)),
                         {reg.intern(aux_machine(reg, AuxSpec::proj(1, 1))),
                          addr_of(t->a, xs), addr_of(t->b, xs)});
    case Term::Zero:
      return append_tape(aux_machine(reg, AuxSpec::proj(n + 1, 1)), {Address::nat(0)});
    case Term::Pred:
      return append_tape(aux_machine(reg, AuxSpec::appn(n, 1)),
                         {reg.intern(aux_machine(reg, AuxSpec::pred_m())), addr_of(t->a, xs)});
    case Term::Succ:
      return append_tape(aux_machine(reg, AuxSpec::appn(n, 1)),
                         {reg.intern(aux_machine(reg, AuxSpec::succ_m())), addr_of(t->a, xs)});
    case Term::Ifz:
      return append_tape(aux_machine(reg, AuxSpec::appn(n, 3)),
                         {reg.intern(aux_machine(reg, AuxSpec::ifz_m())), addr_of(t->a, xs),
                          addr_of(t->b, xs), addr_of(t->c, xs)});
    case Term::Fix: {
      if (n == 0) return append_tape(y_machine(), {addr_of(t->a, xs)});
      return append_tape(aux_machine(reg, AuxSpec::appn(n, 1)),
                         {Y_ADDRESS, addr_of(t->a, xs)});
    }
  }
  throw std::logic_error("unreachable term kind in translate");
}

}  // namespace detail

inline Machine translate(Registry& reg, const TermPtr& t, std::vector<std::string> xs) {
  for (const auto& v : free_vars(t))
    if (std::find(xs.begin(), xs.end(), v) == xs.end())
      throw std::invalid_argument("free variable " + v + " missing from the variable order");
  return detail::translate_impl(reg, t, xs);
}

// The type of the translated machine: delta_1 -> ... -> delta_n -> alpha for
// the ordered context x1:delta_1 .. xn:delta_n.
inline TypePtr translated_type(const std::vector<std::pair<std::string, TypePtr>>& bindings,
                               const TypePtr& alpha) {
  TypePtr out = alpha;
  for (auto it = bindings.rbegin(); it != bindings.rend(); ++it)
    out = type_arrow(it->second, out);
  return out;
}

// ---------------------------------------------------------------------------
// Convergence witness: a common reduct Z with m1 ->>^len1 Z and
// m2 ->>^len2 Z, found by intersecting the (deterministic) traces.
// ---------------------------------------------------------------------------

struct ConvergenceWitness {
  Machine z;
  uint64_t len1 = 0, len2 = 0;
};

inline std::optional<ConvergenceWitness> convergence_witness(Registry& reg, const Machine& m1,
                                                             const Machine& m2, uint64_t fuel) {
  TraceResult t1 = trace(reg, m1, fuel);
  std::unordered_map<Machine, uint64_t, MachineHash> seen;
  for (size_t i = 0; i < t1.configurations.size(); ++i)
    seen.emplace(t1.configurations[i], static_cast<uint64_t>(i));
  TraceResult t2 = trace(reg, m2, fuel);
  for (size_t j = 0; j < t2.configurations.size(); ++j) {
    auto it = seen.find(t2.configurations[j]);
    if (it != seen.end())
      return ConvergenceWitness{t2.configurations[j], it->second, static_cast<uint64_t>(j)};
  }
  return std::nullopt;
}

}  // namespace eamvm
