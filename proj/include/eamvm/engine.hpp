// SPDX-License-Identifier: MIT
//
// Deterministic small-step operational semantics for extended addressing
// machines, configuration classification (Next / Final / Stuck / Error), and
// fuel-bounded multi-step evaluation with traces.

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "eamvm/core.hpp"

namespace eamvm {

struct StepOutcome {
  enum Kind { Next, Final, Stuck, Error } kind;
  Machine machine;          // successor (Next) or the non-reducing configuration
  std::string diagnostic;   // Error only
};

namespace detail {

// Register write convention R[R_i := a]: out-of-range writes discard a.
inline void set_reg(Machine& m, int idx, const Address& a) {
  if (idx >= 0 && static_cast<size_t>(idx) < m.regs.size()) m.regs[idx] = a;
}

inline const Address& get_reg(const Machine& m, int idx) {
  if (idx < 0 || static_cast<size_t>(idx) >= m.regs.size() || !m.regs[idx])
    throw std::logic_error("read of uninitialized register R" + std::to_string(idx) +
                           " (machine was not validated)");
  return *m.regs[idx];
}

// Drops the first instruction.
inline ProgramPtr program_tail(const ProgramPtr& p) {
  std::vector<Instruction> rest(p->instrs.begin() + 1, p->instrs.end());
  return make_program(std::move(rest));
}

}  // namespace detail

// Performs one step of m. The arithmetic instructions (Pred/Succ/Test) on a
// register holding a non-numeral address advance the resolved machine by one
// inner step, which counts as one outer step; if that inner step yields a
// machine whose address is a numeral, the waiting instruction fires within the
// same outer step (this is the counting under which the translation of the
// numeral n reaches its numeral machine in exactly 4n+2 steps).
inline StepOutcome step(Registry& reg, const Machine& m) {
  using detail::get_reg;
  using detail::program_tail;
  using detail::set_reg;

  if (m.prog->instrs.empty()) return {StepOutcome::Final, m, {}};
  const Instruction ins = m.prog->instrs.front();

  switch (ins.op) {
    case Instruction::Load: {
      if (m.tape.empty()) return {StepOutcome::Stuck, m, {}};
      Machine next = m;
      next.prog = program_tail(m.prog);
      Address a = next.tape.front();
      next.tape.erase(next.tape.begin());
      set_reg(next, ins.i, a);
      return {StepOutcome::Next, std::move(next), {}};
    }

    case Instruction::App: {
      Address c = reg.apply(get_reg(m, ins.i), get_reg(m, ins.j));
      Machine next = m;
      next.prog = program_tail(m.prog);
      set_reg(next, ins.k, c);
      return {StepOutcome::Next, std::move(next), {}};
    }

    case Instruction::Call: {
      Machine target = reg.resolve(get_reg(m, ins.i));
      return {StepOutcome::Next, append_tape(target, m.tape), {}};
    }

    case Instruction::Pred:
    case Instruction::Succ:
    case Instruction::Test: {
      Address scrutinee = get_reg(m, ins.i);
      Machine next = m;
      if (!scrutinee.is_nat()) {
        // Nested reduction: advance the scrutinized machine by one step.
        StepOutcome inner = step(reg, reg.resolve(scrutinee));
        if (inner.kind != StepOutcome::Next)
          return {StepOutcome::Error, m,
                  "arithmetic instruction on non-numeral register R" + std::to_string(ins.i) +
                      " whose machine cannot reduce"};
        Address updated = reg.intern(inner.machine);
        set_reg(next, ins.i, updated);
        if (!updated.is_nat()) return {StepOutcome::Next, std::move(next), {}};
        scrutinee = updated;  // fire the instruction in this same step
      }
      const uint64_t n = scrutinee.value;
      next.prog = program_tail(next.prog);
      switch (ins.op) {
        case Instruction::Pred:
          set_reg(next, ins.j, Address::nat(n == 0 ? 0 : n - 1));
          break;
        case Instruction::Succ:
          set_reg(next, ins.j, Address::nat(n + 1));
          break;
        case Instruction::Test:
          set_reg(next, ins.l, n == 0 ? get_reg(next, ins.j) : get_reg(next, ins.k));
          break;
        default: break;
      }
      return {StepOutcome::Next, std::move(next), {}};
    }
  }
  throw std::logic_error("unreachable instruction opcode");
}

struct RunResult {
  enum Kind { Halted, OutOfFuel, Errored } kind;
  Machine machine;
  uint64_t steps = 0;
  std::string diagnostic;
  StepOutcome::Kind halt_kind = StepOutcome::Final;  // Final or Stuck when Halted
};

inline RunResult run(Registry& reg, Machine m, uint64_t fuel) {
  for (uint64_t k = 0; k <= fuel; ++k) {
    StepOutcome so = step(reg, m);
    switch (so.kind) {
      case StepOutcome::Final:
      case StepOutcome::Stuck:
        return {RunResult::Halted, std::move(so.machine), k, {}, so.kind};
      case StepOutcome::Error:
        return {RunResult::Errored, std::move(so.machine), k, so.diagnostic, so.kind};
      case StepOutcome::Next:
        if (k == fuel) return {RunResult::OutOfFuel, std::move(m), fuel, {}, so.kind};
        m = std::move(so.machine);
        break;
    }
  }
  return {RunResult::OutOfFuel, std::move(m), fuel, {}, StepOutcome::Next};
}

struct TraceResult {
  std::vector<Machine> configurations;  // starts with the initial machine
  RunResult result;
};

inline TraceResult trace(Registry& reg, Machine m, uint64_t fuel) {
  TraceResult tr;
  tr.configurations.push_back(m);
  for (uint64_t k = 0;; ++k) {
    StepOutcome so = step(reg, m);
    switch (so.kind) {
      case StepOutcome::Final:
      case StepOutcome::Stuck:
        tr.result = {RunResult::Halted, std::move(so.machine), k, {}, so.kind};
        return tr;
      case StepOutcome::Error:
        tr.result = {RunResult::Errored, std::move(so.machine), k, so.diagnostic, so.kind};
        return tr;
      case StepOutcome::Next:
        if (k == fuel) {
          tr.result = {RunResult::OutOfFuel, std::move(m), fuel, {}, so.kind};
          return tr;
        }
        m = std::move(so.machine);
        tr.configurations.push_back(m);
        break;
    }
  }
}

}  // namespace eamvm
