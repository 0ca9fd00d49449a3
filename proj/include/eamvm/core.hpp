// SPDX-License-Identifier: MIT
//
// Extended addressing machine core: addresses, tapes, register files,
// straight-line programs with their validity relation, machine values, the
// address-table registry (hash consing with a pre-installed knot for the
// fixed-point machine Y), and the application map a·b.

#pragma once

#include <atomic>
#include <cstdint>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

namespace eamvm {

// ---------------------------------------------------------------------------
// Addresses: naturals (numeral machines address themselves) or symbolic
// handles issued by the registry. Handle 0 is permanently reserved for Y.
// ---------------------------------------------------------------------------

struct Address {
  enum Kind : uint8_t { Nat, Sym };
  Kind kind;
  uint64_t value;

  static Address nat(uint64_t n) { return Address{Nat, n}; }
  static Address sym(uint64_t id) { return Address{Sym, id}; }

  bool is_nat() const { return kind == Nat; }

  friend bool operator==(const Address& a, const Address& b) {
    return a.kind == b.kind && a.value == b.value;
  }
  friend bool operator!=(const Address& a, const Address& b) { return !(a == b); }
  friend bool operator<(const Address& a, const Address& b) {
    if (a.kind != b.kind) return a.kind < b.kind;
    return a.value < b.value;
  }
};

inline const Address Y_ADDRESS = Address::sym(0);

using Tape = std::vector<Address>;

inline size_t hash_combine(size_t seed, size_t v) {
  return seed ^ (v + 0x9e3779b97f4a7c15ULL + (seed << 6) + (seed >> 2));
}

inline size_t address_hash(const Address& a) {
  return hash_combine(static_cast<size_t>(a.kind), std::hash<uint64_t>{}(a.value));
}

// ---------------------------------------------------------------------------
// Instructions and programs. Program shape: Load*; (App|Test|Pred|Succ)*; Call?
// ---------------------------------------------------------------------------

struct Instruction {
  enum Op : uint8_t { Load, App, Test, Pred, Succ, Call };
  Op op;
  int i = 0, j = 0, k = 0, l = 0;

  static Instruction load(int i) { return {Load, i, 0, 0, 0}; }
  static Instruction app(int i, int j, int k) { return {App, i, j, k, 0}; }
  static Instruction test(int i, int j, int k, int l) { return {Test, i, j, k, l}; }
  static Instruction pred(int i, int j) { return {Pred, i, j, 0, 0}; }
  static Instruction succ(int i, int j) { return {Succ, i, j, 0, 0}; }
  static Instruction call(int i) { return {Call, i, 0, 0, 0}; }

  friend bool operator==(const Instruction& a, const Instruction& b) {
    return a.op == b.op && a.i == b.i && a.j == b.j && a.k == b.k && a.l == b.l;
  }
};

struct Program {
  std::vector<Instruction> instrs;
  size_t cached_hash = 0;

  explicit Program(std::vector<Instruction> is) : instrs(std::move(is)) {
    size_t h = instrs.size();
    for (const auto& ins : instrs) {
      h = hash_combine(h, static_cast<size_t>(ins.op));
      h = hash_combine(h, static_cast<size_t>(ins.i) | (static_cast<size_t>(ins.j) << 16) |
                              (static_cast<size_t>(ins.k) << 32) |
                              (static_cast<size_t>(ins.l) << 48));
    }
    cached_hash = h;
  }

  friend bool operator==(const Program& a, const Program& b) {
    return a.cached_hash == b.cached_hash && a.instrs == b.instrs;
  }
};

using ProgramPtr = std::shared_ptr<const Program>;

inline ProgramPtr make_program(std::vector<Instruction> instrs) {
  return std::make_shared<const Program>(std::move(instrs));
}

inline ProgramPtr empty_program() {
  static const ProgramPtr p = make_program({});
  return p;
}

// Grammar check: all Loads first, then arithmetic/App, then an optional Call.
inline bool program_grammatical(const Program& p, std::string* why = nullptr) {
  enum Phase { Loads, Ariths, Done } phase = Loads;
  for (size_t n = 0; n < p.instrs.size(); ++n) {
    const Instruction& ins = p.instrs[n];
    switch (ins.op) {
      case Instruction::Load:
        if (phase != Loads) {
          if (why) *why = "Load at position " + std::to_string(n) + " after non-Load";
          return false;
        }
        break;
      case Instruction::App:
      case Instruction::Test:
      case Instruction::Pred:
      case Instruction::Succ:
        if (phase == Done) {
          if (why) *why = "instruction at position " + std::to_string(n) + " after Call";
          return false;
        }
        phase = Ariths;
        break;
      case Instruction::Call:
        if (phase == Done) {
          if (why) *why = "second Call at position " + std::to_string(n);
          return false;
        }
        phase = Done;
        break;
    }
  }
  return true;
}

// ---------------------------------------------------------------------------
// Program validity: the relation I ⊨^r P. Reads require the index to be
// initialized; Pred/Succ/App/Test must write in range; Load past the register
// file is permitted (the loaded value is discarded at run time).
// ---------------------------------------------------------------------------

struct Validity {
  enum Kind { Ok, GrammarViolation, ValidityViolation } kind = Ok;
  size_t position = 0;   // offending instruction index (violations only)
  std::string reason;

  bool ok() const { return kind == Ok; }
};

inline Validity validate_program(const Program& p, size_t num_registers,
                                 std::set<int> initialized) {
  Validity v;
  std::string why;
  if (!program_grammatical(p, &why)) {
    v.kind = Validity::GrammarViolation;
    v.reason = why;
    return v;
  }
  const int r = static_cast<int>(num_registers);
  auto reads = [&](int idx) { return initialized.count(idx) > 0; };
  auto bad = [&](size_t n, const std::string& reason) {
    v.kind = Validity::ValidityViolation;
    v.position = n;
    v.reason = reason;
    return v;
  };
  for (size_t n = 0; n < p.instrs.size(); ++n) {
    const Instruction& ins = p.instrs[n];
    switch (ins.op) {
      case Instruction::Load:
        if (ins.i < r) initialized.insert(ins.i);
        break;
      case Instruction::Pred:
      case Instruction::Succ: {
        const char* name = ins.op == Instruction::Pred ? "Pred" : "Succ";
        if (!reads(ins.i))
          return bad(n, std::string(name) + " reads uninitialized R" + std::to_string(ins.i));
        if (ins.j >= r)
          return bad(n, std::string(name) + " writes non-existent R" + std::to_string(ins.j));
        initialized.insert(ins.j);
        break;
      }
      case Instruction::App:
        if (!reads(ins.i)) return bad(n, "App reads uninitialized R" + std::to_string(ins.i));
        if (!reads(ins.j)) return bad(n, "App reads uninitialized R" + std::to_string(ins.j));
        if (ins.k >= r) return bad(n, "App writes non-existent R" + std::to_string(ins.k));
        initialized.insert(ins.k);
        break;
      case Instruction::Test:
        if (!reads(ins.i)) return bad(n, "Test reads uninitialized R" + std::to_string(ins.i));
        if (!reads(ins.j)) return bad(n, "Test reads uninitialized R" + std::to_string(ins.j));
        if (!reads(ins.k)) return bad(n, "Test reads uninitialized R" + std::to_string(ins.k));
        if (ins.l >= r) return bad(n, "Test writes non-existent R" + std::to_string(ins.l));
        initialized.insert(ins.l);
        break;
      case Instruction::Call:
        if (!reads(ins.i)) return bad(n, "Call reads uninitialized R" + std::to_string(ins.i));
        break;
    }
  }
  return v;
}

// ---------------------------------------------------------------------------
// Machines: immutable (registers, program, tape) values.
// ---------------------------------------------------------------------------

struct Machine {
  std::vector<std::optional<Address>> regs;
  ProgramPtr prog;
  Tape tape;

  friend bool operator==(const Machine& a, const Machine& b) {
    if (a.regs != b.regs || a.tape != b.tape) return false;
    if (a.prog.get() == b.prog.get()) return true;
    return *a.prog == *b.prog;
  }
};

struct MachineHash {
  size_t operator()(const Machine& m) const {
    size_t h = m.prog->cached_hash;
    h = hash_combine(h, m.regs.size());
    for (const auto& r : m.regs) h = hash_combine(h, r ? address_hash(*r) : 0x5eed);
    h = hash_combine(h, m.tape.size());
    for (const auto& a : m.tape) h = hash_combine(h, address_hash(a));
    return h;
  }
};

inline std::set<int> initialized_indices(const Machine& m) {
  std::set<int> s;
  for (size_t i = 0; i < m.regs.size(); ++i)
    if (m.regs[i]) s.insert(static_cast<int>(i));
  return s;
}

// Validated public constructor: rejects exactly the programs the validity
// relation rejects.
inline Machine make_machine(std::vector<std::optional<Address>> regs, ProgramPtr prog, Tape tape) {
  Machine m{std::move(regs), std::move(prog), std::move(tape)};
  Validity v = validate_program(*m.prog, m.regs.size(), initialized_indices(m));
  if (!v.ok())
    throw std::invalid_argument("invalid machine program (at instruction " +
                                std::to_string(v.position) + "): " + v.reason);
  return m;
}

// The n-th numeral machine <R0 = n, eps, []>.
inline Machine numeral(uint64_t n) {
  return Machine{{Address::nat(n)}, empty_program(), {}};
}

inline bool is_numeral_machine(const Machine& m, uint64_t* n = nullptr) {
  if (m.regs.size() != 1 || !m.regs[0] || !m.regs[0]->is_nat()) return false;
  if (!m.prog->instrs.empty() || !m.tape.empty()) return false;
  if (n) *n = m.regs[0]->value;
  return true;
}

// The fixed-point machine Y; its tape holds its own (reserved) address.
inline Machine y_machine() {
  static const ProgramPtr prog =
      make_program({Instruction::load(0), Instruction::load(1), Instruction::app(0, 1, 0),
                    Instruction::app(1, 0, 1), Instruction::call(1)});
  return Machine{{std::nullopt, std::nullopt}, prog, {Y_ADDRESS}};
}

// M@T': same registers and program, tape extended on the right.
inline Machine append_tape(const Machine& m, const Tape& extra) {
  Machine out = m;
  out.tape.insert(out.tape.end(), extra.begin(), extra.end());
  return out;
}

// ---------------------------------------------------------------------------
// Registry: one effective address-table map. Interning is linearizable;
// structurally identical machines share an address, numeral machines address
// themselves, and the Y knot #(Y) = Y_ADDRESS is installed at construction.
// ---------------------------------------------------------------------------

class Registry {
 public:
  Registry() {
    // Install the knot before any user interning: Sym(0) <-> Y.
    backward_.push_back(y_machine());
    forward_.emplace(backward_.back(), 0);
  }

  Address intern(const Machine& m) {
    uint64_t n;
    if (is_numeral_machine(m, &n)) return Address::nat(n);
    std::lock_guard<std::mutex> lock(mu_);
    auto it = forward_.find(m);
    if (it != forward_.end()) return Address::sym(it->second);
    uint64_t id = backward_.size();
    backward_.push_back(m);
    forward_.emplace(backward_.back(), id);
    return Address::sym(id);
  }

  Machine resolve(const Address& a) const {
    if (a.is_nat()) return numeral(a.value);
    std::lock_guard<std::mutex> lock(mu_);
    if (a.value >= backward_.size())
      throw std::out_of_range("dangling address: sym " + std::to_string(a.value));
    return backward_[a.value];
  }

  // The application map a·b = #(⌊a⌋@[b]).
  Address apply(const Address& a, const Address& b) {
    return intern(append_tape(resolve(a), {b}));
  }

  size_t size() const {
    std::lock_guard<std::mutex> lock(mu_);
    return backward_.size();
  }

  // Process-wide default instance.
  static Registry& global() {
    static Registry r;
    return r;
  }

  // Never reused, unlike the object's address; safe as a cache key.
  uint64_t uid() const { return uid_; }

 private:
  static uint64_t next_uid() {
    static std::atomic<uint64_t> counter{0};
    return counter.fetch_add(1);
  }

  const uint64_t uid_ = next_uid();
  mutable std::mutex mu_;
  std::unordered_map<Machine, uint64_t, MachineHash> forward_;
  std::vector<Machine> backward_;
};

}  // namespace eamvm
