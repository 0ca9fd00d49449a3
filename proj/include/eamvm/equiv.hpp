// SPDX-License-Identifier: MIT
//
// Bounded observational-equivalence checking: exact comparison at int (up to
// fuel, with configuration-revisit detection turning "still running" into
// "provably divergent"), comparison at higher types over a finite typed
// argument corpus, and the matching applicative equivalence for PCF programs.

#pragma once

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <unordered_set>
#include <vector>

#include "eamvm/core.hpp"
#include "eamvm/engine.hpp"
#include "eamvm/epcf.hpp"
#include "eamvm/pcf.hpp"
#include "eamvm/translate.hpp"
#include "eamvm/types.hpp"

namespace eamvm {

struct Verdict {
  enum Kind { Equivalent, Distinguished, Unknown } kind = Unknown;
  enum Why { None, Fuel, CorpusLimit } why = None;
  std::string detail;                   // human-readable explanation
  Tape witness_args;                    // distinguishing machine arguments, if any
  std::vector<TermPtr> witness_terms;   // distinguishing PCF arguments, if any
};

// ---------------------------------------------------------------------------
// Observing a machine at type int.
// ---------------------------------------------------------------------------

struct IntOutcome {
  enum Kind { Numeral, Divergent, FuelOut, Other } kind;
  uint64_t value = 0;    // Numeral
  Machine final_config;  // Other (Final at a non-numeral, or Stuck)
};

inline IntOutcome observe_int(Registry& reg, Machine m, uint64_t fuel,
                              size_t revisit_cap = 100000) {
  std::unordered_set<Machine, MachineHash> seen;
  for (uint64_t s = 0;; ++s) {
    if (seen.size() < revisit_cap && !seen.insert(m).second)
      return {IntOutcome::Divergent, 0, std::move(m)};
    if (s == fuel) return {IntOutcome::FuelOut, 0, std::move(m)};
    StepOutcome so = step(reg, m);
    switch (so.kind) {
      case StepOutcome::Final: {
        uint64_t n;
        if (is_numeral_machine(so.machine, &n)) return {IntOutcome::Numeral, n, so.machine};
        return {IntOutcome::Other, 0, so.machine};
      }
      case StepOutcome::Stuck:
        return {IntOutcome::Other, 0, so.machine};
      case StepOutcome::Error:
        throw std::logic_error("internal invariant violation: typed machine hit an error state: " +
                               so.diagnostic);
      case StepOutcome::Next:
        m = std::move(so.machine);
        break;
    }
  }
}

inline Verdict equiv_int(Registry& reg, const Machine& m1, const Machine& m2, uint64_t fuel) {
  IntOutcome o1 = observe_int(reg, m1, fuel);
  IntOutcome o2 = observe_int(reg, m2, fuel);
  auto show = [](const IntOutcome& o) -> std::string {
    switch (o.kind) {
      case IntOutcome::Numeral: return "numeral " + std::to_string(o.value);
      case IntOutcome::Divergent: return "divergent (configuration revisited)";
      case IntOutcome::FuelOut: return "still running at fuel";
      case IntOutcome::Other: return "halted at a non-numeral configuration";
    }
    return "?";
  };
  Verdict v;
  v.detail = "left: " + show(o1) + "; right: " + show(o2);
  if (o1.kind == IntOutcome::FuelOut || o2.kind == IntOutcome::FuelOut) {
    // One side halting while the other merely ran out of fuel cannot soundly
    // distinguish them (the slow side might still converge to the same value).
    v.kind = Verdict::Unknown;
    v.why = Verdict::Fuel;
    return v;
  }
  if (o1.kind == IntOutcome::Numeral && o2.kind == IntOutcome::Numeral) {
    v.kind = o1.value == o2.value ? Verdict::Equivalent : Verdict::Distinguished;
    return v;
  }
  if (o1.kind == IntOutcome::Divergent && o2.kind == IntOutcome::Divergent) {
    v.kind = Verdict::Equivalent;
    return v;
  }
  if ((o1.kind == IntOutcome::Numeral && o2.kind == IntOutcome::Divergent) ||
      (o1.kind == IntOutcome::Divergent && o2.kind == IntOutcome::Numeral)) {
    v.kind = Verdict::Distinguished;  // convergence vs proven divergence
    return v;
  }
  // A halt at a non-numeral configuration should not occur for machines typed
  // at int; report it conservatively.
  v.kind = o1.kind == o2.kind && o1.final_config == o2.final_config ? Verdict::Equivalent
                                                                    : Verdict::Unknown;
  return v;
}

// ---------------------------------------------------------------------------
// Typed argument corpus: closed typed machines, keyed by printed type.
// ---------------------------------------------------------------------------

class ArgumentCorpus {
 public:
  void add(const TypePtr& ty, const Address& a) { by_type_[print_type(ty)].push_back(a); }

  const std::vector<Address>* at(const TypePtr& ty) const {
    auto it = by_type_.find(print_type(ty));
    return it == by_type_.end() ? nullptr : &it->second;
  }

  // Numerals, translations of canonical PCF programs, and the diverging
  // translation of Omega at int; enough to separate every pair the tests need.
  static ArgumentCorpus standard(Registry& reg, uint64_t max_numeral = 8) {
    ArgumentCorpus c;
    TypePtr i = type_int();
    TypePtr ii = type_arrow(i, i);
    TypePtr iii = type_arrow(i, ii);
    for (uint64_t n = 0; n <= max_numeral; ++n) c.add(i, Address::nat(n));
    c.add(i, reg.intern(aux_machine(reg, AuxSpec::fix_approx(0))));  // T[[Omega]]
    auto t = [&](const char* src) { return reg.intern(translate(reg, parse_pcf(src), {})); };
    c.add(ii, t("\\x. x"));
    c.add(ii, t("\\x. 0"));
    c.add(ii, t("\\x. 5"));
    c.add(ii, t("\\x. succ x"));
    c.add(ii, t("\\x. succ (succ x)"));
    c.add(ii, t("\\x. pred x"));
    c.add(iii, t("\\x y. x"));
    c.add(iii, t("\\x y. y"));
    c.add(iii, t("fix (\\f x y. ifz y x (f (succ x) (pred y)))"));  // addition
    TypePtr fi = type_arrow(ii, i);
    c.add(fi, t("\\f. f 0"));
    c.add(fi, t("\\f. f (f 1)"));
    c.add(type_arrow(ii, ii), t("\\f x. f (f x)"));
    return c;
  }

 private:
  std::map<std::string, std::vector<Address>> by_type_;
};

// ---------------------------------------------------------------------------
// Equivalence at alpha = beta_1 -> ... -> beta_k -> int over the corpus.
// ---------------------------------------------------------------------------

inline Verdict equiv_at_type(Registry& reg, const Machine& m1, const Machine& m2,
                             const TypePtr& alpha, uint64_t fuel, const ArgumentCorpus& corpus) {
  std::vector<TypePtr> doms = type_domains(alpha);
  std::vector<const std::vector<Address>*> pools;
  for (const auto& d : doms) {
    const auto* p = corpus.at(d);
    if (!p || p->empty()) {
      Verdict v;
      v.kind = Verdict::Unknown;
      v.why = Verdict::CorpusLimit;
      v.detail = "no corpus arguments at type " + print_type(d);
      return v;
    }
    pools.push_back(p);
  }
  bool saw_unknown = false;
  Verdict unknown_v;
  std::vector<size_t> idx(doms.size(), 0);
  while (true) {
    Tape args;
    for (size_t d = 0; d < doms.size(); ++d) args.push_back((*pools[d])[idx[d]]);
    Verdict v = equiv_int(reg, append_tape(m1, args), append_tape(m2, args), fuel);
    if (v.kind == Verdict::Distinguished) {
      v.witness_args = args;
      return v;
    }
    if (v.kind == Verdict::Unknown && !saw_unknown) {
      saw_unknown = true;
      v.witness_args = args;
      unknown_v = v;
    }
    // Odometer over the argument tuple space.
    size_t d = 0;
    for (; d < idx.size(); ++d) {
      if (++idx[d] < pools[d]->size()) break;
      idx[d] = 0;
    }
    if (d == idx.size()) break;
    if (idx.empty()) break;
  }
  if (saw_unknown) return unknown_v;
  Verdict ok;
  ok.kind = Verdict::Equivalent;
  ok.detail = doms.empty() ? "" : "relative to the argument corpus";
  return ok;
}

// ---------------------------------------------------------------------------
// Applicative equivalence for PCF programs, mirroring equiv_at_type.
// ---------------------------------------------------------------------------

struct PcfOutcome {
  enum Kind { Numeral, Divergent, FuelOut, Other } kind;
  uint64_t value = 0;
};

inline PcfOutcome observe_pcf_int(TermPtr t, uint64_t fuel, size_t revisit_cap = 100000) {
  std::unordered_set<std::string> seen;
  for (uint64_t s = 0;; ++s) {
    if (auto n = as_numeral(t)) return {PcfOutcome::Numeral, *n};
    if (seen.size() < revisit_cap && !seen.insert(print_term(t)).second)
      return {PcfOutcome::Divergent, 0};
    if (s == fuel) return {PcfOutcome::FuelOut, 0};
    auto next = step_pcf(t);
    if (!next) return {PcfOutcome::Other, 0};
    t = *next;
  }
}

using PcfCorpus = std::map<std::string, std::vector<TermPtr>>;  // printed type -> programs

inline PcfCorpus standard_pcf_corpus(uint64_t max_numeral = 8) {
  PcfCorpus c;
  TypePtr i = type_int();
  TypePtr ii = type_arrow(i, i);
  for (uint64_t n = 0; n <= max_numeral; ++n) c[print_type(i)].push_back(mk_numeral(n));
  c[print_type(i)].push_back(parse_pcf("fix (\\x. x)"));  // diverging at int
  auto add = [&](const TypePtr& ty, const char* src) {
    c[print_type(ty)].push_back(parse_pcf(src));
  };
  add(ii, "\\x. x");
  add(ii, "\\x. 0");
  add(ii, "\\x. succ x");
  add(ii, "\\x. succ (succ x)");
  add(ii, "\\x. pred x");
  add(type_arrow(i, ii), "\\x y. x");
  add(type_arrow(i, ii), "fix (\\f x y. ifz y x (f (succ x) (pred y)))");
  add(type_arrow(ii, i), "\\f. f 0");
  add(type_arrow(ii, ii), "\\f x. f (f x)");
  return c;
}

inline Verdict applicative_equiv_pcf(const TermPtr& p1, const TermPtr& p2, const TypePtr& alpha,
                                     uint64_t fuel, const PcfCorpus& corpus) {
  std::vector<TypePtr> doms = type_domains(alpha);
  std::vector<const std::vector<TermPtr>*> pools;
  for (const auto& d : doms) {
    auto it = corpus.find(print_type(d));
    if (it == corpus.end() || it->second.empty()) {
      Verdict v;
      v.kind = Verdict::Unknown;
      v.why = Verdict::CorpusLimit;
      v.detail = "no corpus arguments at type " + print_type(d);
      return v;
    }
    pools.push_back(&it->second);
  }
  bool saw_unknown = false;
  Verdict unknown_v;
  std::vector<size_t> idx(doms.size(), 0);
  while (true) {
    std::vector<TermPtr> args;
    TermPtr a1 = p1, a2 = p2;
    for (size_t d = 0; d < doms.size(); ++d) {
      args.push_back((*pools[d])[idx[d]]);
      a1 = mk_app(a1, args.back());
      a2 = mk_app(a2, args.back());
    }
    PcfOutcome o1 = observe_pcf_int(a1, fuel);
    PcfOutcome o2 = observe_pcf_int(a2, fuel);
    Verdict v;
    if (o1.kind == PcfOutcome::FuelOut || o2.kind == PcfOutcome::FuelOut) {
      v.kind = Verdict::Unknown;
      v.why = Verdict::Fuel;
    } else if (o1.kind == PcfOutcome::Numeral && o2.kind == PcfOutcome::Numeral) {
      v.kind = o1.value == o2.value ? Verdict::Equivalent : Verdict::Distinguished;
      if (v.kind == Verdict::Distinguished)
        v.detail = "outputs " + std::to_string(o1.value) + " vs " + std::to_string(o2.value);
    } else if (o1.kind == o2.kind) {
      v.kind = Verdict::Equivalent;
    } else {
      v.kind = Verdict::Distinguished;
      v.detail = "one side converges, the other provably diverges";
    }
    if (v.kind == Verdict::Distinguished) {
      v.witness_terms = args;
      return v;
    }
    if (v.kind == Verdict::Unknown && !saw_unknown) {
      saw_unknown = true;
      v.witness_terms = args;
      unknown_v = v;
    }
    size_t d = 0;
    for (; d < idx.size(); ++d) {
      if (++idx[d] < pools[d]->size()) break;
      idx[d] = 0;
    }
    if (d == idx.size()) break;
    if (idx.empty()) break;
  }
  if (saw_unknown) return unknown_v;
  Verdict ok;
  ok.kind = Verdict::Equivalent;
  ok.detail = doms.empty() ? "" : "relative to the argument corpus";
  return ok;
}

}  // namespace eamvm
