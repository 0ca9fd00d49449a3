// SPDX-License-Identifier: MIT
//
// Machine interchange format:
//   {"regs":[null|addr,...], "prog":[{"op":"Load","i":0},...], "tape":[addr,...],
//    "defs":{"<id>": machine, ...}}
// where addr = {"nat": n} | {"sym": id}. Sym ids are file-local; the defs
// table makes dumps self-contained. The only permitted cycle among defs is
// the fixed-point machine's knot (a def that is the Y machine referencing its
// own id), which imports to the reserved Y address.

#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "eamvm/core.hpp"

namespace eamvm {

namespace detail {

inline nlohmann::json addr_to_json(const Address& a,
                                   const std::map<uint64_t, uint64_t>& sym_to_file) {
  if (a.is_nat()) return nlohmann::json{{"nat", a.value}};
  return nlohmann::json{{"sym", sym_to_file.at(a.value)}};
}

inline nlohmann::json instr_to_json(const Instruction& ins) {
  switch (ins.op) {
    case Instruction::Load: return {{"op", "Load"}, {"i", ins.i}};
    case Instruction::App: return {{"op", "App"}, {"i", ins.i}, {"j", ins.j}, {"k", ins.k}};
    case Instruction::Test:
      return {{"op", "Test"}, {"i", ins.i}, {"j", ins.j}, {"k", ins.k}, {"l", ins.l}};
    case Instruction::Pred: return {{"op", "Pred"}, {"i", ins.i}, {"j", ins.j}};
    case Instruction::Succ: return {{"op", "Succ"}, {"i", ins.i}, {"j", ins.j}};
    case Instruction::Call: return {{"op", "Call"}, {"i", ins.i}};
  }
  throw std::logic_error("unreachable instruction opcode");
}

inline nlohmann::json machine_body_to_json(const Machine& m,
                                           const std::map<uint64_t, uint64_t>& sym_to_file) {
  nlohmann::json regs = nlohmann::json::array();
  for (const auto& r : m.regs) {
    if (r) regs.push_back(addr_to_json(*r, sym_to_file));
    else regs.push_back(nullptr);
  }
  nlohmann::json prog = nlohmann::json::array();
  for (const auto& ins : m.prog->instrs) prog.push_back(instr_to_json(ins));
  nlohmann::json tape = nlohmann::json::array();
  for (const auto& a : m.tape) tape.push_back(addr_to_json(a, sym_to_file));
  return {{"regs", regs}, {"prog", prog}, {"tape", tape}};
}

inline void collect_syms(Registry& reg, const Machine& m, std::set<uint64_t>& out) {
  auto visit = [&](const Address& a) {
    if (a.is_nat() || out.count(a.value)) return;
    out.insert(a.value);
    collect_syms(reg, reg.resolve(a), out);
  };
  for (const auto& r : m.regs)
    if (r) visit(*r);
  for (const auto& a : m.tape) visit(a);
}

}  // namespace detail

inline nlohmann::json machine_to_json(Registry& reg, const Machine& m) {
  std::set<uint64_t> syms;
  detail::collect_syms(reg, m, syms);
  std::map<uint64_t, uint64_t> sym_to_file;
  uint64_t next = 0;
  for (uint64_t s : syms) sym_to_file[s] = next++;
  nlohmann::json root = detail::machine_body_to_json(m, sym_to_file);
  if (!syms.empty()) {
    nlohmann::json defs = nlohmann::json::object();
    for (uint64_t s : syms)
      defs[std::to_string(sym_to_file[s])] =
          detail::machine_body_to_json(reg.resolve(Address::sym(s)), sym_to_file);
    root["defs"] = defs;
  }
  return root;
}

namespace detail {

// A machine whose sym addresses still carry file-local meaning.
struct RawMachine {
  std::vector<std::optional<Address>> regs;
  std::vector<Instruction> prog;
  Tape tape;
};

inline Address addr_from_json(const nlohmann::json& j) {
  if (j.contains("nat")) return Address::nat(j.at("nat").get<uint64_t>());
  if (j.contains("sym")) return Address::sym(j.at("sym").get<uint64_t>());
  throw std::runtime_error("address must be {\"nat\": n} or {\"sym\": id}");
}

inline Instruction instr_from_json(const nlohmann::json& j) {
  const std::string op = j.at("op").get<std::string>();
  auto f = [&](const char* k) { return j.at(k).get<int>(); };
  if (op == "Load") return Instruction::load(f("i"));
  if (op == "App") return Instruction::app(f("i"), f("j"), f("k"));
  if (op == "Test") return Instruction::test(f("i"), f("j"), f("k"), f("l"));
  if (op == "Pred") return Instruction::pred(f("i"), f("j"));
  if (op == "Succ") return Instruction::succ(f("i"), f("j"));
  if (op == "Call") return Instruction::call(f("i"));
  throw std::runtime_error("unknown instruction op '" + op + "'");
}

inline RawMachine raw_from_json(const nlohmann::json& j) {
  RawMachine raw;
  for (const auto& r : j.at("regs")) {
    if (r.is_null()) raw.regs.push_back(std::nullopt);
    else raw.regs.push_back(addr_from_json(r));
  }
  for (const auto& ins : j.at("prog")) raw.prog.push_back(instr_from_json(ins));
  for (const auto& a : j.at("tape")) raw.tape.push_back(addr_from_json(a));
  return raw;
}

inline void raw_syms(const RawMachine& raw, std::set<uint64_t>& out) {
  for (const auto& r : raw.regs)
    if (r && !r->is_nat()) out.insert(r->value);
  for (const auto& a : raw.tape)
    if (!a.is_nat()) out.insert(a.value);
}

// Is this def the Y machine whose tape holds its own file-local id?
inline bool is_y_def(const RawMachine& raw, uint64_t self_id) {
  Machine y = y_machine();
  if (raw.regs != y.regs || raw.prog != y.prog->instrs) return false;
  return raw.tape.size() == 1 && raw.tape[0] == Address::sym(self_id);
}

inline Machine raw_to_machine(const RawMachine& raw,
                              const std::map<uint64_t, Address>& file_to_addr) {
  auto fix = [&](const Address& a) -> Address {
    if (a.is_nat()) return a;
    auto it = file_to_addr.find(a.value);
    if (it == file_to_addr.end())
      throw std::runtime_error("undefined sym id " + std::to_string(a.value));
    return it->second;
  };
  std::vector<std::optional<Address>> regs;
  for (const auto& r : raw.regs) regs.push_back(r ? std::optional<Address>(fix(*r)) : std::nullopt);
  Tape tape;
  for (const auto& a : raw.tape) tape.push_back(fix(a));
  return make_machine(std::move(regs), make_program(raw.prog), std::move(tape));
}

}  // namespace detail

inline Machine machine_from_json(Registry& reg, const nlohmann::json& j) {
  std::map<uint64_t, detail::RawMachine> defs;
  if (j.contains("defs"))
    for (const auto& [key, val] : j.at("defs").items())
      defs.emplace(std::stoull(key), detail::raw_from_json(val));
  detail::RawMachine root = detail::raw_from_json(j);

  std::map<uint64_t, Address> file_to_addr;
  for (const auto& [id, raw] : defs)
    if (detail::is_y_def(raw, id)) file_to_addr.emplace(id, Y_ADDRESS);

  // Intern defs bottom-up; anything still unresolved at a fixpoint is an
  // unsupported cycle.
  bool progress = true;
  while (progress) {
    progress = false;
    for (const auto& [id, raw] : defs) {
      if (file_to_addr.count(id)) continue;
      std::set<uint64_t> needs;
      detail::raw_syms(raw, needs);
      bool ready = true;
      for (uint64_t s : needs)
        if (!file_to_addr.count(s) && !(s == id)) ready = false;
      if (!ready) continue;
      if (needs.count(id))
        throw std::runtime_error("cyclic defs entry " + std::to_string(id) +
                                 " (only the Y machine knot is permitted)");
      file_to_addr.emplace(id, reg.intern(detail::raw_to_machine(raw, file_to_addr)));
      progress = true;
    }
  }
  for (const auto& [id, raw] : defs)
    if (!file_to_addr.count(id))
      throw std::runtime_error("cyclic defs involving entry " + std::to_string(id) +
                               " (only the Y machine knot is permitted)");
  return detail::raw_to_machine(root, file_to_addr);
}

}  // namespace eamvm
