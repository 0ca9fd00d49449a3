// SPDX-License-Identifier: MIT
//
// eamvm: command-line driver for the extended-addressing-machine toolkit.
//
// Subcommands: typecheck, eval, translate, reverse, equiv, trace, roundtrip.
// Machines travel as JSON (with a self-contained defs table); PCF and EPCF
// terms use surface syntax. `-` reads stdin. Exit codes: 0 success/equivalent,
// 1 distinguished, 2 fuel or budget exhausted, 64 usage or parse error,
// 65 type error, 70 internal error.

#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "eamvm/core.hpp"
#include "eamvm/engine.hpp"
#include "eamvm/epcf.hpp"
#include "eamvm/equiv.hpp"
#include "eamvm/json_io.hpp"
#include "eamvm/pcf.hpp"
#include "eamvm/reverse.hpp"
#include "eamvm/translate.hpp"
#include "eamvm/types.hpp"
#include "eamvm/typing.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitDistinguished = 1;
constexpr int kExitFuel = 2;
constexpr int kExitUsage = 64;
constexpr int kExitType = 65;
constexpr int kExitInternal = 70;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// `-` = stdin; an existing file path = its contents; anything else = literal.
std::string read_input(const std::string& arg) {
  if (arg == "-") {
    std::ostringstream ss;
    ss << std::cin.rdbuf();
    return ss.str();
  }
  std::ifstream f(arg);
  if (f.good()) {
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
  }
  return arg;
}

bool looks_like_json(const std::string& s) {
  for (char c : s) {
    if (c == ' ' || c == '\t' || c == '\n' || c == '\r') continue;
    return c == '{';
  }
  return false;
}

eamvm::Machine machine_from_text(eamvm::Registry& reg, const std::string& text) {
  nlohmann::json j = nlohmann::json::parse(text);
  return eamvm::machine_from_json(reg, j);
}

uint64_t default_fuel() {
  if (const char* env = std::getenv("EAMVM_FUEL")) {
    try {
      return std::stoull(env);
    } catch (...) {
      throw UsageError("EAMVM_FUEL must be a positive integer");
    }
  }
  return 1000000;
}

void emit(bool json_format, const nlohmann::json& j, const std::string& text) {
  if (json_format)
    std::cout << j.dump() << "\n";
  else
    std::cout << text << "\n";
}

int verdict_exit(const eamvm::Verdict& v) {
  switch (v.kind) {
    case eamvm::Verdict::Equivalent: return kExitOk;
    case eamvm::Verdict::Distinguished: return kExitDistinguished;
    case eamvm::Verdict::Unknown: return kExitFuel;
  }
  return kExitInternal;
}

nlohmann::json verdict_json(eamvm::Registry& reg, const eamvm::Verdict& v) {
  nlohmann::json j;
  j["verdict"] = v.kind == eamvm::Verdict::Equivalent      ? "equivalent"
                 : v.kind == eamvm::Verdict::Distinguished ? "distinguished"
                                                           : "unknown";
  if (v.kind == eamvm::Verdict::Unknown)
    j["reason"] = v.why == eamvm::Verdict::Fuel ? "fuel" : "corpus-limit";
  if (!v.detail.empty()) j["detail"] = v.detail;
  if (!v.witness_args.empty()) {
    nlohmann::json args = nlohmann::json::array();
    for (const auto& a : v.witness_args)
      args.push_back(eamvm::machine_to_json(reg, reg.resolve(a)));
    j["witness_args"] = args;
  }
  if (!v.witness_terms.empty()) {
    nlohmann::json args = nlohmann::json::array();
    for (const auto& t : v.witness_terms) args.push_back(eamvm::print_term(t));
    j["witness_args"] = args;
  }
  return j;
}

int run_cli(int argc, char** argv) {
  using namespace eamvm;

  CLI::App app{"Extended addressing machines: evaluation, typing, translation"};
  app.require_subcommand(1);
  bool json_format = false;
  app.add_flag("--format-json,--json", json_format, "machine-readable output")
      ->configurable(false);
  // Accept `--format json` as well.
  std::string format;
  app.add_option("--format", format, "output format: text or json");

  std::string lang = "pcf";
  std::string input, rhs_input, type_str, vars_csv;
  uint64_t fuel = default_fuel();
  uint64_t budget = 10000;
  uint64_t corpus_max = 8;

  auto add_fuel = [&](CLI::App* cmd) {
    cmd->add_option("--fuel", fuel, "step budget (default 10^6, env EAMVM_FUEL)");
  };

  CLI::App* c_typecheck = app.add_subcommand("typecheck", "infer the type of a term or machine");
  c_typecheck->add_option("--lang", lang, "pcf | epcf | eam");
  c_typecheck->add_option("input", input, "term, machine JSON, file, or -")->required();
  c_typecheck->add_option("--budget", budget, "typing resolution budget");

  CLI::App* c_eval = app.add_subcommand("eval", "evaluate a term or run a machine");
  c_eval->add_option("--lang", lang, "pcf | epcf | eam");
  c_eval->add_option("input", input, "term, machine JSON, file, or -")->required();
  add_fuel(c_eval);

  CLI::App* c_translate = app.add_subcommand("translate", "compile an (E)PCF term to a machine");
  c_translate->add_option("input", input, "term, file, or -")->required();
  c_translate->add_option("--vars", vars_csv, "comma-separated free-variable order");

  CLI::App* c_reverse = app.add_subcommand("reverse", "extract a PCF program from a machine");
  c_reverse->add_option("input", input, "machine JSON, file, or -")->required();
  c_reverse->add_option("--type", type_str, "declared simple type")->required();
  c_reverse->add_option("--budget", budget, "typing resolution budget");

  CLI::App* c_equiv = app.add_subcommand("equiv", "bounded observational equivalence");
  c_equiv->add_option("lhs", input, "machine JSON or PCF term")->required();
  c_equiv->add_option("rhs", rhs_input, "machine JSON or PCF term")->required();
  c_equiv->add_option("--type", type_str, "type at which to compare")->required();
  c_equiv->add_option("--corpus-max", corpus_max, "largest corpus numeral");
  add_fuel(c_equiv);

  CLI::App* c_trace = app.add_subcommand("trace", "print the reduction trace");
  c_trace->add_option("--lang", lang, "pcf | epcf | eam");
  c_trace->add_option("input", input, "term, machine JSON, file, or -")->required();
  add_fuel(c_trace);

  CLI::App* c_roundtrip =
      app.add_subcommand("roundtrip", "translate, reverse, retranslate, compare");
  c_roundtrip->add_option("input", input, "term or machine JSON")->required();
  c_roundtrip->add_option("--type", type_str, "declared simple type")->required();
  c_roundtrip->add_option("--corpus-max", corpus_max, "largest corpus numeral");
  c_roundtrip->add_option("--budget", budget, "typing resolution budget");
  add_fuel(c_roundtrip);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }
  if (format == "json") json_format = true;
  if (!format.empty() && format != "json" && format != "text") {
    std::cerr << "error: --format must be text or json\n";
    return kExitUsage;
  }
  if (lang != "pcf" && lang != "epcf" && lang != "eam") {
    std::cerr << "error: --lang must be pcf, epcf, or eam\n";
    return kExitUsage;
  }

  Registry& reg = Registry::global();
  const std::string text = read_input(input);

  if (*c_typecheck) {
    if (lang == "eam") {
      Machine m = machine_from_text(reg, text);
      InferResult r = infer_type(reg, m, budget);
      if (r.status == TypeCheckResult::BudgetExhausted) {
        emit(json_format, {{"status", "budget-exhausted"}}, "typing budget exhausted");
        return kExitFuel;
      }
      if (r.status != TypeCheckResult::Ok) {
        emit(json_format, {{"status", "ill-typed"}, {"error", r.error}},
             "type error: " + r.error);
        return kExitType;
      }
      emit(json_format, {{"status", "ok"}, {"type", print_type(r.type)}}, print_type(r.type));
      return kExitOk;
    }
    TermPtr t = lang == "pcf" ? parse_pcf(text) : parse_epcf(text);
    std::string err;
    auto ty = lang == "pcf" ? typecheck_pcf({}, t, &err) : typecheck_epcf({}, t, &err);
    if (!ty) {
      emit(json_format, {{"status", "ill-typed"}, {"error", err}}, "type error: " + err);
      return kExitType;
    }
    emit(json_format, {{"status", "ok"}, {"type", print_type(*ty)}}, print_type(*ty));
    return kExitOk;
  }

  if (*c_eval) {
    if (lang == "eam") {
      Machine m = machine_from_text(reg, text);
      RunResult r = run(reg, m, fuel);
      if (r.kind == RunResult::OutOfFuel) {
        emit(json_format, {{"status", "fuel"}}, "out of fuel after " + std::to_string(fuel) +
                                                    " steps");
        return kExitFuel;
      }
      if (r.kind == RunResult::Errored) {
        emit(json_format, {{"status", "error"}, {"error", r.diagnostic}},
             "machine error: " + r.diagnostic);
        return kExitInternal;
      }
      uint64_t n;
      if (is_numeral_machine(r.machine, &n)) {
        emit(json_format,
             {{"status", "ok"}, {"value", n}, {"steps", r.steps}}, std::to_string(n));
      } else {
        nlohmann::json mj = machine_to_json(reg, r.machine);
        emit(json_format, {{"status", "ok"}, {"machine", mj}, {"steps", r.steps}}, mj.dump());
      }
      return kExitOk;
    }
    TermPtr t = lang == "pcf" ? parse_pcf(text) : parse_epcf(text);
    auto value = [&](const TermPtr& v) {
      return lang == "pcf" ? is_pcf_value(v) : is_epcf_value(v);
    };
    uint64_t s = 0;
    while (!value(t)) {
      std::optional<TermPtr> next;
      if (lang == "pcf") {
        next = step_pcf(t);
      } else if (auto w = step_wh(t)) {
        next = w->term;
      }
      if (!next) {
        emit(json_format, {{"status", "stuck"}, {"term", print_term(t)}},
             "no rule applies to: " + print_term(t));
        return kExitInternal;
      }
      t = *next;
      if (++s > fuel) {
        emit(json_format, {{"status", "fuel"}}, "out of fuel after " + std::to_string(fuel) +
                                                    " steps");
        return kExitFuel;
      }
    }
    emit(json_format, {{"status", "ok"}, {"value", print_term(t)}, {"steps", s}}, print_term(t));
    return kExitOk;
  }

  if (*c_translate) {
    TermPtr t = parse_epcf(text);
    std::vector<std::string> xs;
    if (!vars_csv.empty()) {
      std::stringstream ss(vars_csv);
      std::string item;
      while (std::getline(ss, item, ',')) xs.push_back(item);
    } else {
      for (const auto& v : free_vars(t)) xs.push_back(v);  // binder order: sorted for closed use
    }
    Machine m = translate(reg, t, xs);
    std::cout << machine_to_json(reg, m).dump(2) << "\n";
    return kExitOk;
  }

  if (*c_reverse) {
    Machine m = machine_from_text(reg, text);
    TypePtr alpha = parse_type(type_str);
    ReverseResult r = reverse_machine(reg, m, alpha, budget);
    if (r.status == TypeCheckResult::BudgetExhausted) {
      emit(json_format, {{"status", "budget-exhausted"}}, "typing budget exhausted");
      return kExitFuel;
    }
    if (r.status != TypeCheckResult::Ok) {
      emit(json_format, {{"status", "ill-typed"}, {"error", r.error}}, "type error: " + r.error);
      return kExitType;
    }
    emit(json_format, {{"status", "ok"}, {"term", print_term(r.term)}}, print_term(r.term));
    return kExitOk;
  }

  if (*c_equiv) {
    TypePtr alpha = parse_type(type_str);
    const std::string rhs_text = read_input(rhs_input);
    Verdict v;
    if (looks_like_json(text) || looks_like_json(rhs_text)) {
      Machine m1 = machine_from_text(reg, text);
      Machine m2 = machine_from_text(reg, rhs_text);
      v = equiv_at_type(reg, m1, m2, alpha, fuel, ArgumentCorpus::standard(reg, corpus_max));
    } else {
      TermPtr p1 = parse_pcf(text);
      TermPtr p2 = parse_pcf(rhs_text);
      std::string err;
      if (!checks_at({}, p1, alpha) || !checks_at({}, p2, alpha)) {
        std::cerr << "type error: both sides must check at " << type_str << "\n";
        return kExitType;
      }
      v = applicative_equiv_pcf(p1, p2, alpha, fuel, standard_pcf_corpus(corpus_max));
    }
    std::string txt = v.kind == Verdict::Equivalent      ? "equivalent"
                      : v.kind == Verdict::Distinguished ? "distinguished"
                                                         : "unknown";
    if (!v.detail.empty()) txt += " (" + v.detail + ")";
    emit(json_format, verdict_json(reg, v), txt);
    return verdict_exit(v);
  }

  if (*c_trace) {
    if (lang == "eam") {
      Machine m = machine_from_text(reg, text);
      TraceResult tr = trace(reg, m, fuel);
      for (size_t k = 0; k < tr.configurations.size(); ++k) {
        nlohmann::json j = machine_to_json(reg, tr.configurations[k]);
        j["step"] = k;
        std::cout << j.dump() << "\n";
      }
      if (tr.result.kind == RunResult::OutOfFuel) return kExitFuel;
      if (tr.result.kind == RunResult::Errored) {
        std::cerr << "machine error: " << tr.result.diagnostic << "\n";
        return kExitInternal;
      }
      return kExitOk;
    }
    TermPtr t = lang == "pcf" ? parse_pcf(text) : parse_epcf(text);
    uint64_t s = 0;
    while (true) {
      if (json_format)
        std::cout << nlohmann::json{{"step", s}, {"term", print_term(t)}}.dump() << "\n";
      else
        std::cout << print_term(t) << "\n";
      std::optional<TermPtr> next;
      if (lang == "pcf") {
        next = step_pcf(t);
      } else if (auto w = step_wh(t)) {
        next = w->term;
      }
      if (!next) return kExitOk;
      t = *next;
      if (++s > fuel) return kExitFuel;
    }
  }

  if (*c_roundtrip) {
    TypePtr alpha = parse_type(type_str);
    Machine m = looks_like_json(text)
                    ? machine_from_text(reg, text)
                    : translate(reg, parse_epcf(text), {});
    TypeCheckResult tc = check_type(reg, m, alpha, budget);
    if (tc.status == TypeCheckResult::BudgetExhausted) return kExitFuel;
    if (tc.status != TypeCheckResult::Ok) {
      std::cerr << "type error: " << tc.error << "\n";
      return kExitType;
    }
    Verdict v =
        roundtrip_check(reg, m, alpha, fuel, ArgumentCorpus::standard(reg, corpus_max), budget);
    std::string txt = v.kind == Verdict::Equivalent      ? "equivalent"
                      : v.kind == Verdict::Distinguished ? "distinguished"
                                                         : "unknown";
    if (!v.detail.empty()) txt += " (" + v.detail + ")";
    emit(json_format, verdict_json(reg, v), txt);
    return verdict_exit(v);
  }

  return kExitUsage;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run_cli(argc, argv);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "error: bad machine JSON: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::runtime_error& e) {
    // Parser and I/O failures.
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kExitInternal;
  }
}
