// SPDX-License-Identifier: MIT
#include <catch2/catch_amalgamated.hpp>

#include "corpus.hpp"
#include "eamvm/reverse.hpp"

using namespace eamvm;

namespace {
TypePtr ii() { return type_arrow(type_int(), type_int()); }
}  // namespace

TEST_CASE("reverse of a numeral machine is the numeral") {
  Registry reg;
  ReverseResult rr = reverse_machine(reg, numeral(4), type_int());
  REQUIRE(rr.status == TypeCheckResult::Ok);
  CHECK(alpha_eq(rr.term, mk_numeral(4)));
}

TEST_CASE("reverse of the identity machine is the identity program") {
  Registry reg;
  Machine i = aux_machine(reg, AuxSpec::proj(1, 1));
  ReverseResult rr = reverse_machine(reg, i, ii());
  REQUIRE(rr.status == TypeCheckResult::Ok);
  CHECK(print_term(rr.term) == "\\x0. x0");
}

TEST_CASE("reverse of the Y machine is the fix abstraction") {
  Registry reg;
  TypePtr alpha = type_arrow(ii(), type_int());
  ReverseResult rr = reverse_machine(reg, y_machine(), alpha);
  REQUIRE(rr.status == TypeCheckResult::Ok);
  CHECK(alpha_eq(rr.term, parse_pcf("\\x. fix x")));
}

TEST_CASE("reverse of Succ1 uses the convergence guard") {
  Registry reg;
  ReverseResult rr = reverse_machine(reg, corpus::succ1_machine(), ii());
  REQUIRE(rr.status == TypeCheckResult::Ok);
  CHECK(alpha_eq(rr.term, parse_pcf("\\x0. ifz x0 ((\\x0'. x0') (succ x0)) "
                                    "((\\x0'. x0') (succ x0))")));
}

TEST_CASE("reverse of Succ2 applies the bound register machine") {
  Registry reg;
  ReverseResult rr = reverse_machine(reg, corpus::succ2_machine(reg), ii());
  REQUIRE(rr.status == TypeCheckResult::Ok);
  // (\x0. \x1. (\x1'. (\x1''. x1'') (x0 x1')) (x0 x1)) applied to R[[Succ1]].
  ReverseResult inner = reverse_machine(reg, corpus::succ1_machine(), ii());
  REQUIRE(inner.status == TypeCheckResult::Ok);
  TermPtr outer = parse_pcf("\\x0 x1. (\\y. (\\z. z) (x0 y)) (x0 x1)");
  CHECK(alpha_eq(rr.term, mk_app(outer, inner.term)));
}

TEST_CASE("reverse outputs are closed and re-check at the declared type") {
  Registry reg;
  struct Case {
    Machine m;
    TypePtr ty;
  };
  std::vector<Case> cases = {
      {numeral(7), type_int()},
      {aux_machine(reg, AuxSpec::proj(1, 1)), ii()},
      {corpus::succ1_machine(), ii()},
      {corpus::succ2_machine(reg), ii()},
      {corpus::add_machine(reg), type_arrow(type_int(), ii())},
      {aux_machine(reg, AuxSpec::ifz_m()), type_spine({type_int(), type_int(), type_int()},
                                                      type_int())},
  };
  for (const auto& c : cases) {
    ReverseResult rr = reverse_machine(reg, c.m, c.ty);
    REQUIRE(rr.status == TypeCheckResult::Ok);
    CHECK(is_closed(rr.term));
    CHECK(checks_at({}, rr.term, c.ty));
  }
}

TEST_CASE("reverse fails cleanly on untypable machines") {
  Registry reg;
  using I = Instruction;
  Address ai = reg.intern(aux_machine(reg, AuxSpec::proj(1, 1)));
  Machine delta =
      make_machine({ai, std::nullopt}, make_program({I::app(0, 0, 1), I::call(1)}), {});
  ReverseResult rr = reverse_machine(reg, delta, ii());
  CHECK(rr.status == TypeCheckResult::Failure);
  CHECK_FALSE(rr.error.empty());
}

TEST_CASE("round trip: translate after reverse is observationally the original") {
  Registry reg;
  ArgumentCorpus corpus_args = ArgumentCorpus::standard(reg);
  struct Case {
    Machine m;
    TypePtr ty;
  };
  std::vector<Case> cases = {
      {numeral(7), type_int()},
      {aux_machine(reg, AuxSpec::proj(1, 1)), ii()},
      {corpus::succ1_machine(), ii()},
      {translate(reg, parse_pcf("\\x. succ (succ x)"), {}), ii()},
      {corpus::add_machine(reg), type_arrow(type_int(), ii())},
  };
  for (const auto& c : cases) {
    Verdict v = roundtrip_check(reg, c.m, c.ty, 1000000, corpus_args);
    INFO(v.detail);
    CHECK(v.kind == Verdict::Equivalent);
  }
}
