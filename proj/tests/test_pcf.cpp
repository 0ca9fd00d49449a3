// SPDX-License-Identifier: MIT
#include <catch2/catch_amalgamated.hpp>

#include "corpus.hpp"
#include "eamvm/pcf.hpp"

using namespace eamvm;

TEST_CASE("parser and printer round-trip") {
  for (const char* src : {"\\x. x", "(\\f x. f (f x)) (\\y. succ y) 2", "ifz 0 1 2",
                          "fix (\\f x. ifz x 0 (f (pred x)))", "pred (succ 3)"}) {
    TermPtr t = parse_pcf(src);
    TermPtr again = parse_pcf(print_term(t));
    CHECK(alpha_eq(t, again));
  }
}

TEST_CASE("numerals print as decimal literals and parse back") {
  CHECK(print_term(mk_numeral(0)) == "0");
  CHECK(print_term(mk_numeral(12)) == "12");
  CHECK(alpha_eq(parse_pcf("12"), mk_numeral(12)));
  CHECK(as_numeral(parse_pcf("succ (succ 0)")) == 2);
  CHECK_FALSE(as_numeral(parse_pcf("succ (pred 0)")).has_value());
}

TEST_CASE("explicit substitution syntax is rejected in PCF, accepted in EPCF") {
  CHECK_THROWS(parse_pcf("x[x := 0]"));
  TermPtr t = parse_epcf("(succ x)[x := 3]");
  REQUIRE(t->kind == Term::Sub);
  CHECK(t->name == "x");
}

TEST_CASE("substitution avoids capture") {
  // (\y. x) [x := y]  must not capture the free y.
  TermPtr t = mk_lam("y", mk_var("x"));
  TermPtr s = subst(t, "x", mk_var("y"));
  REQUIRE(s->kind == Term::Lam);
  CHECK(s->name != "y");
  CHECK(s->a->kind == Term::Var);
  CHECK(s->a->name == "y");
}

TEST_CASE("alpha equivalence") {
  CHECK(alpha_eq(parse_pcf("\\x. x"), parse_pcf("\\y. y")));
  CHECK_FALSE(alpha_eq(parse_pcf("\\x y. x"), parse_pcf("\\x y. y")));
  CHECK_FALSE(alpha_eq(parse_pcf("x"), parse_pcf("y")));  // distinct free variables
  CHECK(alpha_eq(parse_pcf("x"), parse_pcf("x")));
}

TEST_CASE("type inference on canonical programs") {
  auto ty = typecheck_pcf({}, parse_pcf("\\x. x"));
  REQUIRE(ty);
  CHECK(print_type(*ty) == "int -> int");  // unconstrained variables default to int

  ty = typecheck_pcf({}, parse_pcf("\\x. succ (succ x)"));
  REQUIRE(ty);
  CHECK(print_type(*ty) == "int -> int");

  ty = typecheck_pcf({}, parse_pcf(corpus::kAddSrc));
  REQUIRE(ty);
  CHECK(print_type(*ty) == "int -> int -> int");

  ty = typecheck_pcf({}, parse_pcf("\\f x. f (f x)"));
  REQUIRE(ty);
  CHECK(print_type(*ty) == "(int -> int) -> int -> int");
}

TEST_CASE("type errors are reported") {
  std::string err;
  CHECK_FALSE(typecheck_pcf({}, parse_pcf("0 0"), &err));
  CHECK_FALSE(err.empty());
  CHECK_FALSE(typecheck_pcf({}, parse_pcf("succ (\\x. x)")));
  CHECK_FALSE(typecheck_pcf({}, parse_pcf("x")));  // unbound
}

TEST_CASE("checks_at accepts exactly the declared instances") {
  TypePtr ii = type_arrow(type_int(), type_int());
  CHECK(checks_at({}, parse_pcf("\\x. x"), ii));
  CHECK(checks_at({}, parse_pcf("\\x. x"), type_arrow(ii, ii)));  // polymorphic instance
  CHECK_FALSE(checks_at({}, parse_pcf("\\x. succ x"), type_arrow(ii, ii)));
  CHECK(checks_at({}, parse_pcf("fix (\\x. x)"), type_int()));
}

TEST_CASE("small-step weak-head reduction") {
  TermPtr t = parse_pcf("(\\x. succ (succ x)) 3");
  uint64_t steps = 0;
  while (!is_pcf_value(t)) {
    auto n = step_pcf(t);
    REQUIRE(n);
    t = *n;
    REQUIRE(++steps < 100);
  }
  CHECK(as_numeral(t) == 5);
}

TEST_CASE("succ of a numeral is a value; pred computes on numerals") {
  CHECK(is_pcf_value(parse_pcf("succ 0")));
  CHECK_FALSE(step_pcf(parse_pcf("succ 1")).has_value());
  CHECK(as_numeral(*step_pcf(parse_pcf("pred 0"))) == 0);
  CHECK(as_numeral(*step_pcf(parse_pcf("pred 5"))) == 4);
}

TEST_CASE("big-step evaluation matches the small-step result on the corpus") {
  for (const auto& src : corpus::int_programs()) {
    TermPtr t = parse_pcf(src);
    EvalResult big = eval_pcf_big(t, 1000000);
    REQUIRE(big.kind == EvalResult::Value);
    TermPtr small = t;
    uint64_t fuel = 1000000;
    while (!is_pcf_value(small) && fuel--) {
      auto n = step_pcf(small);
      REQUIRE(n);
      small = *n;
    }
    REQUIRE(is_pcf_value(small));
    CHECK(alpha_eq(big.value, small));
  }
}

TEST_CASE("big-step runs out of fuel on divergence") {
  CHECK(eval_pcf_big(parse_pcf("fix (\\x. x)"), 1000).kind == EvalResult::OutOfFuel);
}
