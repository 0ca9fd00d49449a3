// SPDX-License-Identifier: MIT
#include <catch2/catch_amalgamated.hpp>

#include "corpus.hpp"
#include "eamvm/epcf.hpp"

using namespace eamvm;

TEST_CASE("program predicate: closed terms with closed substitution arguments") {
  CHECK(is_epcf_program(parse_epcf("(succ x)[x := 3]")));
  CHECK_FALSE(is_epcf_program(parse_epcf("succ x")));
  CHECK_FALSE(is_epcf_program(parse_epcf("(\\y. (succ x)[x := y]) 1")));  // open sub argument
}

TEST_CASE("beta steps into an explicit substitution (cr)") {
  TermPtr t = parse_epcf("(\\x. succ x) 3");
  auto s = step_wh(t);
  REQUIRE(s);
  CHECK(s->tag == WhStep::Cr);
  CHECK(alpha_eq(s->term, parse_epcf("(succ x)[x := 3]")));
}

TEST_CASE("percolation distributes the whole spine in one step (pr)") {
  TermPtr t = parse_epcf("(succ x)[x := 1][y := 2]");
  auto s = step_wh(t);
  REQUIRE(s);
  CHECK(s->tag == WhStep::Pr);
  CHECK(alpha_eq(s->term, parse_epcf("succ (x[x := 1][y := 2])")));
}

TEST_CASE("variable lookup and garbage collection (pr)") {
  auto s = step_wh(parse_epcf("x[x := 4]"));
  REQUIRE(s);
  CHECK(s->tag == WhStep::Pr);
  CHECK(alpha_eq(s->term, mk_numeral(4)));

  // y not in the domain: the spine is dropped.
  TermPtr t = mk_sub(mk_var("y"), "x", mk_numeral(1));
  s = step_wh(t);
  REQUIRE(s);
  CHECK(s->tag == WhStep::Pr);
  CHECK(alpha_eq(s->term, mk_var("y")));
}

TEST_CASE("values: numerals, and abstractions under a spine") {
  CHECK(is_epcf_value(parse_epcf("3")));
  CHECK(is_epcf_value(parse_epcf("\\x. x")));
  CHECK(is_epcf_value(parse_epcf("(\\x. y)[y := 0]")));
  CHECK_FALSE(is_epcf_value(parse_epcf("(succ x)[x := 0]")));
  CHECK_FALSE(is_epcf_value(parse_epcf("0[x := 0]")));  // still percolates to 0
}

TEST_CASE("head size is multiplicative in substitution spines") {
  CHECK(head_size(parse_epcf("x")) == 1);
  CHECK(head_size(parse_epcf("succ x")) == 2);
  // <M<x:=N>> = <M> * (<N> + 1): here <succ x> = 2 and <1> = succ 0 has size 2.
  CHECK(head_size(parse_epcf("(succ x)[x := 1]")) == 2 * (2 + 1));
  CHECK(head_size(parse_epcf("ifz x y z")) == 2);  // only the scrutinee counts
}

TEST_CASE("percolation strictly decreases head size") {
  TermPtr t = parse_epcf("((\\x y. ifz x y (succ y)) 2) 5");
  uint64_t guard = 0;
  while (auto s = step_wh(t)) {
    if (s->tag == WhStep::Pr) CHECK(head_size(s->term) < head_size(t));
    t = s->term;
    REQUIRE(++guard < 1000);
  }
}

TEST_CASE("collapse performs all explicit substitutions") {
  CHECK(alpha_eq(collapse(parse_epcf("(succ x)[x := 3]")), parse_pcf("succ 3")));
  CHECK(alpha_eq(collapse(parse_epcf("(x y)[x := \\z. z][y := 0]")),
                 parse_pcf("(\\z. z) 0")));
  // Identity on PCF terms.
  TermPtr p = parse_pcf("fix (\\f x. ifz x 0 (f (pred x)))");
  CHECK(alpha_eq(collapse(p), p));
}

TEST_CASE("cr steps track step_pcf on collapses; pr steps leave them fixed") {
  TermPtr t = parse_epcf("((\\f x. f (f x)) (\\y. succ y)) 2");
  uint64_t guard = 0;
  while (auto s = step_wh(t)) {
    if (s->tag == WhStep::Cr) {
      auto p = step_pcf(collapse(t));
      REQUIRE(p);
      CHECK(alpha_eq(*p, collapse(s->term)));
    } else {
      CHECK(alpha_eq(collapse(t), collapse(s->term)));
    }
    t = s->term;
    REQUIRE(++guard < 1000);
  }
  CHECK(as_numeral(collapse(t)) == 4);
}

TEST_CASE("big-step evaluation agrees with iterated weak-head steps") {
  for (const char* src : {"((\\x y. ifz x y (succ y)) 0) 7", "(\\x. pred x)[z := 9] 4",
                          "(succ (succ x))[x := 1]", "(\\f. f 3) ((\\y. \\z. succ z) 0)"}) {
    TermPtr t = parse_epcf(src);
    EvalResult big = eval_epcf_big(t, 100000);
    REQUIRE(big.kind == EvalResult::Value);
    TermPtr small = t;
    uint64_t fuel = 100000;
    while (!is_epcf_value(small) && fuel--) {
      auto s = step_wh(small);
      REQUIRE(s);
      small = s->term;
    }
    CHECK(alpha_eq(collapse(big.value), collapse(small)));
  }
}

TEST_CASE("typecheck_epcf types substitution arguments in the empty context") {
  CHECK(typecheck_epcf({}, parse_epcf("(succ x)[x := 3]")));
  CHECK_FALSE(typecheck_epcf({}, parse_epcf("(succ x)[x := \\y. y]")));
  CHECK_FALSE(typecheck_pcf({}, parse_epcf("(succ x)[x := 3]")));  // not PCF
}
