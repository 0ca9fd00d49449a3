// SPDX-License-Identifier: MIT
#include <catch2/catch_amalgamated.hpp>

#include "corpus.hpp"
#include "eamvm/engine.hpp"
#include "eamvm/translate.hpp"
#include "eamvm/typing.hpp"

using namespace eamvm;

TEST_CASE("aux machine construction and memoization") {
  Registry reg;
  Machine i1 = aux_machine(reg, AuxSpec::proj(1, 1));
  Machine i2 = aux_machine(reg, AuxSpec::proj(1, 1));
  CHECK(i1 == i2);
  CHECK(reg.intern(i1) == reg.intern(i2));
  CHECK(aux_machine(reg, AuxSpec::appn(0, 3)) == i1);  // AppN(0,k) = Proj(1,1)
  CHECK_THROWS_AS(AuxSpec::appn(1, 0), std::invalid_argument);
  CHECK_THROWS_AS(AuxSpec::proj(2, 3), std::invalid_argument);
}

TEST_CASE("translation of the identity is the first projection") {
  Registry reg;
  CHECK(translate(reg, parse_pcf("\\x. x"), {}) == aux_machine(reg, AuxSpec::proj(1, 1)));
}

TEST_CASE("translation of Omega is Y applied to the identity projection") {
  Registry reg;
  Machine omega = translate(reg, parse_pcf("fix (\\x. x)"), {});
  Address i = reg.intern(aux_machine(reg, AuxSpec::proj(1, 1)));
  CHECK(omega == append_tape(y_machine(), {i}));
  CHECK(omega == aux_machine(reg, AuxSpec::fix_approx(0)));
}

TEST_CASE("free variables must appear in the declared order") {
  Registry reg;
  CHECK_THROWS_AS(translate(reg, parse_pcf("x"), {}), std::invalid_argument);
  CHECK(translate(reg, parse_pcf("x"), {"x"}) == aux_machine(reg, AuxSpec::proj(1, 1)));
  CHECK(translate(reg, parse_pcf("y"), {"x", "y"}) == aux_machine(reg, AuxSpec::proj(2, 2)));
}

TEST_CASE("projection machines dispatch in exactly k+1 steps") {
  Registry reg;
  Address d[4] = {Address::nat(10), Address::nat(11), reg.intern(y_machine()), Address::nat(13)};
  for (int k = 1; k <= 4; ++k)
    for (int i = 1; i <= k; ++i) {
      Machine m = append_tape(aux_machine(reg, AuxSpec::proj(k, i)), Tape(d, d + k));
      TraceResult tr = trace(reg, m, 100);
      REQUIRE(tr.configurations.size() > static_cast<size_t>(k + 1));
      CHECK(tr.configurations[k + 1] == reg.resolve(d[i - 1]));
    }
}

TEST_CASE("applicator machines dispatch in exactly (3k+4)n+2 steps") {
  Registry reg;
  Address a = reg.intern(corpus::succ1_machine());
  for (int n = 0; n <= 3; ++n)
    for (int k = 1; k <= 3; ++k) {
      Tape args = {a};
      std::vector<Address> d, e;
      for (int t = 0; t < k; ++t) d.push_back(Address::nat(100 + t));
      for (int t = 0; t < n; ++t) e.push_back(Address::nat(200 + t));
      args.insert(args.end(), d.begin(), d.end());
      args.insert(args.end(), e.begin(), e.end());
      Machine m = append_tape(aux_machine(reg, AuxSpec::appn(n, k)), args);
      const size_t steps = static_cast<size_t>((3 * k + 4) * n + 2);
      TraceResult tr = trace(reg, m, steps + 10);
      REQUIRE(tr.configurations.size() > steps);
      Tape dispatched;
      for (const Address& di : d) {
        Address acc = di;
        for (const Address& ei : e) acc = reg.apply(acc, ei);
        dispatched.push_back(acc);
      }
      CHECK(tr.configurations[steps] == append_tape(reg.resolve(a), dispatched));
    }
}

TEST_CASE("Ifz reaches the Test configuration in exactly 3 steps") {
  Registry reg;
  using Ins = Instruction;
  Address a = Address::nat(0), b = Address::nat(5), c = Address::nat(9);
  Machine m = append_tape(aux_machine(reg, AuxSpec::ifz_m()), {a, b, c});
  TraceResult tr = trace(reg, m, 10);
  Machine expected =
      make_machine({a, b, c}, make_program({Ins::test(0, 1, 2, 0), Ins::call(0)}), {});
  REQUIRE(tr.configurations.size() > 3);
  CHECK(tr.configurations[3] == expected);
}

TEST_CASE("translated numerals reduce to numeral machines in exactly 4n+2 steps") {
  Registry reg;
  for (uint64_t n = 0; n <= 10; ++n) {
    Machine m = translate(reg, mk_numeral(n), {});
    RunResult r = run(reg, m, 10000);
    REQUIRE(r.kind == RunResult::Halted);
    CHECK(r.machine == numeral(n));
    CHECK(r.steps == 4 * n + 2);
  }
}

TEST_CASE("fix approximants: bounded adequacy towards Y") {
  Registry reg;
  // N = \f x. ifz x 0 (succ (f (pred x))): triangle-free simple recursion.
  Address nf = reg.intern(translate(reg, parse_pcf("\\f x. ifz x 0 (f (pred x))"), {}));
  for (int m = 1; m <= 4; ++m) {
    Machine approx =
        append_tape(aux_machine(reg, AuxSpec::fix_approx(m)), {nf, Address::nat(m - 1)});
    RunResult ra = run(reg, approx, 200000);
    if (ra.kind != RunResult::Halted) continue;
    uint64_t n_res;
    if (!is_numeral_machine(ra.machine, &n_res)) continue;
    Machine full = append_tape(y_machine(), {nf, Address::nat(m - 1)});
    RunResult rf = run(reg, full, 200000);
    REQUIRE(rf.kind == RunResult::Halted);
    CHECK(rf.machine == ra.machine);
  }
}

TEST_CASE("translated type folds the context onto the result") {
  CHECK(type_eq(translated_type({}, type_int()), type_int()));
  CHECK(print_type(translated_type({{"x", type_int()}}, type_int())) == "int -> int");
  CHECK(print_type(translated_type({{"x", type_int()}, {"f", type_arrow(type_int(), type_int())}},
                                   type_int())) == "int -> (int -> int) -> int");
}

TEST_CASE("translation preserves typing on corpus programs") {
  Registry reg;
  for (const char* src : {"\\x. x", "\\x. succ (succ x)", corpus::kAddSrc,
                          "(\\x. succ (succ x)) 3", "ifz 0 5 (fix (\\x. x))"}) {
    TermPtr t = parse_pcf(src);
    auto ty = typecheck_pcf({}, t);
    REQUIRE(ty);
    Machine m = translate(reg, t, {});
    CHECK(check_type(reg, m, *ty).status == TypeCheckResult::Ok);
  }
}

TEST_CASE("convergence witness: identical machines meet at distance zero") {
  Registry reg;
  Machine m = translate(reg, parse_pcf("succ 3"), {});
  auto w = convergence_witness(reg, m, m, 1000);
  REQUIRE(w);
  CHECK(w->len1 == 0);
  CHECK(w->len2 == 0);
}

TEST_CASE("convergence witness shrinks along a source step") {
  Registry reg;
  TermPtr m_term = parse_pcf("(\\x. succ x) 2");
  auto s = step_pcf(m_term);
  REQUIRE(s);
  Machine m1 = translate(reg, m_term, {});
  Machine m2 = translate(reg, *s, {});
  auto w = convergence_witness(reg, m1, m2, 100000);
  REQUIRE(w);
  CHECK(w->len1 > w->len2);
}
