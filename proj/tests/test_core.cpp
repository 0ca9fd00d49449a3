// SPDX-License-Identifier: MIT
#include <catch2/catch_amalgamated.hpp>

#include "eamvm/core.hpp"

using namespace eamvm;
using I = Instruction;

TEST_CASE("program grammar: loads, then arithmetic, then one optional call") {
  CHECK(program_grammatical(*make_program({})));
  CHECK(program_grammatical(*make_program({I::load(0), I::call(0)})));
  CHECK(program_grammatical(
      *make_program({I::load(0), I::load(1), I::app(0, 1, 0), I::pred(0, 0), I::call(0)})));
  CHECK_FALSE(program_grammatical(*make_program({I::app(0, 1, 0), I::load(0)})));
  CHECK_FALSE(program_grammatical(*make_program({I::call(0), I::call(0)})));
  CHECK_FALSE(program_grammatical(*make_program({I::call(0), I::pred(0, 0)})));
}

TEST_CASE("validity examples with R0 = 7, R1 = a, R2 = empty (r = 3)") {
  const std::set<int> init = {0, 1};
  const size_t r = 3;
  // P1 = Pred 0 2; Call 2                       (valid)
  CHECK(validate_program(*make_program({I::pred(0, 2), I::call(2)}), r, init).ok());
  // P2 = Load (2,8); Ifz 0 1 2 0; Call 0        (valid: Load 8 is discarded)
  CHECK(validate_program(
            *make_program({I::load(2), I::load(8), I::test(0, 1, 2, 0), I::call(0)}), r, init)
            .ok());
  // P3 = Load (0,2,8); Call 8                   (calls the non-existent R8)
  CHECK_FALSE(
      validate_program(*make_program({I::load(0), I::load(2), I::load(8), I::call(8)}), r, init)
          .ok());
  // P4 = Succ 2 0; Call 1                       (reads the uninitialized R2)
  CHECK_FALSE(validate_program(*make_program({I::succ(2, 0), I::call(1)}), r, init).ok());
  // P5 = Pred 0 4; Call 0                       (stores in the non-existent R4)
  CHECK_FALSE(validate_program(*make_program({I::pred(0, 4), I::call(0)}), r, init).ok());
}

TEST_CASE("make_machine rejects invalid programs") {
  CHECK_THROWS_AS(make_machine({std::nullopt}, make_program({I::call(0)}), {}),
                  std::invalid_argument);
  CHECK_THROWS_AS(
      make_machine({Address::nat(7)}, make_program({I::pred(0, 4), I::call(0)}), {}),
      std::invalid_argument);
  CHECK_NOTHROW(make_machine({Address::nat(7)}, make_program({I::pred(0, 0), I::call(0)}), {}));
}

TEST_CASE("numeral machines") {
  Machine m = numeral(42);
  uint64_t n = 0;
  CHECK(is_numeral_machine(m, &n));
  CHECK(n == 42);
  CHECK_FALSE(is_numeral_machine(y_machine()));
  CHECK_FALSE(is_numeral_machine(append_tape(numeral(1), {Address::nat(0)})));
}

TEST_CASE("registry: numerals address themselves, Y holds the reserved knot") {
  Registry reg;
  CHECK(reg.intern(numeral(5)) == Address::nat(5));
  CHECK(reg.intern(y_machine()) == Y_ADDRESS);
  CHECK(reg.resolve(Y_ADDRESS) == y_machine());
  CHECK(reg.resolve(Address::nat(9)) == numeral(9));
}

TEST_CASE("registry: interning is idempotent and resolve inverts intern") {
  Registry reg;
  Machine m = make_machine({std::nullopt}, make_program({I::load(0), I::call(0)}), {});
  Address a = reg.intern(m);
  CHECK(reg.intern(m) == a);
  CHECK(reg.resolve(a) == m);
  CHECK_FALSE(a.is_nat());
  CHECK_THROWS_AS(reg.resolve(Address::sym(999)), std::out_of_range);
}

TEST_CASE("application map appends to the tape of the resolved machine") {
  Registry reg;
  Machine i = make_machine({std::nullopt}, make_program({I::load(0), I::call(0)}), {});
  Address ai = reg.intern(i);
  Address applied = reg.apply(ai, Address::nat(3));
  CHECK(reg.resolve(applied) == append_tape(i, {Address::nat(3)}));
  // Applying again extends the same tape on the right.
  Address twice = reg.apply(applied, Address::nat(4));
  CHECK(reg.resolve(twice).tape == Tape{Address::nat(3), Address::nat(4)});
}
