#include "pru/parse.hpp"
#include "pru/semantics.hpp"

#include <doctest.h>
#include <nlohmann/json.hpp>

using namespace pru;

namespace {
Tuple tup(std::initializer_list<long> xs) {
  Tuple t;
  for (long x : xs)
    t.emplace_back(x);
  return t;
}
} // namespace

TEST_CASE("initial functions") {
  CHECK(eval(Term::z(), tup({5})) == tup({0}));
  CHECK(eval(Term::s(), tup({3})) == tup({4}));
  CHECK(eval(Term::proj(3, 2), tup({7, 8, 9})) == tup({8}));
}

TEST_CASE("composition order is inner first") {
  // comp(z, s): s then z.
  CHECK(eval(Term::comp(Term::z(), Term::s()), tup({3})) == tup({0}));
  // comp(s, z): z then s.
  CHECK(eval(Term::comp(Term::s(), Term::z()), tup({3})) == tup({1}));
}

TEST_CASE("pair concatenates blocks in order") {
  CHECK(eval(Term::pair(Term::s(), Term::z()), tup({2})) == tup({3, 0}));
  CHECK(eval(parse("(pair (pi 2 2) (pi 2 1))"), tup({4, 9})) == tup({9, 4}));
}

TEST_CASE("recursion on the last coordinate") {
  // add(x, n) = x + n
  Term add = parse("(rec (pi 1 1) (comp s (pi 2 2)))");
  for (long x = 0; x <= 6; ++x)
    for (long n = 0; n <= 6; ++n)
      CHECK(eval(add, tup({x, n})) == tup({x + n}));

  // mul(x, n) = x * n, built on add: the step receives (x, acc) and must
  // return x + acc, which is add itself.
  Term mul = parse("(rec z (rec (pi 1 1) (comp s (pi 2 2))))");
  CHECK(mul.arity() == Arity{2, 1});
  for (long x = 0; x <= 5; ++x)
    for (long n = 0; n <= 5; ++n)
      CHECK(eval(mul, tup({x, n})) == tup({x * n}));
}

TEST_CASE("macros evaluate as documented") {
  CHECK(eval(identity(3), tup({4, 5, 6})) == tup({4, 5, 6}));
  CHECK(eval(diagonal(2), tup({3, 8})) == tup({3, 8, 3, 8}));
  // twist(a, b) swaps the blocks: (u, v) -> (v, u).
  CHECK(eval(twist(1, 2), tup({1, 20, 21})) == tup({20, 21, 1}));
  CHECK(eval(twist(2, 1), tup({10, 11, 2})) == tup({2, 10, 11}));
  CHECK(eval(product(Term::s(), Term::z()), tup({4, 9})) == tup({5, 0}));
  CHECK(eval(multi_proj(3, {3, 3, 1}), tup({6, 7, 8})) == tup({8, 8, 6}));
}

TEST_CASE("input validation") {
  CHECK_THROWS_AS(eval(Term::s(), tup({1, 2})), ArityMismatch);
  CHECK_THROWS_AS(eval(Term::proj(2, 1), tup({1})), ArityMismatch);
  Tuple neg;
  neg.emplace_back(-3);
  CHECK_THROWS_AS(eval(Term::s(), neg), Error);
}

TEST_CASE("step budget trips on long recursions") {
  Term add = parse("(rec (pi 1 1) (comp s (pi 2 2)))");
  Budget tiny;
  tiny.max_steps = 20;
  CHECK_THROWS_AS(eval(add, tup({1, 1000}), tiny), BudgetExceeded);
  // The same call passes with the default budget.
  CHECK(eval(add, tup({1, 1000})) == tup({1001}));
}

TEST_CASE("magnitude budget bounds intermediate values") {
  Budget narrow;
  narrow.max_magnitude_bits = 4; // values must stay below 16
  CHECK(eval(Term::s(), tup({14}), narrow) == tup({15}));
  CHECK_THROWS_AS(eval(Term::s(), tup({15}), narrow), BudgetExceeded);
  CHECK_THROWS_AS(eval(Term::z(), tup({16}), narrow), BudgetExceeded);
}

TEST_CASE("big values survive through text") {
  Nat big("123456789012345678901234567890");
  CHECK(nat_to_string(big) == "123456789012345678901234567890");
  Tuple in;
  in.push_back(big);
  CHECK(eval(Term::s(), in)[0] == big + 1);
}

TEST_CASE("fingerprint odometer order") {
  Fingerprint fp = fingerprint(Term::proj(2, 2), 2);
  CHECK(fp.arity == Arity{2, 1});
  REQUIRE(fp.table.size() == 4);
  CHECK_FALSE(fp.partial);
  // Inputs (0,0), (0,1), (1,0), (1,1): rightmost coordinate fastest.
  CHECK(*fp.table[0] == tup({0}));
  CHECK(*fp.table[1] == tup({1}));
  CHECK(*fp.table[2] == tup({0}));
  CHECK(*fp.table[3] == tup({1}));
}

TEST_CASE("fingerprint equality and json") {
  Term add = parse("(rec (pi 1 1) (comp s (pi 2 2)))");
  Term add_flip = Term::comp(add, twist(1, 1));
  CHECK(semantically_equal_on(add, add_flip, 4));
  CHECK_FALSE(semantically_equal_on(Term::z(), Term::s(), 3));
  CHECK_THROWS_AS(semantically_equal_on(Term::s(), identity(2), 3),
                  ArityMismatch);

  nlohmann::json j = fingerprint_json(fingerprint(Term::s(), 3));
  CHECK(j["arity"] == nlohmann::json({1, 1}));
  CHECK(j["grid"] == 3);
  CHECK(j["partial"] == false);
  CHECK(j["table"].size() == 3);
  CHECK(j["table"][2][0] == 3);
}

TEST_CASE("partial fingerprints mark failed cells") {
  Term add = parse("(rec (pi 1 1) (comp s (pi 2 2)))");
  Budget tiny;
  // One step per node visit: add costs 2 + 3y, so grid 3 needs up to 8.
  tiny.max_steps = 6;
  Fingerprint fp = fingerprint(add, 3, tiny);
  CHECK(fp.partial);
  bool some_null = false, some_value = false;
  for (const auto &cell : fp.table)
    (cell ? some_value : some_null) = true;
  CHECK(some_null);
  CHECK(some_value);
  // Identical failures compare equal; a full fingerprint never equals a
  // partial one.
  CHECK(fp == fingerprint(add, 3, tiny));
  CHECK_FALSE(fp == fingerprint(add, 3));
}

TEST_CASE("fingerprint grid validation") {
  CHECK_THROWS_AS(fingerprint(Term::s(), 0), SpecError);
}
