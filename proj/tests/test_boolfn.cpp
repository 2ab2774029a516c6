#include <cstdint>
#include <vector>

#include "advlab/boolfn.hpp"
#include "advlab/errors.hpp"
#include "doctest.h"

using namespace advlab;

TEST_CASE("bit extraction and reassembly are mutually inverse") {
  for (int n = 1; n <= 6; ++n) {
    for (InputLabel x = 0; x < (1u << n); ++x) {
      std::vector<int> bits(n);
      for (int i = 1; i <= n; ++i) bits[i - 1] = input_bit(x, i);
      CHECK(assemble_bits(bits) == x);
    }
  }
}

TEST_CASE("bit 1 is the least significant bit") {
  CHECK(input_bit(1, 1) == 1);
  CHECK(input_bit(1, 2) == 0);
  // the integer 2 is the string "01": x_1 = 0, x_2 = 1
  CHECK(input_bit(2, 1) == 0);
  CHECK(input_bit(2, 2) == 1);
}

TEST_CASE("block packing puts block 1 in the low bits") {
  // x = (x_1, x_2) with m = 2: x_1 = 3 ("11"), x_2 = 1 ("10") packs to 0b0111
  CHECK(block_of(0b0111, 1, 2) == 3u);
  CHECK(block_of(0b0111, 2, 2) == 1u);
}

TEST_CASE("named functions match their independent definitions") {
  for (int n = 1; n <= 4; ++n) {
    auto f_or = or_function(n);
    auto f_and = and_function(n);
    auto f_par = parity_function(n);
    for (InputLabel x = 0; x < (1u << n); ++x) {
      CHECK(f_or.evaluate(x) == (x != 0 ? 1 : 0));
      CHECK(f_and.evaluate(x) == (x == (1u << n) - 1 ? 1 : 0));
      CHECK(f_par.evaluate(x) == (__builtin_popcount(x) & 1));
    }
  }
  auto maj = majority3();
  for (InputLabel x = 0; x < 8; ++x)
    CHECK(maj.evaluate(x) == (__builtin_popcount(x) >= 2 ? 1 : 0));
  CHECK(identity1().evaluate(0) == 0);
  CHECK(identity1().evaluate(1) == 1);
}

TEST_CASE("or2 on the string 10 is 1") {
  // x = 1 is the string "10" under the bit-1-least-significant convention
  CHECK(or_function(2).evaluate(1) == 1);
}

TEST_CASE("function construction rejects bad input") {
  CHECK_THROWS_AS(BooleanFunction(13, std::vector<std::uint8_t>(1u << 13, 0)), SizeError);
  CHECK_THROWS_AS(BooleanFunction(2, {0, 1, 1}), SizeError);
  CHECK_THROWS_AS(BooleanFunction(1, {0, 2}), DomainError);
  CHECK_THROWS_AS(or_function(2).evaluate(4), DomainError);
}

TEST_CASE("compose_function agrees with a direct reevaluation") {
  auto h = compose_function(or_function(2), and_function(2));
  REQUIRE(h.arity() == 4);
  for (InputLabel x = 0; x < 16; ++x) {
    int b1 = ((x & 1u) != 0 && (x & 2u) != 0) ? 1 : 0;   // AND of bits 1, 2
    int b2 = ((x & 4u) != 0 && (x & 8u) != 0) ? 1 : 0;   // AND of bits 3, 4
    CHECK(h.evaluate(x) == ((b1 || b2) ? 1 : 0));
  }
  // parity of parities is parity of the whole string
  auto pp = compose_function(parity_function(2), parity_function(2));
  for (InputLabel x = 0; x < 16; ++x) CHECK(pp.evaluate(x) == (__builtin_popcount(x) & 1));
}

TEST_CASE("compose_function rejects oversized results") {
  CHECK_THROWS_AS(compose_function(or_function(4), and_function(4)), SizeError);
}

TEST_CASE("tilde consistency with compose_function") {
  auto f = or_function(2);
  for (auto g : {and_function(2), parity_function(2), or_function(3)}) {
    auto h = compose_function(f, g);
    for (InputLabel x = 0; x < h.domain_size(); ++x)
      CHECK(h.evaluate(x) == f.evaluate(tilde(g, x, f.arity())));
  }
}

TEST_CASE("find_one incidence: valid outputs point at set bits, zero row totalized") {
  auto f = find_one_relation(2);
  REQUIRE(f.alphabet() == 2);
  CHECK(f.is_total());
  // row x = 0 was empty before totalization
  CHECK(f.contains(0, 1));
  CHECK(f.contains(0, 2));
  CHECK(f.contains(1, 1));
  CHECK_FALSE(f.contains(1, 2));
  CHECK_FALSE(f.contains(2, 1));
  CHECK(f.contains(2, 2));
  CHECK(f.contains(3, 1));
  CHECK(f.contains(3, 2));
  for (int n = 2; n <= 4; ++n) {
    auto fn = find_one_relation(n);
    for (InputLabel x = 1; x < fn.domain_size(); ++x)
      for (int a = 1; a <= n; ++a) CHECK(fn.contains(x, a) == (input_bit(x, a) == 1));
  }
}

TEST_CASE("totalize only rewrites empty rows") {
  Relation partial(2, 2, {{0, 0}, {1, 0}, {0, 0}, {0, 1}});
  auto total = totalize(partial);
  CHECK(total.is_total());
  CHECK(total.contains(0, 1));
  CHECK(total.contains(0, 2));
  CHECK(total.contains(1, 1));
  CHECK_FALSE(total.contains(1, 2));
  CHECK(total.contains(2, 1));
  CHECK(total.contains(2, 2));
  CHECK_FALSE(total.contains(3, 1));
  CHECK(total.contains(3, 2));
}

TEST_CASE("relation construction rejects bad shapes") {
  CHECK_THROWS_AS(Relation(2, 2, {{1, 0}, {0, 1}}), SizeError);
  CHECK_THROWS_AS(Relation(2, 65, std::vector<std::vector<std::uint8_t>>(
                               4, std::vector<std::uint8_t>(65, 1))),
                  SizeError);
  CHECK_THROWS_AS(Relation(2, 1, {{1}, {2}, {1}, {1}}), DomainError);
}

TEST_CASE("chi vector of find_one matches the hand table") {
  auto f = find_one_relation(2);
  CHECK(chi_vector(f, 1) == std::vector<double>{1, 1, 0, 1});
  CHECK(chi_vector(f, 2) == std::vector<double>{1, 0, 1, 1});
  CHECK_THROWS_AS(chi_vector(f, 3), DomainError);
}

TEST_CASE("relation_slice produces indicator functions") {
  auto f = find_one_relation(2);
  auto s1 = relation_slice(f, 1);
  CHECK(s1.table() == std::vector<std::uint8_t>{1, 1, 0, 1});
  auto s2 = relation_slice(f, 2);
  CHECK(s2.table() == std::vector<std::uint8_t>{1, 0, 1, 1});
}

TEST_CASE("compose_relation commutes with viewing a function as a relation") {
  auto f = or_function(2);
  auto g = and_function(2);
  auto lhs = compose_relation(as_relation(f), g);
  auto rhs = as_relation(compose_function(f, g));
  CHECK(lhs == rhs);
}

TEST_CASE("compose_relation rows follow the outer string") {
  auto f = find_one_relation(2);
  auto g = and_function(2);
  auto h = compose_relation(f, g);
  REQUIRE(h.arity() == 4);
  CHECK(h.is_total());
  for (InputLabel x = 0; x < 16; ++x) {
    InputLabel t = tilde(g, x, 2);
    for (int a = 1; a <= 2; ++a) CHECK(h.contains(x, a) == f.contains(t, a));
  }
}

TEST_CASE("phi vectors equal chi vectors of the composed relation") {
  auto f = find_one_relation(2);
  for (auto g : {and_function(2), parity_function(2)}) {
    auto h = compose_relation(f, g);
    for (int a = 1; a <= f.alphabet(); ++a) CHECK(phi_vector(f, g, a) == chi_vector(h, a));
  }
}

TEST_CASE("as_relation has exactly one valid output per input") {
  auto r = as_relation(majority3());
  CHECK(r.is_total());
  for (InputLabel x = 0; x < 8; ++x) {
    CHECK(r.valid_count(x) == 1);
    CHECK(r.contains(x, majority3().evaluate(x) + 1));
  }
}

TEST_CASE("difference matrices follow the xor of labels") {
  for (int n = 1; n <= 4; ++n)
    for (int i = 1; i <= n; ++i) {
      auto d = difference_matrix(n, i);
      for (InputLabel x = 0; x < (1u << n); ++x)
        for (InputLabel y = 0; y < (1u << n); ++y) {
          double expect = (((x ^ y) >> (i - 1)) & 1u) ? 1.0 : 0.0;
          CHECK(d(x, y) == expect);
        }
    }
  CHECK_THROWS_AS(difference_matrix(3, 4), DomainError);
  CHECK_THROWS_AS(difference_matrix(0, 1), SizeError);
}

TEST_CASE("all_pairs relation accepts everything") {
  auto r = all_pairs_relation(2, 3);
  CHECK(r.is_total());
  for (InputLabel x = 0; x < 4; ++x)
    for (int a = 1; a <= 3; ++a) CHECK(r.contains(x, a));
}
