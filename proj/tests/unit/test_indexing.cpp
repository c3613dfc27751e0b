#include <doctest.h>

#include "starlocal/indexing.hpp"

using namespace starlocal;

TEST_SUITE("indexing") {

TEST_CASE("radix product") {
  CHECK(radix_product({}) == 1);
  CHECK(radix_product({2, 2, 2}) == 8);
  CHECK(radix_product({3, 2, 5}) == 30);
  CHECK_THROWS_AS(radix_product({2, 0}), ArgumentError);
  CHECK_THROWS_AS(radix_product(std::vector<std::size_t>(70, 2)), SizeError);
}

TEST_CASE("digits round trip, first digit most significant") {
  const std::vector<std::size_t> radices{3, 2, 4};
  std::vector<std::size_t> d;
  digits_of(13, radices, d);  // 13 = (1*2 + 1)*4 + 1
  CHECK(d == std::vector<std::size_t>{1, 1, 1});
  digits_of(23, radices, d);
  CHECK(d == std::vector<std::size_t>{2, 1, 3});
  for (std::size_t i = 0; i < 24; ++i) {
    digits_of(i, radices, d);
    for (std::size_t k = 0; k < radices.size(); ++k) CHECK(d[k] < radices[k]);
    CHECK(index_of(d, radices) == i);
  }
}

}  // TEST_SUITE
