#include <doctest.h>

#include <cmath>
#include <cstdint>
#include <set>
#include <vector>

#include "sdtl/error.hpp"
#include "sdtl/rng.hpp"

using sdtl::Rng;

TEST_CASE("same seed replays the identical draw sequence") {
  Rng a(42);
  Rng b(42);
  for (int i = 0; i < 1000; ++i) {
    CHECK(a.next_u64() == b.next_u64());
  }
  Rng c(42);
  Rng d(42);
  for (int i = 0; i < 100; ++i) {
    CHECK(c.next_uniform() == d.next_uniform());
    CHECK(c.next_gaussian() == d.next_gaussian());
  }
}

TEST_CASE("different seeds diverge") {
  Rng a(1);
  Rng b(2);
  int same = 0;
  for (int i = 0; i < 64; ++i) {
    if (a.next_u64() == b.next_u64()) ++same;
  }
  CHECK(same == 0);
}

TEST_CASE("named streams are independent of each other") {
  Rng shuffle = Rng::stream(7, "shuffle");
  Rng head = Rng::stream(7, "head_init");
  CHECK(shuffle.next_u64() != head.next_u64());

  // Indexed streams (one per epoch) differ too.
  Rng e0 = Rng::stream(7, "shuffle", 0);
  Rng e1 = Rng::stream(7, "shuffle", 1);
  CHECK(e0.next_u64() != e1.next_u64());

  // And the same (seed, name, index) triple replays identically.
  Rng again = Rng::stream(7, "shuffle", 1);
  Rng again2 = Rng::stream(7, "shuffle", 1);
  for (int i = 0; i < 100; ++i) CHECK(again.next_u64() == again2.next_u64());
}

TEST_CASE("uniform draws live in [0, 1)") {
  Rng rng(3);
  for (int i = 0; i < 10000; ++i) {
    const double u = rng.next_uniform();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
  }
}

TEST_CASE("gaussian draws have roughly standard moments") {
  Rng rng(5);
  const int n = 100000;
  double sum = 0.0;
  double sum_sq = 0.0;
  for (int i = 0; i < n; ++i) {
    const double g = rng.next_gaussian();
    sum += g;
    sum_sq += g * g;
  }
  const double mean = sum / n;
  const double var = sum_sq / n - mean * mean;
  // Law of large numbers: mean within 4 sigma / sqrt(n).
  CHECK(std::fabs(mean) < 4.0 / std::sqrt(static_cast<double>(n)));
  CHECK(var == doctest::Approx(1.0).epsilon(0.05));
}

TEST_CASE("bounded index draws cover the range and respect bounds") {
  Rng rng(11);
  std::set<std::size_t> seen;
  for (int i = 0; i < 1000; ++i) {
    const std::size_t v = rng.next_index(7);
    CHECK(v < 7);
    seen.insert(v);
  }
  CHECK(seen.size() == 7);

  // n = 1 is deterministic.
  for (int i = 0; i < 10; ++i) CHECK(rng.next_index(1) == 0);

  CHECK_THROWS_AS(rng.next_index(0), sdtl::ParameterError);
}
