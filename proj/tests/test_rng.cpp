#include <doctest.h>

#include <cmath>
#include <vector>

#include "bfpp/rng.hpp"

using namespace bfpp;

TEST_CASE("same seed reproduces the stream over 1e6 draws") {
  Rng a(42), b(42);
  for (int i = 0; i < 1000000; ++i) REQUIRE(a.next_u64() == b.next_u64());
}

TEST_CASE("different seeds and streams differ") {
  Rng a(1), b(2), c(1, 1);
  CHECK(a.next_u64() != b.next_u64());
  Rng a2(1);
  CHECK(a2.next_u64() != c.next_u64());
}

TEST_CASE("state round-trip resumes identically") {
  Rng a(7);
  for (int i = 0; i < 17; ++i) a.normal();  // leave a spare cached
  Rng b = Rng::from_state(a.state());
  for (int i = 0; i < 100; ++i) CHECK(a.normal() == b.normal());
}

TEST_CASE("uniform stays inside the open interval") {
  Rng r(3);
  for (int i = 0; i < 100000; ++i) {
    const double u = r.uniform();
    REQUIRE(u > 0.0);
    REQUIRE(u < 1.0);
  }
}

TEST_CASE("normal moments") {
  Rng r(11);
  const int n = 200000;
  double s = 0.0, ss = 0.0;
  for (int i = 0; i < n; ++i) {
    const double x = r.normal();
    s += x;
    ss += x * x;
  }
  const double mean = s / n;
  const double var = ss / n - mean * mean;
  CHECK(std::abs(mean) < 4.0 / std::sqrt(static_cast<double>(n)));
  CHECK(std::abs(var - 1.0) < 0.02);
}

TEST_CASE("forked streams are deterministic and distinct") {
  Rng parent(5);
  Rng c1 = parent.fork(0), c2 = parent.fork(1), c1b = parent.fork(0);
  CHECK(c1.next_u64() == c1b.next_u64());
  Rng c1c = parent.fork(0);
  CHECK(c1c.next_u64() != c2.next_u64());
}

TEST_CASE("categorical draw respects weights") {
  Rng r(9);
  std::vector<double> w = {1.0, 3.0};
  int ones = 0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) ones += sample_categorical(r, w) == 1 ? 1 : 0;
  CHECK(std::abs(ones / static_cast<double>(n) - 0.75) < 0.01);
}
