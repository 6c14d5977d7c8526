#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "hitdyn/spaces.hpp"

using namespace hitdyn;

TEST_CASE("shift distance oracles") {
  const auto a = WordStream::constant({1, 1, 1, 1}, 1);
  CHECK(shift_distance(a, a) == 0.0);
  CHECK(shift_distance(a, WordStream::constant({1, 2}, 1)) == doctest::Approx(std::exp(-1.0)));
  CHECK(shift_distance(a, WordStream::constant({1, 1, 1, 2}, 1)) == doctest::Approx(0.049787).epsilon(1e-5));
  // index 0 is not seen by the metric
  CHECK(shift_distance(a, WordStream::constant({2, 1, 1, 1}, 1)) == 0.0);
}

TEST_CASE("shift distance law: d < e^-k iff agreement on 1..k") {
  Rng rng(3);
  for (int t = 0; t < 2000; ++t) {
    const auto a = WordStream::random({}, 2, rng());
    Word pa = a.take(12);
    const std::size_t flip = 1 + rng() % 10;
    Word pb = pa;
    pb[flip] = 3 - pb[flip];
    const auto b = WordStream::random(pb, 2, rng());
    const double d = shift_distance(a, b);
    for (std::size_t k = 1; k <= 11; ++k) {
      const bool agree = k < flip;
      CHECK((d < std::exp(-static_cast<double>(k)) * (1 - 1e-12)) == agree);
    }
  }
}

TEST_CASE("distance oracles") {
  CHECK(distance(Point::circle(0.1), Point::circle(0.9)) == doctest::Approx(0.2));
  CHECK(distance(Point::projective({1, 0, 0}), Point::projective({-1, 0, 0})) == doctest::Approx(0.0));
  CHECK(distance(Point::projective({1, 0, 0}), Point::projective({0, 1, 0})) == doctest::Approx(kPi / 2));
  CHECK_THROWS_AS(distance(Point::circle(0.1), Point::torus({0.1, 0.2})), Error);
}

TEST_CASE("metric axioms on random triples") {
  const std::vector<Space> spaces{Space::circle(), Space::torus(2), Space::torus(3), Space::sphere2(),
                                  Space::projective(2), Space::projective(3), Space::symbolic(2)};
  for (const auto& sp : spaces) {
    CAPTURE(sp.name());
    Rng rng(11);
    int bad = 0;
    for (int t = 0; t < 10000; ++t) {
      const Point x = sample_point(sp, rng), y = sample_point(sp, rng), z = sample_point(sp, rng);
      const double xy = distance(x, y), yx = distance(y, x), xz = distance(x, z), zy = distance(z, y);
      if (distance(x, x) > 1e-12 || std::abs(xy - yx) > 1e-12 || xy > xz + zy + 1e-12 || xy < 0) ++bad;
    }
    CHECK(bad == 0);
  }
}

TEST_CASE("nets") {
  const auto c = build_net(Space::circle(), 0.25, 1);
  CHECK(c.size() >= 4);
  const auto t = build_net(Space::torus(2), 0.5, 1);
  CHECK(t.size() <= 9);
  for (const auto& sp : {Space::circle(), Space::torus(2), Space::torus(3), Space::sphere2(), Space::projective(3)}) {
    CAPTURE(sp.name());
    const double delta = 0.3;
    const auto net = build_net(sp, delta, 5);
    CHECK(net_density_audit(sp, net, 1000, 9) < delta);
  }
  CHECK_THROWS_AS(build_net(Space::torus(4), 1e-4, 1, NetOptions{1000, -1}), Error);
}

TEST_CASE("word streams") {
  const auto p = WordStream::periodic({3}, {1, 2});
  CHECK(p.take(5) == Word{3, 1, 2, 1, 2});
  CHECK(p.shifted(2).take(3) == Word{2, 1, 2});
  const auto r1 = WordStream::random({}, 3, 42), r2 = WordStream::random({}, 3, 42);
  CHECK(r1.take(100) == r2.take(100));
  for (Symbol s : r1.take(1000)) CHECK((s >= 1 && s <= 3));
  std::size_t start = 0, period = 0;
  CHECK(p.eventually_periodic(start, period));
  CHECK(period == 2);
  CHECK(WordStream().take(3) == Word{1, 1, 1});
}
