#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "hitdyn/semigroup.hpp"

using namespace hitdyn;

namespace {

Eigen::MatrixXd cat() {
  Eigen::MatrixXd m(2, 2);
  m << 2, 1, 1, 1;
  return m;
}

Word random_word(Rng& rng, int kappa, std::size_t len) {
  Word w(len);
  for (auto& s : w) s = 1 + static_cast<int>(rng() % static_cast<std::uint64_t>(kappa));
  return w;
}

GeneratorSystem mixed_circle() {
  return GeneratorSystem({Generator::rotation((std::sqrt(5.0) - 1) / 2), Generator::north_south(0.1)});
}

GeneratorSystem t3() {
  return GeneratorSystem({Generator::translation({std::sqrt(2.0) - 1, std::sqrt(3.0) - 1, std::sqrt(5.0) - 2}),
                          Generator::translation({std::sqrt(7.0) - 2, std::sqrt(11.0) - 3, std::sqrt(13.0) - 3}),
                          Generator::translation({kPi - 3, std::exp(1.0) - 2, std::sqrt(17.0) - 4})});
}

}  // namespace

TEST_CASE("compose oracles") {
  const auto rot = GeneratorSystem({Generator::rotation(0.3)});
  CHECK(compose_along(rot, {}, Point::circle(0.7))[0] == doctest::Approx(0.7));
  CHECK(compose_along(rot, Word(7, 1), Point::circle(0.05))[0] == doctest::Approx(wrap01(0.05 + 7 * 0.3)));

  const auto sys = t3();
  const Point x = Point::torus({0.1, 0.2, 0.3});
  const Point y = compose_along(sys, {1, 2, 3}, x);
  for (int i = 0; i < 3; ++i) {
    double v = x[i];
    for (const auto& g : sys.generators()) v += g.vector()[static_cast<std::size_t>(i)];
    CHECK(circle_dist(y[i], v) < 1e-12);
  }
}

TEST_CASE("compose associativity and inverse") {
  const std::vector<GeneratorSystem> systems{
      mixed_circle(), t3(), GeneratorSystem({Generator::torus_linear(cat())}),
      GeneratorSystem({Generator::sphere_rotation_axis({0, 0, 1}, std::sqrt(2.0) - 1),
                       Generator::sphere_rotation_axis({1, 0, 0}, std::sqrt(3.0) - 1)}),
      GeneratorSystem({Generator::projective_linear(cat()), Generator::projective_linear(cat().inverse())})};
  Rng rng(5);
  for (const auto& sys : systems) {
    CAPTURE(sys.space().name());
    for (int t = 0; t < 200; ++t) {
      const Word w1 = random_word(rng, sys.kappa(), rng() % 26), w2 = random_word(rng, sys.kappa(), rng() % 25);
      Word w = w1;
      w.insert(w.end(), w2.begin(), w2.end());
      const Point x = sample_point(sys.space(), rng);
      const Point a = compose_along(sys, w, x);
      const Point b = compose_along(sys, w2, compose_along(sys, w1, x));
      CHECK(distance(a, b) < 1e-10);
      const double tol = 1e-13 * std::pow(sys.L(), static_cast<double>(w.size()));
      if (sys.space().kind != SpaceKind::Torus && tol < 1e-3) CHECK(distance(compose_inverse(sys, w, a), x) < std::max(tol, 1e-12));
    }
  }
}

TEST_CASE("skew orbit") {
  const auto sys = mixed_circle();
  CHECK(skew_orbit(sys, WordStream(), Point::circle(0.3), 0).points.size() == 1);
  // 0 is fixed by the north-south map
  const auto tr = skew_orbit(sys, WordStream::constant({}, 2), Point::circle(0.0), 50);
  for (const auto& p : tr.points) CHECK(circle_dist(p[0], 0.0) < 1e-15);
}

TEST_CASE("dynamic ball lower containment") {
  const std::vector<GeneratorSystem> systems{mixed_circle(), GeneratorSystem({Generator::torus_linear(cat())})};
  Rng rng(9);
  for (const auto& sys : systems) {
    for (int t = 0; t < 500; ++t) {
      const int n = static_cast<int>(rng() % 21);
      const double eps = 0.2;
      const Word w = random_word(rng, sys.kappa(), static_cast<std::size_t>(n));
      const Point x = sample_point(sys.space(), rng);
      const double r = std::pow(sys.L(), -n) * eps * 0.999;
      const Point y = sample_in_ball(Ball{x, r}, rng);
      CHECK(dyn_ball_member(sys, w, x, eps, y));
    }
  }
  CHECK(dyn_ball_member(mixed_circle(), {1, 2, 1}, Point::circle(0.4), 0.1, Point::circle(0.4)));
}

TEST_CASE("image inner radius") {
  const auto iso = GeneratorSystem({Generator::rotation(0.37)});
  CHECK(image_inner_radius(iso, {1, 1, 1}, Ball{Point::circle(0.2), 0.1}, 0.01) == doctest::Approx(0.1));

  const auto sys = mixed_circle();
  Rng rng(4);
  for (int t = 0; t < 100; ++t) {
    const Point x = sample_point(sys.space(), rng);
    const Ball b{x, 0.1};
    Word w;
    for (int n = 0; n < 12; ++n) {
      const double r = image_inner_radius(sys, w, b, 0.01);
      CHECK(r >= std::pow(sys.L(), -2 * n) * b.radius - 0.01);
      w.push_back(1 + static_cast<int>(rng() % 2));
    }
  }
  // contracting direction: north-south map iterated inside the attractor's basin
  const auto ns = GeneratorSystem({Generator::north_south(0.1)});
  for (double x0 : {-0.1, -0.03, 0.0, 0.05, 0.1}) {
    double prev = 1e9;
    for (std::size_t n = 0; n < 15; ++n) {
      const double r = image_inner_radius(ns, Word(n, 1), Ball{Point::circle(x0), 0.05}, 0.005);
      CHECK(r <= prev + 1e-12);
      prev = r;
    }
  }
}

TEST_CASE("generator audit") {
  const auto a = audit_generators(mixed_circle(), 2000, 1);
  CHECK(a.ok);
  CHECK(a.max_inverse_error < 1e-12);
  CHECK(audit_generators(GeneratorSystem({Generator::torus_linear(cat())}), 2000, 1).ok);
  CHECK_THROWS_AS(GeneratorSystem({Generator::rotation(0.1), Generator::translation({0.1, 0.2})}), Error);
  CHECK_THROWS_AS(mixed_circle().gen(3), Error);
}

TEST_CASE("regions follow the maps") {
  const auto sys = mixed_circle();
  Rng rng(12);
  for (int t = 0; t < 200; ++t) {
    const Ball b{sample_point(sys.space(), rng), 0.05};
    const Word w = random_word(rng, 2, 1 + rng() % 15);
    const Region r = advance(sys, make_region(sys, b), w);
    const double inner = region_inner_radius(r);
    const Point c = region_center(r);
    for (int s = 0; s < 20; ++s) {
      const Point y = sample_in_ball(Ball{c, inner * 0.999}, rng);
      CHECK(distance(compose_inverse(sys, w, y), b.center) < b.radius);
    }
  }
}
