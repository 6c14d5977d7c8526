#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "hitdyn/hitting.hpp"
#include "presets.hpp"

using namespace hitdyn;

namespace {
const GeneratorSystem& golden() {
  static const GeneratorSystem g = presets::load("golden-rotation").system;
  return g;
}
}  // namespace

TEST_CASE("golden rotation certificate") {
  const auto r = certify_frequent_hitting(golden(), 0.1, 64, 0.0125, 1);
  REQUIRE(r.certified);
  CHECK(r.certificate.K <= 31);
  CHECK(r.certificate.translation_reduced);
  std::size_t i = 0;
  for (const auto& w : r.certificate.witnesses) {
    CHECK(verify_witness(golden(), r.certificate, w, 16, ++i));
    CHECK(static_cast<int>(w.word.size()) <= r.certificate.K);
  }
}

TEST_CASE("K(eps) nonincreasing in eps") {
  int prev = 1 << 30;
  for (double eps : {0.05, 0.08, 0.1, 0.15, 0.2, 0.3}) {
    const auto r = certify_frequent_hitting(golden(), eps, 200, eps / 8, 1);
    REQUIRE(r.certified);
    CHECK(r.certificate.K <= prev);
    CHECK(r.certificate.K <= static_cast<int>(std::floor(3 / eps)) + 1);
    prev = r.certificate.K;
  }
}

TEST_CASE("sufficiency: K(eps) <= covering time at eps/3 for an isometric sub-action") {
  for (double eps : {0.2, 0.1, 0.05}) {
    const auto h = certify_frequent_hitting(golden(), eps, 200, eps / 8, 1);
    const auto c = covering_time(golden(), {1}, eps / 3, 400, eps / 24);
    REQUIRE(h.certified);
    REQUIRE(c.covered);
    CHECK(h.certificate.K <= c.K);
  }
  // mixed system containing the golden rotation
  const auto ms = presets::load("morse-smale-rotation").system;
  const auto c = covering_time(ms, {2}, 0.2 / 3, 400, 0.2 / 24);
  REQUIRE(c.covered);
  const auto h = certify_frequent_hitting(ms, 0.2, c.K, 0.025, 1);
  CHECK(h.certified);
}

TEST_CASE("cat map refutation") {
  const auto cat = presets::load("cat-map").system;
  const auto r = certify_frequent_hitting(cat, 0.1, 50, 0.0125, 1);
  REQUIRE_FALSE(r.certified);
  CHECK(r.refutation.K_max == 50);
  CHECK(r.refutation.decay_slope == doctest::Approx(-std::log((3 + std::sqrt(5.0)) / 2)).epsilon(0.05));
  CHECK(r.refutation.note.find("not a proof") != std::string::npos);
}

TEST_CASE("T3 translations certify") {
  const auto t3 = presets::load("t3-translations").system;
  const auto r = certify_frequent_hitting(t3, 0.2, 200, 0.025, 1);
  REQUIRE(r.certified);
  CHECK(r.certificate.K > 0);
  for (std::size_t i = 0; i < r.certificate.witnesses.size(); i += 997)
    CHECK(verify_witness(t3, r.certificate, r.certificate.witnesses[i], 8, i));
}

TEST_CASE("covering time") {
  const auto c = covering_time(golden(), {1}, 0.2, 100, 0.025);
  REQUIRE(c.covered);
  CHECK(c.K <= 16);
  const auto id = GeneratorSystem({Generator::identity(Space::circle())});
  CHECK_FALSE(covering_time(id, {1}, 0.2, 100, 0.025).covered);
  const auto s2 = presets::load("s2-rotations").system;
  const auto cs = covering_time(s2, {1, 2}, 0.3, 3000, 0.3 / 8, 20);
  CHECK(cs.covered);
  CHECK(cs.K > 0);
}

TEST_CASE("transition time") {
  const auto ms = presets::morse_smale();
  const auto z = min_transition_time(ms.system, Point::circle(0), Point::circle(0), 3, 0.1, 100, 3);
  REQUIRE(z.found);
  CHECK(z.p == 0);
  int prev = -1;
  for (int n : {2, 4, 6, 8, 10}) {
    const auto r = min_transition_time(ms.system, Point::circle(0), Point::circle(0.5), n, 0.1, 2000, 3);
    REQUIRE(r.found);
    CHECK(r.p >= prev);
    prev = r.p;
  }
  CHECK(prev > 4);
}

TEST_CASE("parameter checks") {
  CHECK_THROWS_AS(certify_frequent_hitting(golden(), 0.1, 10, 0.1, 1), Error);
  CHECK_THROWS_AS(certify_frequent_hitting(golden(), -1, 10, 0.01, 1), Error);
  HittingOptions o;
  o.node_budget = 3;
  CHECK_THROWS_AS(certify_frequent_hitting(presets::load("cat-map").system, 0.1, 50, 0.0125, 1, o), Error);
}

TEST_CASE("least squares slope") {
  CHECK(least_squares_slope({0, 1, 2, 3}, {1, 3, 5, 7}) == doctest::Approx(2.0));
}
