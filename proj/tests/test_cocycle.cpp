#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "hitdyn/cocycle.hpp"
#include "presets.hpp"

using namespace hitdyn;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

const double kCat = std::log((3 + std::sqrt(5.0)) / 2);

Cocycle identity(int d, int kappa = 1) { return Cocycle(std::vector<MatrixXd>(static_cast<std::size_t>(kappa), MatrixXd::Identity(d, d))); }

MatrixXd rot2(double t) {
  MatrixXd r(2, 2);
  r << std::cos(t), -std::sin(t), std::sin(t), std::cos(t);
  return r;
}

VectorXd random_unit(Rng& rng, int d) {
  std::normal_distribution<double> nd;
  VectorXd v(d);
  for (int i = 0; i < d; ++i) v(i) = nd(rng);
  return v.normalized();
}

}  // namespace

TEST_CASE("SL audit") {
  MatrixXd m = MatrixXd::Identity(2, 2) * 2;
  CHECK_THROWS_AS(Cocycle({m}), Error);
  for (const auto& name : presets::names()) {
    const auto p = presets::load(name);
    if (!p.cocycle) continue;
    CAPTURE(name);
    for (const auto& a : p.cocycle->matrices()) CHECK(std::abs(a.determinant() - 1) < 1e-9);
  }
  CHECK_THROWS_AS(presets::different_types_B().at(3), Error);
}

TEST_CASE("text format round trip") {
  const auto c = presets::different_types_B();
  const auto back = parse_cocycle("# comment\n" + format_cocycle(c));
  REQUIRE(back.kappa() == 2);
  for (int s = 1; s <= 2; ++s) CHECK((back.at(s) - c.at(s)).norm() < 1e-12);
  CHECK_THROWS_AS(parse_cocycle("2 1\n1 2 3"), Error);
}

TEST_CASE("product log norm oracles") {
  CHECK(product_log_norm(identity(3, 2), WordStream::random({}, 2, 1), 500) == doctest::Approx(0.0));
  const auto A = presets::different_types_A();
  for (std::uint64_t seed : {1, 2, 3}) CHECK(std::abs(product_log_norm(A, WordStream::random({}, 2, seed), 5000) - std::log(3.0)) < 1e-3);
  const Cocycle cat({presets::cat_matrix()});
  CHECK(product_log_norm(cat, WordStream(), 2000) == doctest::Approx(kCat).epsilon(1e-3));
}

TEST_CASE("directional exponents") {
  const auto id = directional_exponent_trace(identity(3), WordStream(), VectorXd::Ones(3), 100);
  for (double a : id.averages) CHECK(std::abs(a) < 1e-12);
  const auto A = presets::different_types_A();
  const auto e1 = directional_exponent_trace(A, WordStream::random({}, 2, 4), VectorXd::Unit(3, 0), 5000);
  CHECK(e1.averages.back() == doctest::Approx(std::log(3.0)).epsilon(1e-6));
  VectorXd v(3);
  v << 0.2, 0.7, -0.4;
  const auto b = directional_exponent_trace(presets::different_types_B(), WordStream::constant({}, 2), v, 5000);
  CHECK(std::abs(b.averages.back() - std::log(2.0)) < 2e-3);
  CHECK_THROWS_AS(directional_exponent_trace(A, WordStream(), VectorXd::Zero(3), 10), Error);
}

TEST_CASE("constant hyperbolic cocycle: every off-stable direction has the top exponent") {
  const auto c = presets::constant_hyperbolic();
  Rng rng(21);
  for (int t = 0; t < 100; ++t) {
    const auto tr = directional_exponent_trace(c, WordStream(), random_unit(rng, 3), 5000);
    CHECK(std::abs(tr.averages.back() - std::log(3.0)) < 2e-3);
  }
}

TEST_CASE("submultiplicativity") {
  const auto A = presets::different_types_A();
  Rng rng(8);
  for (int t = 0; t < 50; ++t) {
    const auto w = WordStream::random({}, 2, rng());
    const std::size_t n = 20 + rng() % 200, m = 1 + rng() % (n - 1);
    const double lhs = static_cast<double>(n) * product_log_norm(A, w, n);
    const double rhs = static_cast<double>(m) * product_log_norm(A, w, m) +
                       static_cast<double>(n - m) * product_log_norm(A, w.shifted(m), n - m);
    CHECK(lhs <= rhs + 1e-8);
  }
}

TEST_CASE("spectrum sums to zero") {
  Rng rng(2);
  for (const auto& c : {presets::different_types_A(), presets::different_types_B(), presets::constant_hyperbolic()}) {
    for (int t = 0; t < 10; ++t) {
      const auto s = lyapunov_spectrum(c, WordStream::random({}, c.kappa(), rng()), 2000);
      double sum = 0;
      for (double x : s) sum += x;
      CHECK(std::abs(sum) < 1e-8);
      CHECK(s.front() >= 0);
      CHECK(s.back() <= 0);
    }
  }
}

TEST_CASE("projective step") {
  Rng rng(6);
  const Point p = Point::projective({0.3, -0.5, 0.8});
  CHECK(distance(projective_step(MatrixXd::Identity(3, 3), p), p) < 1e-12);
  CHECK(distance(projective_step(-MatrixXd::Identity(3, 3), p), p) < 1e-12);
  std::normal_distribution<double> nd;
  for (int t = 0; t < 1000; ++t) {
    MatrixXd m1(3, 3), m2(3, 3);
    for (int i = 0; i < 9; ++i) m1(i / 3, i % 3) = nd(rng), m2(i / 3, i % 3) = nd(rng);
    const VectorXd v = random_unit(rng, 3);
    const Point q = Point::projective({v(0), v(1), v(2)});
    const Point qn = Point::projective({-v(0), -v(1), -v(2)});
    CHECK(distance(projective_step(m1 * m2, q), projective_step(m1, projective_step(m2, q))) < 1e-8);
    CHECK(distance(projective_step(m1, q), projective_step(m1, qn)) < 1e-12);
  }
}

TEST_CASE("domination") {
  MatrixXd E(3, 2), F(3, 1);
  E << 0, 0, 1, 0, 0, 1;
  F << 1, 0, 0;
  const auto b = domination_test(presets::different_types_B(), E, F, 6);
  CHECK(b.dominated);
  CHECK(b.k == 2);
  CHECK(b.worst_ratio[0] > 0.5);
  CHECK(b.worst_ratio[1] < 0.5);

  const Eigen::EigenSolver<MatrixXd> es(presets::cat_matrix());
  MatrixXd Es(2, 1), Fu(2, 1);
  for (int i = 0; i < 2; ++i) {
    const VectorXd v = es.eigenvectors().col(i).real();
    if (es.eigenvalues()(i).real() < 1) Es = v;
    else Fu = v;
  }
  const auto c = domination_test(Cocycle({presets::cat_matrix()}), Es, Fu, 4);
  CHECK(c.k == 1);
  CHECK(c.worst_ratio[0] == doctest::Approx(std::exp(-2 * kCat)).epsilon(1e-6));

  const auto id = domination_test(identity(2), MatrixXd(Eigen::VectorXd::Unit(2, 0)), MatrixXd(Eigen::VectorXd::Unit(2, 1)), 6);
  CHECK_FALSE(id.dominated);
  CHECK_THROWS_AS(domination_test(presets::different_types_B(), F, E.col(0), 3), Error);
}

TEST_CASE("cones") {
  MatrixXd d(2, 2);
  d << 2, 0, 0, 0.5;
  CHECK(hyperbolic_cones(d).theta == doctest::Approx(0.5));
  const auto cp = hyperbolic_cones(presets::cat_matrix());
  CHECK(cp.theta == doctest::Approx(2 / (3 + std::sqrt(5.0))).epsilon(1e-9));
  CHECK_THROWS_AS(hyperbolic_cones(rot2(0.4)), Error);
  const auto a = audit_cones(cp, presets::cat_matrix(), 10000, 30, 3);
  CHECK(a.ok());
  const auto h = presets::constant_hyperbolic();
  const auto ch = hyperbolic_cones(h.at(1));
  CHECK(ch.dim_plus == 1);
  CHECK(ch.dim_minus == 2);
  CHECK(audit_cones(ch, h.at(1), 2000, 30, 4).ok());
  VectorXd u = cp.basis.col(0);
  CHECK(in_cone_plus(cp, u));
  CHECK_FALSE(in_cone_minus(cp, u));
}

TEST_CASE("accessibility") {
  const auto a = accessibility_certify(presets::irreducible_vs_accessible_A(), 0.2, 40, 0.025, 1);
  CHECK(a.certified);
  const auto b = accessibility_certify(presets::irreducible_vs_accessible_B(), 0.2, 40, 0.025, 1);
  CHECK_FALSE(b.certified);
  const auto r = accessibility_certify(Cocycle({rot2(kPi * (std::sqrt(5.0) - 1) / 2)}), 0.2, 60, 0.025, 1);
  REQUIRE(r.certified);
  // RP^1 has length pi in the angular metric
  CHECK(r.certificate.K <= static_cast<int>(std::floor(3 * kPi / 0.2)) + 1);
  CHECK_THROWS_AS(accessibility_certify(presets::irreducible_vs_accessible_A(), 0.01, 40, 0.001, 1), Error);
}

TEST_CASE("irregular direction") {
  VectorXd v(3);
  v << 1, 1, 1;
  const auto w = irregular_direction(presets::different_types_B(), v, 0.1, 6);
  CHECK(w.achieved_depth >= 6);
  CHECK(w.high_min >= std::log(3.0) - 0.05);
  CHECK(w.low_max <= std::log(2.0) + 0.05);
  const auto tr = directional_exponent_trace(presets::different_types_B(), WordStream::from_word([&] {
                                               Word word;
                                               for (const auto& [s, len] : w.runs) word.insert(word.end(), static_cast<std::size_t>(len), s);
                                               return word;
                                             }()),
                                             v, static_cast<std::size_t>(w.checkpoints.back()));
  for (std::size_t k = 0; k < w.checkpoints.size(); ++k)
    CHECK(tr.averages[static_cast<std::size_t>(w.checkpoints[k]) - 1] == doctest::Approx(w.exponents[k]).epsilon(1e-9));

  const Cocycle rots({MatrixXd::Identity(2, 2), rot2(0.7)});
  DirectionOptions o;
  o.mode = DirectionMode::Cones;
  CHECK_THROWS_AS(irregular_direction(rots, VectorXd::Unit(2, 0), 0.1, 2, o), Error);
}

TEST_CASE("rotation numbers") {
  CHECK(rotation_number(Eigen::Matrix2d::Identity()) == 0.0);
  CHECK(std::abs(rotation_number(Eigen::Matrix2d(rot2(0.3 * kPi))) - 0.3) <= 1e-6);
  CHECK(rotation_number(Eigen::Matrix2d(presets::cat_matrix())) == 0.0);
}

TEST_CASE("periodic spectra") {
  MatrixXd d = MatrixXd::Zero(3, 3);
  d.diagonal() << 2, 1, 0.5;
  const auto e = periodic_spectrum(Cocycle({d}), {1, 1});
  CHECK(e.exponents[0] == doctest::Approx(std::log(2.0)));
  CHECK(std::abs(e.exponents[1]) < 1e-12);
  CHECK(e.exponents[2] == doctest::Approx(-std::log(2.0)));

  const auto B = presets::different_types_B();
  const auto s1 = periodic_spectrum(B, {1}), s2 = periodic_spectrum(B, {2});
  const std::vector<double> want1{1.0986, -0.0680, -1.0306}, want2{0.6931, 0.1346, -0.8277};
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(s1.exponents[i] == doctest::Approx(want1[i]).epsilon(1e-3));
    CHECK(s2.exponents[i] == doctest::Approx(want2[i]).epsilon(1e-3));
  }
  const auto a = periodic_spectrum(B, {1, 2, 2}), b = periodic_spectrum(B, {2, 1, 2});
  for (std::size_t i = 0; i < 3; ++i) CHECK(a.exponents[i] == doctest::Approx(b.exponents[i]).epsilon(1e-9));
  const auto rep = spectrum_report(B, {{1}, {2}});
  CHECK(rep.verdict == "distinct-spectra");
  CHECK(rep.sums_ok);
}

TEST_CASE("symplectic resonance scan") {
  const auto eq = symplectic_center_check(0.9, 0.9, 10);
  CHECK(eq.resonant);
  CHECK(eq.m == 1);
  CHECK(eq.n == -1);
  const auto third = symplectic_center_check(2 * kPi / 3, 0.4567, 5);
  CHECK(third.resonant);
  CHECK(third.m == 3);
  CHECK(third.n == 0);
  CHECK_FALSE(symplectic_center_check(2 * kPi * (std::sqrt(2.0) - 1), 2 * kPi * (std::sqrt(3.0) - 1), 50).resonant);
}
