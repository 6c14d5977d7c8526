#include "presets.hpp"

#include <cmath>

namespace hitdyn::presets {

namespace {

Eigen::MatrixXd rot2(double t) {
  Eigen::MatrixXd r(2, 2);
  r << std::cos(t), -std::sin(t), std::sin(t), std::cos(t);
  return r;
}

Preset from_cocycle(std::string name, std::string description, Cocycle c) {
  Preset p{std::move(name), std::move(description), c.projectivized(), c};
  return p;
}

}  // namespace

double golden() { return (std::sqrt(5.0) - 1) / 2; }

Eigen::MatrixXd cat_matrix() {
  Eigen::MatrixXd m(2, 2);
  m << 2, 1, 1, 1;
  return m;
}

Cocycle different_types_A() {
  const double s = 1 / std::sqrt(3.0), th = std::sqrt(2.0) - 1;
  Eigen::MatrixXd a1(3, 3), a2(3, 3);
  a1 << -3, 0, 0, 0, s, s, 0, s, 0;
  a2 << 3, 0, 0, 0, s * std::cos(th), -s * std::sin(th), 0, s * std::sin(th), s * std::cos(th);
  return Cocycle({a1, a2});
}

Cocycle different_types_B() {
  const double s = 1 / std::sqrt(3.0), t = 1 / std::sqrt(2.0);
  Eigen::MatrixXd a1(3, 3), a3(3, 3);
  a1 << -3, 0, 0, 0, s, s, 0, s, 0;
  a3 << -2, 0, 0, 0, t, t, 0, t, 0;
  return Cocycle({a1, a3});
}

namespace {
double accessible_angle() { return kPi * (std::sqrt(2.0) - 1) / 4; }
}  // namespace

Cocycle irreducible_vs_accessible_A() { return Cocycle({cat_matrix(), rot2(accessible_angle())}); }

Cocycle irreducible_vs_accessible_B() {
  return Cocycle({cat_matrix(), Eigen::MatrixXd(rot2(accessible_angle()) * cat_matrix())});
}

Cocycle symplectic_center(double theta1, double theta2) {
  const double a = std::cos(theta1), b = std::sin(theta1), c = std::cos(theta2), d = std::sin(theta2);
  Eigen::MatrixXd m(4, 4);
  m << a, 0, -b, 0, 0, c, 0, -d, b, 0, a, 0, 0, d, 0, c;
  return Cocycle({m});
}

Cocycle constant_hyperbolic() {
  Eigen::MatrixXd P(3, 3);
  P << 1, 1, 0, 0, 1, 1, 1, 0, 1;
  const Eigen::Vector3d diag(3.0, 0.5, 2.0 / 3.0);
  return Cocycle({Eigen::MatrixXd(P * diag.asDiagonal() * P.inverse())});
}

const std::vector<std::string>& names() {
  static const std::vector<std::string> n{
      "golden-rotation",     "t3-translations",          "s2-rotations",
      "symplectic-center",   "cat-map",                  "morse-smale-rotation",
      "different-types-A",   "different-types-B",        "irreducible-vs-accessible-A",
      "irreducible-vs-accessible-B", "constant-hyperbolic",
  };
  return n;
}

Preset load(const std::string& name) {
  if (name == "golden-rotation")
    return {name, "circle rotation by (sqrt5-1)/2", GeneratorSystem({Generator::rotation(golden())}), std::nullopt};
  if (name == "t3-translations") {
    const std::vector<double> v1{std::sqrt(2.0) - 1, std::sqrt(3.0) - 1, std::sqrt(5.0) - 2};
    const std::vector<double> v2{std::sqrt(7.0) - 2, std::sqrt(11.0) - 3, std::sqrt(13.0) - 3};
    const std::vector<double> v3{kPi - 3, std::exp(1.0) - 2, std::sqrt(17.0) - 4};
    return {name, "three translations of T^3 with rationally independent components",
            GeneratorSystem({Generator::translation(v1), Generator::translation(v2), Generator::translation(v3)}),
            std::nullopt};
  }
  if (name == "s2-rotations") {
    const double a = 2 * kPi * (std::sqrt(2.0) - 1), b = 2 * kPi * (std::sqrt(3.0) - 1);
    return {name, "irrational rotations of S^2 about the z and x axes",
            GeneratorSystem({Generator::sphere_rotation_axis({0, 0, 1}, a / (2 * kPi)),
                             Generator::sphere_rotation_axis({1, 0, 0}, b / (2 * kPi))}),
            std::nullopt};
  }
  if (name == "symplectic-center")
    return from_cocycle(name, "Sp(4) generic center, rotation angles 2pi(sqrt2-1) and 2pi(sqrt3-1)",
                        symplectic_center(2 * kPi * (std::sqrt(2.0) - 1), 2 * kPi * (std::sqrt(3.0) - 1)));
  if (name == "cat-map") {
    Preset p{name, "Anosov automorphism [[2,1],[1,1]] of T^2", GeneratorSystem({Generator::torus_linear(cat_matrix())}),
             Cocycle({cat_matrix()})};
    return p;
  }
  if (name == "morse-smale-rotation")
    return {name, "identity, golden rotation and north-south map x - 0.1 sin(2 pi x) on the circle",
            morse_smale().system, std::nullopt};
  if (name == "different-types-A")
    return from_cocycle(name, "SL(3) cocycle {A1, A2} with top exponent log 3", different_types_A());
  if (name == "different-types-B")
    return from_cocycle(name, "SL(3) cocycle {A1, A3} with dominated splitting <e1> + <e1>^perp", different_types_B());
  if (name == "irreducible-vs-accessible-A")
    return from_cocycle(name, "SL(2) cocycle {cat, rotation}: projectively accessible", irreducible_vs_accessible_A());
  if (name == "irreducible-vs-accessible-B")
    return from_cocycle(name, "SL(2) cocycle {cat, rotation * cat}: hyperbolic, not accessible",
                        irreducible_vs_accessible_B());
  if (name == "constant-hyperbolic")
    return from_cocycle(name, "constant SL(3) cocycle with one-dimensional unstable direction (eigenvalues 3, 1/2, 2/3)",
                        constant_hyperbolic());
  std::string valid;
  for (const auto& n : names()) valid += (valid.empty() ? "" : ", ") + n;
  throw Error(ErrorCode::InvalidArgument, "unknown preset '" + name + "'; valid presets: " + valid);
}

MorseSmaleSetup morse_smale() {
  MorseSmaleSetup s{GeneratorSystem({Generator::identity(Space::circle()), Generator::rotation(golden()),
                                     Generator::north_south(0.1)}),
                    [](const Point& p) { return std::cos(2 * kPi * p[0]); },
                    Point::circle(0.5),
                    Point::circle(0.0),
                    -1.0,
                    1.0,
                    {}};
  s.options.psi_lipschitz = 2 * kPi;
  s.options.psi_bound = 1;
  s.options.threshold = 0.25;
  return s;
}

}  // namespace hitdyn::presets
