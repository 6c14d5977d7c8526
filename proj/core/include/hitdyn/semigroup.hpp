#pragma once

#include <functional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "hitdyn/spaces.hpp"

namespace hitdyn {

enum class GeneratorKind {
  Identity,
  Rotation,          // circle, x + alpha
  NorthSouth,        // circle, x - a sin(2 pi x)
  Translation,       // torus, x + v
  TorusLinear,       // torus, integer matrix
  SphereRotation,    // sphere2, orthogonal 3x3
  ProjectiveLinear,  // projective, [A v]
  Shift,             // symbolic, left shift (no inverse)
  Custom,
};

using PointMap = std::function<Point(const Point&)>;

class Generator {
 public:
  static Generator identity(const Space& s);
  static Generator rotation(double alpha);
  static Generator north_south(double amplitude = 0.1);
  static Generator translation(const std::vector<double>& v);
  static Generator torus_linear(const Eigen::MatrixXd& m);
  static Generator sphere_rotation(const Eigen::Matrix3d& r);
  // Rotation by `turns` full turns about a unit axis.
  static Generator sphere_rotation_axis(const Eigen::Vector3d& axis, double turns);
  static Generator projective_linear(const Eigen::MatrixXd& a);
  static Generator shift(int kappa);
  static Generator custom(const Space& s, PointMap fwd, PointMap inv, double lip_fwd, double lip_inv,
                          bool isometry = false, std::string label = "custom");

  Point apply(const Point& x) const;
  Point apply_inverse(const Point& x) const;

  // Lift of a 1-D generator (circle: period 1; projective line: angle, period pi).
  double lift(double t) const;
  double lift_inverse(double t) const;
  bool orientation_preserving() const;

  GeneratorKind kind() const { return kind_; }
  const Space& space() const { return space_; }
  double lip_fwd() const { return lip_fwd_; }
  double lip_inv() const { return lip_inv_; }
  bool invertible() const { return kind_ != GeneratorKind::Shift; }
  bool isometry() const { return isometry_; }
  const std::string& label() const { return label_; }
  double parameter() const { return param_; }
  const std::array<double, 4>& vector() const { return vec_; }
  // d x d block of the stored matrix (torus, sphere, projective kinds).
  Eigen::MatrixXd matrix() const;
  Eigen::MatrixXd matrix_inverse() const;

 private:
  GeneratorKind kind_ = GeneratorKind::Identity;
  Space space_;
  double lip_fwd_ = 1, lip_inv_ = 1;
  bool isometry_ = true;
  std::string label_;
  double param_ = 0;
  std::array<double, 4> vec_{};
  Eigen::Matrix4d mat_ = Eigen::Matrix4d::Identity();
  Eigen::Matrix4d inv_ = Eigen::Matrix4d::Identity();
  int n_ = 1;
  PointMap fwd_, bwd_;
};

class GeneratorSystem {
 public:
  GeneratorSystem() = default;
  explicit GeneratorSystem(std::vector<Generator> gens);

  const Space& space() const { return space_; }
  int kappa() const { return static_cast<int>(gens_.size()); }
  double L() const { return L_; }
  const Generator& gen(Symbol s) const;
  const std::vector<Generator>& generators() const { return gens_; }

  GeneratorSystem subsystem(const std::vector<Symbol>& symbols) const;

  bool all_isometries() const;
  // Every generator is a rotation/translation (or identity): the action commutes with translations.
  bool translation_invariant() const;
  bool circle_monotone() const;
  bool projective_line() const;
  bool torus_affine() const;
  bool invertible() const;

 private:
  std::vector<Generator> gens_;
  Space space_;
  double L_ = 1;
};

struct OrbitTrace {
  std::vector<Point> points;
  Word word;
};

Point compose_along(const GeneratorSystem& sys, const Word& w, const Point& x);
// Inverse of compose_along: applies the inverses of w in reverse order.
Point compose_inverse(const GeneratorSystem& sys, const Word& w, const Point& y);
OrbitTrace skew_orbit(const GeneratorSystem& sys, const WordStream& omega, const Point& x, std::size_t n);
bool dyn_ball_member(const GeneratorSystem& sys, const Word& w, const Point& center, double eps,
                     const Point& y);

// Certified radius r with B(f_w(center), r) inside f_w(B).
double image_inner_radius(const GeneratorSystem& sys, const Word& w, const Ball& b, double delta);

struct GeneratorAudit {
  double max_inverse_error = 0;
  std::vector<double> worst_lip_fwd;  // per generator, max sampled ratio
  std::vector<double> worst_lip_inv;
  bool ok = true;
};
GeneratorAudit audit_generators(const GeneratorSystem& sys, std::size_t samples, std::uint64_t seed);

// Images of balls tracked as exact or inner-approximating regions.
struct Region {
  enum class Kind { Ball, Arc, Parallelogram };
  Kind kind = Kind::Ball;
  Point center;
  double radius = 0;  // Ball: the region contains (exact: equals) B(center, radius)
  bool exact = false;
  double a = 0, len = 0, period = 1;  // Arc: [a, a + len] on R / period Z
  Eigen::Matrix4d P = Eigen::Matrix4d::Zero();  // Parallelogram: center + P [-1,1]^d
  Eigen::Matrix4d Pinv = Eigen::Matrix4d::Zero();
  int dim = 1;
};

Region make_region(const GeneratorSystem& sys, const Ball& b);
Region advance(const GeneratorSystem& sys, const Region& r, Symbol s);
Region advance(const GeneratorSystem& sys, const Region& r, const Word& w);
// Largest radius of a ball around the region's reference center inside the region.
double region_inner_radius(const Region& r);
// Point used as the reference center.
Point region_center(const Region& r);
bool region_contains(const Region& r, const Ball& b);
bool region_intersects(const Region& r, const Ball& b);
// Log of a size proxy, for deduplication.
double region_log_size(const Region& r);

// Angle coordinate in [0, pi) of a projective-line point and back.
double projective_angle(const Point& p);
Point projective_from_angle(double t);

}  // namespace hitdyn
