#include "hitdyn/semigroup.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace hitdyn {

namespace {

double fmod_pos(double x, double p) {
  double r = std::fmod(x, p);
  if (r < 0) r += p;
  if (r >= p) r = 0;
  return r;
}

double wrap_sym(double x, double p) {
  double y = std::fmod(x, p);
  if (y > p / 2) y -= p;
  if (y <= -p / 2) y += p;
  return y;
}

double inf_norm(const Eigen::MatrixXd& m) { return m.cwiseAbs().rowwise().sum().maxCoeff(); }

Eigen::Matrix4d embed(const Eigen::MatrixXd& m) {
  Eigen::Matrix4d out = Eigen::Matrix4d::Identity();
  out.topLeftCorner(m.rows(), m.cols()) = m;
  return out;
}

double condition_number(const Eigen::MatrixXd& a) {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(a);
  const auto& s = svd.singularValues();
  return s(0) / s(s.size() - 1);
}

}  // namespace

// ---------------------------------------------------------------- Generator

Generator Generator::identity(const Space& s) {
  Generator g;
  g.kind_ = GeneratorKind::Identity;
  g.space_ = s;
  g.label_ = "id";
  g.n_ = std::max(1, s.coords());
  return g;
}

Generator Generator::rotation(double alpha) {
  Generator g;
  g.kind_ = GeneratorKind::Rotation;
  g.space_ = Space::circle();
  g.param_ = alpha;
  g.label_ = "rot";
  return g;
}

Generator Generator::north_south(double amplitude) {
  if (!(amplitude > 0) || 2 * kPi * amplitude >= 1)
    throw Error(ErrorCode::InvalidArgument, "north-south amplitude must lie in (0, 1/2pi)");
  Generator g;
  g.kind_ = GeneratorKind::NorthSouth;
  g.space_ = Space::circle();
  g.param_ = amplitude;
  g.lip_fwd_ = 1 + 2 * kPi * amplitude;
  g.lip_inv_ = 1 / (1 - 2 * kPi * amplitude);
  g.isometry_ = false;
  g.label_ = "ns";
  return g;
}

Generator Generator::translation(const std::vector<double>& v) {
  Generator g;
  g.kind_ = GeneratorKind::Translation;
  g.space_ = Space::torus(static_cast<int>(v.size()));
  g.n_ = static_cast<int>(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) g.vec_[i] = v[i];
  g.label_ = "transl";
  return g;
}

Generator Generator::torus_linear(const Eigen::MatrixXd& m) {
  if (m.rows() != m.cols()) throw Error(ErrorCode::InvalidArgument, "torus matrix must be square");
  for (Eigen::Index i = 0; i < m.size(); ++i)
    if (std::fabs(m.data()[i] - std::round(m.data()[i])) > 1e-12)
      throw Error(ErrorCode::InvalidArgument, "torus matrix must be integer");
  const double det = m.determinant();
  if (std::fabs(std::fabs(det) - 1) > 1e-9)
    throw Error(ErrorCode::InvalidArgument, "torus matrix must be unimodular");
  Generator g;
  g.kind_ = GeneratorKind::TorusLinear;
  g.space_ = Space::torus(static_cast<int>(m.rows()));
  g.n_ = static_cast<int>(m.rows());
  Eigen::MatrixXd inv = m.inverse();
  for (Eigen::Index i = 0; i < inv.size(); ++i) inv.data()[i] = std::round(inv.data()[i]);
  g.mat_ = embed(m);
  g.inv_ = embed(inv);
  g.lip_fwd_ = std::max(1.0, inf_norm(m));
  g.lip_inv_ = std::max(1.0, inf_norm(inv));
  g.isometry_ = g.lip_fwd_ == 1 && g.lip_inv_ == 1;
  g.label_ = "linear";
  return g;
}

Generator Generator::sphere_rotation(const Eigen::Matrix3d& r) {
  if ((r.transpose() * r - Eigen::Matrix3d::Identity()).norm() > 1e-9 || r.determinant() < 0)
    throw Error(ErrorCode::InvalidArgument, "sphere rotation must be in SO(3)");
  Generator g;
  g.kind_ = GeneratorKind::SphereRotation;
  g.space_ = Space::sphere2();
  g.n_ = 3;
  g.mat_ = embed(r);
  g.inv_ = embed(r.transpose());
  g.label_ = "so3";
  return g;
}

Generator Generator::sphere_rotation_axis(const Eigen::Vector3d& axis, double turns) {
  return sphere_rotation(Eigen::AngleAxisd(2 * kPi * turns, axis.normalized()).toRotationMatrix());
}

Generator Generator::projective_linear(const Eigen::MatrixXd& a) {
  if (a.rows() != a.cols()) throw Error(ErrorCode::InvalidArgument, "matrix must be square");
  if (std::fabs(a.determinant()) < 1e-14) throw Error(ErrorCode::InvalidArgument, "matrix must be invertible");
  Generator g;
  g.kind_ = GeneratorKind::ProjectiveLinear;
  g.space_ = Space::projective(static_cast<int>(a.rows()));
  g.n_ = static_cast<int>(a.rows());
  g.mat_ = embed(a);
  g.inv_ = embed(a.inverse());
  const double c = condition_number(a);
  g.lip_fwd_ = g.lip_inv_ = std::max(1.0, c);
  g.isometry_ = c < 1 + 1e-12;
  g.label_ = "proj";
  return g;
}

Generator Generator::shift(int kappa) {
  Generator g;
  g.kind_ = GeneratorKind::Shift;
  g.space_ = Space::symbolic(kappa);
  g.lip_fwd_ = std::exp(1.0);
  g.lip_inv_ = 1;
  g.isometry_ = false;
  g.label_ = "shift";
  return g;
}

Generator Generator::custom(const Space& s, PointMap fwd, PointMap inv, double lip_fwd, double lip_inv,
                           bool isometry, std::string label) {
  Generator g;
  g.kind_ = GeneratorKind::Custom;
  g.space_ = s;
  g.fwd_ = std::move(fwd);
  g.bwd_ = std::move(inv);
  g.lip_fwd_ = std::max(1.0, lip_fwd);
  g.lip_inv_ = std::max(1.0, lip_inv);
  g.isometry_ = isometry;
  g.label_ = std::move(label);
  return g;
}

Eigen::MatrixXd Generator::matrix() const { return mat_.topLeftCorner(n_, n_); }
Eigen::MatrixXd Generator::matrix_inverse() const { return inv_.topLeftCorner(n_, n_); }

static double ns_inverse(double y, double a) {
  // solve x - a sin(2 pi x) = y; F is increasing with F(x) in [x - a, x + a]
  double lo = y - a, hi = y + a, x = y;
  for (int it = 0; it < 100; ++it) {
    const double f = x - a * std::sin(2 * kPi * x) - y;
    if (f > 0) hi = x; else lo = x;
    const double df = 1 - 2 * kPi * a * std::cos(2 * kPi * x);
    double nx = x - f / df;
    if (!(nx > lo && nx < hi)) nx = 0.5 * (lo + hi);
    if (std::fabs(nx - x) < 1e-17) { x = nx; break; }
    x = nx;
  }
  return x;
}

static Point apply_matrix(const Eigen::Matrix4d& m, int n, const Point& x, SpaceKind kind) {
  Eigen::Vector4d v = Eigen::Vector4d::Zero();
  for (int i = 0; i < n; ++i) v(i) = x.c[static_cast<std::size_t>(i)];
  Eigen::Vector4d w = m * v;
  if (kind == SpaceKind::Sphere2) return Point::sphere2(w(0), w(1), w(2));
  if (kind == SpaceKind::Torus) {
    std::vector<double> y(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) y[static_cast<std::size_t>(i)] = w(i);
    return Point::torus(y);
  }
  std::vector<double> y(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) y[static_cast<std::size_t>(i)] = w(i);
  return Point::projective(y);
}

Point Generator::apply(const Point& x) const {
  if (x.kind != space_.kind || x.dim != space_.dim)
    throw Error(ErrorCode::SpaceMismatch, "generator on " + space_.name() + " applied to " + x.space().name());
  switch (kind_) {
    case GeneratorKind::Identity: return x;
    case GeneratorKind::Rotation: return Point::circle(x.c[0] + param_);
    case GeneratorKind::NorthSouth: return Point::circle(x.c[0] - param_ * std::sin(2 * kPi * x.c[0]));
    case GeneratorKind::Translation: {
      Point y = x;
      for (int i = 0; i < n_; ++i) y.c[static_cast<std::size_t>(i)] = wrap01(x.c[static_cast<std::size_t>(i)] + vec_[static_cast<std::size_t>(i)]);
      return y;
    }
    case GeneratorKind::TorusLinear:
    case GeneratorKind::SphereRotation:
    case GeneratorKind::ProjectiveLinear: return apply_matrix(mat_, n_, x, space_.kind);
    case GeneratorKind::Shift: return shift_point(x, 1);
    case GeneratorKind::Custom: return fwd_(x);
  }
  return x;
}

Point Generator::apply_inverse(const Point& x) const {
  if (x.kind != space_.kind || x.dim != space_.dim)
    throw Error(ErrorCode::SpaceMismatch, "generator on " + space_.name() + " applied to " + x.space().name());
  switch (kind_) {
    case GeneratorKind::Identity: return x;
    case GeneratorKind::Rotation: return Point::circle(x.c[0] - param_);
    case GeneratorKind::NorthSouth: return Point::circle(ns_inverse(x.c[0], param_));
    case GeneratorKind::Translation: {
      Point y = x;
      for (int i = 0; i < n_; ++i) y.c[static_cast<std::size_t>(i)] = wrap01(x.c[static_cast<std::size_t>(i)] - vec_[static_cast<std::size_t>(i)]);
      return y;
    }
    case GeneratorKind::TorusLinear:
    case GeneratorKind::SphereRotation:
    case GeneratorKind::ProjectiveLinear: return apply_matrix(inv_, n_, x, space_.kind);
    case GeneratorKind::Shift: throw Error(ErrorCode::InvalidArgument, "the shift has no inverse");
    case GeneratorKind::Custom:
      if (!bwd_) throw Error(ErrorCode::InvalidArgument, "custom generator without inverse");
      return bwd_(x);
  }
  return x;
}

static double proj_lift(const Eigen::Matrix4d& m, double t) {
  const double k = std::floor(t / kPi);
  const double s = t - k * kPi;
  const double phi0 = fmod_pos(std::atan2(m(1, 0), m(0, 0)), kPi);
  const double c = std::cos(s), sn = std::sin(s);
  const double phi = std::atan2(m(1, 0) * c + m(1, 1) * sn, m(0, 0) * c + m(0, 1) * sn);
  const double det = m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0);
  if (det > 0) return phi0 + fmod_pos(phi - phi0, kPi) + k * kPi;
  return phi0 - fmod_pos(phi0 - phi, kPi) - k * kPi;
}

double Generator::lift(double t) const {
  switch (kind_) {
    case GeneratorKind::Identity: return t;
    case GeneratorKind::Rotation: return t + param_;
    case GeneratorKind::NorthSouth: return t - param_ * std::sin(2 * kPi * t);
    case GeneratorKind::ProjectiveLinear:
      if (n_ == 2) return proj_lift(mat_, t);
      break;
    default: break;
  }
  throw Error(ErrorCode::InvalidArgument, "generator " + label_ + " has no one-dimensional lift");
}

double Generator::lift_inverse(double t) const {
  switch (kind_) {
    case GeneratorKind::Identity: return t;
    case GeneratorKind::Rotation: return t - param_;
    case GeneratorKind::NorthSouth: return ns_inverse(t, param_);
    case GeneratorKind::ProjectiveLinear:
      if (n_ == 2) return proj_lift(inv_, t);
      break;
    default: break;
  }
  throw Error(ErrorCode::InvalidArgument, "generator " + label_ + " has no one-dimensional lift");
}

bool Generator::orientation_preserving() const {
  if (kind_ == GeneratorKind::ProjectiveLinear) return matrix().determinant() > 0;
  return true;
}

// ---------------------------------------------------------------- system

GeneratorSystem::GeneratorSystem(std::vector<Generator> gens) : gens_(std::move(gens)) {
  if (gens_.empty()) throw Error(ErrorCode::InvalidArgument, "empty generator system");
  space_ = gens_.front().space();
  L_ = 1;
  for (const auto& g : gens_) {
    if (g.space() != space_)
      throw Error(ErrorCode::SpaceMismatch, g.space().name() + " vs " + space_.name());
    L_ = std::max({L_, g.lip_fwd(), g.lip_inv()});
  }
}

const Generator& GeneratorSystem::gen(Symbol s) const {
  if (s < 1 || s > kappa())
    throw Error(ErrorCode::BadSymbol, "symbol " + std::to_string(s) + " outside 1.." + std::to_string(kappa()));
  return gens_[static_cast<std::size_t>(s - 1)];
}

GeneratorSystem GeneratorSystem::subsystem(const std::vector<Symbol>& symbols) const {
  std::vector<Generator> g;
  for (Symbol s : symbols) g.push_back(gen(s));
  return GeneratorSystem(std::move(g));
}

bool GeneratorSystem::all_isometries() const {
  return std::all_of(gens_.begin(), gens_.end(), [](const Generator& g) { return g.isometry(); });
}

bool GeneratorSystem::translation_invariant() const {
  return std::all_of(gens_.begin(), gens_.end(), [](const Generator& g) {
    return g.kind() == GeneratorKind::Rotation || g.kind() == GeneratorKind::Translation ||
           (g.kind() == GeneratorKind::Identity &&
            (g.space().kind == SpaceKind::Circle || g.space().kind == SpaceKind::Torus));
  });
}

bool GeneratorSystem::circle_monotone() const {
  return space_.kind == SpaceKind::Circle &&
         std::all_of(gens_.begin(), gens_.end(), [](const Generator& g) {
           return g.kind() == GeneratorKind::Rotation || g.kind() == GeneratorKind::NorthSouth ||
                  g.kind() == GeneratorKind::Identity;
         });
}

bool GeneratorSystem::projective_line() const {
  return space_.kind == SpaceKind::Projective && space_.dim == 2 &&
         std::all_of(gens_.begin(), gens_.end(), [](const Generator& g) {
           return g.kind() == GeneratorKind::ProjectiveLinear || g.kind() == GeneratorKind::Identity;
         });
}

bool GeneratorSystem::torus_affine() const {
  return space_.kind == SpaceKind::Torus &&
         std::all_of(gens_.begin(), gens_.end(), [](const Generator& g) {
           return g.kind() == GeneratorKind::Translation || g.kind() == GeneratorKind::TorusLinear ||
                  g.kind() == GeneratorKind::Identity;
         });
}

bool GeneratorSystem::invertible() const {
  return std::all_of(gens_.begin(), gens_.end(), [](const Generator& g) { return g.invertible(); });
}

// ---------------------------------------------------------------- orbits

Point compose_along(const GeneratorSystem& sys, const Word& w, const Point& x) {
  Point y = x;
  for (Symbol s : w) y = sys.gen(s).apply(y);
  return y;
}

Point compose_inverse(const GeneratorSystem& sys, const Word& w, const Point& y) {
  Point x = y;
  for (auto it = w.rbegin(); it != w.rend(); ++it) x = sys.gen(*it).apply_inverse(x);
  return x;
}

OrbitTrace skew_orbit(const GeneratorSystem& sys, const WordStream& omega, const Point& x, std::size_t n) {
  OrbitTrace t;
  t.points.reserve(n + 1);
  t.word = omega.take(n);
  t.points.push_back(x);
  for (std::size_t j = 0; j < n; ++j) t.points.push_back(sys.gen(t.word[j]).apply(t.points.back()));
  return t;
}

bool dyn_ball_member(const GeneratorSystem& sys, const Word& w, const Point& center, double eps,
                     const Point& y) {
  Point a = center, b = y;
  if (!(distance(a, b) < eps)) return false;
  for (Symbol s : w) {
    a = sys.gen(s).apply(a);
    b = sys.gen(s).apply(b);
    if (!(distance(a, b) < eps)) return false;
  }
  return true;
}

// ---------------------------------------------------------------- regions

double projective_angle(const Point& p) { return fmod_pos(std::atan2(p.c[1], p.c[0]), kPi); }

Point projective_from_angle(double t) { return Point::projective({std::cos(t), std::sin(t)}); }

Region make_region(const GeneratorSystem& sys, const Ball& b) {
  Region r;
  r.center = b.center;
  r.radius = b.radius;
  if (sys.circle_monotone()) {
    r.kind = Region::Kind::Arc;
    r.period = 1;
    r.a = b.center.c[0] - b.radius;
    r.len = std::min(2 * b.radius, 1.0);
    r.exact = true;
  } else if (sys.projective_line()) {
    r.kind = Region::Kind::Arc;
    r.period = kPi;
    r.a = projective_angle(b.center) - b.radius;
    r.len = std::min(2 * b.radius, kPi);
    r.exact = true;
  } else if (sys.torus_affine()) {
    r.kind = Region::Kind::Parallelogram;
    r.dim = sys.space().dim;
    r.P = Eigen::Matrix4d::Identity() * b.radius;
    r.Pinv = Eigen::Matrix4d::Identity() / b.radius;
    r.exact = true;
  } else {
    r.kind = Region::Kind::Ball;
    r.exact = sys.all_isometries();
  }
  return r;
}

Region advance(const GeneratorSystem& sys, const Region& r, Symbol s) {
  const Generator& g = sys.gen(s);
  Region out = r;
  switch (r.kind) {
    case Region::Kind::Ball:
      out.center = g.apply(r.center);
      if (!g.isometry()) {
        out.radius = r.radius / g.lip_inv();
        out.exact = false;
      }
      return out;
    case Region::Kind::Arc: {
      if (r.len >= r.period) return out;
      const double fa = g.lift(r.a), fb = g.lift(r.a + r.len);
      const bool keep = g.orientation_preserving();
      out.len = keep ? fb - fa : fa - fb;
      if (r.len < 1e-7) {
        // Endpoint differences lose the length below the spacing of doubles.
        const double h = 1e-7 * r.period;
        const double slope = std::fabs(g.lift(r.a + h) - g.lift(r.a)) / h;
        out.len = r.len * slope * (1 - 1e-5);
      }
      out.a = keep ? fa : fa - out.len;
      out.len = std::min(std::max(out.len, 0.0), r.period);
      out.a = wrap_sym(out.a, r.period);
      return out;
    }
    case Region::Kind::Parallelogram: {
      if (g.kind() == GeneratorKind::Translation) {
        out.center = g.apply(r.center);
      } else if (g.kind() == GeneratorKind::TorusLinear) {
        out.center = g.apply(r.center);
        const int d = r.dim;
        out.P.topLeftCorner(d, d) = g.matrix() * r.P.topLeftCorner(d, d);
        out.Pinv.topLeftCorner(d, d) = r.Pinv.topLeftCorner(d, d) * g.matrix_inverse();
      }
      return out;
    }
  }
  return out;
}

Region advance(const GeneratorSystem& sys, const Region& r, const Word& w) {
  Region out = r;
  for (Symbol s : w) out = advance(sys, out, s);
  return out;
}

double region_inner_radius(const Region& r) {
  switch (r.kind) {
    case Region::Kind::Ball: return r.radius;
    case Region::Kind::Arc: return r.len >= r.period ? r.period / 2 : r.len / 2;
    case Region::Kind::Parallelogram: {
      const int d = r.dim;
      const double m = r.Pinv.topLeftCorner(d, d).cwiseAbs().rowwise().sum().maxCoeff();
      return std::min(0.5, 1.0 / m);
    }
  }
  return 0;
}

Point region_center(const Region& r) {
  if (r.kind == Region::Kind::Arc) {
    const double mid = r.a + 0.5 * std::min(r.len, r.period);
    return r.period == 1 ? Point::circle(mid) : projective_from_angle(fmod_pos(mid, kPi));
  }
  return r.center;
}

static double arc_coordinate(const Region& r, const Point& z) {
  return r.period == 1 ? z.c[0] : projective_angle(z);
}

bool region_contains(const Region& r, const Ball& b) {
  switch (r.kind) {
    case Region::Kind::Ball: return distance(r.center, b.center) + b.radius <= r.radius;
    case Region::Kind::Arc: {
      if (r.len >= r.period) return true;
      const double u = fmod_pos(arc_coordinate(r, b.center) - b.radius - r.a, r.period);
      return u + 2 * b.radius <= r.len;
    }
    case Region::Kind::Parallelogram: {
      if (region_inner_radius(r) >= 0.5) return true;
      const int d = r.dim;
      const Eigen::MatrixXd Pi = r.Pinv.topLeftCorner(d, d);
      const Eigen::VectorXd rows = Pi.cwiseAbs().rowwise().sum();
      Eigen::VectorXd u(d);
      for (int i = 0; i < d; ++i) {
        double t = b.center.c[static_cast<std::size_t>(i)] - r.center.c[static_cast<std::size_t>(i)];
        u(i) = t - std::round(t);
      }
      int total = 1;
      for (int i = 0; i < d; ++i) total *= 3;
      for (int k = 0; k < total; ++k) {
        Eigen::VectorXd uk = u;
        int q = k;
        for (int i = 0; i < d; ++i) {
          uk(i) += (q % 3) - 1;
          q /= 3;
        }
        const Eigen::VectorXd y = Pi * uk;
        bool ok = true;
        for (int i = 0; i < d && ok; ++i) ok = std::fabs(y(i)) + b.radius * rows(i) <= 1.0;
        if (ok) return true;
      }
      return false;
    }
  }
  return false;
}

bool region_intersects(const Region& r, const Ball& b) {
  switch (r.kind) {
    case Region::Kind::Ball: return distance(r.center, b.center) < r.radius + b.radius;
    case Region::Kind::Arc: {
      if (r.len >= r.period) return true;
      const double u = fmod_pos(arc_coordinate(r, b.center) - b.radius - r.a, r.period);
      return u < r.len || u + 2 * b.radius > r.period;
    }
    case Region::Kind::Parallelogram:
      return distance(r.center, b.center) < region_inner_radius(r) + b.radius ||
             region_contains(r, Ball{b.center, 0.0});
  }
  return false;
}

double region_log_size(const Region& r) {
  const double s = r.kind == Region::Kind::Arc ? r.len : region_inner_radius(r);
  return std::log(std::max(s, 1e-300));
}

// ---------------------------------------------------------------- inner radius

static std::vector<Point> local_net(const GeneratorSystem& sys, const Point& y0, double radius, double delta,
                                    std::vector<Point>& global_cache) {
  std::vector<Point> out;
  const Space& sp = sys.space();
  if (sp.kind == SpaceKind::Circle || sp.kind == SpaceKind::Torus) {
    const int d = sp.coords();
    const double h = 2 * delta * 0.999;
    const long m = static_cast<long>(std::ceil((radius + delta) / h));
    long total = 1;
    for (int i = 0; i < d; ++i) total *= 2 * m + 1;
    if (total > (1L << 22)) throw Error(ErrorCode::NetTooLarge, "local net");
    for (long idx = 0; idx < total; ++idx) {
      std::vector<double> x(static_cast<std::size_t>(d));
      long q = idx;
      for (int i = 0; i < d; ++i) {
        x[static_cast<std::size_t>(i)] = y0.c[static_cast<std::size_t>(i)] + static_cast<double>(q % (2 * m + 1) - m) * h;
        q /= 2 * m + 1;
      }
      out.push_back(sp.kind == SpaceKind::Circle ? Point::circle(x[0]) : Point::torus(x));
    }
    return out;
  }
  if (global_cache.empty()) global_cache = build_net(sp, delta, 0);
  for (const Point& q : global_cache)
    if (distance(q, y0) < radius + delta) out.push_back(q);
  return out;
}

double image_inner_radius(const GeneratorSystem& sys, const Word& w, const Ball& b, double delta) {
  if (!(delta > 0) || !(delta < b.radius / 4))
    throw Error(ErrorCode::InvalidArgument, "resolution must satisfy 0 < delta < radius/4");
  if (!sys.invertible()) throw Error(ErrorCode::InvalidArgument, "inner radius needs invertible generators");
  const double n = static_cast<double>(w.size());
  const double floor_r = std::pow(sys.L(), -n) * b.radius * (1 - 1e-12);
  Region reg = make_region(sys, b);
  if (reg.kind != Region::Kind::Ball || reg.exact) {
    reg = advance(sys, reg, w);
    if (reg.kind == Region::Kind::Arc) {
      // inner radius about f_w(center), which need not be the arc midpoint
      const Point y0 = compose_along(sys, w, b.center);
      const double t = arc_coordinate(reg, y0);
      if (reg.len >= reg.period) return reg.period / 2;
      const double u = fmod_pos(t - reg.a, reg.period);
      return std::max(floor_r, std::min(u, reg.len - u));
    }
    return std::max(floor_r, region_inner_radius(reg));
  }
  const double margin = std::pow(sys.L(), n) * delta;
  if (margin >= b.radius)
    throw Error(ErrorCode::ResolutionTooCoarse, "safety margin " + std::to_string(margin) + " exceeds radius");
  const Point y0 = compose_along(sys, w, b.center);
  std::vector<Point> cache;
  auto ok = [&](double r) {
    for (const Point& q : local_net(sys, y0, r, delta, cache)) {
      if (!(distance(q, y0) < r + delta)) continue;
      if (!(distance(compose_inverse(sys, w, q), b.center) < b.radius - margin)) return false;
    }
    return true;
  };
  double lo = 0, hi = b.radius;
  for (int it = 0; it < 30; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (ok(mid)) lo = mid; else hi = mid;
  }
  return std::max(lo, floor_r);
}

// ---------------------------------------------------------------- audit

GeneratorAudit audit_generators(const GeneratorSystem& sys, std::size_t samples, std::uint64_t seed) {
  GeneratorAudit a;
  Rng rng(seed);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  const double diam = sys.space().diameter();
  for (const auto& g : sys.generators()) {
    double wf = 0, wi = 0;
    for (std::size_t s = 0; s < samples; ++s) {
      const Point x = sample_point(sys.space(), rng);
      const double scale = diam * std::pow(10.0, -4 * u01(rng));
      const Point y = sample_in_ball({x, scale}, rng);
      const double dxy = distance(x, y);
      if (g.invertible()) {
        a.max_inverse_error = std::max(a.max_inverse_error, distance(g.apply_inverse(g.apply(x)), x));
        if (dxy > 1e-12) wi = std::max(wi, distance(g.apply_inverse(x), g.apply_inverse(y)) / dxy);
      }
      if (dxy > 1e-12) wf = std::max(wf, distance(g.apply(x), g.apply(y)) / dxy);
    }
    a.worst_lip_fwd.push_back(wf);
    a.worst_lip_inv.push_back(wi);
    if (wf > g.lip_fwd() * (1 + 1e-6) + 1e-9 || wi > g.lip_inv() * (1 + 1e-6) + 1e-9) a.ok = false;
  }
  if (a.max_inverse_error > 1e-9) a.ok = false;
  return a;
}

}  // namespace hitdyn
