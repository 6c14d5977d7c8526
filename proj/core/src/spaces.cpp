#include "hitdyn/spaces.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

namespace hitdyn {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// ---------------------------------------------------------------- WordStream

static void check_word(const Word& w, int kappa) {
  for (Symbol s : w)
    if (s < 1 || (kappa > 0 && s > kappa))
      throw Error(ErrorCode::BadSymbol, "symbol " + std::to_string(s) + " outside 1.." +
                                            std::to_string(kappa));
}

WordStream::WordStream()
    : prefix_(std::make_shared<const Word>()),
      period_(std::make_shared<const Word>()),
      past_(std::make_shared<const Word>()) {}

WordStream WordStream::constant(Word prefix, Symbol s) {
  check_word(prefix, 0);
  check_word({s}, 0);
  WordStream w;
  w.prefix_ = std::make_shared<const Word>(std::move(prefix));
  w.period_ = std::make_shared<const Word>();
  w.past_ = std::make_shared<const Word>();
  w.tail_ = Tail::Constant;
  w.tail_symbol_ = s;
  int k = s;
  for (Symbol x : *w.prefix_) k = std::max(k, x);
  w.kappa_ = k;
  return w;
}

WordStream WordStream::periodic(Word prefix, Word period) {
  if (period.empty()) throw Error(ErrorCode::InvalidArgument, "empty period");
  check_word(prefix, 0);
  check_word(period, 0);
  WordStream w = constant(std::move(prefix), period.front());
  w.tail_ = Tail::Periodic;
  for (Symbol x : period) w.kappa_ = std::max(w.kappa_, x);
  w.period_ = std::make_shared<const Word>(std::move(period));
  return w;
}

WordStream WordStream::random(Word prefix, int kappa, std::uint64_t seed) {
  if (kappa < 1) throw Error(ErrorCode::InvalidArgument, "kappa < 1");
  check_word(prefix, kappa);
  WordStream w = constant(std::move(prefix), 1);
  w.tail_ = Tail::Random;
  w.kappa_ = kappa;
  w.seed_ = seed;
  return w;
}

WordStream WordStream::with_past(Word past) const {
  check_word(past, 0);
  WordStream w = *this;
  w.past_ = std::make_shared<const Word>(std::move(past));
  return w;
}

Symbol WordStream::at(std::int64_t k) const {
  const std::int64_t a = k + static_cast<std::int64_t>(offset_);
  if (a < 0) {
    const std::size_t j = static_cast<std::size_t>(-a - 1);
    if (j >= past_->size())
      throw Error(ErrorCode::BadSymbol, "index " + std::to_string(k) + " outside past window");
    return (*past_)[j];
  }
  const std::size_t ua = static_cast<std::size_t>(a);
  if (ua < prefix_->size()) return (*prefix_)[ua];
  const std::size_t t = ua - prefix_->size();
  switch (tail_) {
    case Tail::Constant: return tail_symbol_;
    case Tail::Periodic: return (*period_)[t % period_->size()];
    case Tail::Random:
      return static_cast<Symbol>(splitmix64(seed_ ^ splitmix64(t)) % static_cast<std::uint64_t>(kappa_)) + 1;
  }
  return tail_symbol_;
}

bool WordStream::same_future(const WordStream& o) const {
  if (offset_ != o.offset_ || tail_ != o.tail_ || *prefix_ != *o.prefix_) return false;
  switch (tail_) {
    case Tail::Constant: return tail_symbol_ == o.tail_symbol_;
    case Tail::Periodic: return *period_ == *o.period_;
    case Tail::Random: return kappa_ == o.kappa_ && seed_ == o.seed_;
  }
  return false;
}

WordStream WordStream::shifted(std::size_t m) const {
  WordStream w = *this;
  w.offset_ += m;
  return w;
}

Word WordStream::take(std::size_t n, std::size_t from) const {
  Word out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = at(static_cast<std::int64_t>(from + i));
  return out;
}

std::string WordStream::describe() const {
  std::ostringstream os;
  os << "prefix_len=" << prefix_->size() << " offset=" << offset_ << " tail=";
  switch (tail_) {
    case Tail::Constant: os << "constant(" << tail_symbol_ << ")"; break;
    case Tail::Periodic: os << "periodic(len " << period_->size() << ")"; break;
    case Tail::Random: os << "random(kappa " << kappa_ << ", seed " << seed_ << ")"; break;
  }
  return os.str();
}

bool WordStream::eventually_periodic(std::size_t& start, std::size_t& period) const {
  if (tail_ == Tail::Random) return false;
  start = prefix_->size() > offset_ ? prefix_->size() - offset_ : 0;
  period = tail_ == Tail::Periodic ? period_->size() : 1;
  return true;
}

ShiftDistance shift_distance_full(const WordStream& a, const WordStream& b, std::size_t horizon) {
  if (a.same_future(b)) return {0.0, 0, false};
  std::size_t sa = 0, pa = 0, sb = 0, pb = 0;
  std::size_t limit = horizon;
  bool exact = false;
  if (a.eventually_periodic(sa, pa) && b.eventually_periodic(sb, pb)) {
    const std::size_t bound = std::max(sa, sb) + std::lcm(pa, pb) + 1;
    if (bound <= horizon) {
      limit = bound;
      exact = true;
    }
  }
  for (std::size_t k = 1; k <= limit; ++k) {
    if (a.at(static_cast<std::int64_t>(k)) != b.at(static_cast<std::int64_t>(k)))
      return {std::exp(-static_cast<double>(k)), k, false};
  }
  return {0.0, 0, !exact};
}

double shift_distance(const WordStream& a, const WordStream& b, std::size_t horizon) {
  return shift_distance_full(a, b, horizon).value;
}

// ---------------------------------------------------------------- Space

Space Space::torus(int d) {
  if (d < 1 || d > 4) throw Error(ErrorCode::InvalidArgument, "torus dimension must be 1..4");
  return {SpaceKind::Torus, d};
}

Space Space::projective(int d) {
  if (d < 2 || d > 4) throw Error(ErrorCode::InvalidArgument, "projective vector length must be 2..4");
  return {SpaceKind::Projective, d};
}

Space Space::symbolic(int kappa) {
  if (kappa < 1) throw Error(ErrorCode::InvalidArgument, "kappa < 1");
  return {SpaceKind::Symbolic, kappa};
}

double Space::diameter() const {
  switch (kind) {
    case SpaceKind::Circle: return 0.5;
    case SpaceKind::Torus: return 0.5;
    case SpaceKind::Sphere2: return kPi;
    case SpaceKind::Projective: return kPi / 2;
    case SpaceKind::Symbolic: return dim > 1 ? std::exp(-1.0) : 0.0;
  }
  return 0;
}

int Space::coords() const {
  switch (kind) {
    case SpaceKind::Circle: return 1;
    case SpaceKind::Symbolic: return 0;
    default: return dim;
  }
}

std::string Space::name() const {
  switch (kind) {
    case SpaceKind::Circle: return "circle";
    case SpaceKind::Torus: return "torus" + std::to_string(dim);
    case SpaceKind::Sphere2: return "sphere2";
    case SpaceKind::Projective: return "projective" + std::to_string(dim);
    case SpaceKind::Symbolic: return "shift" + std::to_string(dim);
  }
  return "?";
}

// ---------------------------------------------------------------- Point

double wrap01(double x) {
  double y = x - std::floor(x);
  if (y >= 1.0) y = 0.0;
  return y;
}

double circle_dist(double x, double y) {
  double t = std::fabs(x - y);
  t -= std::floor(t);
  return std::min(t, 1.0 - t);
}

Point Point::circle(double x) {
  Point p;
  p.kind = SpaceKind::Circle;
  p.dim = 1;
  p.c[0] = wrap01(x);
  return p;
}

Point Point::torus(const std::vector<double>& x) {
  Space::torus(static_cast<int>(x.size()));
  Point p;
  p.kind = SpaceKind::Torus;
  p.dim = static_cast<int>(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) p.c[i] = wrap01(x[i]);
  return p;
}

Point Point::sphere2(double x, double y, double z) {
  const double n = std::sqrt(x * x + y * y + z * z);
  if (!(n > 0)) throw Error(ErrorCode::ZeroVector, "sphere point");
  Point p;
  p.kind = SpaceKind::Sphere2;
  p.dim = 3;
  p.c = {x / n, y / n, z / n, 0.0};
  return p;
}

Point Point::projective(const std::vector<double>& v) {
  Space::projective(static_cast<int>(v.size()));
  double n = 0;
  for (double a : v) n += a * a;
  n = std::sqrt(n);
  if (!(n > 0)) throw Error(ErrorCode::ZeroVector, "projective point");
  Point p;
  p.kind = SpaceKind::Projective;
  p.dim = static_cast<int>(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) p.c[i] = v[i] / n;
  return p;
}

Point Point::symbolic(WordStream w, int kappa) {
  Point p;
  p.kind = SpaceKind::Symbolic;
  p.dim = kappa;
  p.word = std::make_shared<const WordStream>(std::move(w));
  return p;
}

std::string Point::str() const {
  std::ostringstream os;
  os.precision(12);
  if (kind == SpaceKind::Symbolic) {
    os << "[";
    for (int k = 0; k < 12; ++k) os << word->at(k);
    os << "...]";
    return os.str();
  }
  os << "(";
  const int n = space().coords();
  for (int i = 0; i < n; ++i) os << (i ? ", " : "") << c[static_cast<std::size_t>(i)];
  os << ")";
  return os.str();
}

// Angle between unit vectors; accurate for small angles.
static double unit_angle(const std::array<double, 4>& u, const std::array<double, 4>& v, int n,
                         bool lines) {
  double dot = 0;
  for (int i = 0; i < n; ++i) dot += u[static_cast<std::size_t>(i)] * v[static_cast<std::size_t>(i)];
  const double s = (lines && dot < 0) ? -1.0 : 1.0;
  double dm = 0, dp = 0;
  for (int i = 0; i < n; ++i) {
    const double a = u[static_cast<std::size_t>(i)], b = s * v[static_cast<std::size_t>(i)];
    dm += (a - b) * (a - b);
    dp += (a + b) * (a + b);
  }
  return 2.0 * std::atan2(std::sqrt(dm), std::sqrt(dp));
}

double distance(const Point& x, const Point& y) {
  if (x.kind != y.kind || x.dim != y.dim)
    throw Error(ErrorCode::SpaceMismatch, x.space().name() + " vs " + y.space().name());
  switch (x.kind) {
    case SpaceKind::Circle: return circle_dist(x.c[0], y.c[0]);
    case SpaceKind::Torus: {
      double m = 0;
      for (int i = 0; i < x.dim; ++i)
        m = std::max(m, circle_dist(x.c[static_cast<std::size_t>(i)], y.c[static_cast<std::size_t>(i)]));
      return m;
    }
    case SpaceKind::Sphere2: return unit_angle(x.c, y.c, 3, false);
    case SpaceKind::Projective: return unit_angle(x.c, y.c, x.dim, true);
    case SpaceKind::Symbolic: return shift_distance(*x.word, *y.word);
  }
  return 0;
}

bool in_ball(const Ball& b, const Point& y) { return distance(b.center, y) < b.radius; }

Point shift_point(const Point& p, std::size_t m) {
  if (p.kind != SpaceKind::Symbolic) throw Error(ErrorCode::SpaceMismatch, "shift of non-symbolic point");
  return Point::symbolic(p.word->shifted(m), p.dim);
}

// ---------------------------------------------------------------- nets

std::size_t grid_points_per_axis(double delta) {
  return static_cast<std::size_t>(std::ceil(1.0 / delta - 1e-12));
}

static void check_cap(double n, const NetOptions& opt) {
  if (n > static_cast<double>(opt.cap))
    throw Error(ErrorCode::NetTooLarge, "net of " + std::to_string(n) + " points exceeds cap " +
                                            std::to_string(opt.cap));
}

static std::vector<Point> fibonacci_sphere(std::size_t n, double twist) {
  std::vector<Point> out;
  out.reserve(n);
  const double ga = kPi * (3.0 - std::sqrt(5.0));
  for (std::size_t i = 0; i < n; ++i) {
    const double z = 1.0 - (2.0 * static_cast<double>(i) + 1.0) / static_cast<double>(n);
    const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
    const double phi = ga * static_cast<double>(i) + twist;
    out.push_back(Point::sphere2(r * std::cos(phi), r * std::sin(phi), z));
  }
  return out;
}

std::vector<Point> build_net(const Space& space, double delta, std::uint64_t seed, const NetOptions& opt) {
  if (!(delta > 0)) throw Error(ErrorCode::InvalidArgument, "net resolution must be positive");
  Rng rng(seed);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  std::vector<Point> out;
  switch (space.kind) {
    case SpaceKind::Circle:
    case SpaceKind::Torus: {
      const int d = space.coords();
      const std::size_t m = std::max<std::size_t>(1, grid_points_per_axis(delta));
      check_cap(std::pow(static_cast<double>(m), d), opt);
      std::array<double, 4> off{};
      for (int i = 0; i < d; ++i) off[static_cast<std::size_t>(i)] = seed ? u01(rng) / static_cast<double>(m) : 0.0;
      std::size_t total = 1;
      for (int i = 0; i < d; ++i) total *= m;
      out.reserve(total);
      for (std::size_t idx = 0; idx < total; ++idx) {
        std::vector<double> x(static_cast<std::size_t>(d));
        std::size_t r = idx;
        for (int i = d - 1; i >= 0; --i) {
          x[static_cast<std::size_t>(i)] = static_cast<double>(r % m) / static_cast<double>(m) + off[static_cast<std::size_t>(i)];
          r /= m;
        }
        out.push_back(space.kind == SpaceKind::Circle ? Point::circle(x[0]) : Point::torus(x));
      }
      return out;
    }
    case SpaceKind::Sphere2: {
      const double n = std::ceil(8.0 * kPi / (delta * delta));
      check_cap(n, opt);
      return fibonacci_sphere(static_cast<std::size_t>(std::max(n, 4.0)), seed ? 2 * kPi * u01(rng) : 0.0);
    }
    case SpaceKind::Projective: {
      if (space.dim == 2) {
        const std::size_t m = static_cast<std::size_t>(std::ceil(kPi / delta));
        check_cap(static_cast<double>(m), opt);
        const double off = seed ? u01(rng) * kPi / static_cast<double>(m) : 0.0;
        for (std::size_t j = 0; j < m; ++j) {
          const double t = off + kPi * static_cast<double>(j) / static_cast<double>(m);
          out.push_back(Point::projective({std::cos(t), std::sin(t)}));
        }
        return out;
      }
      if (space.dim == 3) {
        const double n = std::ceil(8.0 * kPi / (delta * delta));
        check_cap(n, opt);
        for (Point p : fibonacci_sphere(static_cast<std::size_t>(std::max(n, 4.0)), seed ? 2 * kPi * u01(rng) : 0.0)) {
          if (p.c[2] < 0)
            for (int i = 0; i < 3; ++i) p.c[static_cast<std::size_t>(i)] = -p.c[static_cast<std::size_t>(i)];
          out.push_back(Point::projective({p.c[0], p.c[1], p.c[2]}));
        }
        return out;
      }
      // d = 4: grid on the faces x_i = +1 of the cube, normalized.
      const std::size_t k = static_cast<std::size_t>(std::ceil(2.0 / delta));
      check_cap(4.0 * std::pow(static_cast<double>(k + 1), 3), opt);
      for (int face = 0; face < 4; ++face) {
        for (std::size_t a = 0; a <= k; ++a)
          for (std::size_t b = 0; b <= k; ++b)
            for (std::size_t c = 0; c <= k; ++c) {
              const double g[3] = {-1.0 + 2.0 * static_cast<double>(a) / static_cast<double>(k),
                                   -1.0 + 2.0 * static_cast<double>(b) / static_cast<double>(k),
                                   -1.0 + 2.0 * static_cast<double>(c) / static_cast<double>(k)};
              std::vector<double> v(4);
              int gi = 0;
              for (int i = 0; i < 4; ++i) v[static_cast<std::size_t>(i)] = (i == face) ? 1.0 : g[gi++];
              out.push_back(Point::projective(v));
            }
      }
      return out;
    }
    case SpaceKind::Symbolic: {
      const int kappa = space.dim;
      int depth = opt.symbolic_depth;
      if (depth < 0) depth = std::max(0, static_cast<int>(std::ceil(-std::log(delta) - 1.0 + 1e-12)));
      check_cap(std::pow(static_cast<double>(kappa), depth), opt);
      std::size_t total = 1;
      for (int i = 0; i < depth; ++i) total *= static_cast<std::size_t>(kappa);
      for (std::size_t idx = 0; idx < total; ++idx) {
        Word w(static_cast<std::size_t>(depth) + 1, 1);
        std::size_t r = idx;
        for (int i = depth; i >= 1; --i) {
          w[static_cast<std::size_t>(i)] = static_cast<Symbol>(r % static_cast<std::size_t>(kappa)) + 1;
          r /= static_cast<std::size_t>(kappa);
        }
        out.push_back(Point::symbolic(WordStream::constant(w, 1), kappa));
      }
      return out;
    }
  }
  return out;
}

// ---------------------------------------------------------------- sampling

static std::array<double, 4> gaussian_unit(int n, Rng& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  std::array<double, 4> v{};
  double s = 0;
  do {
    s = 0;
    for (int i = 0; i < n; ++i) {
      v[static_cast<std::size_t>(i)] = g(rng);
      s += v[static_cast<std::size_t>(i)] * v[static_cast<std::size_t>(i)];
    }
  } while (s < 1e-20);
  s = std::sqrt(s);
  for (int i = 0; i < n; ++i) v[static_cast<std::size_t>(i)] /= s;
  return v;
}

Point sample_point(const Space& space, Rng& rng) {
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  switch (space.kind) {
    case SpaceKind::Circle: return Point::circle(u01(rng));
    case SpaceKind::Torus: {
      std::vector<double> x(static_cast<std::size_t>(space.dim));
      for (auto& a : x) a = u01(rng);
      return Point::torus(x);
    }
    case SpaceKind::Sphere2: {
      auto v = gaussian_unit(3, rng);
      return Point::sphere2(v[0], v[1], v[2]);
    }
    case SpaceKind::Projective: {
      auto v = gaussian_unit(space.dim, rng);
      return Point::projective(std::vector<double>(v.begin(), v.begin() + space.dim));
    }
    case SpaceKind::Symbolic:
      return Point::symbolic(WordStream::random({}, space.dim, rng()), space.dim);
  }
  return {};
}

// Rotate unit vector u towards a random orthogonal direction by angle t.
static std::array<double, 4> tilt(const std::array<double, 4>& u, int n, double t, Rng& rng) {
  auto w = gaussian_unit(n, rng);
  double dot = 0;
  for (int i = 0; i < n; ++i) dot += w[static_cast<std::size_t>(i)] * u[static_cast<std::size_t>(i)];
  double s = 0;
  for (int i = 0; i < n; ++i) {
    w[static_cast<std::size_t>(i)] -= dot * u[static_cast<std::size_t>(i)];
    s += w[static_cast<std::size_t>(i)] * w[static_cast<std::size_t>(i)];
  }
  s = std::sqrt(s);
  std::array<double, 4> out{};
  for (int i = 0; i < n; ++i)
    out[static_cast<std::size_t>(i)] = std::cos(t) * u[static_cast<std::size_t>(i)] +
                                       (s > 0 ? std::sin(t) * w[static_cast<std::size_t>(i)] / s : 0.0);
  return out;
}

Point sample_in_ball(const Ball& b, Rng& rng) {
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  const Point& c = b.center;
  const double r = std::min(b.radius, c.space().diameter());
  switch (c.kind) {
    case SpaceKind::Circle: return Point::circle(c.c[0] + (2 * u01(rng) - 1) * r * 0.999999);
    case SpaceKind::Torus: {
      std::vector<double> x(static_cast<std::size_t>(c.dim));
      for (int i = 0; i < c.dim; ++i) x[static_cast<std::size_t>(i)] = c.c[static_cast<std::size_t>(i)] + (2 * u01(rng) - 1) * r * 0.999999;
      return Point::torus(x);
    }
    case SpaceKind::Sphere2: {
      auto v = tilt(c.c, 3, u01(rng) * r * 0.999999, rng);
      return Point::sphere2(v[0], v[1], v[2]);
    }
    case SpaceKind::Projective: {
      auto v = tilt(c.c, c.dim, u01(rng) * r * 0.999999, rng);
      return Point::projective(std::vector<double>(v.begin(), v.begin() + c.dim));
    }
    case SpaceKind::Symbolic: {
      // agree on 1..k where e^{-(k+1)} < r
      const int k = std::max(0, static_cast<int>(std::ceil(-std::log(r) - 1.0 + 1e-12)));
      Word w = c.word->take(static_cast<std::size_t>(k) + 1);
      return Point::symbolic(WordStream::random(w, c.dim, rng()), c.dim);
    }
  }
  return c;
}

double net_density_audit(const Space& space, const std::vector<Point>& net, std::size_t samples,
                         std::uint64_t seed) {
  Rng rng(seed);
  double worst = 0;
  for (std::size_t s = 0; s < samples; ++s) {
    const Point p = sample_point(space, rng);
    double best = std::numeric_limits<double>::infinity();
    for (const Point& q : net) best = std::min(best, distance(p, q));
    worst = std::max(worst, best);
  }
  return worst;
}

}  // namespace hitdyn
