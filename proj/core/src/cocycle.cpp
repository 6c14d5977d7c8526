#include "hitdyn/cocycle.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <sstream>

namespace hitdyn {

namespace {

Eigen::VectorXd to_vec(const Point& p) {
  Eigen::VectorXd v(p.dim);
  for (int i = 0; i < p.dim; ++i) v[i] = p[i];
  return v;
}

Point to_point(const Eigen::VectorXd& v) { return Point::projective(std::vector<double>(v.data(), v.data() + v.size())); }

double wrap_pm_pi(double a) {
  a = std::fmod(a, 2 * kPi);
  if (a > kPi) a -= 2 * kPi;
  if (a <= -kPi) a += 2 * kPi;
  return a;
}

}  // namespace

Cocycle::Cocycle(std::vector<Eigen::MatrixXd> mats, double det_tol) : mats_(std::move(mats)) {
  if (mats_.empty()) throw Error(ErrorCode::InvalidArgument, "cocycle needs at least one matrix");
  d_ = static_cast<int>(mats_.front().rows());
  if (d_ < 1 || d_ > 4) throw Error(ErrorCode::InvalidArgument, "dimension must be 1..4");
  for (std::size_t i = 0; i < mats_.size(); ++i) {
    const auto& m = mats_[i];
    if (m.rows() != d_ || m.cols() != d_) throw Error(ErrorCode::InvalidArgument, "matrix shapes differ");
    const double det = m.determinant();
    if (!(std::fabs(std::fabs(det) - 1) <= det_tol))
      throw Error(ErrorCode::InvalidArgument,
                  "SL audit failed for A_" + std::to_string(i + 1) + ": |det| = " + std::to_string(std::fabs(det)));
  }
}

const Eigen::MatrixXd& Cocycle::at(Symbol s) const {
  if (s < 1 || s > kappa()) throw Error(ErrorCode::BadSymbol, "symbol " + std::to_string(s));
  return mats_[static_cast<std::size_t>(s - 1)];
}

double Cocycle::max_cond() const {
  double c = 1;
  for (const auto& m : mats_) {
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
    const auto& s = svd.singularValues();
    c = std::max(c, s[0] / s[s.size() - 1]);
  }
  return c;
}

GeneratorSystem Cocycle::projectivized() const {
  std::vector<Generator> g;
  for (const auto& m : mats_) g.push_back(Generator::projective_linear(m));
  return GeneratorSystem(std::move(g));
}

Cocycle parse_cocycle(const std::string& text) {
  std::istringstream in(text);
  std::ostringstream clean;
  std::string line;
  while (std::getline(in, line)) clean << line.substr(0, line.find('#')) << '\n';
  std::istringstream s(clean.str());
  int d = 0, kappa = 0;
  if (!(s >> d >> kappa) || d < 1 || d > 4 || kappa < 1)
    throw Error(ErrorCode::InvalidArgument, "cocycle header must be 'd kappa' with 1 <= d <= 4");
  std::vector<Eigen::MatrixXd> mats;
  for (int k = 0; k < kappa; ++k) {
    Eigen::MatrixXd m(d, d);
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j)
        if (!(s >> m(i, j))) throw Error(ErrorCode::InvalidArgument, "cocycle text ends early");
    mats.push_back(m);
  }
  return Cocycle(std::move(mats));
}

std::string format_cocycle(const Cocycle& c) {
  std::ostringstream os;
  os.precision(17);
  os << c.d() << ' ' << c.kappa() << '\n';
  for (const auto& m : c.matrices()) {
    for (int i = 0; i < c.d(); ++i) {
      for (int j = 0; j < c.d(); ++j) os << (j ? " " : "") << m(i, j);
      os << '\n';
    }
  }
  return os.str();
}

Eigen::MatrixXd word_product(const Cocycle& c, const Word& w) {
  Eigen::MatrixXd p = Eigen::MatrixXd::Identity(c.d(), c.d());
  for (Symbol s : w) p = c.at(s) * p;
  return p;
}

double product_log_norm(const Cocycle& c, const WordStream& omega, std::size_t n) {
  if (n < 1) throw Error(ErrorCode::InvalidArgument, "n must be >= 1");
  const int d = c.d();
  Eigen::MatrixXd Q = Eigen::MatrixXd::Identity(d, d);
  Eigen::MatrixXd T = Eigen::MatrixXd::Identity(d, d);
  double s = 0;
  for (std::size_t t = 0; t < n; ++t) {
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(c.at(omega.at(static_cast<std::int64_t>(t))) * Q);
    Q = qr.householderQ();
    const Eigen::MatrixXd R = qr.matrixQR().triangularView<Eigen::Upper>();
    T = R * T;
    const double scale = T.cwiseAbs().maxCoeff();
    T /= scale;
    s += std::log(scale);
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(T);
  return (std::log(svd.singularValues()[0]) + s) / static_cast<double>(n);
}

std::vector<double> lyapunov_spectrum(const Cocycle& c, const WordStream& omega, std::size_t n) {
  if (n < 1) throw Error(ErrorCode::InvalidArgument, "n must be >= 1");
  const int d = c.d();
  Eigen::MatrixXd Q = Eigen::MatrixXd::Identity(d, d);
  std::vector<long double> acc(static_cast<std::size_t>(d), 0.0L);
  for (std::size_t t = 0; t < n; ++t) {
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(c.at(omega.at(static_cast<std::int64_t>(t))) * Q);
    Q = qr.householderQ();
    for (int i = 0; i < d; ++i) acc[static_cast<std::size_t>(i)] += std::log(std::fabs(qr.matrixQR()(i, i)));
  }
  std::vector<double> out;
  for (long double a : acc) out.push_back(static_cast<double>(a / static_cast<long double>(n)));
  std::sort(out.rbegin(), out.rend());
  return out;
}

BirkhoffTrace directional_exponent_trace(const Cocycle& c, const WordStream& omega, const Eigen::VectorXd& v,
                                         std::size_t n) {
  if (v.size() != c.d()) throw Error(ErrorCode::InvalidArgument, "vector dimension");
  const double nv = v.norm();
  if (!(nv > 0)) throw Error(ErrorCode::ZeroVector, "direction must be nonzero");
  BirkhoffTrace tr;
  tr.label = "log|A^m v|/m";
  tr.averages.reserve(n);
  Eigen::VectorXd u = v / nv;
  long double s = 0;
  for (std::size_t m = 1; m <= n; ++m) {
    u = c.at(omega.at(static_cast<std::int64_t>(m - 1))) * u;
    const double r = u.norm();
    s += std::log(r);
    u /= r;
    tr.averages.push_back(static_cast<double>(s / static_cast<long double>(m)));
  }
  return tr;
}

Point projective_step(const Eigen::MatrixXd& m, const Point& p) {
  if (p.kind != SpaceKind::Projective || m.rows() != p.dim)
    throw Error(ErrorCode::SpaceMismatch, "projective_step needs a matching projective point");
  return to_point(m * to_vec(p));
}

DominationResult domination_test(const Cocycle& c, const Eigen::MatrixXd& E, const Eigen::MatrixXd& F, int k_max,
                                 double invariance_tol, std::size_t word_cap) {
  const int d = c.d();
  if (E.rows() != d || F.rows() != d || E.cols() + F.cols() != d)
    throw Error(ErrorCode::InvalidArgument, "E and F must split R^d");
  Eigen::MatrixXd both(d, d);
  both << E, F;
  if (Eigen::FullPivLU<Eigen::MatrixXd>(both).rank() != d)
    throw Error(ErrorCode::InvalidArgument, "E and F are not complementary");
  auto orth = [](const Eigen::MatrixXd& B) {
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(B);
    return Eigen::MatrixXd(qr.householderQ() * Eigen::MatrixXd::Identity(B.rows(), B.cols()));
  };
  const Eigen::MatrixXd QE = orth(E), QF = orth(F);
  for (int i = 1; i <= c.kappa(); ++i) {
    for (const Eigen::MatrixXd* Q : {&QE, &QF}) {
      const Eigen::MatrixXd img = c.at(i) * *Q;
      const double res = (img - *Q * (Q->transpose() * img)).norm();
      if (res > invariance_tol * std::max(1.0, c.at(i).norm()))
        throw Error(ErrorCode::NotInvariant, "subspace not invariant under A_" + std::to_string(i) +
                                                 " (residual " + std::to_string(res) + ")");
    }
  }
  auto smax = [](const Eigen::MatrixXd& m) { return Eigen::JacobiSVD<Eigen::MatrixXd>(m).singularValues()[0]; };
  auto smin = [](const Eigen::MatrixXd& m) {
    const auto s = Eigen::JacobiSVD<Eigen::MatrixXd>(m).singularValues();
    return s[s.size() - 1];
  };
  DominationResult r;
  std::vector<std::pair<Eigen::MatrixXd, Eigen::MatrixXd>> layer{{QE, QF}};
  for (int k = 1; k <= k_max; ++k) {
    if (layer.size() * static_cast<std::size_t>(c.kappa()) > word_cap)
      throw Error(ErrorCode::BudgetExceeded, "kappa^k exceeds the word cap at k = " + std::to_string(k));
    std::vector<std::pair<Eigen::MatrixXd, Eigen::MatrixXd>> next;
    next.reserve(layer.size() * static_cast<std::size_t>(c.kappa()));
    double worst = 0;
    for (const auto& [ae, af] : layer)
      for (int s = 1; s <= c.kappa(); ++s) {
        Eigen::MatrixXd ne = c.at(s) * ae, nf = c.at(s) * af;
        worst = std::max(worst, smax(ne) / smin(nf));
        next.emplace_back(std::move(ne), std::move(nf));
      }
    r.worst_ratio.push_back(worst);
    if (worst < 0.5) {
      r.dominated = true;
      r.k = k;
      return r;
    }
    layer = std::move(next);
  }
  return r;
}

ConePair hyperbolic_cones(const Eigen::MatrixXd& m, int stable_dim) {
  const int d = static_cast<int>(m.rows());
  if (m.cols() != d || d < 2) throw Error(ErrorCode::InvalidArgument, "square matrix of size >= 2 required");
  Eigen::EigenSolver<Eigen::MatrixXd> es(m);
  if (es.info() != Eigen::Success) throw Error(ErrorCode::NotHyperbolic, "eigen decomposition failed");
  const auto lam = es.eigenvalues();
  const auto vec = es.eigenvectors();
  struct Blk {
    double mod;
    std::vector<Eigen::VectorXd> cols;
  };
  std::vector<Blk> plus, minus;
  for (int i = 0; i < d; ++i) {
    const std::complex<double> l = lam[i];
    const double mod = std::abs(l);
    if (std::fabs(std::log(mod)) < 1e-6) throw Error(ErrorCode::NotHyperbolic, "eigenvalue of modulus 1");
    if (l.imag() < -1e-12 * mod) continue;
    Blk b{mod, {}};
    if (std::fabs(l.imag()) <= 1e-12 * mod) {
      b.cols.push_back(vec.col(i).real());
    } else {
      b.cols.push_back(vec.col(i).real());
      b.cols.push_back(vec.col(i).imag());
    }
    (mod > 1 ? plus : minus).push_back(b);
  }
  auto by_mod = [](const Blk& a, const Blk& b) { return a.mod > b.mod; };
  std::sort(plus.begin(), plus.end(), by_mod);
  std::sort(minus.begin(), minus.end(), by_mod);
  ConePair cp;
  cp.basis.resize(d, d);
  int col = 0;
  double theta = 0;
  for (const auto* group : {&plus, &minus}) {
    for (const auto& b : *group) {
      for (const auto& v : b.cols) cp.basis.col(col++) = v;
      cp.blocks.push_back(static_cast<int>(b.cols.size()));
      (group == &plus ? cp.dim_plus : cp.dim_minus) += static_cast<int>(b.cols.size());
      theta = std::max(theta, group == &plus ? 1 / b.mod : b.mod);
    }
  }
  if (col != d) throw Error(ErrorCode::NotHyperbolic, "no real invariant basis");
  if (cp.dim_plus == 0 || cp.dim_minus == 0) throw Error(ErrorCode::NotHyperbolic, "one-sided spectrum");
  if (stable_dim >= 0 && stable_dim != cp.dim_minus)
    throw Error(ErrorCode::NotHyperbolic, "stable dimension is " + std::to_string(cp.dim_minus));
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(cp.basis);
  const auto sv = svd.singularValues();
  if (!(sv[d - 1] > 0) || sv[0] / sv[d - 1] > 1e8) throw Error(ErrorCode::NotHyperbolic, "ill-conditioned eigenbasis");
  cp.basis_inv = cp.basis.inverse();
  cp.theta = theta;
  cp.zeta = 1;
  return cp;
}

std::pair<double, double> adapted_parts(const ConePair& cp, const Eigen::VectorXd& x) {
  const Eigen::VectorXd y = cp.basis_inv * x;
  double p = 0, q = 0;
  int at = 0;
  for (int b : cp.blocks) {
    const double n = y.segment(at, b).norm();
    (at < cp.dim_plus ? p : q) = std::max(at < cp.dim_plus ? p : q, n);
    at += b;
  }
  return {p, q};
}

double adapted_norm(const ConePair& cp, const Eigen::VectorXd& x) {
  const auto [p, q] = adapted_parts(cp, x);
  return std::max(p, q);
}

bool in_cone_plus(const ConePair& cp, const Eigen::VectorXd& x) {
  const auto [p, q] = adapted_parts(cp, x);
  return q <= cp.zeta * p;
}

bool in_cone_minus(const ConePair& cp, const Eigen::VectorXd& x) {
  const auto [p, q] = adapted_parts(cp, x);
  return p <= cp.zeta * q;
}

ConeAudit audit_cones(const ConePair& cp, const Eigen::MatrixXd& m, std::size_t samples, int n_max,
                      std::uint64_t seed) {
  ConeAudit a;
  const int d = static_cast<int>(m.rows());
  const Eigen::MatrixXd minv = m.inverse();
  Rng rng(seed);
  std::normal_distribution<double> g;
  std::uniform_real_distribution<double> u(0, 1);
  constexpr double slack = 1 - 1e-9;
  auto sample = [&](bool plus) {
    Eigen::VectorXd y(d);
    for (int i = 0; i < d; ++i) y[i] = g(rng);
    Eigen::VectorXd x = cp.basis * y;
    auto [p, q] = adapted_parts(cp, x);
    const double t = u(rng);
    // Rescale the minor part so that it is at most zeta times the major part.
    if (plus) y.tail(cp.dim_minus) *= t * cp.zeta * p / std::max(q, 1e-300);
    else y.head(cp.dim_plus) *= t * cp.zeta * q / std::max(p, 1e-300);
    return Eigen::VectorXd(cp.basis * y);
  };
  for (std::size_t s = 0; s < samples; ++s) {
    for (int side = 0; side < 2; ++side) {
      const bool plus = side == 0;
      Eigen::VectorXd x = sample(plus);
      const double n0 = adapted_norm(cp, x);
      const Eigen::MatrixXd& step = plus ? m : minv;
      for (int n = 1; n <= n_max; ++n) {
        x = step * x;
        const auto [p, q] = adapted_parts(cp, x);
        if (n == 1) {
          if (plus && !(q < p)) a.invariant_plus = false;
          if (!plus && !(p < q)) a.invariant_minus = false;
        }
        const double need = std::pow(cp.theta, -n) * n0 * slack;
        if (!(std::max(p, q) >= need)) (plus ? a.growth : a.contraction) = false;
      }
      ++a.checked;
    }
  }
  return a;
}

HittingResult accessibility_certify(const Cocycle& c, double eps, int K_max, double delta, std::uint64_t seed,
                                    HittingOptions opt) {
  if (c.d() < 2) throw Error(ErrorCode::InvalidArgument, "projective accessibility needs d >= 2");
  if (eps < 0.05) throw Error(ErrorCode::InvalidArgument, "eps must be >= 0.05");
  opt.access_convention = true;
  return certify_frequent_hitting(c.projectivized(), eps, K_max, delta, seed, opt);
}

namespace {

void push_run(std::vector<std::pair<Symbol, long long>>& runs, Symbol s, long long len) {
  if (len <= 0) return;
  if (!runs.empty() && runs.back().first == s) runs.back().second += len;
  else runs.emplace_back(s, len);
}

// Log growth of v along the runs, sampled at the given cumulative times.
std::vector<double> trace_at(const Cocycle& c, const std::vector<std::pair<Symbol, long long>>& runs,
                             const Eigen::VectorXd& v, const std::vector<long long>& times) {
  std::vector<double> out;
  Eigen::VectorXd u = v.normalized();
  long double s = 0;
  long long t = 0;
  std::size_t next = 0;
  for (const auto& [sym, len] : runs) {
    const Eigen::MatrixXd& A = c.at(sym);
    for (long long i = 0; i < len && next < times.size(); ++i) {
      u = A * u;
      const double r = u.norm();
      s += std::log(r);
      u /= r;
      ++t;
      while (next < times.size() && times[next] == t) {
        out.push_back(static_cast<double>(s / static_cast<long double>(t)));
        ++next;
      }
    }
  }
  return out;
}

double top_log_modulus(const Eigen::MatrixXd& m) {
  Eigen::EigenSolver<Eigen::MatrixXd> es(m, false);
  double r = 0;
  for (int i = 0; i < m.rows(); ++i) r = std::max(r, std::abs(std::complex<double>(es.eigenvalues()[i])));
  return std::log(r);
}

void summarize(DirectionWitness& w) {
  w.high_min = std::numeric_limits<double>::infinity();
  w.low_max = -w.high_min;
  for (std::size_t k = 0; k < w.exponents.size(); ++k) {
    if (w.high[k]) w.high_min = std::min(w.high_min, w.exponents[k]);
    else w.low_max = std::max(w.low_max, w.exponents[k]);
  }
}

}  // namespace

DirectionWitness irregular_direction(const Cocycle& c, const Eigen::VectorXd& v, double eps, int depth,
                                     const DirectionOptions& opt) {
  if (v.size() != c.d()) throw Error(ErrorCode::InvalidArgument, "vector dimension");
  if (!(v.norm() > 0)) throw Error(ErrorCode::ZeroVector, "direction must be nonzero");
  if (depth < 2) throw Error(ErrorCode::InvalidArgument, "depth must be >= 2");
  DirectionMode mode = opt.mode;
  if (mode == DirectionMode::Auto) {
    const bool blocks_ok = opt.high >= 1 && opt.high <= c.kappa() && opt.low >= 1 && opt.low <= c.kappa() &&
                           opt.high != opt.low &&
                           top_log_modulus(c.at(opt.high)) - top_log_modulus(c.at(opt.low)) > 0.05;
    mode = blocks_ok ? DirectionMode::Blocks : DirectionMode::Cones;
  }
  DirectionWitness w;
  w.mode = mode;
  w.requested_depth = depth;
  if (mode == DirectionMode::Blocks) {
    c.at(opt.high);
    c.at(opt.low);
    if (!(opt.threshold > 0)) throw Error(ErrorCode::InvalidArgument, "threshold must be positive");
    w.direction = v.normalized();
    long long total = 0;
    std::vector<long long> n{std::max<long long>(1, opt.n1)};
    for (int j = 0; j < depth; ++j) {
      if (j > 0) {
        const double m = std::max(static_cast<double>(j), 1 / opt.threshold);
        n.push_back(std::max(n.back() + 1, static_cast<long long>(std::ceil(m * static_cast<double>(total)))));
      }
      if (total + n.back() > opt.orbit_budget) {
        w.note = "orbit budget reached at level " + std::to_string(j + 1);
        break;
      }
      total += n.back();
      push_run(w.runs, j % 2 == 0 ? opt.high : opt.low, n.back());
      w.checkpoints.push_back(total);
      w.high.push_back(j % 2 == 0);
    }
    w.exponents = trace_at(c, w.runs, w.direction, w.checkpoints);
    w.achieved_depth = static_cast<int>(w.checkpoints.size());
    w.complete = w.achieved_depth == depth;
    summarize(w);
    return w;
  }

  // Cones mode: nested balls in projective space shadowing the fixed directions of the hyperbolic generator.
  const Symbol kappa = opt.shadow ? opt.shadow : static_cast<Symbol>(c.kappa());
  const Eigen::MatrixXd& A = c.at(kappa);
  const ConePair cp = hyperbolic_cones(A);
  if (cp.blocks.front() != 1 || cp.blocks.back() != 1)
    throw Error(ErrorCode::NotHyperbolic, "extreme eigenvalues of the shadowed generator are not real");
  const Eigen::VectorXd e_plus = cp.basis.col(0).normalized();
  const Eigen::VectorXd e_minus = cp.basis.col(c.d() - 1).normalized();
  const double I2 = std::log((A * e_plus).norm());
  const double I1 = std::log((A * e_minus).norm());
  const GeneratorSystem proj = c.projectivized();
  IrregularOptions io = opt.irregular;
  io.shadow = kappa;
  double bound = 0;
  for (const auto& m : c.matrices()) {
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
    bound = std::max({bound, std::log(svd.singularValues()[0]), -std::log(svd.singularValues()[c.d() - 1])});
  }
  io.psi_bound = bound;
  {
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(A);
    io.psi_lipschitz = svd.singularValues()[0] / svd.singularValues()[c.d() - 1];
  }
  io.psi_symbol = [&c](Symbol s, const Point& p) { return std::log((c.at(s) * to_vec(p)).norm()); };
  const Observable psi = [&A](const Point& p) { return std::log((A * to_vec(p)).norm()); };
  w.projective = construct_irregular_point(proj, psi, to_point(e_minus), I1, to_point(e_plus), I2, eps, depth, io);
  const IrregularWitness& iw = w.projective;
  w.achieved_depth = iw.achieved_depth;
  w.complete = iw.complete;
  w.note = iw.note;
  // Steer from a ball around v into the first level, when possible.
  Word steer;
  if (!iw.balls.empty()) {
    const SearchResult sr = find_containing_word(proj, make_region(proj, Ball{to_point(v), eps}), iw.balls.front(),
                                                 io.K_max, io.node_budget, iw.balls.front().radius / 2, 0.05,
                                                 io.beam_width);
    if (sr.found) steer = sr.word;
    else w.note += (w.note.empty() ? "" : "; ") + std::string("no steering word from v found");
  }
  const Point rep = iw.balls.empty() ? to_point(v) : compose_inverse(proj, steer, iw.representative);
  w.direction = to_vec(rep);
  for (Symbol s : steer) push_run(w.runs, s, 1);
  for (Symbol s : iw.word) push_run(w.runs, s, 1);
  const long long shift = static_cast<long long>(steer.size());
  for (int k = 0; k < iw.achieved_depth; ++k) {
    w.checkpoints.push_back(iw.checkpoints[static_cast<std::size_t>(k)] + shift);
    w.high.push_back(k % 2 == 1);
  }
  w.exponents = trace_at(c, w.runs, w.direction, w.checkpoints);
  summarize(w);
  return w;
}

double rotation_number(const Eigen::Matrix2d& m, std::size_t n_iter) {
  const double det = m.determinant();
  if (!(std::fabs(det) > 0)) throw Error(ErrorCode::InvalidArgument, "matrix must be invertible");
  const double tr = m.trace();
  if (det < 0 || tr * tr - 4 * det >= 0) return 0.0;
  // Polar path R_{s alpha} P^s from the identity: P^s moves any direction by less than pi/2.
  Eigen::JacobiSVD<Eigen::Matrix2d> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Eigen::Matrix2d R = svd.matrixU() * svd.matrixV().transpose();
  const Eigen::Matrix2d P = svd.matrixV() * svd.singularValues().asDiagonal() * svd.matrixV().transpose();
  const double alpha = std::atan2(R(1, 0), R(0, 0));
  double phi = 0;
  long double total = 0;
  if (n_iter == 0) n_iter = 1;
  for (std::size_t i = 0; i < n_iter; ++i) {
    const Eigen::Vector2d v(std::cos(phi), std::sin(phi));
    const Eigen::Vector2d pv = P * v;
    const double dp = std::atan2(v[0] * pv[1] - v[1] * pv[0], v.dot(pv));
    const double step = alpha + dp;
    total += step;
    phi = std::fmod(phi + step, kPi);
  }
  double rho = static_cast<double>(total / (static_cast<long double>(n_iter) * kPi));
  rho -= std::floor(rho);
  if (rho >= 1 - 1e-15 || rho < 0) rho = 0;
  return rho;
}

SpectrumEntry periodic_spectrum(const Cocycle& c, const Word& w) {
  if (w.empty()) throw Error(ErrorCode::InvalidArgument, "period must be >= 1");
  if (w.size() > 30) throw Error(ErrorCode::InvalidArgument, "periods above 30 are not supported");
  const Eigen::MatrixXd P = word_product(c, w);
  Eigen::EigenSolver<Eigen::MatrixXd> es(P, false);
  SpectrumEntry e;
  e.word = w;
  for (int i = 0; i < c.d(); ++i)
    e.exponents.push_back(std::log(std::abs(std::complex<double>(es.eigenvalues()[i]))) / static_cast<double>(w.size()));
  std::sort(e.exponents.rbegin(), e.exponents.rend());
  for (double x : e.exponents) e.sum += x;
  return e;
}

SpectrumReport spectrum_report(const Cocycle& c, const std::vector<Word>& words, double tol) {
  SpectrumReport r;
  for (const auto& w : words) {
    r.entries.push_back(periodic_spectrum(c, w));
    if (!(std::fabs(r.entries.back().sum) <= 1e-8)) r.sums_ok = false;
  }
  for (std::size_t i = 0; i < r.entries.size(); ++i)
    for (std::size_t j = i + 1; j < r.entries.size(); ++j)
      for (std::size_t k = 0; k < r.entries[i].exponents.size(); ++k)
        r.max_deviation =
            std::max(r.max_deviation, std::fabs(r.entries[i].exponents[k] - r.entries[j].exponents[k]));
  r.verdict = r.max_deviation > tol ? "distinct-spectra" : "equal-spectra";
  return r;
}

Resonance symplectic_center_check(double theta1, double theta2, int N, double tol) {
  if (N < 1) throw Error(ErrorCode::InvalidArgument, "order must be >= 1");
  Resonance r;
  r.residual = std::numeric_limits<double>::infinity();
  auto test = [&](int m, int n) {
    const double res = std::fabs(wrap_pm_pi(m * theta1 + n * theta2));
    r.residual = std::min(r.residual, res);
    if (res <= tol) {
      r.resonant = true;
      r.m = m;
      r.n = n;
      r.residual = res;
      return true;
    }
    return false;
  };
  for (int s = 1; s <= N; ++s) {
    for (int m = s; m >= 1; --m) {
      const int k = s - m;
      if (test(m, k)) return r;
      if (k != 0 && test(m, -k)) return r;
    }
    if (test(0, s)) return r;
  }
  return r;
}

}  // namespace hitdyn
