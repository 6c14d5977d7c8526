#include "hitdyn/irregular.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

namespace hitdyn {

long long schedule_next(double L, const std::vector<long long>& n, const std::vector<long long>& p, double threshold) {
  if (n.empty()) throw Error(ErrorCode::InvalidArgument, "schedule needs n_1");
  if (!(threshold > 0)) throw Error(ErrorCode::InvalidArgument, "threshold must be positive");
  const long long j = static_cast<long long>(n.size());
  const double m = std::max(static_cast<double>(j), 1.0 / threshold);
  const long long c = L > 1 ? static_cast<long long>(std::ceil(2 * std::log(2.0) / std::log(L))) : 0;
  long double sum = 0;
  for (std::size_t i = 0; i < n.size(); ++i) sum += n[i] + (i < p.size() ? p[i] : 0);
  const long long growth = static_cast<long long>(std::ceil(static_cast<long double>(m) * sum - 1e-9L));
  return std::max(2 * n.back() + c + 1, growth);
}

Schedule build_schedule(double L, double eps, const BudgetFn& K, int depth, double threshold, long long n1,
                        long long orbit_budget) {
  if (!(L > 1)) throw Error(ErrorCode::DegenerateLipschitz, "L = 1: use the isometry radius law");
  if (depth < 2) throw Error(ErrorCode::InvalidArgument, "depth must be >= 2");
  if (!(eps > 0)) throw Error(ErrorCode::InvalidArgument, "eps must be positive");
  Schedule s;
  s.depth = depth;
  s.threshold = threshold;
  s.n.push_back(std::max<long long>(1, n1));
  long long total = 0;
  for (int j = 1; j <= depth; ++j) {
    const double r = std::pow(L, -2.0 * static_cast<double>(s.n.back())) * eps / 2;
    s.K.push_back(K(r));
    total += s.n.back() + s.K.back();
    if (total > orbit_budget)
      throw Error(ErrorCode::DepthOverflow, "orbit length " + std::to_string(total) + " exceeds budget");
    if (j == depth) break;
    const long long nx = schedule_next(L, s.n, s.K, threshold);
    s.ratio.push_back(static_cast<double>(total) / static_cast<double>(nx));
    s.n.push_back(nx);
  }
  return s;
}

bool schedule_gap_holds(const Schedule& s, double L) {
  const double c = 2 * std::log(2.0) / std::log(L);
  for (std::size_t j = 0; j + 1 < s.n.size(); ++j)
    if (!(static_cast<double>(s.n[j + 1]) > 2.0 * static_cast<double>(s.n[j]) + c)) return false;
  return true;
}

BirkhoffTrace birkhoff_trace(const GeneratorSystem& sys, const WordStream& omega, const Point& x, const Observable& psi,
                             std::size_t n, std::string label) {
  if (n < 1) throw Error(ErrorCode::InvalidArgument, "trace length must be >= 1");
  BirkhoffTrace t;
  t.label = std::move(label);
  t.averages.reserve(n);
  Point y = x;
  double sum = 0;
  for (std::size_t m = 1; m <= n; ++m) {
    sum += psi(y);
    t.averages.push_back(sum / static_cast<double>(m));
    if (m < n) y = sys.gen(omega.at(static_cast<std::int64_t>(m - 1))).apply(y);
  }
  return t;
}

std::pair<double, double> oscillation_gap(const BirkhoffTrace& trace, const std::vector<long long>& checkpoints) {
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (long long c : checkpoints) {
    if (c < 1 || static_cast<std::size_t>(c) > trace.averages.size())
      throw Error(ErrorCode::InvalidArgument, "checkpoint outside trace");
    const double a = trace.averages[static_cast<std::size_t>(c - 1)];
    lo = std::min(lo, a);
    hi = std::max(hi, a);
  }
  return {lo, hi};
}

double sampled_oscillation(const Space& sp, const Observable& psi, double radius, std::size_t samples,
                           std::uint64_t seed) {
  Rng rng(seed);
  double osc = 0;
  for (std::size_t s = 0; s < samples; ++s) {
    const Point x = sample_point(sp, rng);
    const Point y = sample_in_ball({x, radius}, rng);
    osc = std::max(osc, std::fabs(psi(x) - psi(y)));
  }
  return osc;
}

double sampled_continuity_radius(const Space& sp, const Observable& psi, double bound, std::size_t samples,
                                 std::uint64_t seed) {
  double r = sp.diameter();
  for (int k = 0; k < 60; ++k, r /= 2)
    if (sampled_oscillation(sp, psi, r, samples, seed + static_cast<std::uint64_t>(k)) < bound) return r;
  return r;
}

namespace {

struct Level {
  Ball ball;
  long long n = 0;
  Word transition;  // word after this block (empty for the last level)
};

void fill_from_levels(const GeneratorSystem& sys, const SymbolObservable& psi, Symbol kappa,
                      const std::vector<Level>& lv, int d, double omega, double M, IrregularWitness& w) {
  w.word.clear();
  w.balls.clear();
  w.n.clear();
  w.p.clear();
  w.block_start.clear();
  w.checkpoints.clear();
  for (int b = 0; b < d; ++b) {
    const Level& L = lv[static_cast<std::size_t>(b)];
    w.balls.push_back(L.ball);
    w.n.push_back(L.n);
    w.block_start.push_back(static_cast<long long>(w.word.size()));
    w.word.insert(w.word.end(), static_cast<std::size_t>(L.n), kappa);
    w.checkpoints.push_back(static_cast<long long>(w.word.size()));
    if (b + 1 < d) {
      w.p.push_back(static_cast<long long>(L.transition.size()));
      w.word.insert(w.word.end(), L.transition.begin(), L.transition.end());
    }
  }
  const std::size_t T = w.word.size();
  const std::size_t s = static_cast<std::size_t>(w.block_start.back());
  // Orbit of the representative: backward from the deepest center, then forward through the last block.
  std::vector<double> vals(T);
  Point y = w.balls.back().center;
  for (std::size_t t = s; t-- > 0;) {
    y = sys.gen(w.word[t]).apply_inverse(y);
    vals[t] = psi(w.word[t], y);
  }
  w.representative = s > 0 ? y : w.balls.back().center;
  y = w.balls.back().center;
  for (std::size_t t = s; t < T; ++t) {
    vals[t] = psi(w.word[t], y);
    y = sys.gen(w.word[t]).apply(y);
  }
  // Certified per-step bounds.
  std::vector<double> lo(T, -M), hi(T, M);
  for (int b = 0; b < d; ++b) {
    Point z = w.balls[static_cast<std::size_t>(b)].center;
    const auto start = static_cast<std::size_t>(w.block_start[static_cast<std::size_t>(b)]);
    for (long long i = 0; i < w.n[static_cast<std::size_t>(b)]; ++i) {
      const double v = psi(kappa, z);
      lo[start + static_cast<std::size_t>(i)] = v - omega;
      hi[start + static_cast<std::size_t>(i)] = v + omega;
      z = sys.gen(kappa).apply(z);
    }
  }
  w.averages.clear();
  w.lower.clear();
  w.upper.clear();
  long double sv = 0, sl = 0, sh = 0;
  std::size_t next = 0;
  for (std::size_t t = 0; t < T && next < w.checkpoints.size(); ++t) {
    sv += vals[t];
    sl += lo[t];
    sh += hi[t];
    if (t + 1 == static_cast<std::size_t>(w.checkpoints[next])) {
      const long double m = static_cast<long double>(t + 1);
      w.averages.push_back(static_cast<double>(sv / m));
      w.lower.push_back(static_cast<double>(sl / m));
      w.upper.push_back(static_cast<double>(sh / m));
      ++next;
    }
  }
  double min_odd = std::numeric_limits<double>::infinity(), max_even = -min_odd;
  for (std::size_t b = 0; b < w.checkpoints.size(); ++b) {
    if (b % 2 == 0) max_even = std::max(max_even, w.upper[b]);
    else min_odd = std::min(min_odd, w.lower[b]);
  }
  w.certified_gap = d >= 2 ? min_odd - max_even : 0.0;
  w.representative_radius = std::numeric_limits<double>::infinity();
  for (int b = 0; b < d; ++b)
    w.representative_radius = std::min(
        w.representative_radius,
        w.balls[static_cast<std::size_t>(b)].radius * std::pow(w.L, static_cast<double>(w.block_start[static_cast<std::size_t>(b)])));
}

}  // namespace

IrregularWitness construct_irregular_point(const GeneratorSystem& sys, const Observable& psi, const Point& x1, double I1,
                                           const Point& x2, double I2, double eps, int depth,
                                           const IrregularOptions& opt) {
  if (!(I1 < I2)) throw Error(ErrorCode::NoGap, "I1 must be strictly below I2");
  if (depth < 2) throw Error(ErrorCode::InvalidArgument, "depth must be >= 2");
  if (!(eps > 0)) throw Error(ErrorCode::InvalidArgument, "eps must be positive");
  const double delta_I = I2 - I1;
  const Symbol kappa = opt.shadow ? opt.shadow : static_cast<Symbol>(sys.kappa());
  const Generator& g = sys.gen(kappa);
  const Space& sp = sys.space();

  IrregularWitness w;
  w.I1 = I1;
  w.I2 = I2;
  w.L = sys.L();
  w.requested_depth = depth;
  w.isometry_mode = !(sys.L() > 1 + 1e-12);
  w.eps0 = sampled_continuity_radius(sp, psi, delta_I / 8, opt.samples, opt.seed);
  w.eps = std::min(eps, w.eps0);

  // Basin precondition along f_kappa orbits.
  for (int side = 0; side < 2; ++side) {
    Point y = side == 0 ? x1 : x2;
    const double I = side == 0 ? I1 : I2;
    double sum = 0;
    long long next = std::max<long long>(1, opt.n1_min);
    for (long long t = 1; t <= opt.basin_horizon; ++t) {
      sum += psi(y);
      y = g.apply(y);
      if (t == next) {
        if (std::fabs(sum / static_cast<double>(t) - I) > delta_I / 8)
          throw Error(ErrorCode::BasinCheckFailed, std::string("average along the orbit of x") + (side ? "2" : "1") +
                                                       " at n = " + std::to_string(t) + " is " +
                                                       std::to_string(sum / static_cast<double>(t)));
        next *= 2;
      }
    }
  }

  double M = opt.psi_bound;
  if (!(M > 0)) {
    Rng rng(opt.seed + 101);
    for (std::size_t s = 0; s < opt.samples; ++s) M = std::max(M, std::fabs(psi(sample_point(sp, rng))));
    M = std::max({M, std::fabs(psi(x1)), std::fabs(psi(x2))});
  }
  const double omega = opt.psi_lipschitz > 0 ? opt.psi_lipschitz * w.eps / 2
                                             : sampled_oscillation(sp, psi, w.eps / 2, opt.samples, opt.seed + 202);

  const SymbolObservable value =
      opt.psi_symbol ? opt.psi_symbol : SymbolObservable([&psi](Symbol, const Point& p) { return psi(p); });
  const double L = sys.L();
  auto side_point = [&](int b) { return b % 2 == 0 ? x1 : x2; };
  auto radius = [&](int b, long long n) {
    if (w.isometry_mode) return w.eps * std::pow(2.0, -(b + 1));
    const double law = std::pow(L, -static_cast<double>(n)) * w.eps / 2;
    return std::max(law, dynamic_ball_inner_radius(sys, kappa, side_point(b), static_cast<int>(std::min<long long>(n, 1 << 30)), w.eps / 2));
  };
  auto next_n = [&](const std::vector<long long>& n, const std::vector<long long>& p) {
    if (!w.isometry_mode) return schedule_next(L, n, p, opt.threshold);
    const double m = std::max(static_cast<double>(n.size()), 1.0 / opt.threshold);
    long long sum = 0;
    for (std::size_t i = 0; i < n.size(); ++i) sum += n[i] + (i < p.size() ? p[i] : 0);
    return std::max(2 * n.back() + 1, static_cast<long long>(std::ceil(m * static_cast<double>(sum) - 1e-9)));
  };

  std::vector<Level> lv;
  const long long n1 = std::max<long long>(1, opt.n1_min);
  lv.push_back({Ball{x1, radius(0, n1)}, n1, {}});
  std::vector<long long> ns{n1}, ps;
  long long total = n1;
  for (int b = 0; b + 1 < depth; ++b) {
    Region R = make_region(sys, lv.back().ball);
    for (long long i = 0; i < lv.back().n; ++i) R = advance(sys, R, kappa);
    long long guess = 0;
    bool ok = false;
    long long n_next = 0;
    SearchResult sr;
    for (int iter = 0; iter < 64; ++iter) {
      std::vector<long long> pp = ps;
      pp.push_back(guess);
      n_next = next_n(ns, pp);
      if (total + guess + n_next > opt.orbit_budget) break;
      const Ball target{side_point(b + 1), radius(b + 1, n_next)};
      const double q = std::max(target.radius / 2, 1e-300);
      sr = find_containing_word(sys, R, target, opt.K_max, opt.node_budget, q, 0.05, 0);
      if (!sr.found && opt.beam_width > 0)
        sr = find_containing_word(sys, R, target, opt.K_max, opt.node_budget * 8, q, 0.05, opt.beam_width);
      if (!sr.found) break;
      const long long p = static_cast<long long>(sr.word.size());
      pp.back() = p;
      if (next_n(ns, pp) <= n_next) {
        ok = true;
        lv.back().transition = sr.word;
        ps.push_back(p);
        ns.push_back(n_next);
        total += p + n_next;
        lv.push_back({target, n_next, {}});
        break;
      }
      guess = p;
    }
    if (!ok) {
      if (b == 0) throw Error(ErrorCode::TransitionNotFound, "no transition word into the second block");
      w.note = "construction stopped at level " + std::to_string(b + 1) +
               (total + guess + n_next > opt.orbit_budget ? ": orbit budget exhausted" : ": transition not found");
      break;
    }
  }

  // Largest depth whose witness passes the independent audit.
  for (int d = static_cast<int>(lv.size()); d >= 2; --d) {
    fill_from_levels(sys, value, kappa, lv, d, omega, M, w);
    w.achieved_depth = d;
    const WitnessAudit a = audit_witness(sys, psi, w, 8, opt.seed + 303, opt.psi_symbol);
    if (a.ok && w.certified_gap >= delta_I / 3 - 1e-12) break;
    if (d == 2) w.achieved_depth = 0;
  }
  if (w.achieved_depth > 0 && w.achieved_depth < static_cast<int>(lv.size())) {
    if (!w.note.empty()) w.note += "; ";
    w.note += "deeper levels fail the forward audit in double precision";
  }
  w.complete = w.achieved_depth == depth;
  return w;
}

WitnessAudit audit_witness(const GeneratorSystem& sys, const Observable& psi, const IrregularWitness& w,
                           std::size_t nested_samples, std::uint64_t seed, const SymbolObservable& psi_symbol) {
  WitnessAudit a;
  Point y = w.representative;
  long double sum = 0;
  std::size_t next = 0;
  for (std::size_t t = 0; t < w.word.size() && next < w.checkpoints.size(); ++t) {
    sum += psi_symbol ? psi_symbol(w.word[t], y) : psi(y);
    y = sys.gen(w.word[t]).apply(y);
    if (t + 1 == static_cast<std::size_t>(w.checkpoints[next])) {
      a.recomputed.push_back(static_cast<double>(sum / static_cast<long double>(t + 1)));
      ++next;
    }
  }
  a.max_average_error = 0;
  for (std::size_t k = 0; k < a.recomputed.size() && k < w.averages.size(); ++k)
    a.max_average_error = std::max(a.max_average_error, std::fabs(a.recomputed[k] - w.averages[k]));
  if (a.recomputed.size() != w.checkpoints.size()) a.max_average_error = std::numeric_limits<double>::infinity();
  const double third = (w.I2 - w.I1) / 3;
  a.bounds_hold = !a.recomputed.empty();
  for (std::size_t k = 0; k < a.recomputed.size(); ++k) {
    if (k % 2 == 0 && !(a.recomputed[k] <= w.I1 + third)) a.bounds_hold = false;
    if (k % 2 == 1 && !(a.recomputed[k] >= w.I2 - third)) a.bounds_hold = false;
  }
  a.nested = true;
  Rng rng(seed);
  for (std::size_t k = 1; k < w.balls.size() && a.nested; ++k) {
    const auto from = static_cast<std::size_t>(w.block_start[k - 1]);
    const auto to = static_cast<std::size_t>(w.block_start[k]);
    const Word seg(w.word.begin() + static_cast<std::ptrdiff_t>(from), w.word.begin() + static_cast<std::ptrdiff_t>(to));
    const Region img = advance(sys, make_region(sys, w.balls[k - 1]), seg);
    if (!region_contains(img, w.balls[k])) a.nested = false;
    for (std::size_t s = 0; s < nested_samples && a.nested; ++s) {
      const Point q = sample_in_ball(w.balls[k], rng);
      if (!in_ball(w.balls[k - 1], compose_inverse(sys, seg, q))) a.nested = false;
    }
  }
  a.ok = a.max_average_error <= 1e-9 && a.bounds_hold && a.nested;
  return a;
}

std::string run_length(const Word& w) {
  std::ostringstream os;
  for (std::size_t i = 0; i < w.size();) {
    std::size_t j = i;
    while (j < w.size() && w[j] == w[i]) ++j;
    if (i) os << ' ';
    os << w[i];
    if (j - i > 1) os << '^' << (j - i);
    i = j;
  }
  return os.str();
}

std::string serialize_witness(const IrregularWitness& w) {
  std::ostringstream os;
  os.precision(12);
  os << "irregular-witness\n";
  os << "I1 " << w.I1 << "\nI2 " << w.I2 << "\neps " << w.eps << "\neps0 " << w.eps0 << "\nL " << w.L << "\n";
  os << "depth " << w.achieved_depth << " of " << w.requested_depth << (w.complete ? " complete" : " incomplete") << "\n";
  if (!w.note.empty()) os << "note " << w.note << "\n";
  os << "certified_gap " << w.certified_gap << "\n";
  os << "representative " << w.representative.str() << " radius " << w.representative_radius << "\n";
  os << "word " << run_length(w.word) << "\n";
  for (std::size_t k = 0; k < w.balls.size(); ++k)
    os << "ball " << k << " center " << w.balls[k].center.str() << " radius " << w.balls[k].radius << " n "
       << w.n[k] << " start " << w.block_start[k] << "\n";
  for (std::size_t k = 0; k < w.checkpoints.size(); ++k)
    os << "checkpoint " << k << " t " << w.checkpoints[k] << " average " << w.averages[k] << " lower " << w.lower[k]
       << " upper " << w.upper[k] << "\n";
  return os.str();
}

}  // namespace hitdyn
