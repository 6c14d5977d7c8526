#include "hitdyn/hitting.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <unordered_map>
#include <unordered_set>

namespace hitdyn {

namespace {

double fmod_pos(double x, double p) {
  double r = std::fmod(x, p);
  if (r < 0) r += p;
  if (r >= p) r = 0;
  return r;
}

std::uint64_t mix(std::uint64_t h, std::int64_t v) {
  return splitmix64(h ^ (static_cast<std::uint64_t>(v) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2)));
}

// Net with fast lookup of points that may lie deep inside a region.
class NetIndex {
 public:
  NetIndex(const Space& sp, double delta) : sp_(sp) {
    pts_ = build_net(sp, delta, 0);
    if (sp.kind == SpaceKind::Circle || sp.kind == SpaceKind::Torus) {
      grid_ = true;
      m_ = static_cast<long>(grid_points_per_axis(delta));
      period_ = 1;
    } else if (sp.kind == SpaceKind::Projective && sp.dim == 2) {
      grid_ = true;
      m_ = static_cast<long>(pts_.size());
      period_ = kPi;
    } else if (sp.kind != SpaceKind::Symbolic) {
      cell_ = 4 * delta;
      for (std::size_t i = 0; i < pts_.size(); ++i) buckets_[key(pts_[i].c, 0)].push_back(i);
    }
  }

  const std::vector<Point>& points() const { return pts_; }

  // Calls f(i) for every net point that could satisfy region ⊇ B(p_i, rr).
  void for_candidates(const Region& r, double rr, const std::function<void(std::size_t)>& f) const {
    if (grid_) {
      const int d = sp_.kind == SpaceKind::Torus ? sp_.dim : 1;
      std::vector<std::vector<long>> axes(static_cast<std::size_t>(d));
      for (int i = 0; i < d; ++i) {
        double lo, hi;
        if (!interval(r, rr, i, lo, hi)) return;
        axes[static_cast<std::size_t>(i)] = axis_indices(lo, hi);
        if (axes[static_cast<std::size_t>(i)].empty()) return;
      }
      std::vector<std::size_t> pos(static_cast<std::size_t>(d), 0);
      while (true) {
        long idx = 0;
        for (int i = 0; i < d; ++i) idx = idx * m_ + axes[static_cast<std::size_t>(i)][pos[static_cast<std::size_t>(i)]];
        f(static_cast<std::size_t>(idx));
        int i = d - 1;
        while (i >= 0 && ++pos[static_cast<std::size_t>(i)] == axes[static_cast<std::size_t>(i)].size()) {
          pos[static_cast<std::size_t>(i)] = 0;
          --i;
        }
        if (i < 0) break;
      }
      return;
    }
    if (sp_.kind == SpaceKind::Symbolic || r.kind != Region::Kind::Ball) {
      for (std::size_t i = 0; i < pts_.size(); ++i) f(i);
      return;
    }
    const double reach = r.radius - rr;
    if (reach < 0) return;
    scan_cube(r.center.c, reach, f);
    if (sp_.kind == SpaceKind::Projective) {
      std::array<double, 4> neg{};
      for (int i = 0; i < sp_.dim; ++i) neg[static_cast<std::size_t>(i)] = -r.center.c[static_cast<std::size_t>(i)];
      scan_cube(neg, reach, f);
    }
  }

 private:
  std::int64_t key(const std::array<double, 4>& c, int) const {
    std::uint64_t h = 0;
    for (int i = 0; i < sp_.dim; ++i) h = mix(h, static_cast<std::int64_t>(std::floor(c[static_cast<std::size_t>(i)] / cell_)));
    return static_cast<std::int64_t>(h);
  }

  void scan_cube(const std::array<double, 4>& c, double reach,
                 const std::function<void(std::size_t)>& f) const {
    const int d = sp_.dim;
    std::array<long, 4> lo{}, hi{};
    for (int i = 0; i < d; ++i) {
      lo[static_cast<std::size_t>(i)] = static_cast<long>(std::floor((c[static_cast<std::size_t>(i)] - reach) / cell_));
      hi[static_cast<std::size_t>(i)] = static_cast<long>(std::floor((c[static_cast<std::size_t>(i)] + reach) / cell_));
    }
    std::array<long, 4> cur = lo;
    while (true) {
      std::uint64_t h = 0;
      for (int i = 0; i < d; ++i) h = mix(h, cur[static_cast<std::size_t>(i)]);
      auto it = buckets_.find(static_cast<std::int64_t>(h));
      if (it != buckets_.end())
        for (std::size_t idx : it->second) f(idx);
      int i = d - 1;
      while (i >= 0 && ++cur[static_cast<std::size_t>(i)] > hi[static_cast<std::size_t>(i)]) {
        cur[static_cast<std::size_t>(i)] = lo[static_cast<std::size_t>(i)];
        --i;
      }
      if (i < 0) break;
    }
  }

  bool interval(const Region& r, double rr, int axis, double& lo, double& hi) const {
    switch (r.kind) {
      case Region::Kind::Arc:
        if (r.len >= r.period) {
          lo = 0;
          hi = period_;
          return true;
        }
        lo = r.a + rr;
        hi = r.a + r.len - rr;
        return hi >= lo;
      case Region::Kind::Ball: {
        const double reach = r.radius - rr;
        if (reach < 0) return false;
        const double c = sp_.kind == SpaceKind::Projective ? projective_angle(r.center) : r.center.c[static_cast<std::size_t>(axis)];
        lo = c - reach;
        hi = c + reach;
        return true;
      }
      case Region::Kind::Parallelogram: {
        if (region_inner_radius(r) >= 0.5) {
          lo = 0;
          hi = 1;
          return true;
        }
        double w = 0;
        for (int j = 0; j < r.dim; ++j) w += std::fabs(r.P(axis, j));
        w -= rr;
        if (w < 0) return false;
        lo = r.center.c[static_cast<std::size_t>(axis)] - w;
        hi = r.center.c[static_cast<std::size_t>(axis)] + w;
        return true;
      }
    }
    return false;
  }

  std::vector<long> axis_indices(double lo, double hi) const {
    const double h = period_ / static_cast<double>(m_);
    if (!(hi - lo < period_)) lo = 0, hi = period_ * (1 - 1e-12);
    const long a = static_cast<long>(std::ceil(lo / h - 1e-9));
    const long b = static_cast<long>(std::floor(hi / h + 1e-9));
    std::vector<long> out;
    if (b < a) return out;
    if (b - a + 1 >= m_) {
      out.resize(static_cast<std::size_t>(m_));
      for (long j = 0; j < m_; ++j) out[static_cast<std::size_t>(j)] = j;
      return out;
    }
    for (long j = a; j <= b; ++j) out.push_back(((j % m_) + m_) % m_);
    return out;
  }

  Space sp_;
  std::vector<Point> pts_;
  bool grid_ = false;
  long m_ = 1;
  double period_ = 1;
  double cell_ = 1;
  std::unordered_map<std::int64_t, std::vector<std::size_t>> buckets_;
};

std::uint64_t region_key(const Region& r, double q, double lq) {
  q = std::max(q, 1e-14);
  std::uint64_t h = static_cast<std::uint64_t>(r.kind) + 1;
  switch (r.kind) {
    case Region::Kind::Arc:
      h = mix(h, std::llround(fmod_pos(r.a, r.period) / q));
      h = mix(h, std::llround(std::log(std::max(r.len, 1e-300)) / lq));
      return h;
    case Region::Kind::Ball:
      if (r.center.kind == SpaceKind::Symbolic) {
        for (Symbol s : r.center.word->take(24)) h = mix(h, s);
      } else {
        for (int i = 0; i < r.center.dim; ++i) h = mix(h, std::llround(r.center.c[static_cast<std::size_t>(i)] / q));
      }
      h = mix(h, std::llround(std::log(std::max(r.radius, 1e-300)) / lq));
      return h;
    case Region::Kind::Parallelogram:
      for (int i = 0; i < r.dim; ++i) h = mix(h, std::llround(r.center.c[static_cast<std::size_t>(i)] / q));
      for (int i = 0; i < r.dim; ++i)
        for (int j = 0; j < r.dim; ++j) {
          const double v = r.P(i, j) / q;
          if (std::fabs(v) < 1e15) h = mix(h, std::llround(v));
          else h = mix(mix(h, v > 0 ? 1 : 2), std::llround(std::log(std::fabs(v)) / lq));
        }
      return h;
  }
  return h;
}

struct Node {
  Region reg;
  std::int64_t parent;
  Symbol sym;
  int depth;
};

Word word_of(const std::vector<Node>& nodes, std::int64_t i) {
  Word w;
  while (i >= 0 && nodes[static_cast<std::size_t>(i)].parent >= 0) {
    w.push_back(nodes[static_cast<std::size_t>(i)].sym);
    i = nodes[static_cast<std::size_t>(i)].parent;
  }
  std::reverse(w.begin(), w.end());
  return w;
}

void check_params(double eps, int K_max, double delta) {
  if (!(eps > 0)) throw Error(ErrorCode::InvalidArgument, "eps must be positive");
  if (K_max < 1) throw Error(ErrorCode::InvalidArgument, "K_max must be >= 1");
  if (!(delta > 0) || delta > eps / 8 * (1 + 1e-12))
    throw Error(ErrorCode::InvalidArgument, "resolution must satisfy 0 < delta <= eps/8");
}

}  // namespace

double least_squares_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const std::size_t n = std::min(x.size(), y.size());
  if (n < 2) return 0;
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  return sxx > 0 ? sxy / sxx : 0;
}

static double decay_slope(const std::vector<double>& best) {
  std::vector<double> xs, ys;
  for (std::size_t p = 1; p < best.size(); ++p)
    if (std::isfinite(best[p])) {
      xs.push_back(static_cast<double>(p));
      ys.push_back(best[p]);
    }
  return least_squares_slope(xs, ys);
}

HittingResult certify_frequent_hitting(const GeneratorSystem& sys, double eps, int K_max, double delta,
                                       std::uint64_t seed, const HittingOptions& opt) {
  (void)seed;
  check_params(eps, K_max, delta);
  if (!sys.invertible()) throw Error(ErrorCode::InvalidArgument, "hitting certification needs invertible generators");
  const NetIndex net(sys.space(), delta);
  HittingResult res;
  HittingCertificate& cert = res.certificate;
  cert.eps = eps;
  cert.delta = delta;
  cert.translation_reduced = sys.translation_invariant();
  cert.target_centers = net.points();
  cert.base_centers = cert.translation_reduced ? std::vector<Point>{net.points().front()} : net.points();
  for (double rho = opt.access_convention ? eps : eps / 2; rho >= delta * (1 - 1e-12); rho /= 2)
    cert.target_radii.push_back(rho);
  const std::size_t levels = cert.target_radii.size();
  std::vector<double> rr(levels), rcert(levels);
  for (std::size_t k = 0; k < levels; ++k) {
    rcert[k] = std::min(eps / 4, cert.target_radii[k] / 2);
    rr[k] = rcert[k] + delta;
  }
  const std::size_t T = cert.target_centers.size();
  const double q = delta / 2;

  for (std::size_t b = 0; b < cert.base_centers.size(); ++b) {
    std::vector<std::uint8_t> done(T * levels, 0);
    std::size_t remaining = T * levels;
    std::vector<Node> nodes;
    std::unordered_set<std::uint64_t> seen;
    std::vector<double> best(static_cast<std::size_t>(K_max) + 1, -std::numeric_limits<double>::infinity());

    auto process = [&](std::int64_t ni) {
      const Node& nd = nodes[static_cast<std::size_t>(ni)];
      best[static_cast<std::size_t>(nd.depth)] =
          std::max(best[static_cast<std::size_t>(nd.depth)], std::log(std::max(region_inner_radius(nd.reg), 1e-300)));
      for (std::size_t k = 0; k < levels; ++k) {
        net.for_candidates(nd.reg, rr[k], [&](std::size_t idx) {
          std::uint8_t& f = done[idx * levels + k];
          if (f) return;
          if (!region_contains(nd.reg, Ball{cert.target_centers[idx], rr[k]})) return;
          f = 1;
          --remaining;
          HittingWitness w;
          w.base = b;
          w.target = idx;
          w.level = static_cast<int>(k);
          w.word = word_of(nodes, ni);
          w.contained_radius = rcert[k];
          cert.K = std::max(cert.K, nd.depth);
          cert.witnesses.push_back(std::move(w));
        });
      }
    };

    nodes.push_back({make_region(sys, Ball{cert.base_centers[b], eps - delta}), -1, 0, 0});
    seen.insert(region_key(nodes[0].reg, q, opt.dedup_log));
    process(0);
    std::vector<std::int64_t> frontier{0};
    for (int p = 1; p <= K_max && remaining > 0 && !frontier.empty(); ++p) {
      std::vector<std::int64_t> next;
      for (std::int64_t ni : frontier) {
        for (Symbol s = 1; s <= sys.kappa() && remaining > 0; ++s) {
          Region child = advance(sys, nodes[static_cast<std::size_t>(ni)].reg, s);
          if (!seen.insert(region_key(child, q, opt.dedup_log)).second) continue;
          if (++cert.nodes > opt.node_budget)
            throw Error(ErrorCode::BudgetExceeded, "word-tree nodes exceed " + std::to_string(opt.node_budget));
          nodes.push_back({std::move(child), ni, s, p});
          const auto id = static_cast<std::int64_t>(nodes.size() - 1);
          next.push_back(id);
          process(id);
        }
        if (remaining == 0) break;
      }
      frontier.swap(next);
    }
    if (remaining > 0) {
      std::size_t first = 0;
      while (done[first]) ++first;
      Refutation& ref = res.refutation;
      ref.reason = "no word of length <= " + std::to_string(K_max) + " maps the base ball over the target ball";
      ref.base = cert.base_centers[b];
      ref.target = cert.target_centers[first / levels];
      ref.target_radius = cert.target_radii[first % levels];
      ref.K_max = K_max;
      ref.best_log_radius = best;
      ref.decay_slope = decay_slope(best);
      res.certified = false;
      return res;
    }
  }
  res.certified = true;
  return res;
}

bool verify_witness(const GeneratorSystem& sys, const HittingCertificate& cert, const HittingWitness& w,
                    std::size_t samples, std::uint64_t seed) {
  const Point& base = cert.base_centers.at(w.base);
  const Point& target = cert.target_centers.at(w.target);
  const Region img = advance(sys, make_region(sys, Ball{base, cert.eps - cert.delta}), w.word);
  if (!region_contains(img, Ball{target, w.contained_radius + cert.delta})) return false;
  if (w.contained_radius < std::min(cert.eps / 4, cert.target_radii.at(static_cast<std::size_t>(w.level)) / 2) * (1 - 1e-12))
    return false;
  Rng rng(seed);
  for (std::size_t s = 0; s < samples; ++s) {
    const Point y = sample_in_ball(Ball{target, w.contained_radius}, rng);
    if (!(distance(compose_inverse(sys, w.word, y), base) < cert.eps)) return false;
  }
  return true;
}

constexpr std::size_t kLookaheadNodes = 1 << 14;

CoveringResult covering_time(const GeneratorSystem& sys, const std::vector<Symbol>& symbols, double eps,
                             int K_max, double delta, std::size_t max_bases) {
  check_params(eps, K_max, delta);
  std::vector<Symbol> sub = symbols;
  if (sub.empty())
    for (Symbol s = 1; s <= sys.kappa(); ++s) sub.push_back(s);
  for (Symbol s : sub) sys.gen(s);
  const NetIndex net(sys.space(), delta);
  const auto& pts = net.points();
  CoveringResult res;
  res.eps = eps;
  res.delta = delta;
  if (sys.subsystem(sub).translation_invariant()) {
    res.bases.push_back(pts.front());
  } else {
    const std::size_t stride = (max_bases > 0 && max_bases < pts.size()) ? (pts.size() + max_bases - 1) / max_bases : 1;
    for (std::size_t i = 0; i < pts.size(); i += stride) res.bases.push_back(pts[i]);
  }
  for (const Point& base : res.bases) {
    std::vector<std::uint8_t> covered(pts.size(), 0);
    std::size_t remaining = pts.size();
    auto gain = [&](const Region& r, bool mark) {
      std::size_t g = 0;
      net.for_candidates(r, delta, [&](std::size_t i) {
        if (covered[i] || !region_contains(r, Ball{pts[i], delta})) return;
        ++g;
        if (mark) covered[i] = 1;
      });
      if (mark) remaining -= g;
      return g;
    };
    Region R = make_region(sys, Ball{base, eps - delta});
    gain(R, true);
    Word route;
    std::vector<double> best{std::log(std::max(region_inner_radius(R), 1e-300))};
    auto step = [&](Symbol s) {
      R = advance(sys, R, s);
      route.push_back(s);
      gain(R, true);
      best.push_back(std::log(std::max(region_inner_radius(R), 1e-300)));
    };
    while (static_cast<int>(route.size()) < K_max && remaining > 0) {
      Symbol pick = sub.front();
      std::size_t bg = 0;
      for (Symbol s : sub) {
        const std::size_t g = gain(advance(sys, R, s), false);
        if (g > bg) bg = g, pick = s;
      }
      if (bg > 0 || sub.size() == 1) {
        step(pick);
        continue;
      }
      // No single step gains: shortest continuation that does, breadth first.
      struct Cand {
        Region reg;
        Word w;
      };
      std::vector<Cand> layer{{R, {}}};
      Word found;
      std::size_t found_gain = 0, nodes = 0;
      const int room = K_max - static_cast<int>(route.size());
      for (int d = 1; d <= room && found.empty() && nodes < kLookaheadNodes; ++d) {
        std::vector<Cand> next;
        for (const auto& c : layer) {
          for (Symbol s : sub) {
            Cand n{advance(sys, c.reg, s), c.w};
            n.w.push_back(s);
            const std::size_t g = gain(n.reg, false);
            if (g > found_gain) found_gain = g, found = n.w;
            next.push_back(std::move(n));
            ++nodes;
          }
        }
        layer.swap(next);
      }
      if (found.empty()) found = {sub.front()};
      for (Symbol s : found) step(s);
    }
    if (remaining > 0) {
      std::size_t first = 0;
      while (covered[first]) ++first;
      res.refutation.reason = "route of length " + std::to_string(K_max) + " leaves part of the space uncovered";
      res.refutation.base = base;
      res.refutation.target = pts[first];
      res.refutation.target_radius = delta;
      res.refutation.K_max = K_max;
      res.refutation.best_log_radius = best;
      res.refutation.decay_slope = decay_slope(best);
      res.covered = false;
      return res;
    }
    res.K = std::max(res.K, static_cast<int>(route.size()));
    res.routes.push_back(std::move(route));
  }
  res.covered = true;
  return res;
}

// Offsets (l, r) of the dynamic ball around x for a monotone one-dimensional generator.
static bool dyn_ball_offsets(const GeneratorSystem& sys, Symbol s, const Point& x, int n, double eps,
                             std::vector<double>& orbit, double& l, double& r) {
  const Generator& g = sys.gen(s);
  const bool circle = sys.space().kind == SpaceKind::Circle;
  const bool line = sys.space().kind == SpaceKind::Projective && sys.space().dim == 2;
  if (!(circle || line) || !g.orientation_preserving()) return false;
  try {
    g.lift(0.0);
  } catch (const Error&) {
    return false;
  }
  orbit.assign(static_cast<std::size_t>(n) + 1, 0.0);
  orbit[0] = circle ? x.c[0] : projective_angle(x);
  for (int j = 0; j < n; ++j) orbit[static_cast<std::size_t>(j) + 1] = g.lift(orbit[static_cast<std::size_t>(j)]);
  l = r = eps;
  for (int j = n - 1; j >= 0; --j) {
    const double xj = orbit[static_cast<std::size_t>(j)], xn = orbit[static_cast<std::size_t>(j) + 1];
    const double nl = xj - g.lift_inverse(xn - l);
    const double nr = g.lift_inverse(xn + r) - xj;
    l = std::min(nl, eps);
    r = std::min(nr, eps);
  }
  return true;
}

double dynamic_ball_inner_radius(const GeneratorSystem& sys, Symbol s, const Point& x, int n, double eps) {
  std::vector<double> orbit;
  double l = 0, r = 0;
  if (dyn_ball_offsets(sys, s, x, n, eps, orbit, l, r)) return std::min(l, r);
  return std::pow(sys.L(), -n) * eps;
}

Region dynamic_ball_image(const GeneratorSystem& sys, Symbol s, const Point& x, int n, double eps) {
  std::vector<double> orbit;
  double l = 0, r = 0;
  if (dyn_ball_offsets(sys, s, x, n, eps, orbit, l, r)) {
    const Generator& g = sys.gen(s);
    double a = orbit[0] - l, b = orbit[0] + r;
    for (int j = 0; j < n; ++j) {
      a = g.lift(a);
      b = g.lift(b);
    }
    Region reg = make_region(sys, Ball{x, eps});
    if (reg.kind == Region::Kind::Arc) {
      reg.a = fmod_pos(a, reg.period);
      reg.len = std::min(b - a, reg.period);
      return reg;
    }
  }
  Region reg = make_region(sys, Ball{x, std::pow(sys.L(), -n) * eps});
  for (int j = 0; j < n; ++j) reg = advance(sys, reg, s);
  return reg;
}

static SearchResult bfs(const GeneratorSystem& sys, const Region& start, int K_max, std::size_t budget,
                        double q, double lq, const std::function<bool(const Region&)>& accept,
                        std::size_t beam = 0, const Point* goal = nullptr) {
  SearchResult out;
  if (accept(start)) {
    out.found = true;
    out.image = start;
    return out;
  }
  std::vector<Node> nodes{{start, -1, 0, 0}};
  std::unordered_set<std::uint64_t> seen{region_key(start, q, lq)};
  std::vector<std::int64_t> frontier{0};
  for (int p = 1; p <= K_max && !frontier.empty(); ++p) {
    std::vector<std::int64_t> next;
    for (std::int64_t ni : frontier) {
      for (Symbol s = 1; s <= sys.kappa(); ++s) {
        Region child = advance(sys, nodes[static_cast<std::size_t>(ni)].reg, s);
        if (!seen.insert(region_key(child, q, lq)).second) continue;
        if (++out.nodes > budget) return out;
        nodes.push_back({std::move(child), ni, s, p});
        const auto id = static_cast<std::int64_t>(nodes.size() - 1);
        if (accept(nodes.back().reg)) {
          out.found = true;
          out.word = word_of(nodes, id);
          out.image = nodes.back().reg;
          return out;
        }
        next.push_back(id);
      }
    }
    if (beam > 0 && next.size() > beam) {
      auto score = [&](std::int64_t i) {
        const Region& r = nodes[static_cast<std::size_t>(i)].reg;
        const double far = goal ? distance(region_center(r), *goal) : 0.0;
        return std::make_pair(-std::round(region_log_size(r) / lq), far);
      };
      std::stable_sort(next.begin(), next.end(),
                       [&](std::int64_t a, std::int64_t b) { return score(a) < score(b); });
      next.resize(beam);
    }
    frontier.swap(next);
  }
  return out;
}

SearchResult find_containing_word(const GeneratorSystem& sys, const Region& start, const Ball& target,
                                  int K_max, std::size_t node_budget, double center_quantum, double log_quantum,
                                  std::size_t beam_width) {
  return bfs(sys, start, K_max, node_budget, center_quantum, log_quantum,
             [&](const Region& r) { return region_contains(r, target); }, beam_width, &target.center);
}

TransitionResult min_transition_time(const GeneratorSystem& sys, const Point& x1, const Point& x2, int n,
                                     double eps, int K_max, Symbol shadow, std::size_t node_budget) {
  TransitionResult res;
  const Region src = dynamic_ball_image(sys, shadow, x1, n, eps);
  const Ball target{x2, std::pow(sys.L(), -n) * eps};
  res.source_size = std::exp(region_log_size(src));
  res.target_radius = target.radius;
  const double q = std::max(target.radius, 1e-15) / 2;
  SearchResult s = bfs(sys, src, K_max, node_budget, q, 0.1,
                       [&](const Region& r) { return region_intersects(r, target); });
  res.found = s.found;
  res.budget_exhausted = !s.found && s.nodes > node_budget;
  res.p = static_cast<int>(s.word.size());
  res.word = std::move(s.word);
  return res;
}

}  // namespace hitdyn
