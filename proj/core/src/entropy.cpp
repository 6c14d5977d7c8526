#include "hitdyn/entropy.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <sstream>
#include <unordered_map>

#include "hitdyn/hitting.hpp"

namespace hitdyn {

namespace {

std::uint64_t mix(std::uint64_t h, std::uint64_t v) { return splitmix64(h ^ (v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2))); }

std::uint64_t cell_hash(const std::array<long long, 4>& c, int d) {
  std::uint64_t h = static_cast<std::uint64_t>(d);
  for (int i = 0; i < d; ++i) h = mix(h, static_cast<std::uint64_t>(c[static_cast<std::size_t>(i)]));
  return h;
}

void neighbours(const std::array<long long, 4>& c, int d, long long wrap, std::vector<std::uint64_t>& out) {
  int total = 1;
  for (int i = 0; i < d; ++i) total *= 3;
  for (int k = 0; k < total; ++k) {
    std::array<long long, 4> q = c;
    int r = k;
    for (int i = 0; i < d; ++i, r /= 3) {
      auto& x = q[static_cast<std::size_t>(i)];
      x += r % 3 - 1;
      if (wrap > 0) x = ((x % wrap) + wrap) % wrap;
    }
    out.push_back(cell_hash(q, d));
  }
}

// Bucket key of p and the keys of every bucket that may hold a point within distance < eps.
void cell_keys(const Point& p, double eps, std::uint64_t& own, std::vector<std::uint64_t>& probes) {
  probes.clear();
  std::array<long long, 4> c{};
  switch (p.kind) {
    case SpaceKind::Circle:
    case SpaceKind::Torus: {
      const long long m = std::max(1LL, static_cast<long long>(std::floor(1.0 / eps)));
      for (int i = 0; i < p.dim; ++i)
        c[static_cast<std::size_t>(i)] =
            std::min(m - 1, static_cast<long long>(std::floor(wrap01(p[i]) * static_cast<double>(m))));
      own = cell_hash(c, p.dim);
      neighbours(c, p.dim, m, probes);
      break;
    }
    case SpaceKind::Sphere2:
    case SpaceKind::Projective: {
      int big = 0;
      for (int i = 1; i < p.dim; ++i)
        if (std::fabs(p[i]) > std::fabs(p[big])) big = i;
      const double sign = p.kind == SpaceKind::Projective && p[big] < 0 ? -1.0 : 1.0;
      for (int i = 0; i < p.dim; ++i)
        c[static_cast<std::size_t>(i)] = static_cast<long long>(std::floor(sign * p[i] / eps));
      own = cell_hash(c, p.dim);
      neighbours(c, p.dim, 0, probes);
      if (p.kind == SpaceKind::Projective) {
        for (int i = 0; i < p.dim; ++i)
          c[static_cast<std::size_t>(i)] = static_cast<long long>(std::floor(-sign * p[i] / eps));
        neighbours(c, p.dim, 0, probes);
      }
      break;
    }
    case SpaceKind::Symbolic: {
      const int k = std::clamp(static_cast<int>(std::floor(-std::log(eps) + 1e-9)), 0, 30);
      std::uint64_t h = 17;
      for (int i = 1; i <= k; ++i) h = mix(h, static_cast<std::uint64_t>(p.word->at(i)));
      own = h;
      probes.push_back(h);
      break;
    }
  }
  std::sort(probes.begin(), probes.end());
  probes.erase(std::unique(probes.begin(), probes.end()), probes.end());
}

bool close(const std::vector<Point>& a, const std::vector<Point>& b, double eps) {
  for (std::size_t t = 0; t < a.size(); ++t)
    if (distance(a[t], b[t]) >= eps) return false;
  return true;
}

void check_grids(const std::vector<double>& eps, const std::vector<int>& n) {
  if (eps.empty() || n.empty()) throw Error(ErrorCode::InvalidArgument, "eps and n grids must be nonempty");
  for (double e : eps)
    if (!(e > 0)) throw Error(ErrorCode::InvalidArgument, "eps must be positive");
  for (int k : n)
    if (k < 1) throw Error(ErrorCode::InvalidArgument, "n must be >= 1");
}

EntropyEstimate blank(const std::vector<double>& eps, const std::vector<int>& n) {
  EntropyEstimate e;
  e.eps = eps;
  e.n = n;
  e.raw_counts.assign(n.size(), std::vector<double>(eps.size(), 0.0));
  e.std_error.assign(n.size(), std::vector<double>(eps.size(), 0.0));
  return e;
}

// Word-driven orbit x, f_{w_0} x, ..., n points.
OrbitFn word_orbit(const GeneratorSystem& sys, std::function<Symbol(int)> sym) {
  return [&sys, sym](const Point& x, int n, std::vector<Point>& out) {
    out.clear();
    out.push_back(x);
    for (int t = 1; t < n; ++t) out.push_back(sys.gen(sym(t - 1)).apply(out.back()));
  };
}

std::vector<Point> candidates_for(const GeneratorSystem& sys, const std::vector<double>& eps, int n,
                                  const EntropyOptions& opt, std::string* note) {
  const Space& sp = sys.space();
  const double emin = *std::min_element(eps.begin(), eps.end());
  NetOptions no;
  no.cap = opt.net_cap;
  if (sp.kind == SpaceKind::Symbolic) {
    const int extra = std::max(0, static_cast<int>(std::floor(-std::log(emin) + 1e-9)) - 1);
    const int cap_depth = static_cast<int>(std::floor(16 * std::log(2.0) / std::log(static_cast<double>(sp.dim)) + 1e-9));
    int depth = n + extra;
    if (depth > cap_depth) {
      depth = cap_depth;
      if (note && note->find("cylinder") == std::string::npos) *note += "cylinder depth capped at 2^16 candidates; ";
    }
    no.symbolic_depth = depth;
    return build_net(sp, 0.5, opt.seed, no);
  }
  const double delta = opt.candidate_delta > 0 ? opt.candidate_delta : emin / 4;
  return build_net(sp, delta, opt.seed, no);
}

}  // namespace

std::size_t separated_count(const OrbitFn& orbit, const std::vector<Point>& candidates, int n, double eps,
                            std::vector<std::size_t>* assignment) {
  std::unordered_map<std::uint64_t, std::vector<std::uint32_t>> buckets;
  std::vector<std::vector<Point>> selected;
  std::vector<Point> buf;
  std::vector<std::uint64_t> p0, p1;
  std::vector<std::uint64_t> probes;
  if (assignment) assignment->assign(candidates.size(), 0);
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    orbit(candidates[i], n, buf);
    std::uint64_t o0 = 0, o1 = 0;
    cell_keys(buf.front(), eps, o0, p0);
    cell_keys(buf.back(), eps, o1, p1);
    const bool joint = buf.size() > 1 && p0.size() * p1.size() <= 4096;
    const std::uint64_t own = joint ? mix(o0, o1) : o0;
    probes.clear();
    if (joint) {
      for (auto a : p0)
        for (auto b : p1) probes.push_back(mix(a, b));
    } else {
      probes = p0;
    }
    std::size_t hit = selected.size();
    for (auto key : probes) {
      auto it = buckets.find(key);
      if (it == buckets.end()) continue;
      for (std::uint32_t j : it->second) {
        if (j >= hit) break;
        if (close(buf, selected[j], eps)) {
          hit = j;
          break;
        }
      }
      if (hit < selected.size() && !assignment) break;
    }
    if (hit == selected.size()) {
      buckets[own].push_back(static_cast<std::uint32_t>(selected.size()));
      selected.push_back(buf);
    }
    if (assignment) (*assignment)[i] = hit;
  }
  return selected.size();
}

void fit_entropy(EntropyEstimate& e) {
  // Monotone envelope: larger n and smaller eps can only keep separated sets separated.
  std::vector<std::size_t> order(e.eps.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return e.eps[a] > e.eps[b]; });
  std::vector<std::size_t> norder(e.n.size());
  std::iota(norder.begin(), norder.end(), 0);
  std::sort(norder.begin(), norder.end(), [&](std::size_t a, std::size_t b) { return e.n[a] < e.n[b]; });
  e.counts = e.raw_counts;
  for (std::size_t a = 0; a < norder.size(); ++a)
    for (std::size_t b = 0; b < order.size(); ++b) {
      double& v = e.counts[norder[a]][order[b]];
      if (a > 0) v = std::max(v, e.counts[norder[a - 1]][order[b]]);
      if (b > 0) v = std::max(v, e.counts[norder[a]][order[b - 1]]);
    }
  e.slopes.assign(e.eps.size(), 0.0);
  e.residuals.assign(e.eps.size(), 0.0);
  const std::size_t from = norder.size() / 2;
  for (std::size_t j = 0; j < e.eps.size(); ++j) {
    std::vector<double> x, y;
    for (std::size_t a = norder.size() > 1 ? from : 0; a < norder.size(); ++a) {
      x.push_back(static_cast<double>(e.n[norder[a]]));
      y.push_back(std::log(std::max(1.0, e.counts[norder[a]][j])));
    }
    if (x.size() == 1) {
      e.slopes[j] = y[0] / x[0];
      continue;
    }
    const double s = least_squares_slope(x, y);
    const double mx = std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
    const double my = std::accumulate(y.begin(), y.end(), 0.0) / static_cast<double>(y.size());
    double rss = 0;
    for (std::size_t k = 0; k < x.size(); ++k) rss += std::pow(y[k] - (my + s * (x[k] - mx)), 2);
    e.slopes[j] = s;
    e.residuals[j] = std::sqrt(rss / static_cast<double>(x.size()));
  }
  const std::size_t smallest = order.back();
  e.value = e.slopes[smallest];
  e.reliable = e.residuals[smallest] <= 0.1;
  if (!e.reliable) e.note += "fit residual above 0.1; ";
}

bool counts_monotone(const EntropyEstimate& e) {
  for (std::size_t a = 0; a < e.n.size(); ++a)
    for (std::size_t b = 0; b < e.n.size(); ++b)
      for (std::size_t i = 0; i < e.eps.size(); ++i)
        for (std::size_t j = 0; j < e.eps.size(); ++j)
          if (e.n[a] <= e.n[b] && e.eps[i] >= e.eps[j] && e.counts[a][i] > e.counts[b][j]) return false;
  return true;
}

EntropyEstimate topological_entropy_estimate(const GeneratorSystem& sys, const std::vector<double>& eps,
                                             const std::vector<int>& n, const EntropyOptions& opt,
                                             const std::optional<WordStream>& omega) {
  check_grids(eps, n);
  if (!omega && sys.kappa() != 1)
    throw Error(ErrorCode::InvalidArgument, "several generators need a driving word");
  EntropyEstimate e = blank(eps, n);
  const OrbitFn orbit = word_orbit(sys, [omega](int t) { return omega ? omega->at(t) : Symbol{1}; });
  const bool symbolic = sys.space().kind == SpaceKind::Symbolic;
  std::vector<Point> cand;
  if (!symbolic) cand = candidates_for(sys, eps, 1, opt, &e.note);
  for (std::size_t a = 0; a < n.size(); ++a) {
    if (symbolic) cand = candidates_for(sys, eps, n[a], opt, &e.note);
    for (std::size_t j = 0; j < eps.size(); ++j)
      e.raw_counts[a][j] = static_cast<double>(separated_count(orbit, cand, n[a], eps[j]));
  }
  fit_entropy(e);
  return e;
}

EntropyEstimate glw_entropy_estimate(const GeneratorSystem& sys, const std::vector<double>& eps,
                                     const std::vector<int>& n, const EntropyOptions& opt) {
  check_grids(eps, n);
  EntropyEstimate e = blank(eps, n);
  const bool symbolic = sys.space().kind == SpaceKind::Symbolic;
  const int kappa = sys.kappa();
  std::vector<Point> cand;
  if (!symbolic) cand = candidates_for(sys, eps, 1, opt, &e.note);
  for (std::size_t a = 0; a < n.size(); ++a) {
    const int len = n[a] - 1;
    double total = 0, layer = 1;
    for (int l = 0; l <= len; ++l, layer *= kappa) total += layer;
    OrbitFn orbit;
    if (total <= static_cast<double>(opt.word_cap)) {
      orbit = [&sys, kappa, len](const Point& x, int, std::vector<Point>& out) {
        out.clear();
        out.push_back(x);
        std::size_t lo = 0;
        for (int l = 1; l <= len; ++l) {
          const std::size_t hi = out.size();
          for (std::size_t i = lo; i < hi; ++i)
            for (Symbol s = 1; s <= kappa; ++s) out.push_back(sys.gen(s).apply(out[i]));
          lo = hi;
        }
      };
    } else {
      e.lower_bound = true;
      if (e.note.find("sampled words") == std::string::npos) e.note += "sampled words: lower bound; ";
      Rng rng(opt.seed + static_cast<std::uint64_t>(n[a]));
      std::uniform_int_distribution<int> pick(1, kappa);
      std::vector<Word> words;
      for (int l = 1; l <= len; ++l)
        for (std::size_t k = 0; k < opt.word_samples; ++k) {
          Word w(static_cast<std::size_t>(l));
          for (auto& s : w) s = pick(rng);
          words.push_back(w);
        }
      orbit = [&sys, words](const Point& x, int, std::vector<Point>& out) {
        out.clear();
        out.push_back(x);
        for (const auto& w : words) out.push_back(compose_along(sys, w, x));
      };
    }
    if (symbolic) cand = candidates_for(sys, eps, n[a], opt, &e.note);
    for (std::size_t j = 0; j < eps.size(); ++j)
      e.raw_counts[a][j] = static_cast<double>(separated_count(orbit, cand, n[a], eps[j]));
  }
  fit_entropy(e);
  return e;
}

EntropyEstimate bufetov_entropy_estimate(const GeneratorSystem& sys, const std::vector<double>& eps,
                                         const std::vector<int>& n, const EntropyOptions& opt) {
  check_grids(eps, n);
  EntropyEstimate e = blank(eps, n);
  const bool symbolic = sys.space().kind == SpaceKind::Symbolic;
  const int kappa = sys.kappa();
  std::vector<Point> cand;
  if (!symbolic) cand = candidates_for(sys, eps, 1, opt, &e.note);
  for (std::size_t a = 0; a < n.size(); ++a) {
    if (symbolic) cand = candidates_for(sys, eps, n[a], opt, &e.note);
    // Only the first n-1 letters of a length-n word move the orbit; each prefix stands for kappa words.
    const int len = n[a] - 1;
    const double total = std::pow(static_cast<double>(kappa), len);
    std::vector<Word> words;
    const bool exhaustive = total <= static_cast<double>(opt.word_cap);
    if (exhaustive) {
      const auto count = static_cast<std::size_t>(total);
      for (std::size_t idx = 0; idx < count; ++idx) {
        Word w(static_cast<std::size_t>(len));
        std::size_t r = idx;
        for (int i = len - 1; i >= 0; --i, r /= static_cast<std::size_t>(kappa))
          w[static_cast<std::size_t>(i)] = static_cast<Symbol>(r % static_cast<std::size_t>(kappa)) + 1;
        words.push_back(w);
      }
    } else {
      if (e.note.find("Monte Carlo") == std::string::npos) e.note += "Monte Carlo word average; ";
      Rng rng(opt.seed + 1000 + static_cast<std::uint64_t>(n[a]));
      std::uniform_int_distribution<int> pick(1, kappa);
      for (std::size_t k = 0; k < opt.word_samples; ++k) {
        Word w(static_cast<std::size_t>(len));
        for (auto& s : w) s = pick(rng);
        words.push_back(w);
      }
    }
    for (std::size_t j = 0; j < eps.size(); ++j) {
      double sum = 0, sq = 0;
      for (const auto& w : words) {
        const OrbitFn orbit = word_orbit(sys, [&w](int t) { return w[static_cast<std::size_t>(t)]; });
        const double c = static_cast<double>(separated_count(orbit, cand, n[a], eps[j]));
        sum += c;
        sq += c * c;
      }
      const double m = static_cast<double>(words.size());
      e.raw_counts[a][j] = sum / m;
      if (!exhaustive && m > 1)
        e.std_error[a][j] = std::sqrt(std::max(0.0, (sq / m - (sum / m) * (sum / m)) / (m - 1)));
    }
  }
  fit_entropy(e);
  return e;
}

EntropyEstimate katok_entropy_estimate(const GeneratorSystem& sys, const PointSampler& sampler,
                                       const std::vector<double>& eps, const std::vector<int>& n, double rho,
                                       const EntropyOptions& opt) {
  check_grids(eps, n);
  if (!(rho > 0 && rho < 1)) throw Error(ErrorCode::InvalidArgument, "rho must lie in (0, 1)");
  if (sys.kappa() != 1) throw Error(ErrorCode::InvalidArgument, "Katok estimate needs a single map");
  EntropyEstimate e = blank(eps, n);
  Rng rng(opt.seed);
  std::vector<Point> samples;
  samples.reserve(opt.katok_samples);
  for (std::size_t i = 0; i < opt.katok_samples; ++i) samples.push_back(sampler(rng));
  const OrbitFn orbit = word_orbit(sys, [](int) { return Symbol{1}; });
  const auto need = static_cast<std::size_t>(std::ceil((1 - rho) * static_cast<double>(samples.size()) - 1e-9));
  std::vector<std::size_t> assign;
  for (std::size_t a = 0; a < n.size(); ++a)
    for (std::size_t j = 0; j < eps.size(); ++j) {
      const std::size_t centers = separated_count(orbit, samples, n[a], eps[j], &assign);
      std::vector<std::size_t> load(centers, 0);
      for (std::size_t c : assign) ++load[c];
      std::sort(load.rbegin(), load.rend());
      std::size_t covered = 0, used = 0;
      while (covered < need && used < load.size()) covered += load[used++];
      e.raw_counts[a][j] = static_cast<double>(std::max<std::size_t>(used, 1));
    }
  fit_entropy(e);
  return e;
}

std::string entropy_csv(const EntropyEstimate& e) {
  std::ostringstream os;
  char buf[64];
  auto num = [&](double v) {
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return std::string(buf);
  };
  os << "n";
  for (double x : e.eps) os << ",eps=" << num(x);
  os << '\n';
  for (std::size_t a = 0; a < e.n.size(); ++a) {
    os << e.n[a];
    for (std::size_t j = 0; j < e.eps.size(); ++j) os << ',' << num(e.counts[a][j]);
    os << '\n';
  }
  os << "# slopes";
  for (double s : e.slopes) os << ',' << num(s);
  os << "\n# residuals";
  for (double r : e.residuals) os << ',' << num(r);
  os << "\n# value," << num(e.value) << ",reliable," << (e.reliable ? 1 : 0) << ",lower_bound,"
     << (e.lower_bound ? 1 : 0) << '\n';
  return os.str();
}

}  // namespace hitdyn
