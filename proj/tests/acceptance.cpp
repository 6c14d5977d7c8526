// Acceptance suite: one PASS/FAIL line per criterion.
// Usage: hitdyn_acceptance [--only N]...

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <functional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "hitdyn/cocycle.hpp"
#include "hitdyn/entropy.hpp"
#include "hitdyn/hitting.hpp"
#include "hitdyn/irregular.hpp"
#include "presets.hpp"

using namespace hitdyn;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

const double kCatEntropy = std::log((3 + std::sqrt(5.0)) / 2);

struct Outcome {
  bool pass = true;
  std::ostringstream detail;
  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << "[failed: " << what << "] ";
    }
  }
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

VectorXd random_unit(Rng& rng, int d) {
  std::normal_distribution<double> nd;
  VectorXd v(d);
  for (int i = 0; i < d; ++i) v(i) = nd(rng);
  return v.normalized();
}

void golden_hitting(Outcome& o) {
  const auto sys = presets::load("golden-rotation").system;
  for (double eps : {0.2, 0.1, 0.05}) {
    const auto t0 = std::chrono::steady_clock::now();
    const auto r = certify_frequent_hitting(sys, eps, 200, eps / 8, 1);
    const double dt = seconds_since(t0);
    const int bound = static_cast<int>(std::floor(3 / eps)) + 1;
    o.require(r.certified, "certificate at eps " + std::to_string(eps));
    o.require(r.certificate.K <= bound, "K <= floor(3/eps)+1");
    o.require(dt < 30, "runtime < 30 s");
    o.detail << "eps=" << eps << " K=" << r.certificate.K << " bound=" << bound << " t=" << dt << "s; ";
  }
}

void cat_refutation(Outcome& o) {
  const auto r = certify_frequent_hitting(presets::load("cat-map").system, 0.1, 50, 0.0125, 1);
  o.require(!r.certified, "refutation evidence");
  const double rel = std::abs(r.refutation.decay_slope + kCatEntropy) / kCatEntropy;
  o.require(rel <= 0.05, "slope within 5% of -0.9624");
  o.detail << "slope=" << r.refutation.decay_slope << " relative error=" << rel;
}

void different_types_A(Outcome& o) {
  const auto A = presets::different_types_A();
  Rng rng(2024);
  double worst = 0;
  for (int i = 0; i < 20; ++i) {
    VectorXd v = random_unit(rng, 3);
    while (std::abs(std::abs(v(0)) - 1) < 1e-6) v = random_unit(rng, 3);
    for (int j = 0; j < 5; ++j) {
      const auto t = directional_exponent_trace(A, WordStream::random({}, 2, rng()), v, 5000);
      worst = std::max(worst, std::abs(t.averages.back() - std::log(3.0)));
    }
  }
  o.require(worst <= 1e-3, "100 traces within 1e-3 of log 3");
  o.detail << "max |exponent - log 3| = " << worst;
}

void different_types_B(Outcome& o) {
  VectorXd v(3);
  v << 1, 1, 1;
  const auto B = presets::different_types_B();
  const auto w = irregular_direction(B, v, 0.1, 6);
  o.require(w.achieved_depth >= 6, "depth >= 6");
  o.require(w.high_min >= std::log(3.0) - 0.05, "checkpoint maxima >= log 3 - 0.05");
  o.require(w.low_max <= std::log(2.0) + 0.05, "checkpoint minima <= log 2 + 0.05");
  Word word;
  for (const auto& [s, len] : w.runs) word.insert(word.end(), static_cast<std::size_t>(len), s);
  const auto tr = directional_exponent_trace(B, WordStream::from_word(word), v, static_cast<std::size_t>(w.checkpoints.back()));
  double err = 0;
  for (std::size_t k = 0; k < w.checkpoints.size(); ++k)
    err = std::max(err, std::abs(tr.averages[static_cast<std::size_t>(w.checkpoints[k]) - 1] - w.exponents[k]));
  o.require(err <= 1e-9, "independent trace reproduces the checkpoints");
  o.detail << "depth=" << w.achieved_depth << " high_min=" << w.high_min << " low_max=" << w.low_max
           << " recheck error=" << err;
}

void morse_smale(Outcome& o) {
  const auto ms = presets::morse_smale();
  const auto w = construct_irregular_point(ms.system, ms.psi, ms.x1, ms.I1, ms.x2, ms.I2, 0.1, 8, ms.options);
  const auto a = audit_witness(ms.system, ms.psi, w);
  o.require(w.achieved_depth >= 8, "depth 8");
  o.require(w.certified_gap >= 2.0 / 3.0, "certified gap >= 2/3");
  o.require(a.ok && a.max_average_error <= 1e-9, "orbit re-audit within 1e-9");
  o.detail << "achieved depth " << w.achieved_depth << " of 8, gap=" << w.certified_gap << ", audit "
           << (a.ok ? "ok" : "failed") << " (max error " << a.max_average_error << ")";
  if (!w.note.empty()) o.detail << "; " << w.note;
}

void domination(Outcome& o) {
  MatrixXd E(3, 2), F(3, 1);
  E << 0, 0, 1, 0, 0, 1;
  F << 1, 0, 0;
  const auto b = domination_test(presets::different_types_B(), E, F, 6);
  o.require(b.dominated && b.k == 2, "cocycle B: k = 2");

  const Eigen::EigenSolver<MatrixXd> es(presets::cat_matrix());
  MatrixXd Es(2, 1), Fu(2, 1);
  for (int i = 0; i < 2; ++i) (es.eigenvalues()(i).real() < 1 ? Es : Fu) = es.eigenvectors().col(i).real();
  const auto c = domination_test(Cocycle({presets::cat_matrix()}), Es, Fu, 6);
  o.require(c.dominated && c.k == 1, "cat map: k = 1");

  const auto id = domination_test(Cocycle({MatrixXd::Identity(2, 2)}), MatrixXd(VectorXd::Unit(2, 0)), MatrixXd(VectorXd::Unit(2, 1)), 6);
  o.require(!id.dominated, "identity: NotDominated");
  o.detail << "B k=" << b.k << " (ratios " << b.worst_ratio[0] << ", " << b.worst_ratio[1] << "); cat k=" << c.k
           << " (ratio " << c.worst_ratio[0] << "); identity " << (id.dominated ? "dominated" : "NotDominated");
}

void rotation_numbers(Outcome& o) {
  Rng rng(77);
  std::uniform_real_distribution<double> ang(0, 2 * kPi);
  double worst = 0;
  for (int i = 0; i < 10; ++i) {
    const double t = ang(rng);
    Eigen::Matrix2d m;
    m << std::cos(t), -std::sin(t), std::sin(t), std::cos(t);
    const double want = std::fmod(t / kPi, 1.0);
    double err = std::abs(rotation_number(m) - want);
    err = std::min(err, 1 - err);
    worst = std::max(worst, err);
  }
  o.require(worst <= 1e-6, "rotations within 1e-6");
  std::vector<Eigen::Matrix2d> hyp(3);
  hyp[0] << 2, 1, 1, 1;
  hyp[1] << 3, 2, 1, 1;
  hyp[2] << 0.5, 0, 0, 2;
  bool zero = true;
  for (const auto& m : hyp) zero = zero && rotation_number(m) == 0.0;
  o.require(zero, "hyperbolic matrices give exactly 0");
  o.detail << "max rotation error=" << worst << "; hyperbolic " << (zero ? "all 0" : "nonzero");
}

void entropy(Outcome& o) {
  const auto t0 = std::chrono::steady_clock::now();
  const auto cat = presets::load("cat-map").system;
  EntropyOptions eo;
  eo.candidate_delta = 0.001;
  const auto top = topological_entropy_estimate(cat, {0.25, 0.2}, {1, 2, 3, 4, 5, 6}, eo);
  o.require(std::abs(top.value - kCatEntropy) <= 0.10 * kCatEntropy, "cat map within 10%");

  EntropyOptions ro;
  ro.candidate_delta = 0.001;
  const auto rot = topological_entropy_estimate(presets::load("golden-rotation").system, {0.1, 0.05}, {1, 10, 20, 40, 80}, ro);
  const auto t2 = topological_entropy_estimate(GeneratorSystem({Generator::translation({std::sqrt(2.0) - 1, std::sqrt(3.0) - 1})}),
                                               {0.2}, {1, 5, 10, 20}, EntropyOptions{0.01});
  o.require(rot.value <= 0.02 && t2.value <= 0.02, "rotations <= 0.02");

  const GeneratorSystem shift({Generator::shift(2)});
  const auto sh = topological_entropy_estimate(shift, {0.3}, {2, 4, 6, 8, 10, 12, 14});
  o.require(std::abs(sh.value - std::log(2.0)) <= 0.05 * std::log(2.0), "2-shift within 5%");

  EntropyOptions ko;
  ko.katok_samples = 250000;
  ko.seed = 3;
  const auto kat = katok_entropy_estimate(cat, [](Rng& r) { return sample_point(Space::torus(2), r); }, {0.25, 0.2},
                                          {1, 2, 3, 4, 5, 6}, 0.1, ko);
  o.require(std::abs(kat.value - kCatEntropy) <= 0.15 * kCatEntropy, "Katok cat map within 15%");
  const bool mono = counts_monotone(top) && counts_monotone(rot) && counts_monotone(sh) && counts_monotone(kat);
  o.require(mono, "count monotonicity");
  const double dt = seconds_since(t0);
  o.require(dt < 600, "suite runtime < 10 min");
  o.detail << "cat=" << top.value << " rotation=" << rot.value << " translation=" << t2.value << " shift=" << sh.value
           << " katok=" << kat.value << " t=" << dt << "s";
}

void rigidity(Outcome& o) {
  double worst = 0;
  std::size_t words = 0;
  for (const auto& c : {presets::different_types_A(), presets::different_types_B(), presets::irreducible_vs_accessible_A(),
                        presets::irreducible_vs_accessible_B()}) {
    for (int len = 1; len <= 5; ++len) {
      const int total = static_cast<int>(std::pow(c.kappa(), len));
      for (int idx = 0; idx < total; ++idx) {
        Word w(static_cast<std::size_t>(len));
        int r = idx;
        for (auto& s : w) s = 1 + r % c.kappa(), r /= c.kappa();
        worst = std::max(worst, std::abs(periodic_spectrum(c, w).sum));
        ++words;
      }
    }
  }
  o.require(worst <= 1e-8, "spectrum sums within 1e-8");
  const auto rep = spectrum_report(presets::different_types_B(), {{1}, {2}});
  o.require(rep.max_deviation > 0.3 && rep.verdict == "distinct-spectra", "distinct-spectra verdict");
  o.detail << words << " words, max |sum|=" << worst << "; B (1) vs (2): " << rep.verdict << " deviation "
           << rep.max_deviation;
}

void cones(Outcome& o) {
  const auto cp = hyperbolic_cones(presets::cat_matrix());
  const auto a = audit_cones(cp, presets::cat_matrix(), 10000, 30, 5);
  o.require(a.invariant_plus && a.invariant_minus, "(i) invariance");
  o.require(a.growth, "(ii) growth");
  o.require(a.contraction, "(iii) contraction");
  o.detail << "theta=" << cp.theta << " checks=" << a.checked;
}

// ---- criterion 11 property suites ----

bool metric_axioms() {
  for (const auto& sp : {Space::circle(), Space::torus(2), Space::torus(3), Space::sphere2(), Space::projective(3), Space::symbolic(2)}) {
    Rng rng(1);
    for (int t = 0; t < 10000; ++t) {
      const Point x = sample_point(sp, rng), y = sample_point(sp, rng), z = sample_point(sp, rng);
      const double xy = distance(x, y);
      if (distance(x, x) > 1e-12 || std::abs(xy - distance(y, x)) > 1e-12 || xy > distance(x, z) + distance(z, y) + 1e-12)
        return false;
    }
  }
  return true;
}

bool shift_law() {
  Rng rng(2);
  for (int t = 0; t < 2000; ++t) {
    const auto a = WordStream::random({}, 2, rng());
    Word p = a.take(14);
    const std::size_t flip = 1 + rng() % 12;
    p[flip] = 3 - p[flip];
    const double d = shift_distance(a, WordStream::random(p, 2, rng()));
    for (std::size_t k = 1; k <= 13; ++k)
      if ((d < std::exp(-static_cast<double>(k)) * (1 - 1e-12)) != (k < flip)) return false;
  }
  return true;
}

bool associativity() {
  const auto sys = presets::load("morse-smale-rotation").system;
  const auto s2 = presets::load("s2-rotations").system;
  Rng rng(3);
  for (const auto* g : {&sys, &s2})
    for (int t = 0; t < 500; ++t) {
      Word w1(rng() % 26), w2(rng() % 25);
      for (auto& s : w1) s = 1 + static_cast<int>(rng() % static_cast<std::uint64_t>(g->kappa()));
      for (auto& s : w2) s = 1 + static_cast<int>(rng() % static_cast<std::uint64_t>(g->kappa()));
      Word w = w1;
      w.insert(w.end(), w2.begin(), w2.end());
      const Point x = sample_point(g->space(), rng);
      if (distance(compose_along(*g, w, x), compose_along(*g, w2, compose_along(*g, w1, x))) > 1e-10) return false;
    }
  return true;
}

bool ball_containments() {
  const auto sys = presets::load("morse-smale-rotation").system;
  const auto cat = presets::load("cat-map").system;
  Rng rng(4);
  for (const auto* g : {&sys, &cat})
    for (int t = 0; t < 1000; ++t) {
      const int n = static_cast<int>(rng() % 21);
      Word w(static_cast<std::size_t>(n));
      for (auto& s : w) s = 1 + static_cast<int>(rng() % static_cast<std::uint64_t>(g->kappa()));
      const Point x = sample_point(g->space(), rng);
      const Point y = sample_in_ball(Ball{x, std::pow(g->L(), -n) * 0.2 * 0.999}, rng);
      if (!dyn_ball_member(*g, w, x, 0.2, y)) return false;
    }
  return true;
}

bool sl_audit() {
  for (const auto& name : presets::names()) {
    const auto p = presets::load(name);
    if (p.cocycle)
      for (const auto& m : p.cocycle->matrices())
        if (std::abs(m.determinant() - 1) > 1e-9) return false;
  }
  try {
    Cocycle bad({MatrixXd::Identity(2, 2) * 1.1});
    return false;
  } catch (const Error&) {
  }
  return true;
}

bool projective_functoriality() {
  Rng rng(5);
  std::normal_distribution<double> nd;
  for (int t = 0; t < 1000; ++t) {
    MatrixXd a(3, 3), b(3, 3);
    for (int i = 0; i < 9; ++i) a(i / 3, i % 3) = nd(rng), b(i / 3, i % 3) = nd(rng);
    const VectorXd v = random_unit(rng, 3);
    const Point p = Point::projective({v(0), v(1), v(2)}), q = Point::projective({-v(0), -v(1), -v(2)});
    if (distance(projective_step(a * b, p), projective_step(a, projective_step(b, p))) > 1e-8) return false;
    if (distance(projective_step(a, p), projective_step(a, q)) > 1e-12) return false;
  }
  return true;
}

bool submultiplicativity() {
  const auto A = presets::different_types_A();
  Rng rng(6);
  for (int t = 0; t < 100; ++t) {
    const auto w = WordStream::random({}, 2, rng());
    const std::size_t n = 20 + rng() % 300, m = 1 + rng() % (n - 1);
    const double lhs = static_cast<double>(n) * product_log_norm(A, w, n);
    const double rhs = static_cast<double>(m) * product_log_norm(A, w, m) +
                       static_cast<double>(n - m) * product_log_norm(A, w.shifted(m), n - m);
    if (lhs > rhs + 1e-8) return false;
  }
  return true;
}

bool witness_audits() {
  const auto ms = presets::morse_smale();
  const auto w = construct_irregular_point(ms.system, ms.psi, ms.x1, ms.I1, ms.x2, ms.I2, 0.1, 2, ms.options);
  const auto a = audit_witness(ms.system, ms.psi, w);
  if (!(a.ok && a.nested && w.achieved_depth >= 2)) return false;
  const auto sys = presets::load("golden-rotation").system;
  const auto h = certify_frequent_hitting(sys, 0.1, 64, 0.0125, 1);
  std::size_t i = 0;
  for (const auto& x : h.certificate.witnesses)
    if (!verify_witness(sys, h.certificate, x, 16, ++i)) return false;
  return h.certified;
}

bool entropy_monotone() {
  const auto cat = presets::load("cat-map").system;
  EntropyOptions o;
  o.candidate_delta = 0.01;
  const auto e1 = topological_entropy_estimate(cat, {0.3, 0.25, 0.2}, {1, 2, 3, 4}, o);
  const auto e2 = glw_entropy_estimate(presets::load("t3-translations").system, {0.3, 0.2}, {1, 2, 3}, EntropyOptions{0.05});
  const auto e3 = bufetov_entropy_estimate(presets::load("morse-smale-rotation").system, {0.2, 0.1}, {1, 2, 3, 4}, o);
  return counts_monotone(e1) && counts_monotone(e2) && counts_monotone(e3);
}

void properties(Outcome& o) {
  const std::vector<std::pair<std::string, std::function<bool()>>> suites{
      {"metric axioms", metric_axioms},
      {"shift-metric law", shift_law},
      {"compose associativity", associativity},
      {"dynamic-ball containments", ball_containments},
      {"SL determinant audit", sl_audit},
      {"projective functoriality", projective_functoriality},
      {"submultiplicativity", submultiplicativity},
      {"witness nested-ball audits", witness_audits},
      {"entropy-count monotonicity", entropy_monotone},
      {"symplectic non-resonance", [] {
         return !symplectic_center_check(2 * kPi * (std::sqrt(2.0) - 1), 2 * kPi * (std::sqrt(3.0) - 1), 50).resonant;
       }},
  };
  int green = 0;
  for (const auto& [name, fn] : suites) {
    bool ok = false;
    try {
      ok = fn();
    } catch (const std::exception& e) {
      o.detail << name << " threw " << e.what() << "; ";
    }
    o.require(ok, name);
    green += ok;
  }
  o.detail << green << "/" << suites.size() << " suites green";
}

}  // namespace

int main(int argc, char** argv) {
  std::set<int> only;
  for (int i = 1; i < argc; ++i) {
    if (std::strcmp(argv[i], "--only") == 0 && i + 1 < argc) {
      only.insert(std::atoi(argv[++i]));
    } else {
      std::fprintf(stderr, "usage: %s [--only N]...\n", argv[0]);
      return 2;
    }
  }
  const std::vector<std::pair<std::string, std::function<void(Outcome&)>>> criteria{
      {"golden-rotation hitting", golden_hitting},
      {"cat-map hitting failure", cat_refutation},
      {"different-types cocycle A exponent", different_types_A},
      {"different-types cocycle B irregular direction", different_types_B},
      {"Morse-Smale irregular point", morse_smale},
      {"domination", domination},
      {"rotation numbers", rotation_numbers},
      {"entropy", entropy},
      {"rigidity diagnostic", rigidity},
      {"cone suite", cones},
      {"property suites", properties},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const int id = static_cast<int>(i) + 1;
    if (!only.empty() && !only.count(id)) continue;
    Outcome o;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      criteria[i].second(o);
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail << "threw " << e.what();
    }
    std::printf("criterion %2d %s: %s (%.1fs) %s\n", id, o.pass ? "PASS" : "FAIL", criteria[i].first.c_str(),
                seconds_since(t0), o.detail.str().c_str());
    std::fflush(stdout);
    failed += !o.pass;
  }
  return failed == 0 ? 0 : 1;
}
