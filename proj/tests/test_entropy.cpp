#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "hitdyn/entropy.hpp"
#include "presets.hpp"

using namespace hitdyn;

namespace {

const double kCat = std::log((3 + std::sqrt(5.0)) / 2);

GeneratorSystem shift2() { return GeneratorSystem({Generator::shift(2)}); }

OrbitFn single_orbit(const GeneratorSystem& sys) {
  return [&sys](const Point& x, int n, std::vector<Point>& out) {
    out.assign(1, x);
    for (int t = 1; t < n; ++t) out.push_back(sys.gen(1).apply(out.back()));
  };
}

GeneratorSystem two_translations() {
  return GeneratorSystem({Generator::translation({std::sqrt(2.0) - 1, std::sqrt(3.0) - 1}),
                          Generator::translation({std::sqrt(5.0) - 2, kPi - 3})});
}

}  // namespace

TEST_CASE("separated count oracles") {
  const auto rot = presets::load("golden-rotation").system;
  const auto net = build_net(Space::circle(), 0.001, 1);
  CHECK(separated_count(single_orbit(rot), net, 5, 0.6) == 1);
  for (int n : {1, 5, 20, 60})
    for (double eps : {0.05, 0.1, 0.3}) CHECK(separated_count(single_orbit(rot), net, n, eps) <= static_cast<std::size_t>(std::ceil(1 / eps)));

  const auto sh = shift2();
  for (int n = 1; n <= 10; ++n) {
    NetOptions no;
    no.symbolic_depth = n;
    const auto cyl = build_net(Space::symbolic(2), 0.5, 1, no);
    CHECK(separated_count(single_orbit(sh), cyl, n, std::exp(-1.0)) == (std::size_t{1} << n));
  }
}

TEST_CASE("greedy assignment points at a nearby selected center") {
  const auto rot = presets::load("golden-rotation").system;
  const auto net = build_net(Space::circle(), 0.01, 1);
  std::vector<std::size_t> assign;
  const std::size_t k = separated_count(single_orbit(rot), net, 3, 0.1, &assign);
  REQUIRE(assign.size() == net.size());
  for (std::size_t c : assign) CHECK(c < k);
}

TEST_CASE("topological entropy") {
  EntropyOptions o;
  o.candidate_delta = 0.002;
  const auto rot = topological_entropy_estimate(presets::load("golden-rotation").system, {0.1, 0.05}, {1, 5, 10, 20, 40}, o);
  CHECK(rot.value <= 0.02);
  CHECK(counts_monotone(rot));

  const auto sh = topological_entropy_estimate(shift2(), {0.3}, {2, 4, 6, 8, 10, 12});
  CHECK(std::abs(sh.value - std::log(2.0)) <= 0.05 * std::log(2.0));
  CHECK(counts_monotone(sh));

  CHECK_THROWS_AS(topological_entropy_estimate(two_translations(), {0.1}, {1, 2}), Error);
  CHECK_THROWS_AS(topological_entropy_estimate(shift2(), {0.1}, {}), Error);
}

TEST_CASE("glw entropy") {
  EntropyOptions o;
  o.candidate_delta = 0.01;
  const auto iso = glw_entropy_estimate(two_translations(), {0.2}, {1, 2, 3, 4, 5, 6}, o);
  CHECK(iso.value <= 0.02);
  CHECK(counts_monotone(iso));

  const auto cat = presets::load("cat-map").system;
  const auto g = glw_entropy_estimate(cat, {0.25, 0.2}, {1, 2, 3, 4}, o);
  const auto t = topological_entropy_estimate(cat, {0.25, 0.2}, {1, 2, 3, 4}, o);
  for (std::size_t a = 0; a < g.n.size(); ++a)
    for (std::size_t j = 0; j < g.eps.size(); ++j) CHECK(g.raw_counts[a][j] == t.raw_counts[a][j]);

  // per-word counts never exceed the GLW count on the same net
  const GeneratorSystem pair({Generator::torus_linear(presets::cat_matrix()),
                              Generator::torus_linear(Eigen::MatrixXd(presets::cat_matrix().inverse()))});
  const auto gp = glw_entropy_estimate(pair, {0.25}, {1, 2, 3, 4}, o);
  for (std::uint64_t seed : {1, 2}) {
    const auto ks = topological_entropy_estimate(pair, {0.25}, {1, 2, 3, 4}, o, WordStream::random({}, 2, seed));
    for (std::size_t a = 0; a < gp.n.size(); ++a) CHECK(gp.raw_counts[a][0] >= ks.raw_counts[a][0]);
  }
  CHECK(counts_monotone(gp));
}

TEST_CASE("sampled glw counts are lower bounds for the exhaustive ones") {
  EntropyOptions o;
  o.candidate_delta = 0.01;
  const GeneratorSystem pair({Generator::torus_linear(presets::cat_matrix()),
                              Generator::torus_linear(Eigen::MatrixXd(presets::cat_matrix().inverse()))});
  const auto full = glw_entropy_estimate(pair, {0.25}, {1, 2, 3, 4, 5}, o);
  CHECK_FALSE(full.lower_bound);
  CHECK(full.value >= 0.5 * kCat);
  o.word_cap = 4;
  o.word_samples = 6;
  const auto sampled = glw_entropy_estimate(pair, {0.25}, {1, 2, 3, 4, 5}, o);
  CHECK(sampled.lower_bound);
  for (std::size_t a = 0; a < full.n.size(); ++a) CHECK(sampled.raw_counts[a][0] <= full.raw_counts[a][0]);
}

TEST_CASE("bufetov entropy") {
  EntropyOptions o;
  o.candidate_delta = 0.01;
  const auto iso = bufetov_entropy_estimate(two_translations(), {0.2}, {1, 2, 3, 4, 5, 6}, o);
  CHECK(iso.value <= 0.02);
  const auto cat = presets::load("cat-map").system;
  const auto single = bufetov_entropy_estimate(cat, {0.25, 0.2}, {1, 2, 3, 4}, o);
  const GeneratorSystem twin({Generator::torus_linear(presets::cat_matrix()), Generator::torus_linear(presets::cat_matrix())});
  const auto doubled = bufetov_entropy_estimate(twin, {0.25, 0.2}, {1, 2, 3, 4}, o);
  for (std::size_t a = 0; a < single.n.size(); ++a)
    for (std::size_t j = 0; j < single.eps.size(); ++j) CHECK(single.raw_counts[a][j] == doubled.raw_counts[a][j]);
  CHECK(counts_monotone(doubled));
  CHECK(single.value == doubled.value);

  o.word_cap = 4;
  o.word_samples = 16;
  const auto mc = bufetov_entropy_estimate(twin, {0.25}, {1, 2, 3, 4}, o);
  CHECK(mc.note.find("Monte Carlo") != std::string::npos);
}

TEST_CASE("katok entropy") {
  const auto cat = presets::load("cat-map").system;
  EntropyOptions o;
  o.katok_samples = 2000;
  const Point fixed = Point::torus({0, 0});
  const auto pm = katok_entropy_estimate(cat, [fixed](Rng&) { return fixed; }, {0.2}, {1, 2, 3, 4}, 0.1, o);
  CHECK(pm.value == 0.0);

  o.katok_samples = 20000;
  const auto bern = katok_entropy_estimate(
      shift2(), [](Rng& r) { return Point::symbolic(WordStream::random({}, 2, r()), 2); }, {0.3}, {2, 3, 4, 5, 6, 7, 8}, 0.1, o);
  CHECK(std::abs(bern.value - std::log(2.0)) <= 0.1 * std::log(2.0));
  CHECK(counts_monotone(bern));

  CHECK_THROWS_AS(katok_entropy_estimate(cat, [fixed](Rng&) { return fixed; }, {0.2}, {1}, 1.5, o), Error);
}

TEST_CASE("katok below topological on the cat map") {
  const auto cat = presets::load("cat-map").system;
  EntropyOptions o;
  o.candidate_delta = 0.004;
  o.katok_samples = 30000;
  const std::vector<double> eps{0.25};
  const std::vector<int> n{1, 2, 3, 4};
  const auto top = topological_entropy_estimate(cat, eps, n, o);
  const auto kat = katok_entropy_estimate(cat, [](Rng& r) { return sample_point(Space::torus(2), r); }, eps, n, 0.1, o);
  CHECK(kat.value <= top.value + 0.05);
  CHECK(top.value > 0.5 * kCat);
}

TEST_CASE("csv layout") {
  const auto sh = topological_entropy_estimate(shift2(), {0.3}, {2, 4});
  const auto csv = entropy_csv(sh);
  CHECK(csv.rfind("n,eps=0.3\n2,4\n4,16\n", 0) == 0);
  CHECK(csv.find("# slopes") != std::string::npos);
}
