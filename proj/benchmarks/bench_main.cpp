#include <benchmark/benchmark.h>

#include "hitdyn/cocycle.hpp"
#include "hitdyn/entropy.hpp"
#include "hitdyn/hitting.hpp"
#include "presets.hpp"

using namespace hitdyn;

static void BM_ComposeAlong(benchmark::State& state) {
  const auto sys = presets::load("morse-smale-rotation").system;
  Word w(static_cast<std::size_t>(state.range(0)));
  for (std::size_t i = 0; i < w.size(); ++i) w[i] = 1 + static_cast<Symbol>(i % 3);
  Point x = Point::circle(0.123);
  for (auto _ : state) {
    x = compose_along(sys, w, x);
    benchmark::DoNotOptimize(x);
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_ComposeAlong)->Arg(64)->Arg(1024);

static void BM_GoldenHitting(benchmark::State& state) {
  const auto sys = presets::load("golden-rotation").system;
  const double eps = 1.0 / static_cast<double>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(certify_frequent_hitting(sys, eps, 400, eps / 8, 1));
}
BENCHMARK(BM_GoldenHitting)->Arg(5)->Arg(10)->Arg(20)->Unit(benchmark::kMillisecond);

static void BM_CatRefutation(benchmark::State& state) {
  const auto sys = presets::load("cat-map").system;
  for (auto _ : state) benchmark::DoNotOptimize(certify_frequent_hitting(sys, 0.1, 50, 0.0125, 1));
}
BENCHMARK(BM_CatRefutation)->Unit(benchmark::kMillisecond);

static void BM_LyapunovSpectrum(benchmark::State& state) {
  const auto c = presets::different_types_B();
  const auto omega = WordStream::random({}, 2, 7);
  for (auto _ : state) benchmark::DoNotOptimize(lyapunov_spectrum(c, omega, static_cast<std::size_t>(state.range(0))));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_LyapunovSpectrum)->Arg(1000)->Arg(10000);

static void BM_SeparatedCount(benchmark::State& state) {
  const auto sys = presets::load("cat-map").system;
  const auto net = build_net(Space::torus(2), 0.01, 1);
  const OrbitFn orbit = [&sys](const Point& x, int n, std::vector<Point>& out) {
    out.assign(1, x);
    for (int t = 1; t < n; ++t) out.push_back(sys.gen(1).apply(out.back()));
  };
  for (auto _ : state) benchmark::DoNotOptimize(separated_count(orbit, net, static_cast<int>(state.range(0)), 0.2));
}
BENCHMARK(BM_SeparatedCount)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
