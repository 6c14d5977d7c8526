#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "hitdyn/semigroup.hpp"

namespace hitdyn {

// Fills out with the n points whose pairwise distances decide (n, eps)-separation.
using OrbitFn = std::function<void(const Point& x, int n, std::vector<Point>& out)>;
using PointSampler = std::function<Point(Rng&)>;

struct EntropyEstimate {
  std::vector<double> eps;
  std::vector<int> n;
  std::vector<std::vector<double>> counts;      // [n index][eps index], monotone envelope
  std::vector<std::vector<double>> raw_counts;  // greedy values before the envelope
  std::vector<std::vector<double>> std_error;   // word-sampled estimates only
  std::vector<double> slopes, residuals;        // per eps
  double value = 0;                             // slope at the smallest eps
  bool reliable = true;
  bool lower_bound = false;
  std::string note;
};

struct EntropyOptions {
  double candidate_delta = 0;  // 0: min eps / 4
  std::size_t net_cap = std::size_t{1} << 22;
  std::uint64_t seed = 0;
  std::size_t word_cap = 4096;    // words enumerated exhaustively up to this count
  std::size_t word_samples = 64;  // otherwise sampled
  std::size_t katok_samples = 100000;
};

// Greedy (n, eps)-separated subset of the candidates, in candidate order.
// assignment (optional): index of the first selected point within distance < eps.
std::size_t separated_count(const OrbitFn& orbit, const std::vector<Point>& candidates, int n, double eps,
                            std::vector<std::size_t>* assignment = nullptr);

// Single map (kappa = 1) or the non-autonomous sequence driven by omega.
EntropyEstimate topological_entropy_estimate(const GeneratorSystem& sys, const std::vector<double>& eps,
                                             const std::vector<int>& n, const EntropyOptions& opt = {},
                                             const std::optional<WordStream>& omega = std::nullopt);
EntropyEstimate glw_entropy_estimate(const GeneratorSystem& sys, const std::vector<double>& eps,
                                     const std::vector<int>& n, const EntropyOptions& opt = {});
EntropyEstimate bufetov_entropy_estimate(const GeneratorSystem& sys, const std::vector<double>& eps,
                                         const std::vector<int>& n, const EntropyOptions& opt = {});
EntropyEstimate katok_entropy_estimate(const GeneratorSystem& sys, const PointSampler& sampler, const std::vector<double>& eps,
                                       const std::vector<int>& n, double rho, const EntropyOptions& opt = {});

// Least-squares fit over the upper half of the n grid.
void fit_entropy(EntropyEstimate& e);
bool counts_monotone(const EntropyEstimate& e);
std::string entropy_csv(const EntropyEstimate& e);

}  // namespace hitdyn
