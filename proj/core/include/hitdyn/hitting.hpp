#pragma once

#include <optional>
#include <string>
#include <vector>

#include "hitdyn/semigroup.hpp"

namespace hitdyn {

struct HittingOptions {
  std::size_t node_budget = 4000000;  // word-tree nodes over the whole search
  double dedup_log = 0.05;            // log-size quantum for deduplication
  // Target radius convention: false -> radii grid from eps/2; true -> from eps (accessibility).
  bool access_convention = false;
  std::size_t verify_samples = 64;
};

struct HittingWitness {
  std::size_t base = 0;    // index into base_centers
  std::size_t target = 0;  // index into target_centers
  int level = 0;           // index into target_radii
  Word word;
  double contained_radius = 0;  // radius of the certified ball around the target center
};

struct HittingCertificate {
  double eps = 0, delta = 0;
  int K = 0;
  bool translation_reduced = false;  // base fixed at the origin, targets are differences
  std::vector<Point> base_centers, target_centers;
  std::vector<double> target_radii;  // B2 radius grid
  std::vector<HittingWitness> witnesses;
  std::size_t nodes = 0;
};

struct Refutation {
  std::string reason;
  Point base, target;
  double target_radius = 0;
  int K_max = 0;
  std::vector<double> best_log_radius;  // index p: best log inner radius among words of length p
  double decay_slope = 0;               // least-squares slope of best_log_radius over p >= 1
  std::string note = "advisory: no witness found within the search budget; not a proof of failure";
};

struct HittingResult {
  bool certified = false;
  HittingCertificate certificate;
  Refutation refutation;
};

HittingResult certify_frequent_hitting(const GeneratorSystem& sys, double eps, int K_max, double delta,
                                       std::uint64_t seed, const HittingOptions& opt = {});

// Re-checks a witness from scratch: region containment plus sampled pullback membership.
bool verify_witness(const GeneratorSystem& sys, const HittingCertificate& cert, const HittingWitness& w,
                    std::size_t samples, std::uint64_t seed);

struct CoveringResult {
  bool covered = false;
  int K = 0;
  double eps = 0, delta = 0;
  std::vector<Point> bases;
  std::vector<Word> routes;  // per base
  Refutation refutation;
};

// symbols: generator subset (1-based); a single symbol means plain iteration.
CoveringResult covering_time(const GeneratorSystem& sys, const std::vector<Symbol>& symbols, double eps,
                             int K_max, double delta, std::size_t max_bases = 0);

struct TransitionResult {
  bool found = false;
  bool budget_exhausted = false;
  int p = 0;
  Word word;
  double source_size = 0, target_radius = 0;
};

// Image f^n of the dynamic ball B_{f_s}(x, n, eps) as a region.
Region dynamic_ball_image(const GeneratorSystem& sys, Symbol s, const Point& x, int n, double eps);
// Largest radius r with B(x, r) inside the dynamic ball B_{f_s}(x, n, eps).
double dynamic_ball_inner_radius(const GeneratorSystem& sys, Symbol s, const Point& x, int n, double eps);

TransitionResult min_transition_time(const GeneratorSystem& sys, const Point& x1, const Point& x2, int n,
                                     double eps, int K_max, Symbol shadow, std::size_t node_budget = 4000000);

// Breadth-first search for the shortest word w with f_w(start) containing target.
struct SearchResult {
  bool found = false;
  Word word;
  Region image;
  std::size_t nodes = 0;
};
// beam_width = 0: exhaustive breadth-first search with deduplication.
// beam_width > 0: keeps the beam_width largest images per length (ties: closest to the target).
SearchResult find_containing_word(const GeneratorSystem& sys, const Region& start, const Ball& target,
                                  int K_max, std::size_t node_budget, double center_quantum,
                                  double log_quantum = 0.05, std::size_t beam_width = 0);

double least_squares_slope(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace hitdyn
