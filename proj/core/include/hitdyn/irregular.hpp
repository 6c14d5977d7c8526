#pragma once

#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "hitdyn/hitting.hpp"

namespace hitdyn {

using Observable = std::function<double(const Point&)>;
using BudgetFn = std::function<long long(double radius)>;
// Potential that also sees the symbol applied at the current step.
using SymbolObservable = std::function<double(Symbol, const Point&)>;

struct Schedule {
  std::vector<long long> n;
  std::vector<long long> K;  // transition budgets per level
  int depth = 0;
  double threshold = 1;
  std::vector<double> ratio;  // sum_{i<=j}(n_i + K_i) / n_{j+1}
};

// m_j = max(j, 1/threshold); n_{j+1} = max(2 n_j + ceil(2 log 2 / log L) + 1, ceil(m_j * sum_{i<=j}(n_i + p_i))).
long long schedule_next(double L, const std::vector<long long>& n, const std::vector<long long>& p, double threshold);
Schedule build_schedule(double L, double eps, const BudgetFn& K, int depth, double threshold = 1.0, long long n1 = 1,
                        long long orbit_budget = 100000000);
bool schedule_gap_holds(const Schedule& s, double L);

struct BirkhoffTrace {
  std::vector<double> averages;  // a_m, m = 1..n
  std::string label;
};

BirkhoffTrace birkhoff_trace(const GeneratorSystem& sys, const WordStream& omega, const Point& x, const Observable& psi,
                             std::size_t n, std::string label = "psi");
// (min, max) of the averages at the given times (1-based lengths m).
std::pair<double, double> oscillation_gap(const BirkhoffTrace& trace, const std::vector<long long>& checkpoints);

struct IrregularOptions {
  Symbol shadow = 0;  // 0: the last generator
  long long n1_min = 4;
  double threshold = 1.0;
  int K_max = 20000;
  std::size_t node_budget = 400000;
  std::size_t beam_width = 256;
  double psi_lipschitz = 0;  // 0: sampled modulus
  double psi_bound = 0;      // 0: sampled max |psi|
  std::size_t samples = 10000;
  std::uint64_t seed = 1;
  long long orbit_budget = 20000000;
  long long basin_horizon = 4096;
  SymbolObservable psi_symbol;  // overrides psi along the word when set
};

struct IrregularWitness {
  Word word;
  std::vector<Ball> balls;  // level k ball at the start of block k
  std::vector<long long> n, p, block_start;
  std::vector<long long> checkpoints;  // end of block k+1, as orbit lengths
  std::vector<double> averages;        // from the backward construction orbit
  std::vector<double> lower, upper;    // certified bounds at checkpoints
  double I1 = 0, I2 = 0, eps = 0, eps0 = 0, L = 1;
  double certified_gap = 0;
  Point representative;
  double representative_radius = 0;
  int requested_depth = 0, achieved_depth = 0;
  bool complete = false;
  bool isometry_mode = false;
  std::string note;
};

IrregularWitness construct_irregular_point(const GeneratorSystem& sys, const Observable& psi, const Point& x1, double I1,
                                           const Point& x2, double I2, double eps, int depth,
                                           const IrregularOptions& opt = {});

struct WitnessAudit {
  std::vector<double> recomputed;
  double max_average_error = 0;
  bool bounds_hold = false;
  bool nested = false;
  bool ok = false;
};

// Independent check: forward orbit of the representative point, proof inequalities, nested balls.
WitnessAudit audit_witness(const GeneratorSystem& sys, const Observable& psi, const IrregularWitness& w,
                           std::size_t nested_samples = 16, std::uint64_t seed = 7,
                           const SymbolObservable& psi_symbol = {});

// Largest eps' = diam 2^-k whose sampled oscillation of psi stays below bound.
double sampled_continuity_radius(const Space& sp, const Observable& psi, double bound, std::size_t samples,
                                 std::uint64_t seed);
double sampled_oscillation(const Space& sp, const Observable& psi, double radius, std::size_t samples, std::uint64_t seed);

std::string run_length(const Word& w);
std::string serialize_witness(const IrregularWitness& w);

}  // namespace hitdyn
