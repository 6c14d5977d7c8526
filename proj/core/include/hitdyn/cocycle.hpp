#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "hitdyn/hitting.hpp"
#include "hitdyn/irregular.hpp"

namespace hitdyn {

// Locally constant cocycle over the full shift: A(omega) = A_{omega_0}.
class Cocycle {
 public:
  Cocycle() = default;
  // Throws InvalidArgument when a matrix fails the SL audit.
  explicit Cocycle(std::vector<Eigen::MatrixXd> mats, double det_tol = 1e-9);

  int d() const { return d_; }
  int kappa() const { return static_cast<int>(mats_.size()); }
  const Eigen::MatrixXd& at(Symbol s) const;
  const std::vector<Eigen::MatrixXd>& matrices() const { return mats_; }
  double max_cond() const;
  GeneratorSystem projectivized() const;

 private:
  std::vector<Eigen::MatrixXd> mats_;
  int d_ = 0;
};

// "d kappa" followed by kappa row-major d x d matrices; '#' starts a comment.
Cocycle parse_cocycle(const std::string& text);
std::string format_cocycle(const Cocycle& c);

// A_{w_{n-1}} ... A_{w_0}.
Eigen::MatrixXd word_product(const Cocycle& c, const Word& w);

double product_log_norm(const Cocycle& c, const WordStream& omega, std::size_t n);
// Full spectrum estimate, descending.
std::vector<double> lyapunov_spectrum(const Cocycle& c, const WordStream& omega, std::size_t n);
BirkhoffTrace directional_exponent_trace(const Cocycle& c, const WordStream& omega, const Eigen::VectorXd& v,
                                         std::size_t n);
Point projective_step(const Eigen::MatrixXd& m, const Point& p);

struct DominationResult {
  bool dominated = false;
  int k = 0;
  std::vector<double> worst_ratio;  // index k-1: sup over words of length k
};
DominationResult domination_test(const Cocycle& c, const Eigen::MatrixXd& E, const Eigen::MatrixXd& F, int k_max,
                                 double invariance_tol = 1e-9, std::size_t word_cap = 1u << 20);

struct ConePair {
  Eigen::MatrixXd basis;      // columns: E+ then E-
  Eigen::MatrixXd basis_inv;  // adapted coordinates y = basis_inv x
  std::vector<int> blocks;    // sizes of the real blocks, E+ first
  double theta = 0, zeta = 1;
  int dim_plus = 0, dim_minus = 0;
};
// stable_dim < 0: taken from the spectrum.
ConePair hyperbolic_cones(const Eigen::MatrixXd& m, int stable_dim = -1);
// (|y+|, |y-|) under the adapted max-of-blocks norm.
std::pair<double, double> adapted_parts(const ConePair& cp, const Eigen::VectorXd& x);
double adapted_norm(const ConePair& cp, const Eigen::VectorXd& x);
bool in_cone_plus(const ConePair& cp, const Eigen::VectorXd& x);
bool in_cone_minus(const ConePair& cp, const Eigen::VectorXd& x);

struct ConeAudit {
  bool invariant_plus = true, invariant_minus = true;  // (i)
  bool growth = true;                                  // (ii)
  bool contraction = true;                             // (iii)
  std::size_t checked = 0;
  bool ok() const { return invariant_plus && invariant_minus && growth && contraction; }
};
ConeAudit audit_cones(const ConePair& cp, const Eigen::MatrixXd& m, std::size_t samples, int n_max,
                      std::uint64_t seed);

HittingResult accessibility_certify(const Cocycle& c, double eps, int K_max, double delta, std::uint64_t seed,
                                    HittingOptions opt = {});

enum class DirectionMode { Auto, Blocks, Cones };

struct DirectionOptions {
  DirectionMode mode = DirectionMode::Auto;
  Symbol high = 1, low = 2;  // blocks mode
  double threshold = 0.1;
  long long n1 = 100;
  long long orbit_budget = 40000000;
  Symbol shadow = 0;  // cones mode: hyperbolic generator, 0 = last
  IrregularOptions irregular;
};

struct DirectionWitness {
  DirectionMode mode = DirectionMode::Blocks;
  std::vector<std::pair<Symbol, long long>> runs;  // the driving word, run-length encoded
  Eigen::VectorXd direction;
  std::vector<long long> checkpoints;
  std::vector<double> exponents;  // trace value at each checkpoint
  std::vector<bool> high;         // checkpoint ends a growth block
  double high_min = 0, low_max = 0;
  int requested_depth = 0, achieved_depth = 0;
  bool complete = false;
  IrregularWitness projective;  // cones mode
  std::string note;
};
DirectionWitness irregular_direction(const Cocycle& c, const Eigen::VectorXd& v, double eps, int depth,
                                     const DirectionOptions& opt = {});

// Rotation number on RP^1 in turns, in [0, 1).
double rotation_number(const Eigen::Matrix2d& m, std::size_t n_iter = 100000);

struct SpectrumEntry {
  Word word;
  std::vector<double> exponents;
  double sum = 0;
};
struct SpectrumReport {
  std::vector<SpectrumEntry> entries;
  double max_deviation = 0;
  bool sums_ok = true;
  std::string verdict;  // "equal-spectra" or "distinct-spectra"
};
SpectrumEntry periodic_spectrum(const Cocycle& c, const Word& w);
SpectrumReport spectrum_report(const Cocycle& c, const std::vector<Word>& words, double tol = 0.3);

struct Resonance {
  bool resonant = false;
  int m = 0, n = 0;
  double residual = 0;
};
Resonance symplectic_center_check(double theta1, double theta2, int N, double tol = 1e-9);

}  // namespace hitdyn
