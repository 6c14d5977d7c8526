#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include "hitdyn/error.hpp"

namespace hitdyn {

using Symbol = int;
using Word = std::vector<Symbol>;
using Rng = std::mt19937_64;

constexpr double kPi = 3.14159265358979323846;
constexpr std::size_t kDefaultHorizon = 1000000;

// One-sided sequence over {1..kappa} with a finite past window.
class WordStream {
 public:
  enum class Tail { Constant, Periodic, Random };

  WordStream();  // constant 1

  static WordStream constant(Word prefix, Symbol s);
  static WordStream periodic(Word prefix, Word period);
  static WordStream random(Word prefix, int kappa, std::uint64_t seed);
  static WordStream from_word(const Word& w) { return constant(w, w.empty() ? 1 : w.back()); }

  WordStream with_past(Word past) const;

  // Index k >= 0 is the future; k < 0 reads the past window (k = -1 is the newest).
  Symbol at(std::int64_t k) const;
  Symbol operator[](std::int64_t k) const { return at(k); }

  WordStream shifted(std::size_t m) const;
  Word take(std::size_t n, std::size_t from = 0) const;

  Tail tail() const { return tail_; }
  std::uint64_t seed() const { return seed_; }
  std::size_t prefix_size() const { return prefix_->size(); }
  std::string describe() const;

  // For non-random tails: index from which the stream is periodic, and the period.
  bool eventually_periodic(std::size_t& start, std::size_t& period) const;
  // Same prefix, tail and offset: equal at every index >= 0.
  bool same_future(const WordStream& o) const;

 private:
  std::shared_ptr<const Word> prefix_;
  std::shared_ptr<const Word> period_;
  std::shared_ptr<const Word> past_;
  Tail tail_ = Tail::Constant;
  Symbol tail_symbol_ = 1;
  int kappa_ = 1;
  std::uint64_t seed_ = 0;
  std::size_t offset_ = 0;
};

struct ShiftDistance {
  double value;
  std::size_t first_difference;  // 0 when no difference was found
  bool horizon_reached;
};

ShiftDistance shift_distance_full(const WordStream& a, const WordStream& b,
                                  std::size_t horizon = kDefaultHorizon);
double shift_distance(const WordStream& a, const WordStream& b,
                      std::size_t horizon = kDefaultHorizon);

enum class SpaceKind { Circle, Torus, Sphere2, Projective, Symbolic };

struct Space {
  SpaceKind kind = SpaceKind::Circle;
  int dim = 1;  // torus: d; projective: vector length d; symbolic: kappa

  static Space circle() { return {SpaceKind::Circle, 1}; }
  static Space torus(int d);
  static Space sphere2() { return {SpaceKind::Sphere2, 3}; }
  static Space projective(int d);
  static Space symbolic(int kappa);

  double diameter() const;
  int coords() const;
  std::string name() const;
  bool operator==(const Space& o) const { return kind == o.kind && dim == o.dim; }
  bool operator!=(const Space& o) const { return !(*this == o); }
};

struct Point {
  SpaceKind kind = SpaceKind::Circle;
  int dim = 1;
  std::array<double, 4> c{};
  std::shared_ptr<const WordStream> word;

  static Point circle(double x);
  static Point torus(const std::vector<double>& x);
  static Point sphere2(double x, double y, double z);
  static Point projective(const std::vector<double>& v);
  static Point symbolic(WordStream w, int kappa);

  Space space() const { return {kind, dim}; }
  double operator[](int i) const { return c[static_cast<std::size_t>(i)]; }
  std::string str() const;
};

struct Ball {
  Point center;
  double radius;
};

double wrap01(double x);
double circle_dist(double x, double y);

double distance(const Point& x, const Point& y);
bool in_ball(const Ball& b, const Point& y);

// Symbolic points carry one-sided streams; the metric only sees indices >= 1.
Point shift_point(const Point& p, std::size_t m = 1);

struct NetOptions {
  std::size_t cap = std::size_t{1} << 22;
  int symbolic_depth = -1;  // -1: chosen from delta
};

std::vector<Point> build_net(const Space& space, double delta, std::uint64_t seed,
                             const NetOptions& opt = {});

// Grid step used by build_net for circle/torus nets (points per axis).
std::size_t grid_points_per_axis(double delta);

Point sample_point(const Space& space, Rng& rng);
Point sample_in_ball(const Ball& b, Rng& rng);

// Largest distance from a sample to its nearest net point.
double net_density_audit(const Space& space, const std::vector<Point>& net, std::size_t samples,
                         std::uint64_t seed);

std::uint64_t splitmix64(std::uint64_t x);

}  // namespace hitdyn
