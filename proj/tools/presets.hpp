#pragma once

#include <optional>
#include <string>
#include <vector>

#include "hitdyn/cocycle.hpp"
#include "hitdyn/entropy.hpp"
#include "hitdyn/irregular.hpp"

namespace hitdyn::presets {

struct Preset {
  std::string name;
  std::string description;
  GeneratorSystem system;  // for cocycle presets: the projectivized action
  std::optional<Cocycle> cocycle;
};

const std::vector<std::string>& names();
// Throws InvalidArgument listing the valid names.
Preset load(const std::string& name);

double golden();
Eigen::MatrixXd cat_matrix();
Cocycle different_types_A();
Cocycle different_types_B();
Cocycle irreducible_vs_accessible_A();
Cocycle irreducible_vs_accessible_B();
Cocycle symplectic_center(double theta1, double theta2);
Cocycle constant_hyperbolic();

// Morse-Smale example: observable and targets for the irregular-point construction.
struct MorseSmaleSetup {
  GeneratorSystem system;
  Observable psi;
  Point x1, x2;
  double I1, I2;
  IrregularOptions options;
};
MorseSmaleSetup morse_smale();

}  // namespace hitdyn::presets
