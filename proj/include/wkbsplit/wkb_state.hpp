#pragma once

#include <vector>

#include "wkbsplit/field.hpp"

namespace wkbsplit {

// Phase-amplitude pair (phi, a) at a time instant.  phi is real-valued by
// construction; both fields live on the same grid.
struct WkbState {
  RealField phase;
  ComplexField amplitude;
  double time = 0.0;

  WkbState(RealField phi, ComplexField amp, double t = 0.0);
};

// A (real, complex) pair with the same shape as a WkbState: tangent
// vectors of the phase-amplitude flows and operator outputs.
struct PhaseAmpPair {
  RealField phase;
  ComplexField amplitude;
};

// Quadratic observables of a wave function.
struct Observables {
  RealField density;                 // rho = |u|^2
  std::vector<RealField> current;    // J = eps Im(conj(u) grad u), d components
};

// u = a exp(i phi / eps), pointwise on the grid.
ComplexField assemble_wave(const WkbState& s, double eps);

Observables observables(const ComplexField& u, double eps);

}  // namespace wkbsplit
