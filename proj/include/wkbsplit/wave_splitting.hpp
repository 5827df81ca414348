#pragma once

#include "wkbsplit/field.hpp"

namespace wkbsplit {

// Physical parameters of  i eps dt u + (eps^2/2) Lap u = lambda |u|^{2 sigma} u.
struct ModelParams {
  double eps = 1.0;
  double lambda = 0.0;
  int sigma = 1;
  double horizon = 1.0;  // T
  // Dealias-filter the gauge product on return to spectral space.
  bool dealias = true;
  // Composition order of the Lie-Trotter step; default Z = Y o X
  // (free flight first, gauge after).  The swapped variant X o Y is kept
  // for symmetry experiments.
  bool gauge_first = false;

  void validate() const;
};

// Exact free flow: multiplier e^{-i eps t |k|^2 / 2} on the spectrum.
ComplexField free_step(const ComplexField& u, double t, const ModelParams& p);

// Exact gauge flow: pointwise phase u e^{-i lambda t |u|^{2 sigma} / eps};
// preserves |u| pointwise.
ComplexField gauge_step(const ComplexField& u, double t, const ModelParams& p);

// One Lie-Trotter step Z^dt = Y^dt X^dt (or X^dt Y^dt when gauge_first).
ComplexField lie_trotter_step(const ComplexField& u, double dt,
                              const ModelParams& p);

// Symmetric step Y^{dt/2} X^{dt} Y^{dt/2} (order two), used as the
// fine-step reference generator.
ComplexField strang_step(const ComplexField& u, double dt,
                         const ModelParams& p);

// Fine-step Strang proxy for the exact flow S^t_eps with a Richardson
// self-certificate: substeps are doubled until the solution moves by less
// than `tolerance` in L^2; the last difference is the error estimate.
struct WaveReference {
  ComplexField u;
  double certificate = 0.0;  // L^2 distance between the last two refinements
  long substeps = 0;
};

WaveReference reference_solve(const ComplexField& u0, double t,
                              const ModelParams& p, double tolerance = 1e-10,
                              long initial_substeps = 0);

}  // namespace wkbsplit
