#pragma once

#include <optional>
#include <span>
#include <vector>

#include "wkbsplit/grid.hpp"

namespace wkbsplit {

// Gridded complex-valued function stored in physical space, with a lazily
// cached spectral image.  Value semantics over a shared immutable Grid.
// The cache is dropped on mutation, so whenever both representations exist
// they agree under the grid transform.
//
// The lazy cache is not synchronized: concurrent use of one instance is
// safe for values()-only access or once the cache is materialized; parallel
// workers otherwise operate on their own copies.
class ComplexField {
 public:
  explicit ComplexField(const Grid& grid)
      : grid_(&grid), values_(grid.size(), Complex(0.0)) {}

  static ComplexField from_values(const Grid& grid,
                                  std::vector<Complex> values);
  static ComplexField from_spectrum(const Grid& grid,
                                    std::vector<Complex> spectrum);

  const Grid& grid() const { return *grid_; }
  std::span<const Complex> values() const { return values_; }
  const std::vector<Complex>& spectrum() const;
  bool has_cached_spectrum() const { return spectrum_.has_value(); }

  // Mutation entry point; invalidates the cached spectrum.
  std::vector<Complex>& mutate_values() {
    spectrum_.reset();
    return values_;
  }

 private:
  const Grid* grid_;
  std::vector<Complex> values_;
  mutable std::optional<std::vector<Complex>> spectrum_;
};

// Real-valued counterpart (phases, densities, currents).
class RealField {
 public:
  explicit RealField(const Grid& grid)
      : grid_(&grid), values_(grid.size(), 0.0) {}
  RealField(const Grid& grid, std::vector<double> values);

  const Grid& grid() const { return *grid_; }
  std::span<const double> values() const { return values_; }
  std::vector<double>& mutate_values() { return values_; }

 private:
  const Grid* grid_;
  std::vector<double> values_;
};

ComplexField complexify(const RealField& f);
// Extracts the real part, erroring if the imaginary residue exceeds tol.
RealField real_part_checked(const ComplexField& f, double tol,
                            const char* what);

std::vector<ComplexField> gradient(const ComplexField& f);
std::vector<RealField> gradient(const RealField& f);
ComplexField laplacian(const ComplexField& f);
RealField laplacian(const RealField& f);
// Mixed second derivative d^2 f / dx_a dx_b (spectral).
RealField second_derivative(const RealField& f, int axis_a, int axis_b);

ComplexField dealias(const ComplexField& f);

double l2_norm(const ComplexField& f);
double l2_norm(const RealField& f);
double l2_distance(const ComplexField& u, const ComplexField& v);
double l2_distance(const RealField& u, const RealField& v);
double l1_norm(const RealField& f);
double linf_norm(const RealField& f);
double max_abs(const ComplexField& f);
// Integral of |u|^2 over the torus (cell-volume quadrature).
double mass(const ComplexField& f);

void check_same_grid(const Grid& a, const Grid& b, const char* what);

}  // namespace wkbsplit
