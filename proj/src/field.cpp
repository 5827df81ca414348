#include "wkbsplit/field.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "wkbsplit/errors.hpp"

namespace wkbsplit {

void check_same_grid(const Grid& a, const Grid& b, const char* what) {
  if (&a != &b &&
      (a.dim() != b.dim() || a.points_per_axis() != b.points_per_axis() ||
       a.half_length() != b.half_length()))
    throw GridMismatchError(std::string(what) + ": fields live on different grids");
}

ComplexField ComplexField::from_values(const Grid& grid,
                                       std::vector<Complex> values) {
  if (values.size() != grid.size())
    throw GridMismatchError("ComplexField: value array does not match grid");
  ComplexField f(grid);
  f.values_ = std::move(values);
  return f;
}

ComplexField ComplexField::from_spectrum(const Grid& grid,
                                         std::vector<Complex> spectrum) {
  if (spectrum.size() != grid.size())
    throw GridMismatchError("ComplexField: spectrum does not match grid");
  ComplexField f(grid);
  f.values_ = grid.inverse(spectrum);
  f.spectrum_ = std::move(spectrum);
  return f;
}

const std::vector<Complex>& ComplexField::spectrum() const {
  if (!spectrum_) spectrum_ = grid_->forward(values_);
  return *spectrum_;
}

RealField::RealField(const Grid& grid, std::vector<double> values)
    : grid_(&grid), values_(std::move(values)) {
  if (values_.size() != grid.size())
    throw GridMismatchError("RealField: value array does not match grid");
}

ComplexField complexify(const RealField& f) {
  std::vector<Complex> v(f.values().begin(), f.values().end());
  return ComplexField::from_values(f.grid(), std::move(v));
}

RealField real_part_checked(const ComplexField& f, double tol,
                            const char* what) {
  double residue = 0.0;
  std::vector<double> out(f.grid().size());
  const auto vals = f.values();
  for (std::size_t i = 0; i < vals.size(); ++i) {
    residue = std::max(residue, std::abs(vals[i].imag()));
    out[i] = vals[i].real();
  }
  if (residue > tol)
    throw Error(std::string(what) + ": imaginary residue " +
                std::to_string(residue) + " exceeds tolerance");
  return RealField(f.grid(), std::move(out));
}

std::vector<ComplexField> gradient(const ComplexField& f) {
  const Grid& g = f.grid();
  std::vector<ComplexField> out;
  out.reserve(g.dim());
  for (int a = 0; a < g.dim(); ++a)
    out.push_back(
        ComplexField::from_spectrum(g, gradient_spectrum(g, f.spectrum(), a)));
  return out;
}

std::vector<RealField> gradient(const RealField& f) {
  auto grads = gradient(complexify(f));
  std::vector<RealField> out;
  out.reserve(grads.size());
  for (const auto& gf : grads)
    out.push_back(real_part_checked(gf, 1e-12, "gradient"));
  return out;
}

ComplexField laplacian(const ComplexField& f) {
  return ComplexField::from_spectrum(
      f.grid(), laplacian_spectrum(f.grid(), f.spectrum()));
}

RealField laplacian(const RealField& f) {
  return real_part_checked(laplacian(complexify(f)), 1e-12, "laplacian");
}

RealField second_derivative(const RealField& f, int axis_a, int axis_b) {
  const Grid& g = f.grid();
  auto spec = complexify(f).spectrum();
  auto d1 = gradient_spectrum(g, spec, axis_a);
  auto d2 = gradient_spectrum(g, d1, axis_b);
  return real_part_checked(ComplexField::from_spectrum(g, std::move(d2)),
                           1e-12, "second_derivative");
}

ComplexField dealias(const ComplexField& f) {
  std::vector<Complex> spec = f.spectrum();
  dealias_spectrum(f.grid(), spec);
  return ComplexField::from_spectrum(f.grid(), std::move(spec));
}

double l2_norm(const ComplexField& f) {
  double s = 0.0;
  for (const Complex& v : f.values()) s += std::norm(v);
  return std::sqrt(s * f.grid().cell_volume());
}

double l2_norm(const RealField& f) {
  double s = 0.0;
  for (double v : f.values()) s += v * v;
  return std::sqrt(s * f.grid().cell_volume());
}

double l2_distance(const ComplexField& u, const ComplexField& v) {
  check_same_grid(u.grid(), v.grid(), "l2_distance");
  double s = 0.0;
  const auto a = u.values(), b = v.values();
  for (std::size_t i = 0; i < a.size(); ++i) s += std::norm(a[i] - b[i]);
  return std::sqrt(s * u.grid().cell_volume());
}

double l2_distance(const RealField& u, const RealField& v) {
  check_same_grid(u.grid(), v.grid(), "l2_distance");
  double s = 0.0;
  const auto a = u.values(), b = v.values();
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return std::sqrt(s * u.grid().cell_volume());
}

double l1_norm(const RealField& f) {
  double s = 0.0;
  for (double v : f.values()) s += std::abs(v);
  return s * f.grid().cell_volume();
}

double linf_norm(const RealField& f) {
  double m = 0.0;
  for (double v : f.values()) m = std::max(m, std::abs(v));
  return m;
}

double max_abs(const ComplexField& f) {
  double m = 0.0;
  for (const Complex& v : f.values()) m = std::max(m, std::abs(v));
  return m;
}

double mass(const ComplexField& f) {
  double s = 0.0;
  for (const Complex& v : f.values()) s += std::norm(v);
  return s * f.grid().cell_volume();
}

}  // namespace wkbsplit
