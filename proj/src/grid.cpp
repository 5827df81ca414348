#include "wkbsplit/grid.hpp"

#include <fftw3.h>

#include <cmath>
#include <mutex>

#include "wkbsplit/errors.hpp"

namespace wkbsplit {

namespace {

// FFTW plan creation is not thread-safe; execution with caller arrays is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

bool is_power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

constexpr double kTwoPi = 6.283185307179586476925286766559;

}  // namespace

Grid::Grid(int dim, int points_per_axis, double half_length)
    : dim_(dim), n_(points_per_axis), half_length_(half_length) {
  if (dim_ != 1 && dim_ != 2)
    throw ParameterError("Grid: dim must be 1 or 2");
  if (n_ < 16 || !is_power_of_two(n_))
    throw ParameterError("Grid: points_per_axis must be a power of two >= 16");
  if (!(half_length_ > 0.0))
    throw ParameterError("Grid: half_length must be positive");

  size_ = 1;
  for (int a = 0; a < dim_; ++a) size_ *= static_cast<std::size_t>(n_);
  dx_ = 2.0 * half_length_ / n_;
  dk_ = M_PI / half_length_;
  cell_volume_ = std::pow(dx_, dim_);
  spectral_cell_ = std::pow(dk_, dim_);
  // (dx / sqrt(2pi))^d forward, (dk / sqrt(2pi))^d inverse; the product
  // times the raw FFT pair's n^d factor is exactly 1.
  forward_scale_ = std::pow(dx_ / std::sqrt(kTwoPi), dim_);
  inverse_scale_ = std::pow(dk_ / std::sqrt(kTwoPi), dim_);

  std::vector<Complex> scratch(size_);
  auto* buf = reinterpret_cast<fftw_complex*>(scratch.data());
  const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
  std::lock_guard<std::mutex> lock(planner_mutex());
  if (dim_ == 1) {
    plan_forward_ = fftw_plan_dft_1d(n_, buf, buf, FFTW_FORWARD, flags);
    plan_inverse_ = fftw_plan_dft_1d(n_, buf, buf, FFTW_BACKWARD, flags);
  } else {
    plan_forward_ = fftw_plan_dft_2d(n_, n_, buf, buf, FFTW_FORWARD, flags);
    plan_inverse_ = fftw_plan_dft_2d(n_, n_, buf, buf, FFTW_BACKWARD, flags);
  }
}

Grid::~Grid() {
  std::lock_guard<std::mutex> lock(planner_mutex());
  fftw_destroy_plan(static_cast<fftw_plan>(plan_forward_));
  fftw_destroy_plan(static_cast<fftw_plan>(plan_inverse_));
}

// The raw FFT acts on unsigned indices; the grid offset x = -L + m dx turns
// e^{-i k_j x_m} into (-1)^{i1+i2} e^{-2pi i jm/n} per axis, so both
// directions carry a checkerboard sign on the spectral side.
void Grid::forward(std::span<const Complex> phys,
                   std::span<Complex> spec) const {
  if (phys.size() != size_ || spec.size() != size_)
    throw GridMismatchError("forward: buffer size does not match grid");
  fftw_execute_dft(
      static_cast<fftw_plan>(plan_forward_),
      reinterpret_cast<fftw_complex*>(const_cast<Complex*>(phys.data())),
      reinterpret_cast<fftw_complex*>(spec.data()));
  if (dim_ == 1) {
    for (int i = 0; i < n_; ++i)
      spec[i] *= (i & 1) ? -forward_scale_ : forward_scale_;
  } else {
    std::size_t flat = 0;
    for (int i = 0; i < n_; ++i)
      for (int j = 0; j < n_; ++j, ++flat)
        spec[flat] *= ((i + j) & 1) ? -forward_scale_ : forward_scale_;
  }
}

void Grid::inverse(std::span<const Complex> spec,
                   std::span<Complex> phys) const {
  if (phys.size() != size_ || spec.size() != size_)
    throw GridMismatchError("inverse: buffer size does not match grid");
  std::vector<Complex> signed_spec(size_);
  if (dim_ == 1) {
    for (int i = 0; i < n_; ++i)
      signed_spec[i] = spec[i] * ((i & 1) ? -inverse_scale_ : inverse_scale_);
  } else {
    std::size_t flat = 0;
    for (int i = 0; i < n_; ++i)
      for (int j = 0; j < n_; ++j, ++flat)
        signed_spec[flat] =
            spec[flat] * (((i + j) & 1) ? -inverse_scale_ : inverse_scale_);
  }
  fftw_execute_dft(static_cast<fftw_plan>(plan_inverse_),
                   reinterpret_cast<fftw_complex*>(signed_spec.data()),
                   reinterpret_cast<fftw_complex*>(phys.data()));
}

std::vector<Complex> Grid::forward(std::span<const Complex> phys) const {
  std::vector<Complex> spec(size_);
  forward(phys, spec);
  return spec;
}

std::vector<Complex> Grid::inverse(std::span<const Complex> spec) const {
  std::vector<Complex> phys(size_);
  inverse(spec, phys);
  return phys;
}

std::vector<Complex> gradient_spectrum(const Grid& g,
                                       std::span<const Complex> spec,
                                       int axis) {
  if (axis < 0 || axis >= g.dim())
    throw ParameterError("gradient_spectrum: axis out of range");
  if (spec.size() != g.size())
    throw GridMismatchError("gradient_spectrum: size mismatch");
  std::vector<Complex> out(g.size());
  const int nyq = g.points_per_axis() / 2;
  for_each_mode(g, [&](std::size_t flat, const std::array<double, 2>& k) {
    const auto idx = g.axis_indices(flat);
    out[flat] = (idx[axis] == nyq) ? Complex(0.0)
                                   : Complex(0.0, k[axis]) * spec[flat];
  });
  return out;
}

std::vector<Complex> laplacian_spectrum(const Grid& g,
                                        std::span<const Complex> spec) {
  if (spec.size() != g.size())
    throw GridMismatchError("laplacian_spectrum: size mismatch");
  std::vector<Complex> out(g.size());
  for_each_mode(g, [&](std::size_t flat, const std::array<double, 2>& k) {
    out[flat] = -(k[0] * k[0] + k[1] * k[1]) * spec[flat];
  });
  return out;
}

void dealias_spectrum(const Grid& g, std::span<Complex> spec) {
  if (spec.size() != g.size())
    throw GridMismatchError("dealias_spectrum: size mismatch");
  const double cutoff = g.dealias_cutoff();
  for_each_mode(g, [&](std::size_t flat, const std::array<double, 2>& k) {
    if (std::abs(k[0]) > cutoff || std::abs(k[1]) > cutoff)
      spec[flat] = Complex(0.0);
  });
}

}  // namespace wkbsplit
