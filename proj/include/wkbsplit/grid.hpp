#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace wkbsplit {

using Complex = std::complex<double>;

// Periodic computational domain [-L, L)^dim, dim in {1, 2}, with n points
// per axis (n a power of two, n >= 16).  Owns the FFT plans.
//
// Conventions:
//   x_m = -L + m dx,   dx = 2L / n
//   k_j = pi j / L,    j in {-n/2, ..., n/2 - 1},   dk = pi / L
//   forward:  fhat(k) = (2pi)^{-d/2} dx^d  sum_m f(x_m) e^{-i k.x_m}
//   inverse:  f(x_m)  = (2pi)^{-d/2} dk^d  sum_j fhat(k_j) e^{+i k_j.x_m}
//
// The pair is mutually inverse on the grid, and the discrete Parseval
// identity  sum_m |f|^2 dx^d = sum_j |fhat|^2 dk^d  holds exactly, so grid
// sums of |fhat|^2 dk^d are quadratures of the continuous L^2 integral.
class Grid {
 public:
  Grid(int dim, int points_per_axis, double half_length);
  ~Grid();

  Grid(const Grid&) = delete;
  Grid& operator=(const Grid&) = delete;

  int dim() const { return dim_; }
  int points_per_axis() const { return n_; }
  double half_length() const { return half_length_; }
  std::size_t size() const { return size_; }  // n^dim

  double dx() const { return dx_; }
  double dk() const { return dk_; }
  double cell_volume() const { return cell_volume_; }      // dx^dim
  double spectral_cell() const { return spectral_cell_; }  // dk^dim
  double max_wavenumber() const { return 0.5 * n_ * dk_; }
  double dealias_cutoff() const { return (2.0 / 3.0) * max_wavenumber(); }

  // 1d index helpers (same lattice on every axis)
  double coordinate(int index) const { return -half_length_ + index * dx_; }
  double wavenumber(int index) const {
    return dk_ * (index < n_ / 2 ? index : index - n_);
  }
  bool is_nyquist(int index) const { return index == n_ / 2; }

  // flat row-major index <-> per-axis indices
  std::array<int, 2> axis_indices(std::size_t flat) const {
    if (dim_ == 1) return {static_cast<int>(flat), 0};
    return {static_cast<int>(flat / n_), static_cast<int>(flat % n_)};
  }

  // Unnormalized caller-buffer transforms; thread-safe after construction.
  void forward(std::span<const Complex> phys, std::span<Complex> spec) const;
  void inverse(std::span<const Complex> spec, std::span<Complex> phys) const;

  std::vector<Complex> forward(std::span<const Complex> phys) const;
  std::vector<Complex> inverse(std::span<const Complex> spec) const;

 private:
  int dim_;
  int n_;
  double half_length_;
  std::size_t size_;
  double dx_, dk_, cell_volume_, spectral_cell_;
  double forward_scale_, inverse_scale_;
  void* plan_forward_;   // fftw_plan
  void* plan_inverse_;
};

// Visits every spectral mode: f(flat_index, k) with k the dim-long
// wavenumber vector (k[1] = 0 in 1d).
template <class F>
void for_each_mode(const Grid& g, F&& f) {
  const int n = g.points_per_axis();
  if (g.dim() == 1) {
    for (int i = 0; i < n; ++i) {
      const std::array<double, 2> k{g.wavenumber(i), 0.0};
      f(static_cast<std::size_t>(i), k);
    }
  } else {
    std::size_t flat = 0;
    for (int i = 0; i < n; ++i) {
      const double k0 = g.wavenumber(i);
      for (int j = 0; j < n; ++j, ++flat) {
        const std::array<double, 2> k{k0, g.wavenumber(j)};
        f(flat, k);
      }
    }
  }
}

// Spectral-space primitives.  Differentiation multipliers zero the unpaired
// Nyquist mode so real fields stay real.
std::vector<Complex> gradient_spectrum(const Grid& g,
                                       std::span<const Complex> spec,
                                       int axis);
std::vector<Complex> laplacian_spectrum(const Grid& g,
                                        std::span<const Complex> spec);
void dealias_spectrum(const Grid& g, std::span<Complex> spec);

}  // namespace wkbsplit
