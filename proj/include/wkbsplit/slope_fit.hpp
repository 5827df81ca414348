#pragma once

#include <cmath>
#include <span>

namespace wkbsplit {

struct SlopeFit {
  double slope = 0.0;
  double intercept = 0.0;
  int points_used = 0;
};

// Ordinary least squares on log2(y) vs log2(x), skipping pairs with
// y below the rounding floor.
inline SlopeFit fit_loglog(std::span<const double> x, std::span<const double> y,
                           double floor = 1e-11) {
  SlopeFit fit;
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  int n = 0;
  for (std::size_t i = 0; i < x.size() && i < y.size(); ++i) {
    if (!(y[i] > floor) || !(x[i] > 0.0) || !std::isfinite(y[i])) continue;
    const double lx = std::log2(x[i]);
    const double ly = std::log2(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
    ++n;
  }
  fit.points_used = n;
  if (n >= 2) {
    const double denom = n * sxx - sx * sx;
    fit.slope = (n * sxy - sx * sy) / denom;
    fit.intercept = (sy - fit.slope * sx) / n;
  }
  return fit;
}

}  // namespace wkbsplit
