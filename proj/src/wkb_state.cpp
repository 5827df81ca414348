#include "wkbsplit/wkb_state.hpp"

#include <cmath>
#include <utility>

#include "wkbsplit/errors.hpp"

namespace wkbsplit {

WkbState::WkbState(RealField phi, ComplexField amp, double t)
    : phase(std::move(phi)), amplitude(std::move(amp)), time(t) {
  check_same_grid(phase.grid(), amplitude.grid(), "WkbState");
}

ComplexField assemble_wave(const WkbState& s, double eps) {
  if (!(eps > 0.0) || eps > 1.0)
    throw ParameterError("assemble_wave: eps must lie in (0, 1]");
  const auto phi = s.phase.values();
  const auto amp = s.amplitude.values();
  std::vector<Complex> u(amp.size());
  for (std::size_t i = 0; i < u.size(); ++i)
    u[i] = amp[i] * std::polar(1.0, phi[i] / eps);
  return ComplexField::from_values(s.amplitude.grid(), std::move(u));
}

Observables observables(const ComplexField& u, double eps) {
  const Grid& g = u.grid();
  const auto vals = u.values();

  std::vector<double> rho(vals.size());
  for (std::size_t i = 0; i < vals.size(); ++i) rho[i] = std::norm(vals[i]);

  Observables obs{RealField(g, std::move(rho)), {}};
  auto grads = gradient(u);
  obs.current.reserve(grads.size());
  for (const auto& du : grads) {
    const auto dv = du.values();
    std::vector<double> j(vals.size());
    for (std::size_t i = 0; i < vals.size(); ++i)
      j[i] = eps * std::imag(std::conj(vals[i]) * dv[i]);
    obs.current.emplace_back(g, std::move(j));
  }
  return obs;
}

}  // namespace wkbsplit
