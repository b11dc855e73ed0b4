#pragma once

#include <cmath>
#include <complex>

// Unit conventions used throughout:
//   lengths in micrometers (user-facing geometry in nm where noted),
//   eps0 = mu0 = c = 1, omega = k0 = 2*pi/lambda,
//   fields ~ exp(i(beta*z - omega*t)).
// All emitted quantities are ratios or geometric (rad/um), so the
// absolute field scale never appears in outputs.

namespace fcwg {

using Complex = std::complex<double>;

inline constexpr double pi = 3.141592653589793238462643383279502884;

inline constexpr double nm_to_um(double nm) { return nm * 1e-3; }

inline double vacuum_wavenumber(double lambda_um) { return 2.0 * pi / lambda_um; }

} // namespace fcwg
