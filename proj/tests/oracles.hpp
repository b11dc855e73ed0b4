#pragma once

// Analytic and brute-force reference solutions used only by the test
// suites. Everything here is independent of the library implementation
// paths it checks.

#include <complex>
#include <vector>

namespace oracle {

// Fundamental even TE mode of a symmetric slab (field along the invariant
// axis): kx tan(kx d/2) = gamma, solved by scan + bisection.
double slab_te_fundamental_neff(double n_core, double n_clad, double thickness_um,
                                double lambda_um);

// Closed-form profile quantities for that mode with E(0) = 1:
// E(x) = cos(kx x) inside, cos(kx d/2) exp(-g(|x|-d/2)) outside.
double slab_te_profile(double n_core, double n_clad, double thickness_um,
                       double lambda_um, double x_um);
// int |E|^2 dx over the whole line.
double slab_te_norm_integral(double n_core, double n_clad, double thickness_um,
                             double lambda_um);

// Fundamental HE_l1 hybrid mode of a step-index fiber from the exact
// 4x4 boundary-condition determinant (Ez, Hz, Ephi, Hphi continuity).
double step_fiber_hybrid_neff(int l, double n_core, double n_clad,
                              double radius_um, double lambda_um);

// Steady-state transmission of a weakly driven two-level dipole coupled
// to a multimode coupler, by direct time integration of the optical
// Bloch equations (RK4), normalized to the input flux.
struct BlochChannel {
    std::vector<double> f, gamma, beta, phi;
};
double bloch_transmission(const BlochChannel& ch, double z_um, double z0_um,
                          double delta_over_gamma, double drive = 1e-2);

} // namespace oracle
