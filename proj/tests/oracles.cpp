#include "oracles.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <stdexcept>

namespace oracle {

namespace {
constexpr double kPi = 3.141592653589793238462643383279502884;
}

double slab_te_fundamental_neff(double n_core, double n_clad, double thickness_um,
                                double lambda_um) {
    const double k0 = 2 * kPi / lambda_um;
    const double d = thickness_um;
    auto f = [&](double neff) {
        const double kx = k0 * std::sqrt(n_core * n_core - neff * neff);
        const double g = k0 * std::sqrt(neff * neff - n_clad * n_clad);
        return kx * std::tan(kx * d / 2) - g;
    };
    // Scan downward from n_core; the first sign change (avoiding tan poles)
    // brackets the fundamental even mode.
    const int steps = 20000;
    double hi = n_core - 1e-9, lo = n_clad + 1e-9;
    double prev_n = hi, prev_f = f(hi);
    for (int s = 1; s <= steps; ++s) {
        const double n = hi - (hi - lo) * s / steps;
        const double val = f(n);
        if (std::isfinite(val) && std::isfinite(prev_f) && prev_f * val <= 0 &&
            std::abs(val - prev_f) < 1e3 * (std::abs(val) + std::abs(prev_f))) {
            double a = n, b = prev_n;
            for (int it = 0; it < 200; ++it) {
                const double mid = (a + b) / 2;
                if (f(mid) * f(a) <= 0) b = mid;
                else a = mid;
            }
            return (a + b) / 2;
        }
        prev_n = n;
        prev_f = val;
    }
    throw std::runtime_error("slab oracle: no guided TE mode found");
}

double slab_te_profile(double n_core, double n_clad, double thickness_um,
                       double lambda_um, double x_um) {
    const double k0 = 2 * kPi / lambda_um;
    const double neff =
        slab_te_fundamental_neff(n_core, n_clad, thickness_um, lambda_um);
    const double kx = k0 * std::sqrt(n_core * n_core - neff * neff);
    const double g = k0 * std::sqrt(neff * neff - n_clad * n_clad);
    const double d = thickness_um;
    if (std::abs(x_um) <= d / 2) return std::cos(kx * x_um);
    return std::cos(kx * d / 2) * std::exp(-g * (std::abs(x_um) - d / 2));
}

double slab_te_norm_integral(double n_core, double n_clad, double thickness_um,
                             double lambda_um) {
    const double k0 = 2 * kPi / lambda_um;
    const double neff =
        slab_te_fundamental_neff(n_core, n_clad, thickness_um, lambda_um);
    const double kx = k0 * std::sqrt(n_core * n_core - neff * neff);
    const double g = k0 * std::sqrt(neff * neff - n_clad * n_clad);
    const double d = thickness_um;
    const double inside = d / 2 + std::sin(kx * d) / (2 * kx);
    const double c = std::cos(kx * d / 2);
    return inside + c * c / g;
}

double step_fiber_hybrid_neff(int l, double n_core, double n_clad,
                              double radius_um, double lambda_um) {
    const double k0 = 2 * kPi / lambda_um;
    const double a = radius_um;
    auto det = [&](double neff) {
        const double beta = k0 * neff;
        const double u = a * std::sqrt(k0 * k0 * n_core * n_core - beta * beta);
        const double w = a * std::sqrt(beta * beta - k0 * k0 * n_clad * n_clad);
        const double jl = std::cyl_bessel_j(l, u);
        const double jlm = std::cyl_bessel_j(l - 1, u);
        const double jp = jlm - l / u * jl; // J_l'
        const double kl = std::cyl_bessel_k(l, w);
        const double klm = std::cyl_bessel_k(l - 1, w);
        const double kp = -klm - l / w * kl; // K_l'
        const double s1 = a * a / (u * u);
        const double s2 = -a * a / (w * w);
        Eigen::Matrix4d m;
        m << jl, 0, -kl, 0,
             0, jl, 0, -kl,
             -l * beta * s1 * jl, -k0 * s1 * u * jp, l * beta * s2 * kl,
                 k0 * s2 * w * kp,
             k0 * n_core * n_core * s1 * u * jp, l * beta * s1 * jl,
                 -k0 * n_clad * n_clad * s2 * w * kp, -l * beta * s2 * kl;
        return m.determinant();
    };
    const int steps = 40000;
    const double hi = n_core - 1e-7, lo = n_clad + 1e-7;
    double prev_n = hi, prev_f = det(hi);
    for (int s = 1; s <= steps; ++s) {
        const double n = hi - (hi - lo) * s / steps;
        const double val = det(n);
        if (std::isfinite(val) && std::isfinite(prev_f) && prev_f * val <= 0) {
            double x0 = n, x1 = prev_n;
            for (int it = 0; it < 200; ++it) {
                const double mid = (x0 + x1) / 2;
                if (det(mid) * det(x0) <= 0) x1 = mid;
                else x0 = mid;
            }
            return (x0 + x1) / 2;
        }
        prev_n = n;
        prev_f = val;
    }
    throw std::runtime_error("fiber oracle: no hybrid root found");
}

double bloch_transmission(const BlochChannel& ch, double z_um, double z0_um,
                          double delta_over_gamma, double drive) {
    using C = std::complex<double>;
    const size_t m = ch.f.size();
    const double alpha = drive;
    // Drive reaching the dipole: B = alpha sum sqrt(f g) e^{-i phi} e^{i b z0}
    C b_drive = 0;
    for (size_t i = 0; i < m; ++i)
        b_drive += alpha * std::sqrt(ch.f[i] * ch.gamma[i]) *
                   std::exp(C(0, -ch.phi[i])) * std::exp(C(0, ch.beta[i] * z0_um));

    // Bloch equations in units of the total decay rate:
    //   ds-/dt = (i d - 1/2) s- + sz B,  dsz/dt = -(1+sz) - 4 Re(B* s-)
    const double delta = delta_over_gamma;
    C sm = 0;
    double sz = -1.0;
    auto deriv = [&](C s, double z, C& ds, double& dz) {
        ds = (C(0, delta) - 0.5) * s + z * b_drive;
        dz = -(1.0 + z) - 4.0 * std::real(std::conj(b_drive) * s);
    };
    const double dt = 0.02 / (1.0 + std::abs(delta));
    const double t_end = 60.0;
    for (double t = 0; t < t_end; t += dt) {
        C k1s, k2s, k3s, k4s;
        double k1z, k2z, k3z, k4z;
        deriv(sm, sz, k1s, k1z);
        deriv(sm + 0.5 * dt * k1s, sz + 0.5 * dt * k1z, k2s, k2z);
        deriv(sm + 0.5 * dt * k2s, sz + 0.5 * dt * k2z, k3s, k3z);
        deriv(sm + dt * k3s, sz + dt * k3z, k4s, k4z);
        sm += dt / 6.0 * (k1s + 2.0 * k2s + 2.0 * k3s + k4s);
        sz += dt / 6.0 * (k1z + 2.0 * k2z + 2.0 * k3z + k4z);
    }

    // Fiber-collected output amplitude at z, normalized to the input.
    C out = 0;
    for (size_t i = 0; i < m; ++i) {
        out += ch.f[i] * alpha * std::exp(C(0, ch.beta[i] * z_um));
        out += std::sqrt(ch.f[i] * ch.gamma[i]) * std::exp(C(0, ch.phi[i])) *
               std::exp(C(0, ch.beta[i] * (z_um - z0_um))) * sm;
    }
    return std::norm(out) / (alpha * alpha);
}

} // namespace oracle
