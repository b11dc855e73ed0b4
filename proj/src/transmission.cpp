#include "fcwg/transmission.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace fcwg {

namespace {

Complex lorentzian(double delta) { return 1.0 / Complex(1.0, -2.0 * delta); }

// t(z) for given per-mode phase angles theta_m = beta_m z, psi_m = beta_m z0.
Complex amplitude(const CouplerChannel& ch, const std::vector<double>& theta,
                  const std::vector<double>& psi, double delta) {
    Complex direct = 0, emit = 0, drive = 0;
    for (size_t m = 0; m < ch.size(); ++m) {
        const double root = std::sqrt(ch.f[m] * ch.gamma[m]);
        direct += ch.f[m] * std::exp(Complex(0, theta[m]));
        emit += root * std::exp(Complex(0, ch.phi[m] + theta[m] - psi[m]));
        drive += root * std::exp(Complex(0, -ch.phi[m] + psi[m]));
    }
    return direct - 2.0 * lorentzian(delta) * emit * drive;
}

} // namespace

void CouplerChannel::validate() const {
    const size_t n = f.size();
    if (gamma.size() != n || beta.size() != n || phi.size() != n)
        throw std::invalid_argument("channel arrays must have equal length");
    double fs = 0, gs = 0;
    for (size_t m = 0; m < n; ++m) {
        if (f[m] < 0 || f[m] > 1.0 + 1e-9)
            throw std::invalid_argument("fiber fraction outside [0, 1]");
        if (gamma[m] < 0 || gamma[m] > 0.5 + 1e-9)
            throw std::invalid_argument("beta-factor outside [0, 0.5]");
        fs += f[m];
        gs += 2 * gamma[m];
    }
    if (fs > 1.02) throw std::invalid_argument("fiber fractions sum beyond unity");
    if (gs > 1.0 + 1e-9)
        throw std::invalid_argument("beta-factors sum beyond the emission budget");
}

double off_resonance(const CouplerChannel& ch, double z_um) {
    Complex a = 0;
    for (size_t m = 0; m < ch.size(); ++m)
        a += ch.f[m] * std::exp(Complex(0, ch.beta[m] * z_um));
    return std::norm(a);
}

double on_resonance(const CouplerChannel& ch, double z_um, double z0_um,
                    double delta) {
    std::vector<double> theta(ch.size()), psi(ch.size());
    for (size_t m = 0; m < ch.size(); ++m) {
        theta[m] = ch.beta[m] * z_um;
        psi[m] = ch.beta[m] * z0_um;
    }
    return std::norm(amplitude(ch, theta, psi, delta));
}

TransmissionScan contrast_scan(const CouplerChannel& ch, double z_lo_um,
                               double z_hi_um, int n_points, double z0_um,
                               double delta) {
    if (n_points < 2 || !(z_hi_um > z_lo_um))
        throw std::invalid_argument("contrast_scan: bad z range");
    TransmissionScan s;
    s.z0_um = z0_um;
    s.delta = delta;
    s.z_um.resize(n_points);
    s.f0.resize(n_points);
    s.f.resize(n_points);
    s.dt.resize(n_points);
    s.dt_min = std::numeric_limits<double>::infinity();
    s.dt_max = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < n_points; ++i) {
        const double z = z_lo_um + (z_hi_um - z_lo_um) * i / (n_points - 1);
        s.z_um[i] = z;
        s.f0[i] = off_resonance(ch, z);
        s.f[i] = on_resonance(ch, z, z0_um, delta);
        if (s.f0[i] > 1e-12) {
            s.dt[i] = (s.f[i] - s.f0[i]) / s.f0[i];
            if (s.dt[i] < s.dt_min) {
                s.dt_min = s.dt[i];
                s.z_at_dt_min = z;
            }
            if (s.dt[i] > s.dt_max) {
                s.dt_max = s.dt[i];
                s.z_at_dt_max = z;
            }
        } else {
            // contrast undefined at transmission zeros; the enhancement
            // ratio F/F0 diverges there
            s.dt[i] = std::numeric_limits<double>::infinity();
        }
    }
    return s;
}

double engineered_extinction(const CouplerChannel& ch, int grid_per_axis) {
    ch.validate();
    const size_t n = ch.size();
    if (n == 0) throw std::invalid_argument("empty channel");

    double worst = -std::numeric_limits<double>::infinity();
    std::vector<double> theta(n, 0.0), psi(n, 0.0);
    if (n == 1) {
        const double f0 = ch.f[0] * ch.f[0];
        const double fr = std::norm(amplitude(ch, theta, psi, 0.0));
        return 1.0 - fr / f0;
    }
    if (n == 2) {
        // F and F0 depend only on the phase differences u = (b2-b1) z and
        // v = (b2-b1) z0; the torus scan covers every (z, z0) exactly.
        for (int a = 0; a < grid_per_axis; ++a) {
            theta[1] = 2 * pi * a / grid_per_axis;
            Complex d0 = ch.f[0] + ch.f[1] * std::exp(Complex(0, theta[1]));
            const double f0 = std::norm(d0);
            for (int b = 0; b < grid_per_axis; ++b) {
                psi[1] = 2 * pi * b / grid_per_axis;
                const double fr = std::norm(amplitude(ch, theta, psi, 0.0));
                if (f0 > 1e-12) worst = std::max(worst, fr / f0);
            }
        }
        return 1.0 - worst;
    }
    // General case: dense (z, z0) scan over a few of the longest beat periods.
    double dbmin = std::numeric_limits<double>::infinity();
    for (size_t a = 0; a < n; ++a)
        for (size_t b = a + 1; b < n; ++b)
            dbmin = std::min(dbmin, std::abs(ch.beta[a] - ch.beta[b]));
    const double span = dbmin > 0 ? 3.0 * 2.0 * pi / dbmin : 1.0;
    const int g = grid_per_axis;
    for (int a = 0; a < g; ++a) {
        const double z = span * a / g;
        const double f0 = off_resonance(ch, z);
        if (f0 <= 1e-12) continue;
        for (int b = 0; b < g; ++b) {
            const double z0 = span * b / g;
            worst = std::max(worst, on_resonance(ch, z, z0, 0.0) / f0);
        }
    }
    return 1.0 - worst;
}

Lineshape lineshape(const CouplerChannel& ch, double z_um, double z0_um,
                    const std::vector<double>& deltas) {
    Lineshape ls;
    ls.delta = deltas;
    ls.f.reserve(deltas.size());
    for (double d : deltas) ls.f.push_back(on_resonance(ch, z_um, z0_um, d));
    return ls;
}

} // namespace fcwg
