#include "fcwg/emission.hpp"

#include <cmath>
#include <stdexcept>

namespace fcwg {

ModeRate guided_rate(const Supermode& m, const DipoleSpec& d, double n_bulk,
                     double lambda_um) {
    const double x = nm_to_um(d.x_nm), y = nm_to_um(d.y_nm);
    if (x < m.ex.x0 - m.ex.dx || x > m.ex.x(m.ex.nx - 1) + m.ex.dx ||
        y < m.ey.y0 - m.ey.dy || y > m.ey.y(m.ey.ny - 1) + m.ey.dy)
        throw std::invalid_argument("guided_rate: dipole position outside grid");
    const double nrm = d.norm();
    if (!(nrm > 0)) throw std::invalid_argument("guided_rate: zero dipole moment");
    const double ax = d.ax / nrm, az = d.az / nrm;

    const Complex ex = m.ex.sample(x, y);
    const Complex ez = m.ez.sample(x, y);
    const Complex c_fwd = ax * ex + az * ez;
    const Complex c_back = ax * ex - az * ez; // -z mode: (ex, ey, -ez)
    const double k0 = vacuum_wavenumber(lambda_um);

    ModeRate r;
    r.rate = 3.0 * pi / (2.0 * n_bulk * k0 * k0) * std::norm(c_fwd) / m.s_flux;
    r.phi_fwd = std::arg(std::conj(c_fwd));
    r.phi_back = std::arg(std::conj(c_back));
    return r;
}

double calibrate_radiation(const ModeBasis& basis, const DipoleSpec& d,
                           double n_bulk, double target) {
    if (!(target > 0.0) || target > 1.0)
        throw std::invalid_argument("calibration target must lie in (0, 1]");
    double guided = 0.0;
    for (const auto& m : basis.modes)
        guided += 2.0 * guided_rate(m, d, n_bulk, basis.lambda_um).rate;
    if (!(guided > 0.0))
        throw std::runtime_error(
            "radiation calibration infeasible: no guided emission at the "
            "reference geometry");
    return guided * (1.0 - target) / target;
}

RateTable rate_table(const ModeBasis& basis, const DipoleSpec& d, double n_bulk,
                     double rad_rate) {
    if (rad_rate < 0.0)
        throw std::invalid_argument("radiation rate must be non-negative");
    RateTable t;
    t.rad_rate = rad_rate;
    t.total = rad_rate;
    for (const auto& m : basis.modes) {
        t.rows.push_back(guided_rate(m, d, n_bulk, basis.lambda_um));
        t.total += 2.0 * t.rows.back().rate;
    }
    t.gamma.reserve(t.rows.size());
    for (const auto& r : t.rows)
        t.gamma.push_back(t.total > 0 ? r.rate / t.total : 0.0);
    return t;
}

CollectionCurve collection_efficiency(const RateTable& rates,
                                      const CouplingTable& coupling,
                                      const ModeBasis& basis, double z_lo_um,
                                      double z_hi_um, int n_points) {
    if (rates.rows.size() != basis.modes.size() ||
        coupling.f.size() != basis.modes.size())
        throw std::invalid_argument("collection_efficiency: inconsistent tables");
    if (n_points < 2 || !(z_hi_um > z_lo_um))
        throw std::invalid_argument("collection_efficiency: bad z range");

    CollectionCurve c;
    c.z_um.resize(n_points);
    c.eta_plus.resize(n_points);
    c.eta_minus.resize(n_points);
    c.eta_total.resize(n_points);
    const size_t nm = basis.modes.size();
    for (size_t m = 0; m < nm; ++m)
        c.incoherent += 2.0 * coupling.f[m] * rates.gamma[m];

    for (int i = 0; i < n_points; ++i) {
        const double z = z_lo_um + (z_hi_um - z_lo_um) * i / (n_points - 1);
        Complex ap = 0, am = 0;
        for (size_t m = 0; m < nm; ++m) {
            const double amp = std::sqrt(coupling.f[m] * rates.gamma[m]);
            const double ph = basis.modes[m].beta * z;
            ap += amp * std::exp(Complex(0, rates.rows[m].phi_fwd + ph));
            am += amp * std::exp(Complex(0, rates.rows[m].phi_back + ph));
        }
        c.z_um[i] = z;
        c.eta_plus[i] = std::norm(ap);
        c.eta_minus[i] = std::norm(am);
        c.eta_total[i] = c.eta_plus[i] + c.eta_minus[i];
        if (c.eta_total[i] > c.eta_max) {
            c.eta_max = c.eta_total[i];
            c.z_at_max = z;
        }
    }
    return c;
}

} // namespace fcwg
