#pragma once

#include <vector>

#include "fcwg/units.hpp"

namespace fcwg {

// Reduced per-supermode description feeding the resonant-transmission
// model: fiber fraction, beta-factor, propagation constant, emission phase.
struct CouplerChannel {
    std::vector<double> f;     // in [0, 1], sum <= 1 (+ discretization slack)
    std::vector<double> gamma; // in [0, 0.5], sum of 2*gamma <= 1
    std::vector<double> beta;  // rad/um
    std::vector<double> phi;   // rad

    size_t size() const { return f.size(); }
    void validate() const;
};

struct TransmissionScan {
    std::vector<double> z_um;
    double z0_um = 0.0;
    double delta = 0.0; // detuning in units of the total linewidth
    std::vector<double> f0, f, dt; // dt = (F - F0)/F0; +inf where F0 ~ 0
    double dt_min = 0.0, dt_max = 0.0;
    double z_at_dt_min = 0.0, z_at_dt_max = 0.0;
};

// Off-resonance transmission F0(z) = |sum_m f_m e^{i beta_m z}|^2.
double off_resonance(const CouplerChannel& ch, double z_um);

// On-resonance (detuning delta in linewidth units):
//   t(z) = sum_m f_m e^{i b_m z}
//        - 2 L(d) [sum_m sqrt(f g) e^{+i phi} e^{i b (z-z0)}]
//               * [sum_m sqrt(f g) e^{-i phi} e^{i b z0}],
// with L(d) = 1/(1 - 2 i d); F = |t|^2. The second factor carries the
// conjugate phase (drive side), which the single-mode reduction and the
// time-domain oracle both force.
double on_resonance(const CouplerChannel& ch, double z_um, double z0_um,
                    double delta);

TransmissionScan contrast_scan(const CouplerChannel& ch, double z_lo_um,
                               double z_hi_um, int n_points, double z0_um,
                               double delta = 0.0);

// Worst-case extinction 1 - max_{z, z0} F/F0 for a channel with prescribed
// fiber fractions (resonant dipole). The scan covers the beat torus densely.
double engineered_extinction(const CouplerChannel& ch, int grid_per_axis = 384);

struct Lineshape {
    std::vector<double> delta;
    std::vector<double> f;
};

Lineshape lineshape(const CouplerChannel& ch, double z_um, double z0_um,
                    const std::vector<double>& deltas);

} // namespace fcwg
