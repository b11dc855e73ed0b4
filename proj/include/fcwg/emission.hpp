#pragma once

#include <string>
#include <vector>

#include "fcwg/coupling.hpp"
#include "fcwg/modesolver.hpp"

namespace fcwg {

// Two-level dipole embedded in the channel; moment restricted to the xz
// plane. Position in the cross-section frame of the geometry module (nm).
struct DipoleSpec {
    double x_nm = 0.0;
    double y_nm = 0.0;
    double z0_um = 0.0;
    double ax = 1.0, az = 0.0; // orientation in the xz plane, normalized on use
    double norm() const { return std::sqrt(ax * ax + az * az); }
};

struct RadiationModel {
    enum class Kind {
        explicit_rate, // Gamma_rad / Gamma_bulk given directly
        calibrated,    // solved so the guided fraction hits `target` at a
                       // reference geometry, then held fixed over a sweep
    };
    Kind kind = Kind::calibrated;
    double rate = 0.0;          // explicit value
    double target = 0.73;       // guided fraction at the reference point
    double reference_wch_nm = 220.0;
};

struct ModeRate {
    double rate = 0.0;     // Gamma_m / Gamma_bulk, per propagation direction
    double phi_fwd = 0.0;  // emission phase arg((d.e(r0))*), +z
    double phi_back = 0.0; // -z
};

// Golden-rule rate into one supermode, referenced to the bulk rate of the
// host medium (index n_bulk): Gamma_m/Gamma_bulk =
// 3*pi/(2 n_bulk k0^2) |d.e(r0)|^2 / S_m. Field normalization cancels.
ModeRate guided_rate(const Supermode& m, const DipoleSpec& d, double n_bulk,
                     double lambda_um);

struct RateTable {
    std::vector<ModeRate> rows; // aligned with basis.modes
    double rad_rate = 0.0;      // Gamma_rad / Gamma_bulk
    double total = 0.0;         // Gamma / Gamma_bulk = sum 2 Gamma_m + rad
    std::vector<double> gamma;  // beta-factors Gamma_m / Gamma, in [0, 0.5]
    double guided_fraction() const { return total > 0 ? (total - rad_rate) / total : 0.0; }
};

// Gamma_rad that makes the guided fraction equal `target` for this basis
// and dipole; throws when the target is not achievable.
double calibrate_radiation(const ModeBasis& basis, const DipoleSpec& d,
                           double n_bulk, double target);

RateTable rate_table(const ModeBasis& basis, const DipoleSpec& d, double n_bulk,
                     double rad_rate);

struct CollectionCurve {
    std::vector<double> z_um, eta_plus, eta_minus, eta_total;
    double incoherent = 0.0; // 2 sum f_m gamma_m
    double eta_max = 0.0;
    double z_at_max = 0.0;
};

// Fiber-collected PL efficiency along the coupler, coherently summing the
// supermode amplitudes sqrt(f g) e^{i phi} e^{i beta z} per direction and
// collecting both ends at a common |z|.
CollectionCurve collection_efficiency(const RateTable& rates,
                                      const CouplingTable& coupling,
                                      const ModeBasis& basis, double z_lo_um,
                                      double z_hi_um, int n_points = 801);

} // namespace fcwg
