#pragma once

#include <optional>
#include <string>
#include <vector>

#include "fcwg/arnoldi.hpp"
#include "fcwg/fields.hpp"
#include "fcwg/geometry.hpp"
#include "fcwg/sparse.hpp"

namespace fcwg {

enum class ModeFamily { hEx, hEy };

struct ModeLabel {
    ModeFamily family = ModeFamily::hEx;
    int ordinal = 1; // 1-based, printed as roman numerals
    bool ambiguous_polarization = false;
};

std::string to_string(const ModeLabel& label);

// One guided (or boxed leaky) eigenmode of the composite cross-section.
// Fields live on the staggered lattices of the source PermittivityMap;
// normalization is arbitrary, phase-fixed so the dominant transverse
// component is real-positive at its magnitude peak.
struct Supermode {
    ModeLabel label;
    Complex n_eff;
    double beta = 0.0; // k0 * Re(n_eff), rad/um
    FieldPlane ex, ey, ez, hx, hy, hz;
    double s_flux = 0.0; // Re int (e x h*).z dS
    bool guided = false;
    double pol_power_x = 0.0, pol_power_y = 0.0; // |ex|^2, |ey|^2 integrals
    double solver_residual = 0.0;
};

struct SolveDiagnostics {
    int restarts = 0;
    int op_applies = 0;
    double wall_seconds = 0.0;
    int64_t factor_fill = 0;
    bool complete = true; // all in-window Ritz values converged
    std::vector<double> residuals;
};

struct ModeBasis {
    double lambda_um = 0.0;
    std::vector<Supermode> modes;
    SolveDiagnostics diag;
    std::vector<std::string> warnings;
};

struct ModeSearch {
    double n_lo = 1.05;
    double n_hi = 2.40;
    int count = 8;       // harvest budget
    double tol = 1e-10;
    int max_restarts = 60;
    int subspace = 0;          // 0: auto
    std::uint64_t seed = 0x5eedULL;
    std::optional<double> shift_n; // override sigma = (k0*shift_n)^2
};

// Transverse-E operator: eigenpairs are (beta^2, [ex; ey]) with ez and h
// reconstructed afterwards. PEC walls; real-valued for real eps.
SparseMatrixd assemble(const PermittivityMap& map, double lambda_um);

// Same operator with the graded absorbing layer applied (complex eps).
SparseMatrixc assemble_lossy(const PermittivityMap& map, double lambda_um);

// All modes with Re{n_eff} inside [n_lo, n_hi], classified and sorted by
// family then Re{n_eff} descending.
ModeBasis solve_modes(const PermittivityMap& map, double lambda_um,
                      const ModeSearch& search);

// Family from polarization power; flags near-ties instead of guessing.
ModeLabel classify(const Supermode& mode);

// Relabels `next` for field continuity with `prev` (assignment on the
// |<e_prev, e_next>| overlap matrix, exact for small bases). Appends a
// warning per pairing whose best overlap is below 0.5.
ModeBasis track(const ModeBasis& prev, ModeBasis next);

// Longitudinal power flux through the cross-section from co-located
// transverse fields: Re int (e x h*).z dS.
double power_flux(const FieldPlane& ex, const FieldPlane& ey,
                  const FieldPlane& hx, const FieldPlane& hy);
double power_flux(const Supermode& m);

// One factor of the bidirectional overlap: int (e_a x h_b*).z dS.
Complex cross_flux(const FieldPlane& ex_a, const FieldPlane& ey_a,
                   const FieldPlane& hx_b, const FieldPlane& hy_b);

} // namespace fcwg
