#pragma once

#include <vector>

#include "fcwg/geometry.hpp"
#include "fcwg/modesolver.hpp"

namespace fcwg {

// The isolated-taper fundamental mode, computed on the same grid as the
// coupler supermodes so discretization errors stay common-mode.
using FiberMode = Supermode;

struct FiberModePair {
    FiberMode x_pol; // drives / collects hEx supermodes
    FiberMode y_pol; // drives / collects hEy supermodes
    SolveDiagnostics diag;
};

FiberModePair solve_fiber_modes(const CrossSectionSpec& spec, const GridSpec& grid,
                                std::uint64_t seed = 0x5eedULL);

// Bidirectional power overlap with the isolated fiber mode:
//   f = Re{ int(e_f x h_m*) . int(e_m x h_f*) } / (S_f S_m), clamped to [0,1].
// Throws on mismatched grids or overlap beyond unity past the
// discretization tolerance.
double fiber_fraction(const Supermode& m, const FiberMode& fiber);

struct CouplingTable {
    std::vector<double> f; // aligned with basis.modes
    double sum() const {
        double s = 0;
        for (double v : f) s += v;
        return s;
    }
};

// f_m for every supermode against the fiber mode of its own family.
CouplingTable coupling_table(const ModeBasis& basis, const FiberModePair& fiber);

} // namespace fcwg
