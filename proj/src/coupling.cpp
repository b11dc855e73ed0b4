#include "fcwg/coupling.hpp"

#include <cmath>
#include <stdexcept>

namespace fcwg {

FiberModePair solve_fiber_modes(const CrossSectionSpec& spec, const GridSpec& grid,
                                std::uint64_t seed) {
    const PermittivityMap map = rasterize(spec, grid, GeometryPart::fiber_only);
    ModeSearch search;
    search.n_lo = spec.background_index + 0.02;
    search.n_hi = spec.fiber_index - 5e-4;
    // The fundamental doublet tops the spectrum; a shift just above it
    // converges in one cycle.
    search.shift_n = spec.fiber_index;
    search.count = 4;
    search.seed = seed;
    ModeBasis basis = solve_modes(map, spec.wavelength_um, search);

    const Supermode* px = nullptr;
    const Supermode* py = nullptr;
    for (const auto& m : basis.modes) {
        if (m.label.family == ModeFamily::hEx && m.label.ordinal == 1) px = &m;
        if (m.label.family == ModeFamily::hEy && m.label.ordinal == 1) py = &m;
    }
    if (!px || !py)
        throw std::runtime_error(
            "isolated fiber solve did not produce both fundamental polarizations");
    FiberModePair pair{*px, *py, basis.diag};
    return pair;
}

double fiber_fraction(const Supermode& m, const FiberMode& fiber) {
    if (m.ex.nx != fiber.ex.nx || m.ex.ny != fiber.ex.ny ||
        m.ey.nx != fiber.ey.nx || m.ey.ny != fiber.ey.ny)
        throw std::invalid_argument(
            "fiber_fraction: supermode and fiber mode on mismatched grids");
    if (!(fiber.s_flux > 0) || !(m.s_flux > 0))
        throw std::invalid_argument("fiber_fraction: modes must carry forward flux");

    const Complex a = cross_flux(fiber.ex, fiber.ey, m.hx, m.hy);
    const Complex b = cross_flux(m.ex, m.ey, fiber.hx, fiber.hy);
    const double f = (a * b).real() / (fiber.s_flux * m.s_flux);
    if (f > 1.02)
        throw std::runtime_error("fiber_fraction: overlap " + std::to_string(f) +
                                 " exceeds unity beyond discretization tolerance");
    return std::clamp(f, 0.0, 1.0);
}

CouplingTable coupling_table(const ModeBasis& basis, const FiberModePair& fiber) {
    CouplingTable table;
    table.f.reserve(basis.modes.size());
    for (const auto& m : basis.modes)
        table.f.push_back(fiber_fraction(
            m, m.label.family == ModeFamily::hEx ? fiber.x_pol : fiber.y_pol));
    return table;
}

} // namespace fcwg
