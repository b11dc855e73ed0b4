#pragma once

#include <string>
#include <vector>

#include "fcwg/units.hpp"

namespace fcwg {

// Coupler cross-section in the (x, y) plane, propagation along z.
// The channel is centered at the origin (width W along x, thickness t
// along y); the fiber sits above it on the vertical symmetry axis,
// center at (offset, t/2 + gap + r). All user-facing lengths in nm,
// wavelength in um.
struct CrossSectionSpec {
    double channel_width_nm = 220.0;
    double channel_thickness_nm = 256.0;
    double channel_index = 3.406;
    double fiber_radius_nm = 500.0;
    double fiber_index = 1.45;
    double gap_nm = 0.0;
    double background_index = 1.0;
    double wavelength_um = 1.3;
    // Lateral offset of the fiber center; nonzero breaks the mirror symmetry.
    double fiber_offset_nm = 0.0;

    double k0() const { return vacuum_wavenumber(wavelength_um); }
    double max_index() const;
    // Fiber center in um, window frame.
    double fiber_cx_um() const { return nm_to_um(fiber_offset_nm); }
    double fiber_cy_um() const {
        return nm_to_um(channel_thickness_nm) / 2.0 + nm_to_um(gap_nm) +
               nm_to_um(fiber_radius_nm);
    }
};

enum class BoundaryKind {
    pec,      // perfect-conductor walls (tangential E = 0)
    absorber, // graded conductive layer inside the walls
};

struct AbsorberSpec {
    int cells = 40;        // layer thickness in cells
    double strength = 1.0; // peak Im{eps}/Re{eps} at the wall
};

struct GridSpec {
    double dx_nm = 10.0;
    double dy_nm = 10.0;
    double window_x_um = 3.0;
    double window_y_um = 4.0;
    BoundaryKind boundary = BoundaryKind::pec;
    AbsorberSpec absorber;
};

// Relative permittivity sampled at the three staggered E-field points
// of each Yee cell. Node lattice is (nx+1) x (ny+1); x_i = x0 + i*dx.
//   eps_ex: (x_i + dx/2, y_j),  nx     x (ny+1)
//   eps_ey: (x_i, y_j + dy/2), (nx+1)  x  ny
//   eps_ez: (x_i, y_j),        (nx+1)  x (ny+1)
struct PermittivityMap {
    int nx = 0, ny = 0; // cell counts
    double dx = 0.0, dy = 0.0;
    double x0 = 0.0, y0 = 0.0; // lower-left node, um
    std::vector<double> eps_ex, eps_ey, eps_ez;
    BoundaryKind boundary = BoundaryKind::pec;
    AbsorberSpec absorber;

    double& ex(int i, int j) { return eps_ex[static_cast<size_t>(j) * nx + i]; }
    double& ey(int i, int j) { return eps_ey[static_cast<size_t>(j) * (nx + 1) + i]; }
    double& ez(int i, int j) { return eps_ez[static_cast<size_t>(j) * (nx + 1) + i]; }
    double ex(int i, int j) const { return eps_ex[static_cast<size_t>(j) * nx + i]; }
    double ey(int i, int j) const { return eps_ey[static_cast<size_t>(j) * (nx + 1) + i]; }
    double ez(int i, int j) const { return eps_ez[static_cast<size_t>(j) * (nx + 1) + i]; }

    double x_node(int i) const { return x0 + i * dx; }
    double y_node(int j) const { return y0 + j * dy; }
};

// Which dielectric bodies to rasterize; fiber_only is used to compute
// the isolated-fiber reference mode on the identical grid.
enum class GeometryPart { full, fiber_only, channel_only };

// Throws std::invalid_argument naming the first violated invariant.
void validate(const CrossSectionSpec& spec, const GridSpec& grid);

PermittivityMap rasterize(const CrossSectionSpec& spec, const GridSpec& grid,
                          GeometryPart part = GeometryPart::full);

// (x_nm, y_nm, eps_Ex, eps_Ey, eps_Ez) per cell; coordinates are cell
// centers, samples at the cell's staggered points.
void dump_epsilon_csv(const PermittivityMap& map, const std::string& path);

} // namespace fcwg
