#include "fcwg/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace fcwg {

double CrossSectionSpec::max_index() const {
    return std::max({channel_index, fiber_index, background_index});
}

namespace {

struct Bodies {
    bool with_fiber, with_channel;
    double half_w, half_t;    // channel half extents, um
    double fcx, fcy, r2;      // fiber center and radius^2, um
    double eps_ch, eps_f, eps_bg;

    double material(double x, double y) const {
        if (with_fiber) {
            const double ux = x - fcx, uy = y - fcy;
            if (ux * ux + uy * uy <= r2) return eps_f;
        }
        if (with_channel && std::abs(x) <= half_w && std::abs(y) <= half_t)
            return eps_ch;
        return eps_bg;
    }

    // Signed distance to the union surface (negative inside); used only
    // to estimate the local interface normal on straddling cells.
    double signed_distance(double x, double y) const {
        double d = 1e30;
        if (with_fiber) {
            const double ux = x - fcx, uy = y - fcy;
            d = std::sqrt(ux * ux + uy * uy) - std::sqrt(r2);
        }
        if (with_channel) {
            const double qx = std::abs(x) - half_w, qy = std::abs(y) - half_t;
            const double ox = std::max(qx, 0.0), oy = std::max(qy, 0.0);
            const double outside = std::sqrt(ox * ox + oy * oy);
            const double inside = std::min(std::max(qx, qy), 0.0);
            d = std::min(d, outside + inside);
        }
        return d;
    }
};

// Anisotropic sub-pixel average of eps over the dx x dy cell centered
// at (px, py): area-weighted arithmetic mean for field components
// tangential to the interface, harmonic for the normal one, blended by
// the squared projection of the interface normal onto the component axis.
// axis: 0 = x, 1 = y, 2 = z (z is always tangential in the cross-section).
double sample_eps(const Bodies& b, double px, double py, double dx, double dy,
                  int axis) {
    const double hx = dx / 2, hy = dy / 2;
    const double probe[5][2] = {
        {px - hx, py - hy}, {px + hx, py - hy}, {px - hx, py + hy},
        {px + hx, py + hy}, {px, py}};
    const double first = b.material(probe[0][0], probe[0][1]);
    bool uniform = true;
    for (int p = 1; p < 5; ++p)
        if (b.material(probe[p][0], probe[p][1]) != first) { uniform = false; break; }
    if (uniform) {
        // Probes may all agree while a curved boundary still clips the
        // cell; the distance check catches that cheaply.
        if (std::abs(b.signed_distance(px, py)) > 0.75 * std::hypot(dx, dy))
            return first;
    }

    constexpr int ss = 32;
    double inv_sum = 0.0, sum = 0.0;
    for (int sy = 0; sy < ss; ++sy) {
        const double y = py - hy + (sy + 0.5) * dy / ss;
        for (int sx = 0; sx < ss; ++sx) {
            const double x = px - hx + (sx + 0.5) * dx / ss;
            const double e = b.material(x, y);
            sum += e;
            inv_sum += 1.0 / e;
        }
    }
    const double arith = sum / (ss * ss);
    const double harm = (ss * ss) / inv_sum;
    if (axis == 2) return arith;

    const double h = std::min(dx, dy) / 4;
    const double gx = b.signed_distance(px + h, py) - b.signed_distance(px - h, py);
    const double gy = b.signed_distance(px, py + h) - b.signed_distance(px, py - h);
    const double g2 = gx * gx + gy * gy;
    if (g2 < 1e-24) return arith;
    const double w = (axis == 0 ? gx * gx : gy * gy) / g2;
    return w * harm + (1.0 - w) * arith;
}

void mirror_in_x(PermittivityMap& m) {
    // Geometry is symmetric about x = window center; enforce the mirror
    // cell-exactly by copying the right half onto the left.
    for (int j = 0; j <= m.ny; ++j)
        for (int i = 0; i < m.nx / 2; ++i) m.ex(i, j) = m.ex(m.nx - 1 - i, j);
    for (int j = 0; j < m.ny; ++j)
        for (int i = 0; i < (m.nx + 1) / 2; ++i) m.ey(i, j) = m.ey(m.nx - i, j);
    for (int j = 0; j <= m.ny; ++j)
        for (int i = 0; i < (m.nx + 1) / 2; ++i) m.ez(i, j) = m.ez(m.nx - i, j);
}

} // namespace

void validate(const CrossSectionSpec& spec, const GridSpec& grid) {
    auto fail = [](const std::string& msg) { throw std::invalid_argument(msg); };

    if (!(spec.channel_width_nm > 0)) fail("channel_width must be positive");
    if (!(spec.channel_thickness_nm > 0)) fail("channel_thickness must be positive");
    if (!(spec.fiber_radius_nm > 0)) fail("fiber_radius must be positive");
    if (!(spec.wavelength_um > 0)) fail("wavelength must be positive");
    if (!(spec.gap_nm >= 0)) fail("gap must be non-negative");
    if (!(spec.channel_index >= 1)) fail("channel_index must be >= 1");
    if (!(spec.fiber_index >= 1)) fail("fiber_index must be >= 1");
    if (!(spec.background_index >= 1)) fail("background_index must be >= 1");
    if (!(grid.dx_nm > 0) || !(grid.dy_nm > 0)) fail("grid spacing must be positive");
    if (grid.boundary == BoundaryKind::absorber) {
        if (grid.absorber.cells <= 0) fail("absorber thickness must be positive");
        if (!(grid.absorber.strength > 0)) fail("absorber strength must be positive");
    }

    const double r = nm_to_um(spec.fiber_radius_nm);
    const double half_w = nm_to_um(spec.channel_width_nm) / 2;
    const double half_t = nm_to_um(spec.channel_thickness_nm) / 2;
    const double off = nm_to_um(spec.fiber_offset_nm);
    const double x_lo = std::min(-half_w, off - r), x_hi = std::max(half_w, off + r);
    const double y_lo = -half_t;
    const double y_hi = half_t + nm_to_um(spec.gap_nm) + 2 * r;
    const double margin = 1.0 - 1e-9;
    if (grid.window_x_um < (x_hi - x_lo) + 2 * margin ||
        grid.window_y_um < (y_hi - y_lo) + 2 * margin)
        fail("window must enclose geometry with 1 um background margin");
}

PermittivityMap rasterize(const CrossSectionSpec& spec, const GridSpec& grid,
                          GeometryPart part) {
    Bodies b;
    b.with_fiber = part != GeometryPart::channel_only;
    b.with_channel = part != GeometryPart::fiber_only;
    b.half_w = nm_to_um(spec.channel_width_nm) / 2;
    b.half_t = nm_to_um(spec.channel_thickness_nm) / 2;
    b.fcx = spec.fiber_cx_um();
    b.fcy = spec.fiber_cy_um();
    b.r2 = nm_to_um(spec.fiber_radius_nm) * nm_to_um(spec.fiber_radius_nm);
    b.eps_ch = spec.channel_index * spec.channel_index;
    b.eps_f = spec.fiber_index * spec.fiber_index;
    b.eps_bg = spec.background_index * spec.background_index;

    PermittivityMap m;
    m.dx = nm_to_um(grid.dx_nm);
    m.dy = nm_to_um(grid.dy_nm);
    m.nx = static_cast<int>(std::lround(grid.window_x_um / m.dx));
    m.ny = static_cast<int>(std::lround(grid.window_y_um / m.dy));
    // Window centered on the bounding box of the full geometry (the
    // fiber-only part keeps the full-geometry frame so overlaps co-locate).
    const double r = nm_to_um(spec.fiber_radius_nm);
    const double x_lo = std::min(-b.half_w, b.fcx - r);
    const double x_hi = std::max(b.half_w, b.fcx + r);
    const double y_lo = -b.half_t;
    const double y_hi = b.half_t + nm_to_um(spec.gap_nm) + 2 * r;
    m.x0 = (x_lo + x_hi) / 2 - m.nx * m.dx / 2;
    m.y0 = (y_lo + y_hi) / 2 - m.ny * m.dy / 2;
    m.boundary = grid.boundary;
    m.absorber = grid.absorber;

    m.eps_ex.resize(static_cast<size_t>(m.nx) * (m.ny + 1));
    m.eps_ey.resize(static_cast<size_t>(m.nx + 1) * m.ny);
    m.eps_ez.resize(static_cast<size_t>(m.nx + 1) * (m.ny + 1));

    for (int j = 0; j <= m.ny; ++j)
        for (int i = 0; i < m.nx; ++i)
            m.ex(i, j) = sample_eps(b, m.x_node(i) + m.dx / 2, m.y_node(j), m.dx, m.dy, 0);
    for (int j = 0; j < m.ny; ++j)
        for (int i = 0; i <= m.nx; ++i)
            m.ey(i, j) = sample_eps(b, m.x_node(i), m.y_node(j) + m.dy / 2, m.dx, m.dy, 1);
    for (int j = 0; j <= m.ny; ++j)
        for (int i = 0; i <= m.nx; ++i)
            m.ez(i, j) = sample_eps(b, m.x_node(i), m.y_node(j), m.dx, m.dy, 2);

    if (spec.fiber_offset_nm == 0.0) mirror_in_x(m);
    return m;
}

void dump_epsilon_csv(const PermittivityMap& map, const std::string& path) {
    std::FILE* f = std::fopen(path.c_str(), "wb");
    if (!f) throw std::runtime_error("cannot open " + path);
    std::fprintf(f, "x_nm,y_nm,eps_Ex,eps_Ey,eps_Ez\n");
    for (int j = 0; j < map.ny; ++j)
        for (int i = 0; i < map.nx; ++i)
            std::fprintf(f, "%.10g,%.10g,%.10g,%.10g,%.10g\n",
                         (map.x_node(i) + map.dx / 2) * 1e3,
                         (map.y_node(j) + map.dy / 2) * 1e3, map.ex(i, j),
                         map.ey(i, j), map.ez(i, j));
    std::fclose(f);
}

} // namespace fcwg
