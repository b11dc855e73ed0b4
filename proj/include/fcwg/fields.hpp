#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "fcwg/units.hpp"

namespace fcwg {

// One field component on its staggered sample lattice.
struct FieldPlane {
    int nx = 0, ny = 0;        // sample counts
    double x0 = 0.0, y0 = 0.0; // coordinate of sample (0, 0), um
    double dx = 0.0, dy = 0.0;
    std::vector<Complex> v; // row-major, index j*nx + i

    static FieldPlane zeros(int nx, int ny, double x0, double y0, double dx,
                            double dy) {
        FieldPlane p{nx, ny, x0, y0, dx, dy, {}};
        p.v.assign(static_cast<size_t>(nx) * ny, Complex{});
        return p;
    }

    Complex& at(int i, int j) { return v[static_cast<size_t>(j) * nx + i]; }
    Complex at(int i, int j) const { return v[static_cast<size_t>(j) * nx + i]; }
    double x(int i) const { return x0 + i * dx; }
    double y(int j) const { return y0 + j * dy; }

    // Bilinear interpolation, clamped to the lattice hull.
    Complex sample(double xs, double ys) const {
        double fx = (xs - x0) / dx, fy = (ys - y0) / dy;
        fx = std::clamp(fx, 0.0, nx - 1.0);
        fy = std::clamp(fy, 0.0, ny - 1.0);
        const int i = std::min(static_cast<int>(fx), nx - 2 >= 0 ? nx - 2 : 0);
        const int j = std::min(static_cast<int>(fy), ny - 2 >= 0 ? ny - 2 : 0);
        const double tx = fx - i, ty = fy - j;
        if (nx == 1 || ny == 1) return at(std::min(i, nx - 1), std::min(j, ny - 1));
        return (1 - tx) * (1 - ty) * at(i, j) + tx * (1 - ty) * at(i + 1, j) +
               (1 - tx) * ty * at(i, j + 1) + tx * ty * at(i + 1, j + 1);
    }

    double max_abs() const {
        double m = 0.0;
        for (const auto& c : v) m = std::max(m, std::abs(c));
        return m;
    }

    void scale(Complex s) {
        for (auto& c : v) c *= s;
    }
};

} // namespace fcwg
