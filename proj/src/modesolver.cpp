#include "fcwg/modesolver.hpp"

#include <algorithm>
#include <cassert>
#include <chrono>
#include <cmath>
#include <numeric>
#include <sstream>

namespace fcwg {

std::string to_string(const ModeLabel& label) {
    static const char* roman[] = {"I",  "II",  "III", "IV", "V",
                                  "VI", "VII", "VIII", "IX", "X"};
    std::string s = label.family == ModeFamily::hEx ? "hEx_" : "hEy_";
    if (label.ordinal >= 1 && label.ordinal <= 10)
        s += roman[label.ordinal - 1];
    else
        s += std::to_string(label.ordinal);
    return s;
}

namespace {

// DOF layout: interior Ex (i in [0,nx), j in [1,ny)) then interior Ey
// (i in [1,nx), j in [0,ny)). Tangential components on the PEC walls are
// excluded; normal components never sample the walls.
struct DofLayout {
    int nx, ny, n_ex, n_ey, n;

    explicit DofLayout(const PermittivityMap& m)
        : nx(m.nx), ny(m.ny), n_ex(nx * (ny - 1)), n_ey((nx - 1) * ny),
          n(n_ex + n_ey) {}

    int ex_id(int i, int j) const { return (j - 1) * nx + i; }
    int ey_id(int i, int j) const { return n_ex + j * (nx - 1) + (i - 1); }
};

// Graded absorber profile: Im{eps}/Re{eps} ramp within `cells` of a wall.
double absorber_ramp(const PermittivityMap& m, double ci, double cj) {
    const double layer = m.absorber.cells;
    const double d =
        std::min(std::min(ci, m.nx - ci), std::min(cj, m.ny - cj));
    if (d >= layer) return 0.0;
    const double t = (layer - d) / layer;
    return m.absorber.strength * t * t;
}

template <typename T>
SparseMatrix<T> assemble_impl(const PermittivityMap& m, double lambda_um,
                              bool lossy) {
    const DofLayout lay(m);
    const double k0 = vacuum_wavenumber(lambda_um);
    const double k02 = k0 * k0;
    const double dx = m.dx, dy = m.dy;
    const double idx2 = 1.0 / (dx * dx), idy2 = 1.0 / (dy * dy);
    const double idxy = 1.0 / (dx * dy);

    auto eps_ex = [&](int i, int j) -> T {
        const double e = m.ex(i, j);
        if constexpr (std::is_same_v<T, Complex>)
            return lossy ? Complex(e, e * absorber_ramp(m, i + 0.5, j)) : Complex(e);
        else
            return e;
    };
    auto eps_ey = [&](int i, int j) -> T {
        const double e = m.ey(i, j);
        if constexpr (std::is_same_v<T, Complex>)
            return lossy ? Complex(e, e * absorber_ramp(m, i, j + 0.5)) : Complex(e);
        else
            return e;
    };
    auto eps_ez = [&](int i, int j) -> T {
        const double e = m.ez(i, j);
        if constexpr (std::is_same_v<T, Complex>)
            return lossy ? Complex(e, e * absorber_ramp(m, i, j)) : Complex(e);
        else
            return e;
    };

    std::vector<Triplet<T>> trip;
    trip.reserve(static_cast<size_t>(lay.n) * 13);
    auto add = [&](int r, int c, T v) { trip.push_back({r, c, v}); };

    // Ex rows: beta^2 Ex = k0^2 eps Ex + dyy Ex - dy dx Ey + dx[D]
    for (int j = 1; j < m.ny; ++j)
        for (int i = 0; i < m.nx; ++i) {
            const int r = lay.ex_id(i, j);
            add(r, r, k02 * eps_ex(i, j) - T(2.0 * idy2));
            if (j + 1 < m.ny) add(r, lay.ex_id(i, j + 1), T(idy2));
            if (j - 1 >= 1) add(r, lay.ex_id(i, j - 1), T(idy2));
            auto add_ey = [&](int a, int b, double c) {
                if (a >= 1 && a <= m.nx - 1) add(r, lay.ey_id(a, b), T(c));
            };
            add_ey(i + 1, j, -idxy);
            add_ey(i, j, idxy);
            add_ey(i + 1, j - 1, idxy);
            add_ey(i, j - 1, -idxy);
            // D = (1/eps_z) div(eps e_t) vanishes on the walls (Ez = 0 there)
            const double sgn[2] = {1.0 / dx, -1.0 / dx};
            const int node[2] = {i + 1, i};
            for (int q = 0; q < 2; ++q) {
                const int a = node[q];
                if (a < 1 || a > m.nx - 1) continue;
                const T cz = T(sgn[q]) / eps_ez(a, j);
                add(r, lay.ex_id(a, j), cz * eps_ex(a, j) / T(dx));
                add(r, lay.ex_id(a - 1, j), -cz * eps_ex(a - 1, j) / T(dx));
                add(r, lay.ey_id(a, j), cz * eps_ey(a, j) / T(dy));
                add(r, lay.ey_id(a, j - 1), -cz * eps_ey(a, j - 1) / T(dy));
            }
        }

    // Ey rows: beta^2 Ey = k0^2 eps Ey + dxx Ey - dx dy Ex + dy[D]
    for (int j = 0; j < m.ny; ++j)
        for (int i = 1; i < m.nx; ++i) {
            const int r = lay.ey_id(i, j);
            add(r, r, k02 * eps_ey(i, j) - T(2.0 * idx2));
            if (i + 1 < m.nx) add(r, lay.ey_id(i + 1, j), T(idx2));
            if (i - 1 >= 1) add(r, lay.ey_id(i - 1, j), T(idx2));
            auto add_ex = [&](int a, int b, double c) {
                if (b >= 1 && b <= m.ny - 1) add(r, lay.ex_id(a, b), T(c));
            };
            add_ex(i, j + 1, -idxy);
            add_ex(i - 1, j + 1, idxy);
            add_ex(i, j, idxy);
            add_ex(i - 1, j, -idxy);
            const double sgn[2] = {1.0 / dy, -1.0 / dy};
            const int node[2] = {j + 1, j};
            for (int q = 0; q < 2; ++q) {
                const int b = node[q];
                if (b < 1 || b > m.ny - 1) continue;
                const T cz = T(sgn[q]) / eps_ez(i, b);
                add(r, lay.ex_id(i, b), cz * eps_ex(i, b) / T(dx));
                add(r, lay.ex_id(i - 1, b), -cz * eps_ex(i - 1, b) / T(dx));
                add(r, lay.ey_id(i, b), cz * eps_ey(i, b) / T(dy));
                add(r, lay.ey_id(i, b - 1), -cz * eps_ey(i, b - 1) / T(dy));
            }
        }

    return SparseMatrix<T>::from_triplets(lay.n, lay.n, std::move(trip));
}

// Rebuild the six field planes from an eigenvector of the transverse
// operator. Pure reconstruction: ez from the divergence relation, h from
// the curl of e.
Supermode reconstruct(const PermittivityMap& m, double lambda_um,
                      Complex beta2, std::span<const Complex> vec) {
    const DofLayout lay(m);
    const double k0 = vacuum_wavenumber(lambda_um);
    Complex beta_c = std::sqrt(beta2);
    if (beta_c.real() < 0.0) beta_c = -beta_c;

    Supermode sm;
    sm.n_eff = beta_c / k0;
    sm.beta = beta_c.real();

    sm.ex = FieldPlane::zeros(m.nx, m.ny + 1, m.x0 + m.dx / 2, m.y0, m.dx, m.dy);
    sm.ey = FieldPlane::zeros(m.nx + 1, m.ny, m.x0, m.y0 + m.dy / 2, m.dx, m.dy);
    sm.ez = FieldPlane::zeros(m.nx + 1, m.ny + 1, m.x0, m.y0, m.dx, m.dy);
    sm.hx = FieldPlane::zeros(m.nx + 1, m.ny, m.x0, m.y0 + m.dy / 2, m.dx, m.dy);
    sm.hy = FieldPlane::zeros(m.nx, m.ny + 1, m.x0 + m.dx / 2, m.y0, m.dx, m.dy);
    sm.hz = FieldPlane::zeros(m.nx, m.ny, m.x0 + m.dx / 2, m.y0 + m.dy / 2, m.dx,
                              m.dy);

    for (int j = 1; j < m.ny; ++j)
        for (int i = 0; i < m.nx; ++i) sm.ex.at(i, j) = vec[lay.ex_id(i, j)];
    for (int j = 0; j < m.ny; ++j)
        for (int i = 1; i < m.nx; ++i) sm.ey.at(i, j) = vec[lay.ey_id(i, j)];

    // ez = (i / (beta eps_z)) div(eps e_t); zero on the walls.
    for (int j = 1; j < m.ny; ++j)
        for (int i = 1; i < m.nx; ++i) {
            const Complex div =
                (m.ex(i, j) * sm.ex.at(i, j) - m.ex(i - 1, j) * sm.ex.at(i - 1, j)) /
                    m.dx +
                (m.ey(i, j) * sm.ey.at(i, j) - m.ey(i, j - 1) * sm.ey.at(i, j - 1)) /
                    m.dy;
            sm.ez.at(i, j) = Complex(0, 1) / (beta_c * m.ez(i, j)) * div;
        }

    const Complex inv_ik0 = 1.0 / Complex(0, k0);
    for (int j = 0; j < m.ny; ++j)
        for (int i = 0; i <= m.nx; ++i)
            sm.hx.at(i, j) = inv_ik0 * ((sm.ez.at(i, j + 1) - sm.ez.at(i, j)) / m.dy -
                                        Complex(0, 1) * beta_c * sm.ey.at(i, j));
    for (int j = 0; j <= m.ny; ++j)
        for (int i = 0; i < m.nx; ++i)
            sm.hy.at(i, j) = inv_ik0 * (Complex(0, 1) * beta_c * sm.ex.at(i, j) -
                                        (sm.ez.at(i + 1, j) - sm.ez.at(i, j)) / m.dx);
    for (int j = 0; j < m.ny; ++j)
        for (int i = 0; i < m.nx; ++i)
            sm.hz.at(i, j) = inv_ik0 * ((sm.ey.at(i + 1, j) - sm.ey.at(i, j)) / m.dx -
                                        (sm.ex.at(i, j + 1) - sm.ex.at(i, j)) / m.dy);

    // Phase convention: dominant transverse component real-positive at its
    // magnitude peak, then rescale to unit peak amplitude.
    const double cell = m.dx * m.dy;
    double px = 0, py = 0;
    for (const auto& c : sm.ex.v) px += std::norm(c);
    for (const auto& c : sm.ey.v) py += std::norm(c);
    sm.pol_power_x = px * cell;
    sm.pol_power_y = py * cell;
    const FieldPlane& dom = px >= py ? sm.ex : sm.ey;
    size_t peak = 0;
    double best = -1.0;
    for (size_t i = 0; i < dom.v.size(); ++i) {
        const double a = std::abs(dom.v[i]);
        if (a > best * (1.0 + 1e-12)) {
            best = a;
            peak = i;
        }
    }
    Complex rot = best > 0 ? std::conj(dom.v[peak]) / best : Complex(1.0);
    const double amp = std::max(sm.ex.max_abs(), sm.ey.max_abs());
    rot /= amp > 0 ? amp : 1.0;
    for (FieldPlane* p : {&sm.ex, &sm.ey, &sm.ez, &sm.hx, &sm.hy, &sm.hz})
        p->scale(rot);
    sm.pol_power_x *= std::norm(rot);
    sm.pol_power_y *= std::norm(rot);

    sm.s_flux = power_flux(sm);
    sm.guided = std::abs(sm.n_eff.imag()) < 1e-9;
    return sm;
}

} // namespace

SparseMatrixd assemble(const PermittivityMap& map, double lambda_um) {
    return assemble_impl<double>(map, lambda_um, false);
}

SparseMatrixc assemble_lossy(const PermittivityMap& map, double lambda_um) {
    return assemble_impl<Complex>(map, lambda_um, true);
}

ModeLabel classify(const Supermode& mode) {
    ModeLabel label;
    const double px = mode.pol_power_x, py = mode.pol_power_y;
    label.family = px > py ? ModeFamily::hEx : ModeFamily::hEy;
    label.ambiguous_polarization =
        std::abs(px - py) <= 0.05 * std::max(px, py);
    label.ordinal = 1;
    return label;
}

ModeBasis solve_modes(const PermittivityMap& map, double lambda_um,
                      const ModeSearch& search) {
    if (!(search.n_lo < search.n_hi))
        throw std::invalid_argument("mode search window must satisfy n_lo < n_hi");
    const auto t_start = std::chrono::steady_clock::now();
    const double k0 = vacuum_wavenumber(lambda_um);
    const double lam_lo = k0 * k0 * search.n_lo * search.n_lo;
    const double lam_hi = k0 * k0 * search.n_hi * search.n_hi;
    // Mid-window shift separates the guided cluster from the boxed
    // continuum much better than a top-edge shift.
    const double sigma = search.shift_n
                             ? k0 * k0 * *search.shift_n * *search.shift_n
                             : 0.5 * (lam_lo + lam_hi);

    EigenConfig cfg;
    cfg.shift = sigma;
    cfg.count = search.count;
    cfg.tol = search.tol;
    cfg.max_restarts = search.max_restarts;
    cfg.subspace = search.subspace > 0
                       ? search.subspace
                       : std::max(2 * search.count + 2, 36);
    cfg.seed = search.seed;

    KrylovStopPolicy policy;
    policy.wanted = [lam_lo, lam_hi](Complex lambda) {
        return lambda.real() >= lam_lo && lambda.real() <= lam_hi;
    };
    policy.max_wanted = search.count;

    ModeBasis basis;
    basis.lambda_um = lambda_um;

    EigsDiagnostics diag;
    std::vector<EigenPair> pairs;
    const bool lossy = map.boundary == BoundaryKind::absorber;
    if (lossy) {
        const SparseMatrixc a = assemble_lossy(map, lambda_um);
        ShiftInvertOperator op(a, sigma);
        basis.diag.factor_fill = op.fill();
        KrylovSchurSolver solver(
            a.rows(),
            [&](const Complex* x, Complex* y) {
                std::copy(x, x + a.rows(), y);
                op.solve(std::span<Complex>(y, a.rows()));
            },
            [&](const Complex* x, Complex* y) {
                a.multiply<Complex>(std::span<const Complex>(x, a.cols()),
                                    std::span<Complex>(y, a.rows()));
            },
            a.infinity_norm(), cfg, policy);
        pairs = solver.run(&diag);
    } else {
        const SparseMatrixd a = assemble(map, lambda_um);
        ShiftInvertOperator op(a, sigma);
        basis.diag.factor_fill = op.fill();
        KrylovSchurSolver solver(
            a.rows(),
            [&](const Complex* x, Complex* y) {
                std::copy(x, x + a.rows(), y);
                op.solve(std::span<Complex>(y, a.rows()));
            },
            [&](const Complex* x, Complex* y) {
                eigs_detail::real_or_complex_matvec(a, x, y);
            },
            a.infinity_norm(), cfg, policy);
        pairs = solver.run(&diag);
    }

    basis.diag.restarts = diag.restarts;
    basis.diag.op_applies = diag.op_applies;
    basis.diag.complete = diag.converged;
    basis.diag.residuals = diag.residuals;
    if (!diag.converged)
        basis.warnings.push_back("mode search incomplete: unconverged Ritz values "
                                 "remain inside the window");

    for (const auto& pair : pairs) {
        const Complex n_eff = std::sqrt(pair.value) / k0;
        if (n_eff.real() < search.n_lo || n_eff.real() > search.n_hi) continue;
        Supermode sm = reconstruct(map, lambda_um, pair.value, pair.vector);
        sm.solver_residual = pair.residual;
        sm.label = classify(sm);
        basis.modes.push_back(std::move(sm));
    }

    // Sort hEx before hEy, descending Re{n_eff} inside a family; ordinals
    // within each family follow that order.
    std::sort(basis.modes.begin(), basis.modes.end(),
              [](const Supermode& a, const Supermode& b) {
                  if (a.label.family != b.label.family)
                      return a.label.family == ModeFamily::hEx;
                  return a.n_eff.real() > b.n_eff.real();
              });
    int ord_x = 0, ord_y = 0;
    for (auto& sm : basis.modes)
        sm.label.ordinal =
            sm.label.family == ModeFamily::hEx ? ++ord_x : ++ord_y;

    basis.diag.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start)
            .count();
    return basis;
}

namespace {

double overlap_magnitude(const Supermode& a, const Supermode& b) {
    Complex dot = 0;
    double na = 0, nb = 0;
    for (size_t i = 0; i < a.ex.v.size(); ++i) {
        dot += std::conj(a.ex.v[i]) * b.ex.v[i];
        na += std::norm(a.ex.v[i]);
        nb += std::norm(b.ex.v[i]);
    }
    for (size_t i = 0; i < a.ey.v.size(); ++i) {
        dot += std::conj(a.ey.v[i]) * b.ey.v[i];
        na += std::norm(a.ey.v[i]);
        nb += std::norm(b.ey.v[i]);
    }
    const double den = std::sqrt(na * nb);
    return den > 0 ? std::abs(dot) / den : 0.0;
}

// Exhaustive assignment (bases are tiny): best[i] = index in `next` for
// prev mode i, or -1.
void best_assignment(const std::vector<std::vector<double>>& w, size_t i,
                     std::vector<int>& current, std::vector<bool>& used,
                     double score, std::vector<int>& best, double& best_score) {
    if (i == w.size()) {
        if (score > best_score) {
            best_score = score;
            best = current;
        }
        return;
    }
    for (size_t j = 0; j < w[i].size(); ++j) {
        if (used[j]) continue;
        used[j] = true;
        current[i] = static_cast<int>(j);
        best_assignment(w, i + 1, current, used, score + w[i][j], best, best_score);
        used[j] = false;
    }
    current[i] = -1;
    best_assignment(w, i + 1, current, used, score, best, best_score);
}

} // namespace

ModeBasis track(const ModeBasis& prev, ModeBasis next) {
    const size_t np = prev.modes.size(), nn = next.modes.size();
    if (np == 0 || nn == 0) return next;
    if (prev.modes.front().ex.v.size() != next.modes.front().ex.v.size())
        throw std::invalid_argument("track requires identical grids");

    std::vector<std::vector<double>> w(np, std::vector<double>(nn, 0.0));
    for (size_t i = 0; i < np; ++i)
        for (size_t j = 0; j < nn; ++j)
            w[i][j] = overlap_magnitude(prev.modes[i], next.modes[j]);

    std::vector<int> current(np, -1), best(np, -1);
    std::vector<bool> used(nn, false);
    double best_score = -1.0;
    best_assignment(w, 0, current, used, 0.0, best, best_score);

    std::vector<bool> labeled(nn, false);
    for (size_t i = 0; i < np; ++i) {
        const int j = best[i];
        if (j < 0) continue;
        next.modes[j].label.family = prev.modes[i].label.family;
        next.modes[j].label.ordinal = prev.modes[i].label.ordinal;
        labeled[j] = true;
        if (w[i][j] < 0.5) {
            std::ostringstream msg;
            msg << "tracking overlap for " << to_string(prev.modes[i].label)
                << " is " << w[i][j] << " (< 0.5): possible mode exchange";
            next.warnings.push_back(msg.str());
        }
    }
    // Fresh labels for unmatched modes: next free ordinal in their family.
    int max_x = 0, max_y = 0;
    for (size_t j = 0; j < nn; ++j)
        if (labeled[j]) {
            auto& l = next.modes[j].label;
            (l.family == ModeFamily::hEx ? max_x : max_y) =
                std::max(l.family == ModeFamily::hEx ? max_x : max_y, l.ordinal);
        }
    for (size_t j = 0; j < nn; ++j)
        if (!labeled[j]) {
            auto& l = next.modes[j].label;
            l.ordinal = l.family == ModeFamily::hEx ? ++max_x : ++max_y;
        }
    return next;
}

double power_flux(const FieldPlane& ex, const FieldPlane& ey,
                  const FieldPlane& hx, const FieldPlane& hy) {
    return cross_flux(ex, ey, hx, hy).real();
}

double power_flux(const Supermode& m) {
    return power_flux(m.ex, m.ey, m.hx, m.hy);
}

Complex cross_flux(const FieldPlane& ex_a, const FieldPlane& ey_a,
                   const FieldPlane& hx_b, const FieldPlane& hy_b) {
    if (ex_a.nx != hy_b.nx || ex_a.ny != hy_b.ny || ey_a.nx != hx_b.nx ||
        ey_a.ny != hx_b.ny)
        throw std::invalid_argument("cross_flux: field planes on mismatched grids");
    const int nx = ex_a.nx;        // cells in x
    const int ny = ey_a.ny;        // cells in y
    if (ex_a.ny != ny + 1 || ey_a.nx != nx + 1)
        throw std::invalid_argument("cross_flux: inconsistent staggered planes");
    Complex acc = 0.0;
    for (int j = 0; j < ny; ++j)
        for (int i = 0; i < nx; ++i) {
            const Complex exc = 0.5 * (ex_a.at(i, j) + ex_a.at(i, j + 1));
            const Complex hyc = 0.5 * (hy_b.at(i, j) + hy_b.at(i, j + 1));
            const Complex eyc = 0.5 * (ey_a.at(i, j) + ey_a.at(i + 1, j));
            const Complex hxc = 0.5 * (hx_b.at(i, j) + hx_b.at(i + 1, j));
            acc += exc * std::conj(hyc) - eyc * std::conj(hxc);
        }
    return acc * (ex_a.dx * ex_a.dy);
}

} // namespace fcwg
