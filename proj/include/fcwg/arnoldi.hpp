#pragma once

#include <Eigen/Core>
#include <Eigen/Eigenvalues>

#include <cstdint>
#include <functional>
#include <memory>
#include <random>
#include <span>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "fcwg/sparse.hpp"
#include "fcwg/sparse_lu.hpp"

namespace fcwg {

struct EigenConfig {
    Complex shift{};
    int count = 4;       // eigenpairs nearest the shift
    double tol = 1e-10;  // ||A v - lambda v|| <= tol * ||A||_inf * ||v||
    int max_restarts = 80;
    int subspace = 0; // Krylov dimension; 0 picks max(2*count + 2, 32)
    std::uint64_t seed = 0x5eedULL;
};

struct EigenPair {
    Complex value;
    std::vector<Complex> vector; // unit norm, largest entry real-positive
    double residual;             // ||A v - lambda v||_2
};

struct EigsDiagnostics {
    bool converged = false;
    int restarts = 0;
    int op_applies = 0;
    std::vector<double> residuals;
};

struct NonConvergenceError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Shifted linear-solve handles

// Handle that solves (A - sigma*I) x = b; the factorization owns all state.
template <typename T>
class ShiftedFactorization {
  public:
    ShiftedFactorization(const SparseMatrix<T>& a, T sigma,
                         typename SparseLU<T>::Options opt = {})
        : lu_(a.shifted(sigma), opt) {}

    int dim() const { return lu_.dim(); }
    int64_t fill() const { return lu_.fill(); }
    void solve(std::span<T> b) const { lu_.solve(b); }

  private:
    SparseLU<T> lu_;
};

template <typename T>
ShiftedFactorization<T> factorize(const SparseMatrix<T>& a, T sigma) {
    return ShiftedFactorization<T>(a, sigma);
}

// Complex-vector solve front-end over a real or complex factorization.
// A real operator with a real shift keeps a real factorization and solves
// real/imaginary parts separately.
class ShiftInvertOperator {
  public:
    ShiftInvertOperator(const SparseMatrixd& a, Complex sigma) {
        if (sigma.imag() == 0.0) {
            real_ = std::make_unique<ShiftedFactorization<double>>(a, sigma.real());
        } else {
            cplx_ = std::make_unique<ShiftedFactorization<Complex>>(a.cast<Complex>(),
                                                                    sigma);
        }
    }
    ShiftInvertOperator(const SparseMatrixc& a, Complex sigma)
        : cplx_(std::make_unique<ShiftedFactorization<Complex>>(a, sigma)) {}

    void solve(std::span<Complex> b) const {
        if (cplx_) {
            cplx_->solve(b);
            return;
        }
        const size_t n = b.size();
        re_.resize(n);
        im_.resize(n);
        for (size_t i = 0; i < n; ++i) {
            re_[i] = b[i].real();
            im_[i] = b[i].imag();
        }
        real_->solve(re_);
        real_->solve(im_);
        for (size_t i = 0; i < n; ++i) b[i] = Complex(re_[i], im_[i]);
    }

    int64_t fill() const { return cplx_ ? cplx_->fill() : real_->fill(); }

  private:
    std::unique_ptr<ShiftedFactorization<double>> real_;
    std::unique_ptr<ShiftedFactorization<Complex>> cplx_;
    mutable std::vector<double> re_, im_;
};

// ---------------------------------------------------------------------------
// Krylov-Schur iteration

namespace krylov_detail {

using Eigen::MatrixXcd;
using Eigen::VectorXcd;

// Swap adjacent diagonal entries of an upper-triangular T with one Givens
// rotation, accumulating into Q (the complex analogue of LAPACK *trexc).
inline void swap_adjacent(MatrixXcd& t, MatrixXcd& q, int i) {
    const Complex a = t(i, i), b = t(i, i + 1), c = t(i + 1, i + 1);
    // G's first column is the (normalized) eigenvector (b, c-a) of the
    // 2x2 block for eigenvalue c, so G^H T G leads with c.
    const double r = std::hypot(std::abs(b), std::abs(c - a));
    if (std::abs(c - a) == 0.0 || r == 0.0) return; // equal eigenvalues
    const Complex csn = b / r;
    const Complex snn = (c - a) / r;
    for (int col = 0; col < t.cols(); ++col) {
        const Complex x = t(i, col), y = t(i + 1, col);
        t(i, col) = std::conj(csn) * x + std::conj(snn) * y;
        t(i + 1, col) = -snn * x + csn * y;
    }
    for (int row = 0; row < t.rows(); ++row) {
        const Complex x = t(row, i), y = t(row, i + 1);
        t(row, i) = csn * x + snn * y;
        t(row, i + 1) = -std::conj(snn) * x + std::conj(csn) * y;
    }
    for (int row = 0; row < q.rows(); ++row) {
        const Complex x = q(row, i), y = q(row, i + 1);
        q(row, i) = csn * x + snn * y;
        q(row, i + 1) = -std::conj(snn) * x + std::conj(csn) * y;
    }
    t(i + 1, i) = 0.0;
    t(i, i) = c;
    t(i + 1, i + 1) = a;
}

// Stable insertion sort of the Schur diagonal under `less` (ascending),
// realized by adjacent swaps.
template <typename Less>
void reorder_schur(MatrixXcd& t, MatrixXcd& q, Less less) {
    const int m = static_cast<int>(t.rows());
    for (int pass = 0; pass < m; ++pass) {
        bool moved = false;
        for (int i = 0; i + 1 < m; ++i)
            if (less(t(i + 1, i + 1), t(i, i))) {
                swap_adjacent(t, q, i);
                moved = true;
            }
        if (!moved) break;
    }
}

// Eigenvector of upper-triangular T for the eigenvalue at diagonal index i.
inline VectorXcd triangular_eigenvector(const MatrixXcd& t, int i) {
    const int m = static_cast<int>(t.rows());
    VectorXcd y = VectorXcd::Zero(m);
    y(i) = 1.0;
    const double scale = t.cwiseAbs().maxCoeff() + 1e-300;
    for (int r = i - 1; r >= 0; --r) {
        Complex acc = 0.0;
        for (int c = r + 1; c <= i; ++c) acc += t(r, c) * y(c);
        Complex d = t(r, r) - t(i, i);
        if (std::abs(d) < 1e-14 * scale)
            d = Complex(1e-14 * scale, 0.0); // defective cluster guard
        y(r) = -acc / d;
    }
    y.normalize();
    return y;
}

} // namespace krylov_detail

struct KrylovStopPolicy {
    // When set, convergence is judged on Ritz values satisfying `wanted`
    // (plus set-stability), otherwise on the leading `count` pairs.
    std::function<bool(Complex)> wanted;
    int stable_patience = 4;
    int max_wanted = 0; // cap on wanted targets, nearest-shift first (0 = all)
};

// Shift-invert Krylov-Schur: finds eigenpairs of A nearest `shift` using
// a user-provided solver for (A - shift I) x = b and a matvec with A.
class KrylovSchurSolver {
  public:
    using ApplyFn = std::function<void(const Complex*, Complex*)>;

    KrylovSchurSolver(int n, ApplyFn shift_solve, ApplyFn apply_a, double a_norm,
                      EigenConfig cfg, KrylovStopPolicy policy = {})
        : n_(n), shift_solve_(std::move(shift_solve)), apply_a_(std::move(apply_a)),
          a_norm_(a_norm), cfg_(cfg), policy_(std::move(policy)) {
        m_ = cfg_.subspace > 0 ? cfg_.subspace : std::max(2 * cfg_.count + 2, 32);
        m_ = std::min(m_, n_);
        m_ = std::max(m_, std::min(n_, cfg_.count + 2));
    }

    std::vector<EigenPair> run(EigsDiagnostics* diag_out = nullptr);

  private:
    struct Candidate {
        Complex lambda;
        Complex mu;
        double est;
        int schur_index;
    };

    int n_;
    ApplyFn shift_solve_, apply_a_;
    double a_norm_;
    EigenConfig cfg_;
    KrylovStopPolicy policy_;
    int m_ = 0;

    std::vector<Complex> basis_;   // (m_+1) column vectors of length n_
    Eigen::MatrixXcd h_;           // (m_+1) x m_

    Complex* col(int j) { return basis_.data() + static_cast<size_t>(j) * n_; }

    void random_fill(Complex* v, std::mt19937_64& rng) {
        std::normal_distribution<double> dist;
        for (int i = 0; i < n_; ++i) v[i] = Complex(dist(rng), dist(rng));
    }

    // Orthogonalize w against columns [0, j]; returns coefficients and ||w||.
    double orthogonalize(int j, Complex* w, Eigen::VectorXcd& coeffs) {
        using Eigen::Map;
        Map<const Eigen::MatrixXcd> v(basis_.data(), n_, j + 1);
        Map<Eigen::VectorXcd> wv(w, n_);
        coeffs = v.adjoint() * wv;
        wv.noalias() -= v * coeffs;
        Eigen::VectorXcd c2 = v.adjoint() * wv;
        wv.noalias() -= v * c2;
        coeffs += c2;
        return wv.norm();
    }
};

inline std::vector<EigenPair> KrylovSchurSolver::run(EigsDiagnostics* diag_out) {
    using namespace krylov_detail;
    using Eigen::Map;

    basis_.assign(static_cast<size_t>(m_ + 1) * n_, Complex{});
    h_ = MatrixXcd::Zero(m_ + 1, m_);
    std::mt19937_64 rng(cfg_.seed);

    EigsDiagnostics diag;
    {
        random_fill(col(0), rng);
        Map<VectorXcd> v0(col(0), n_);
        v0.normalize();
    }

    int p = 0;      // compressed leading block size
    int m_eff = m_; // effective subspace (shrinks on exact breakdown)
    std::vector<Complex> prev_converged;
    int stable_cycles = 0;
    std::vector<EigenPair> result;
    std::vector<Complex> scratch(n_);

    const double conv_scale = cfg_.tol * std::max(a_norm_, 1e-300);

    for (int cycle = 0; cycle <= cfg_.max_restarts; ++cycle) {
        diag.restarts = cycle;
        // --- Arnoldi extension from p to m_eff
        m_eff = m_;
        for (int j = p; j < m_eff; ++j) {
            shift_solve_(col(j), col(j + 1));
            ++diag.op_applies;
            Map<VectorXcd> w(col(j + 1), n_);
            const double pre_norm = w.norm();
            Eigen::VectorXcd coeffs;
            double beta = orthogonalize(j, col(j + 1), coeffs);
            h_.col(j).head(j + 1) = coeffs;
            if (beta <= 1e-12 * std::max(pre_norm, 1e-300)) {
                // Invariant subspace hit: continue with a random direction.
                bool replaced = false;
                for (int attempt = 0; attempt < 2 && !replaced; ++attempt) {
                    random_fill(col(j + 1), rng);
                    Eigen::VectorXcd dummy;
                    const double nrm = orthogonalize(j, col(j + 1), dummy);
                    if (nrm > 1e-8) {
                        w /= nrm;
                        replaced = true;
                    }
                }
                h_(j + 1, j) = 0.0;
                if (!replaced) {
                    m_eff = j + 1;
                    break;
                }
            } else {
                h_(j + 1, j) = beta;
                w /= beta;
            }
        }

        // --- Schur form of the active block, sorted by |mu| descending
        MatrixXcd hm = h_.topLeftCorner(m_eff, m_eff);
        Eigen::ComplexSchur<MatrixXcd> schur(hm);
        if (schur.info() != Eigen::Success)
            throw std::runtime_error("dense Schur decomposition failed");
        MatrixXcd t = schur.matrixT();
        MatrixXcd q = schur.matrixU();
        reorder_schur(t, q, [](Complex a, Complex b) {
            return std::abs(a) > std::abs(b); // descending |mu|
        });
        Eigen::RowVectorXcd coupling =
            h_.row(m_eff).head(m_eff) * q; // residual coupling per Schur column

        // --- Ritz candidates and convergence
        std::vector<Candidate> cand;
        cand.reserve(m_eff);
        for (int i = 0; i < m_eff; ++i) {
            const Complex mu = t(i, i);
            if (std::abs(mu) < 1e-300) continue;
            const Complex lambda = cfg_.shift + 1.0 / mu;
            VectorXcd y = triangular_eigenvector(t, i);
            const double est = std::abs((coupling * y)(0));
            cand.push_back({lambda, mu, est, i});
        }

        // Which candidates must converge?
        std::vector<int> targets;
        if (policy_.wanted) {
            for (size_t i = 0; i < cand.size(); ++i) {
                if (policy_.max_wanted > 0 &&
                    static_cast<int>(targets.size()) >= policy_.max_wanted)
                    break;
                if (policy_.wanted(cand[i].lambda)) targets.push_back(static_cast<int>(i));
            }
        } else {
            for (int i = 0; i < std::min<int>(cfg_.count, cand.size()); ++i)
                targets.push_back(i);
        }

        // True residuals for plausible targets (estimate first to avoid
        // wasting matvecs on clearly unconverged pairs).
        result.clear();
        std::vector<Complex> converged_values;
        bool all_ok = true;
        bool near_miss = false; // some wanted pair is close to converging
        diag.residuals.clear();
        Map<const MatrixXcd> vbase(basis_.data(), n_, m_eff);
        for (int idx : targets) {
            const Candidate& c = cand[idx];
            if (c.est > 100.0 * conv_scale) {
                all_ok = false;
                if (c.est <= 1e5 * conv_scale) near_miss = true;
                diag.residuals.push_back(c.est);
                continue;
            }
            VectorXcd y = triangular_eigenvector(t, c.schur_index);
            VectorXcd coeff = q * y;
            Map<VectorXcd> u(scratch.data(), n_);
            u.noalias() = vbase * coeff;
            u.normalize();
            std::vector<Complex> av(n_);
            apply_a_(scratch.data(), av.data());
            Map<VectorXcd> avv(av.data(), n_);
            const double res = (avv - c.lambda * u).norm();
            diag.residuals.push_back(res);
            if (res <= conv_scale) {
                EigenPair pair;
                pair.value = c.lambda;
                pair.residual = res;
                pair.vector.assign(scratch.begin(), scratch.end());
                result.push_back(std::move(pair));
                converged_values.push_back(c.lambda);
            } else {
                all_ok = false;
            }
        }

        bool stop = false;
        if (policy_.wanted) {
            if (all_ok && !targets.empty() && result.size() == targets.size()) {
                stop = true;
                diag.converged = true;
            } else {
                // Stable-set rule: Ritz garbage can sit inside the window
                // without ever converging; stop once the converged set has
                // been unchanged for a few cycles and nothing else is close.
                bool same = converged_values.size() == prev_converged.size();
                for (size_t i = 0; i < converged_values.size() && same; ++i)
                    same = std::abs(converged_values[i] - prev_converged[i]) <=
                           1e-8 * (1.0 + std::abs(converged_values[i]));
                const bool countable = !converged_values.empty() || cycle >= 6;
                stable_cycles = (same && countable && !near_miss) ? stable_cycles + 1 : 0;
                if (stable_cycles >= policy_.stable_patience) {
                    stop = true;
                    diag.converged = true;
                }
                prev_converged = converged_values;
            }
        } else if (all_ok && static_cast<int>(result.size()) >=
                                 std::min(cfg_.count, m_eff)) {
            stop = true;
            diag.converged = true;
        }
        if (m_eff < m_ && !result.empty()) {
            // Exact invariant subspace: nothing more can appear.
            stop = true;
            diag.converged = all_ok;
        }
        if (stop || cycle == cfg_.max_restarts) break;

        // --- Krylov-Schur truncation
        int keep = std::min(m_eff - 2, cfg_.count + std::max(4, (m_eff - cfg_.count) / 2));
        keep = std::max(keep, 1);
        MatrixXcd qk = q.leftCols(keep);
        MatrixXcd vnew(n_, keep);
        vnew.noalias() = vbase * qk;
        // old residual vector v_{m_eff+1} becomes the next Arnoldi vector
        std::vector<Complex> vres(col(m_eff), col(m_eff) + n_);
        for (int c = 0; c < keep; ++c)
            std::copy(vnew.col(c).data(), vnew.col(c).data() + n_, col(c));
        std::copy(vres.begin(), vres.end(), col(keep));
        h_.setZero();
        h_.topLeftCorner(keep, keep) = t.topLeftCorner(keep, keep);
        h_.row(keep).head(keep) = coupling.head(keep);
        p = keep;
    }

    if (diag_out) *diag_out = diag;

    // Final polish: unit norm, deterministic phase, sort by |lambda - shift|.
    for (auto& pair : result) {
        size_t peak = 0;
        double best = -1.0;
        for (size_t i = 0; i < pair.vector.size(); ++i) {
            const double m = std::abs(pair.vector[i]);
            if (m > best + 1e-15) {
                best = m;
                peak = i;
            }
        }
        if (best > 0) {
            const Complex rot = std::conj(pair.vector[peak]) / best;
            for (auto& v : pair.vector) v *= rot;
        }
    }
    std::sort(result.begin(), result.end(), [&](const EigenPair& a, const EigenPair& b) {
        return std::abs(a.value - cfg_.shift) < std::abs(b.value - cfg_.shift);
    });
    return result;
}

// ---------------------------------------------------------------------------
// Convenience front-ends

namespace eigs_detail {

template <typename T>
inline void real_or_complex_matvec(const SparseMatrix<T>& a,
                                   const Complex* x, Complex* y) {
    if constexpr (std::is_same_v<T, double>) {
        const int n = a.rows();
        static thread_local std::vector<double> xr, xi, yr, yi;
        xr.resize(n); xi.resize(n); yr.resize(n); yi.resize(n);
        for (int i = 0; i < n; ++i) {
            xr[i] = x[i].real();
            xi[i] = x[i].imag();
        }
        a.template multiply<double>(xr, yr);
        a.template multiply<double>(xi, yi);
        for (int i = 0; i < n; ++i) y[i] = Complex(yr[i], yi[i]);
    } else {
        a.template multiply<Complex>(std::span<const Complex>(x, a.cols()),
                                     std::span<Complex>(y, a.rows()));
    }
}

} // namespace eigs_detail

// k eigenpairs of A nearest cfg.shift; throws NonConvergenceError with the
// achieved residuals if the restart budget is exhausted.
template <typename T>
std::vector<EigenPair> eigs_shift_invert(const SparseMatrix<T>& a,
                                         const EigenConfig& cfg,
                                         EigsDiagnostics* diag_out = nullptr) {
    if (!a.square()) throw std::invalid_argument("eigenproblem requires square matrix");
    if (cfg.count < 1) throw std::invalid_argument("count must be >= 1");
    if (!(cfg.tol > 0)) throw std::invalid_argument("tol must be positive");
    ShiftInvertOperator op(a, cfg.shift);
    const double norm = a.infinity_norm();
    KrylovSchurSolver solver(
        a.rows(),
        [&](const Complex* x, Complex* y) {
            std::copy(x, x + a.rows(), y);
            op.solve(std::span<Complex>(y, a.rows()));
        },
        [&](const Complex* x, Complex* y) {
            eigs_detail::real_or_complex_matvec(a, x, y);
        },
        norm, cfg);
    EigsDiagnostics diag;
    auto pairs = solver.run(&diag);
    if (diag_out) *diag_out = diag;
    if (!diag.converged || static_cast<int>(pairs.size()) < std::min(cfg.count, a.rows())) {
        std::ostringstream msg;
        msg << "eigensolver did not converge after " << diag.restarts
            << " restarts; achieved residuals:";
        for (double r : diag.residuals) msg << " " << r;
        throw NonConvergenceError(msg.str());
    }
    if (static_cast<int>(pairs.size()) > cfg.count) pairs.resize(cfg.count);
    return pairs;
}

} // namespace fcwg
