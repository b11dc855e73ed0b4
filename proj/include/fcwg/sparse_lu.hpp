#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "fcwg/ordering.hpp"
#include "fcwg/sparse.hpp"

namespace fcwg {

struct SingularPivotError : std::runtime_error {
    int pivot_index;
    explicit SingularPivotError(int k)
        : std::runtime_error("singular pivot at elimination step " + std::to_string(k)),
          pivot_index(k) {}
};

// Sparse LU with threshold partial pivoting over a nested-dissection
// column ordering (left-looking, one sparse triangular solve per column).
// Solves are position-space: row indices are remapped to pivot order
// after factorization so forward/backward sweeps touch memory linearly.
template <typename T>
class SparseLU {
  public:
    struct Options {
        double diag_preference = 0.1; // keep the diagonal pivot if within 10x of max
        bool reorder = true;
        int leaf_size = 48;
    };

    explicit SparseLU(const SparseMatrix<T>& a, Options opt = {}) {
        if (!a.square()) throw std::invalid_argument("LU requires a square matrix");
        n_ = a.rows();
        factorize(a, opt);
    }

    int dim() const { return n_; }
    int64_t fill() const {
        return static_cast<int64_t>(l_idx_.size() + u_idx_.size()) + n_;
    }

    // In-place solve A x = b.
    void solve(std::span<T> b) const {
        work_.resize(n_);
        for (int k = 0; k < n_; ++k) work_[k] = b[row_of_pos_[k]];
        for (int k = 0; k < n_; ++k) {
            const T xk = work_[k];
            if (xk == T{}) continue;
            for (int64_t p = l_ptr_[k]; p < l_ptr_[k + 1]; ++p)
                work_[l_idx_[p]] -= l_val_[p] * xk;
        }
        for (int k = n_ - 1; k >= 0; --k) {
            const T xk = work_[k] / u_diag_[k];
            work_[k] = xk;
            if (xk == T{}) continue;
            for (int64_t p = u_ptr_[k]; p < u_ptr_[k + 1]; ++p)
                work_[u_idx_[p]] -= u_val_[p] * xk;
        }
        for (int k = 0; k < n_; ++k) b[col_perm_[k]] = work_[k];
    }

  private:
    void factorize(const SparseMatrix<T>& a, const Options& opt) {
        // Column access pattern: CSC of A == CSR of A^T.
        const SparseMatrix<T> at = a.transposed();
        auto cptr = at.row_ptr();
        auto cidx = at.col_idx();
        auto cval = at.values();

        col_perm_.resize(n_);
        if (opt.reorder && n_ > opt.leaf_size) {
            std::vector<int> sp, sa;
            symmetric_pattern(a, sp, sa);
            col_perm_ = nested_dissection(n_, sp, sa, opt.leaf_size);
        } else {
            for (int i = 0; i < n_; ++i) col_perm_[i] = i;
        }

        const int64_t guess = std::max<int64_t>(a.nnz() * 8, 64);
        l_ptr_.assign(1, 0);
        u_ptr_.assign(1, 0);
        l_idx_.reserve(guess);
        l_val_.reserve(guess);
        u_idx_.reserve(guess);
        u_val_.reserve(guess);
        u_diag_.resize(n_);
        row_of_pos_.assign(n_, -1);

        std::vector<int> pinv(n_, -1); // original row -> pivot position
        std::vector<T> x(n_, T{});     // dense accumulator
        std::vector<int> dfs_stack, topo;
        std::vector<int64_t> dfs_ptr_stack;
        std::vector<int> visited(n_, -1);
        // L columns with original row indices, rewritten to positions at the end.
        std::vector<int64_t> lcol_ptr(1, 0);
        std::vector<int> lcol_row;
        std::vector<T> lcol_val;
        lcol_row.reserve(guess);
        lcol_val.reserve(guess);

        for (int k = 0; k < n_; ++k) {
            const int col = col_perm_[k];
            // Scatter A(:, col) and find the reach through pivotal L columns.
            topo.clear();
            for (int p = cptr[col]; p < cptr[col + 1]; ++p) {
                const int r0 = cidx[p];
                x[r0] += cval[p];
                if (visited[r0] == k) continue;
                // Iterative DFS through columns already pivotal.
                dfs_stack.clear();
                dfs_ptr_stack.clear();
                dfs_stack.push_back(r0);
                dfs_ptr_stack.push_back(-1);
                while (!dfs_stack.empty()) {
                    const int r = dfs_stack.back();
                    if (dfs_ptr_stack.back() < 0) {
                        visited[r] = k;
                        dfs_ptr_stack.back() = pinv[r] >= 0 ? lcol_ptr[pinv[r]] : 0;
                    }
                    bool descended = false;
                    if (pinv[r] >= 0) {
                        const int64_t end = lcol_ptr[pinv[r] + 1];
                        int64_t it = dfs_ptr_stack.back();
                        while (it < end) {
                            const int child = lcol_row[it];
                            ++it;
                            if (visited[child] != k) {
                                dfs_ptr_stack.back() = it;
                                dfs_stack.push_back(child);
                                dfs_ptr_stack.push_back(-1);
                                descended = true;
                                break;
                            }
                        }
                        if (descended) continue;
                    }
                    topo.push_back(r);
                    dfs_stack.pop_back();
                    dfs_ptr_stack.pop_back();
                }
            }
            // Topological order: children were appended before parents, so
            // iterate in reverse for the elimination updates.
            for (auto it = topo.rbegin(); it != topo.rend(); ++it) {
                const int r = *it;
                const int pk = pinv[r];
                if (pk < 0) continue;
                const T xr = x[r];
                if (xr != T{})
                    for (int64_t p = lcol_ptr[pk]; p < lcol_ptr[pk + 1]; ++p)
                        x[lcol_row[p]] -= lcol_val[p] * xr;
            }

            // Pivot: largest remaining entry, preferring the diagonal when
            // it is within diag_preference of the maximum.
            double amax = 0.0;
            int pivot_row = -1;
            for (int r : topo)
                if (pinv[r] < 0) {
                    const double m = std::abs(x[r]);
                    if (m > amax) {
                        amax = m;
                        pivot_row = r;
                    }
                }
            if (pivot_row < 0 || amax == 0.0) {
                throw SingularPivotError(k);
            }
            if (pinv[col] < 0 && std::abs(x[col]) >= opt.diag_preference * amax)
                pivot_row = col;
            const T pivot = x[pivot_row];

            // Emit U column (entries in already-pivotal rows) and L column.
            for (int r : topo) {
                if (pinv[r] >= 0) {
                    u_idx_.push_back(pinv[r]);
                    u_val_.push_back(x[r]);
                } else if (r != pivot_row) {
                    lcol_row.push_back(r);
                    lcol_val.push_back(x[r] / pivot);
                }
                x[r] = T{};
            }
            u_ptr_.push_back(static_cast<int64_t>(u_idx_.size()));
            lcol_ptr.push_back(static_cast<int64_t>(lcol_row.size()));
            u_diag_[k] = pivot;
            pinv[pivot_row] = k;
            row_of_pos_[k] = pivot_row;
        }

        // Rewrite L row indices to pivot positions.
        l_ptr_.resize(n_ + 1);
        for (int k = 0; k <= n_; ++k) l_ptr_[k] = lcol_ptr[k];
        l_idx_.resize(lcol_row.size());
        l_val_ = std::move(lcol_val);
        for (size_t p = 0; p < lcol_row.size(); ++p) l_idx_[p] = pinv[lcol_row[p]];
    }

    int n_ = 0;
    std::vector<int64_t> l_ptr_, u_ptr_;
    std::vector<int> l_idx_, u_idx_;
    std::vector<T> l_val_, u_val_;
    std::vector<T> u_diag_;
    std::vector<int> row_of_pos_; // pivot position -> original row
    std::vector<int> col_perm_;   // pivot position -> original column
    mutable std::vector<T> work_;
};

} // namespace fcwg
