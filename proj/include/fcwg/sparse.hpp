#pragma once

#include <algorithm>
#include <cassert>
#include <cmath>
#include <complex>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "fcwg/units.hpp"

namespace fcwg {

template <typename T>
struct Triplet {
    int row;
    int col;
    T value;
};

// Compressed-row sparse matrix; rows sorted, duplicate entries summed
// at construction. Immutable after assembly.
template <typename T>
class SparseMatrix {
  public:
    SparseMatrix() = default;

    static SparseMatrix from_triplets(int rows, int cols,
                                      std::vector<Triplet<T>> trip) {
        if (rows < 0 || cols < 0) throw std::invalid_argument("negative dimension");
        std::sort(trip.begin(), trip.end(), [](const auto& a, const auto& b) {
            return a.row != b.row ? a.row < b.row : a.col < b.col;
        });
        SparseMatrix m;
        m.rows_ = rows;
        m.cols_ = cols;
        m.row_ptr_.assign(rows + 1, 0);
        m.col_idx_.reserve(trip.size());
        m.values_.reserve(trip.size());
        size_t i = 0;
        for (int r = 0; r < rows; ++r) {
            while (i < trip.size() && trip[i].row == r) {
                const int c = trip[i].col;
                if (c < 0 || c >= cols || trip[i].row < 0)
                    throw std::invalid_argument("triplet index out of range");
                T v = trip[i].value;
                ++i;
                while (i < trip.size() && trip[i].row == r && trip[i].col == c) {
                    v += trip[i].value;
                    ++i;
                }
                m.col_idx_.push_back(c);
                m.values_.push_back(v);
            }
            m.row_ptr_[r + 1] = static_cast<int>(m.col_idx_.size());
        }
        if (i != trip.size()) throw std::invalid_argument("triplet row out of range");
        return m;
    }

    int rows() const { return rows_; }
    int cols() const { return cols_; }
    bool square() const { return rows_ == cols_; }
    int64_t nnz() const { return static_cast<int64_t>(col_idx_.size()); }

    std::span<const int> row_ptr() const { return row_ptr_; }
    std::span<const int> col_idx() const { return col_idx_; }
    std::span<const T> values() const { return values_; }

    // y = A x
    template <typename U>
    void multiply(std::span<const U> x, std::span<U> y) const {
        assert(static_cast<int>(x.size()) == cols_ &&
               static_cast<int>(y.size()) == rows_);
        for (int r = 0; r < rows_; ++r) {
            U acc{};
            for (int k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k)
                acc += x[col_idx_[k]] * values_[k];
            y[r] = acc;
        }
    }

    double infinity_norm() const {
        double best = 0.0;
        for (int r = 0; r < rows_; ++r) {
            double s = 0.0;
            for (int k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k)
                s += std::abs(values_[k]);
            best = std::max(best, s);
        }
        return best;
    }

    SparseMatrix transposed() const {
        SparseMatrix t;
        t.rows_ = cols_;
        t.cols_ = rows_;
        t.row_ptr_.assign(cols_ + 1, 0);
        t.col_idx_.resize(col_idx_.size());
        t.values_.resize(values_.size());
        for (int c : col_idx_) ++t.row_ptr_[c + 1];
        for (int c = 0; c < cols_; ++c) t.row_ptr_[c + 1] += t.row_ptr_[c];
        std::vector<int> next(t.row_ptr_.begin(), t.row_ptr_.end() - 1);
        for (int r = 0; r < rows_; ++r)
            for (int k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k) {
                const int pos = next[col_idx_[k]]++;
                t.col_idx_[pos] = r;
                t.values_[pos] = values_[k];
            }
        return t;
    }

    // A - sigma*I with the diagonal made structurally explicit.
    SparseMatrix shifted(T sigma) const {
        if (!square()) throw std::invalid_argument("shift requires square matrix");
        std::vector<Triplet<T>> trip;
        trip.reserve(col_idx_.size() + rows_);
        for (int r = 0; r < rows_; ++r)
            for (int k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k)
                trip.push_back({r, col_idx_[k], values_[k]});
        for (int r = 0; r < rows_; ++r) trip.push_back({r, r, -sigma});
        return from_triplets(rows_, cols_, std::move(trip));
    }

    template <typename U>
    SparseMatrix<U> cast() const {
        SparseMatrix<U> m;
        m.rows_ = rows_;
        m.cols_ = cols_;
        m.row_ptr_ = row_ptr_;
        m.col_idx_ = col_idx_;
        m.values_.assign(values_.begin(), values_.end());
        return m;
    }

  private:
    template <typename U>
    friend class SparseMatrix;

    int rows_ = 0, cols_ = 0;
    std::vector<int> row_ptr_{0};
    std::vector<int> col_idx_;
    std::vector<T> values_;
};

using SparseMatrixd = SparseMatrix<double>;
using SparseMatrixc = SparseMatrix<Complex>;

} // namespace fcwg
