#pragma once

// Dense exact linear algebra over Q(i) and over the fraction field of a
// polynomial ring.

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "nilhodge/coeff.hpp"

namespace nilhodge {

template <class C>
using Vec = std::vector<C>;

template <class C>
class Matrix {
  public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols) {}

    static Matrix identity(std::size_t n) {
        Matrix m(n, n);
        for (std::size_t k = 0; k < n; ++k) {
            m(k, k) = C(1);
        }
        return m;
    }

    static Matrix from_columns(std::size_t rows, const std::vector<Vec<C>>& columns) {
        Matrix m(rows, columns.size());
        for (std::size_t j = 0; j < columns.size(); ++j) {
            for (std::size_t i = 0; i < rows; ++i) {
                m(i, j) = columns[j][i];
            }
        }
        return m;
    }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

    C& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
    const C& operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

    Vec<C> column(std::size_t j) const {
        Vec<C> v(rows_);
        for (std::size_t i = 0; i < rows_; ++i) {
            v[i] = (*this)(i, j);
        }
        return v;
    }

    Vec<C> apply(const Vec<C>& x) const {
        if (x.size() != cols_) {
            throw std::invalid_argument("Matrix::apply: dimension mismatch");
        }
        Vec<C> y(rows_);
        for (std::size_t i = 0; i < rows_; ++i) {
            for (std::size_t j = 0; j < cols_; ++j) {
                if (!is_zero((*this)(i, j)) && !is_zero(x[j])) {
                    y[i] += (*this)(i, j) * x[j];
                }
            }
        }
        return y;
    }

    friend Matrix operator*(const Matrix& a, const Matrix& b) {
        if (a.cols_ != b.rows_) {
            throw std::invalid_argument("Matrix product: dimension mismatch");
        }
        Matrix out(a.rows_, b.cols_);
        for (std::size_t i = 0; i < a.rows_; ++i) {
            for (std::size_t k = 0; k < a.cols_; ++k) {
                if (is_zero(a(i, k))) {
                    continue;
                }
                for (std::size_t j = 0; j < b.cols_; ++j) {
                    if (!is_zero(b(k, j))) {
                        out(i, j) += a(i, k) * b(k, j);
                    }
                }
            }
        }
        return out;
    }

    bool is_zero_matrix() const {
        for (const auto& x : data_) {
            if (!is_zero(x)) {
                return false;
            }
        }
        return true;
    }

    friend bool operator==(const Matrix& a, const Matrix& b) {
        return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.data_ == b.data_;
    }

    /// Row-major bracketed text, e.g. `[[1, 0], [0, t]]`.
    std::string str() const {
        std::string out = "[";
        for (std::size_t i = 0; i < rows_; ++i) {
            out += i ? ", [" : "[";
            for (std::size_t j = 0; j < cols_; ++j) {
                if (j) {
                    out += ", ";
                }
                out += to_string((*this)(i, j));
            }
            out += "]";
        }
        return out + "]";
    }

  private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<C> data_;
};

using QMatrix = Matrix<GaussianRational>;
using PMatrix = Matrix<Poly>;
using QVec = Vec<GaussianRational>;
using PVec = Vec<Poly>;

// --- over Q(i) ------------------------------------------------------------

struct Echelon {
    QMatrix reduced;                   // reduced row echelon form
    std::vector<std::size_t> pivots;   // pivot column of each nonzero row
};

Echelon rref(QMatrix m);
std::size_t rank(const QMatrix& m);

/// Right kernel basis; one vector per free column, with a 1 in that column.
std::vector<QVec> kernel_basis(const QMatrix& m);

/// Some x with m x = b, or nullopt. Free variables are set to zero.
std::optional<QVec> solve(const QMatrix& m, const QVec& b);

/// Throws std::domain_error when singular.
QMatrix inverse(const QMatrix& m);

bool is_zero_vec(const QVec& v);

/// Incrementally maintained span with membership and reduction.
class SpanBuilder {
  public:
    explicit SpanBuilder(std::size_t ambient) : ambient_(ambient) {}
    /// Adds v if independent of the current span; returns whether it was.
    bool add(const QVec& v);
    bool contains(const QVec& v) const;
    std::size_t dim() const { return rows_.size(); }
    std::size_t ambient() const { return ambient_; }

  private:
    QVec reduce(QVec v) const;
    std::size_t ambient_;
    std::vector<QVec> rows_;
    std::vector<std::size_t> pivots_;
};

class CompositionError : public std::logic_error {
  public:
    CompositionError(const std::string& what, std::size_t witness_column)
        : std::logic_error(what), witness_(witness_column) {}
    std::size_t witness_column() const { return witness_; }

  private:
    std::size_t witness_;
};

class NotClosedError : public std::logic_error {
  public:
    using std::logic_error::logic_error;
};

/// Ker(d_out) / Im(d_in) with deterministic representatives and a coordinate
/// projection. d_in maps into the ambient space, d_out out of it.
class CohomologyBasis {
  public:
    static CohomologyBasis compute(const QMatrix& d_in, const QMatrix& d_out);

    std::size_t dim() const { return reps_.size(); }
    std::size_t ambient() const { return ambient_; }
    std::size_t kernel_dim() const { return reps_.size() + boundaries_.size(); }
    std::size_t image_rank() const { return boundaries_.size(); }
    const std::vector<QVec>& representatives() const { return reps_; }
    const std::vector<QVec>& boundaries() const { return boundaries_; }

    bool is_closed(const QVec& v) const;
    /// Coordinates of the class of a closed vector; throws NotClosedError.
    QVec project(const QVec& v) const;
    bool is_exact(const QVec& v) const { return is_zero_vec(project(v)); }

  private:
    std::size_t ambient_ = 0;
    QMatrix d_out_;
    std::vector<QVec> reps_;
    std::vector<QVec> boundaries_;
    QMatrix left_inverse_;  // rows: boundary coordinates, then class coordinates
};

// --- polynomial matrices ------------------------------------------------------

/// Rank over the fraction field, by fraction-free (Bareiss) elimination.
std::size_t generic_rank(const PMatrix& m);

/// Kernel basis over the fraction field, scaled to polynomial entries.
std::vector<PVec> kernel_basis(const PMatrix& m);

QMatrix evaluate(const PMatrix& m, const Point& point);
std::size_t specialized_rank(const PMatrix& m, const Point& point);

/// Indices of a maximal set of columns independent over the fraction field,
/// chosen greedily left to right.
std::vector<std::size_t> independent_columns(const PMatrix& m);

QVec evaluate(const PVec& v, const Point& point);

}  // namespace nilhodge
