#include "nilhodge/linalg.hpp"

#include <algorithm>

namespace nilhodge {

Echelon rref(QMatrix m) {
    Echelon out;
    std::size_t row = 0;
    for (std::size_t col = 0; col < m.cols() && row < m.rows(); ++col) {
        std::size_t piv = row;
        while (piv < m.rows() && m(piv, col).is_zero()) {
            ++piv;
        }
        if (piv == m.rows()) {
            continue;
        }
        if (piv != row) {
            for (std::size_t j = 0; j < m.cols(); ++j) {
                std::swap(m(piv, j), m(row, j));
            }
        }
        const GaussianRational scale = m(row, col).inv();
        for (std::size_t j = col; j < m.cols(); ++j) {
            if (!m(row, j).is_zero()) {
                m(row, j) *= scale;
            }
        }
        for (std::size_t i = 0; i < m.rows(); ++i) {
            if (i == row || m(i, col).is_zero()) {
                continue;
            }
            const GaussianRational f = m(i, col);
            for (std::size_t j = col; j < m.cols(); ++j) {
                if (!m(row, j).is_zero()) {
                    m(i, j) -= f * m(row, j);
                }
            }
        }
        out.pivots.push_back(col);
        ++row;
    }
    out.reduced = std::move(m);
    return out;
}

std::size_t rank(const QMatrix& m) {
    return rref(m).pivots.size();
}

std::vector<QVec> kernel_basis(const QMatrix& m) {
    Echelon e = rref(m);
    std::vector<bool> is_pivot(m.cols(), false);
    for (auto p : e.pivots) {
        is_pivot[p] = true;
    }
    std::vector<QVec> basis;
    for (std::size_t f = 0; f < m.cols(); ++f) {
        if (is_pivot[f]) {
            continue;
        }
        QVec v(m.cols());
        v[f] = GaussianRational(1);
        for (std::size_t r = 0; r < e.pivots.size(); ++r) {
            v[e.pivots[r]] = -e.reduced(r, f);
        }
        basis.push_back(std::move(v));
    }
    return basis;
}

std::optional<QVec> solve(const QMatrix& m, const QVec& b) {
    if (b.size() != m.rows()) {
        throw std::invalid_argument("solve: dimension mismatch");
    }
    QMatrix aug(m.rows(), m.cols() + 1);
    for (std::size_t i = 0; i < m.rows(); ++i) {
        for (std::size_t j = 0; j < m.cols(); ++j) {
            aug(i, j) = m(i, j);
        }
        aug(i, m.cols()) = b[i];
    }
    Echelon e = rref(std::move(aug));
    if (!e.pivots.empty() && e.pivots.back() == m.cols()) {
        return std::nullopt;
    }
    QVec x(m.cols());
    for (std::size_t r = 0; r < e.pivots.size(); ++r) {
        x[e.pivots[r]] = e.reduced(r, m.cols());
    }
    return x;
}

QMatrix inverse(const QMatrix& m) {
    if (m.rows() != m.cols()) {
        throw std::invalid_argument("inverse: matrix is not square");
    }
    const std::size_t n = m.rows();
    QMatrix aug(n, 2 * n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            aug(i, j) = m(i, j);
        }
        aug(i, n + i) = GaussianRational(1);
    }
    Echelon e = rref(std::move(aug));
    if (e.pivots.size() < n || e.pivots[n - 1] != n - 1) {
        throw std::domain_error("inverse: matrix is singular");
    }
    QMatrix inv(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            inv(i, j) = e.reduced(i, n + j);
        }
    }
    return inv;
}

bool is_zero_vec(const QVec& v) {
    return std::all_of(v.begin(), v.end(), [](const GaussianRational& z) { return z.is_zero(); });
}

// ---------------------------------------------------------------------------

QVec SpanBuilder::reduce(QVec v) const {
    for (std::size_t k = 0; k < rows_.size(); ++k) {
        const auto p = pivots_[k];
        if (v[p].is_zero()) {
            continue;
        }
        const GaussianRational f = v[p];
        for (std::size_t j = 0; j < ambient_; ++j) {
            if (!rows_[k][j].is_zero()) {
                v[j] -= f * rows_[k][j];
            }
        }
    }
    return v;
}

bool SpanBuilder::add(const QVec& v) {
    if (v.size() != ambient_) {
        throw std::invalid_argument("SpanBuilder: dimension mismatch");
    }
    QVec r = reduce(v);
    auto it = std::find_if(r.begin(), r.end(), [](const GaussianRational& z) { return !z.is_zero(); });
    if (it == r.end()) {
        return false;
    }
    const auto p = static_cast<std::size_t>(it - r.begin());
    const GaussianRational s = r[p].inv();
    for (auto& x : r) {
        x *= s;
    }
    // Keep existing rows reduced against the new pivot.
    for (auto& row : rows_) {
        if (row[p].is_zero()) {
            continue;
        }
        const GaussianRational f = row[p];
        for (std::size_t j = 0; j < ambient_; ++j) {
            if (!r[j].is_zero()) {
                row[j] -= f * r[j];
            }
        }
    }
    rows_.push_back(std::move(r));
    pivots_.push_back(p);
    return true;
}

bool SpanBuilder::contains(const QVec& v) const {
    return is_zero_vec(reduce(v));
}

// ---------------------------------------------------------------------------

CohomologyBasis CohomologyBasis::compute(const QMatrix& d_in, const QMatrix& d_out) {
    const std::size_t ambient = d_in.rows();
    if (d_out.cols() != ambient) {
        throw std::invalid_argument("cohomology: d_in and d_out do not compose");
    }
    if (d_out.rows() > 0 && d_in.cols() > 0) {
        QMatrix comp = d_out * d_in;
        for (std::size_t j = 0; j < comp.cols(); ++j) {
            for (std::size_t i = 0; i < comp.rows(); ++i) {
                if (!comp(i, j).is_zero()) {
                    throw CompositionError("cohomology: d_out * d_in is nonzero at column " + std::to_string(j),
                                           j);
                }
            }
        }
    }

    CohomologyBasis h;
    h.ambient_ = ambient;
    h.d_out_ = d_out;

    SpanBuilder span(ambient);
    Echelon e_in = rref(d_in);
    for (auto c : e_in.pivots) {
        QVec col = d_in.column(c);
        span.add(col);
        h.boundaries_.push_back(std::move(col));
    }
    std::vector<QVec> kernel;
    if (d_out.rows() == 0) {
        for (std::size_t k = 0; k < ambient; ++k) {
            QVec v(ambient);
            v[k] = GaussianRational(1);
            kernel.push_back(std::move(v));
        }
    } else {
        kernel = kernel_basis(d_out);
    }
    for (auto& v : kernel) {
        if (span.add(v)) {
            h.reps_.push_back(std::move(v));
        }
    }

    // Left inverse of [boundaries | reps]: row-reduce [B | I].
    const std::size_t k = h.boundaries_.size() + h.reps_.size();
    QMatrix aug(ambient, k + ambient);
    for (std::size_t j = 0; j < h.boundaries_.size(); ++j) {
        for (std::size_t i = 0; i < ambient; ++i) {
            aug(i, j) = h.boundaries_[j][i];
        }
    }
    for (std::size_t j = 0; j < h.reps_.size(); ++j) {
        for (std::size_t i = 0; i < ambient; ++i) {
            aug(i, h.boundaries_.size() + j) = h.reps_[j][i];
        }
    }
    for (std::size_t i = 0; i < ambient; ++i) {
        aug(i, k + i) = GaussianRational(1);
    }
    Echelon e = rref(std::move(aug));
    h.left_inverse_ = QMatrix(k, ambient);
    for (std::size_t r = 0; r < k; ++r) {
        for (std::size_t j = 0; j < ambient; ++j) {
            h.left_inverse_(r, j) = e.reduced(r, k + j);
        }
    }
    return h;
}

bool CohomologyBasis::is_closed(const QVec& v) const {
    if (d_out_.rows() == 0) {
        return true;
    }
    return is_zero_vec(d_out_.apply(v));
}

QVec CohomologyBasis::project(const QVec& v) const {
    if (v.size() != ambient_) {
        throw std::invalid_argument("project: dimension mismatch");
    }
    if (!is_closed(v)) {
        throw NotClosedError("project: vector is not closed");
    }
    QVec all = left_inverse_.apply(v);
    return QVec(all.begin() + static_cast<std::ptrdiff_t>(boundaries_.size()), all.end());
}

// ---------------------------------------------------------------------------
// Polynomial matrices
// ---------------------------------------------------------------------------

namespace {

// Forward fraction-free elimination; returns pivot columns. `m` ends up in
// row echelon form whose pivot rows are minors of the input.
std::vector<std::size_t> bareiss(PMatrix& m) {
    std::vector<std::size_t> pivots;
    Poly prev(GaussianRational(1));
    std::size_t row = 0;
    for (std::size_t col = 0; col < m.cols() && row < m.rows(); ++col) {
        // Prefer the sparsest nonzero pivot to limit expression growth.
        std::optional<std::size_t> best;
        for (std::size_t i = row; i < m.rows(); ++i) {
            if (m(i, col).is_zero()) {
                continue;
            }
            if (!best || m(i, col).terms().size() < m(*best, col).terms().size()) {
                best = i;
            }
        }
        if (!best) {
            continue;
        }
        if (*best != row) {
            for (std::size_t j = 0; j < m.cols(); ++j) {
                std::swap(m(*best, j), m(row, j));
            }
        }
        const Poly piv = m(row, col);
        for (std::size_t i = row + 1; i < m.rows(); ++i) {
            const Poly lead = m(i, col);
            for (std::size_t j = col + 1; j < m.cols(); ++j) {
                Poly num = piv * m(i, j) - lead * m(row, j);
                m(i, j) = Poly::divide_exact(num, prev);
            }
            m(i, col) = Poly();
        }
        prev = piv;
        pivots.push_back(col);
        ++row;
    }
    return pivots;
}

}  // namespace

std::size_t generic_rank(const PMatrix& m) {
    PMatrix work = m;
    return bareiss(work).size();
}

std::vector<PVec> kernel_basis(const PMatrix& m) {
    PMatrix e = m;
    const auto pivots = bareiss(e);
    std::vector<bool> is_pivot(m.cols(), false);
    for (auto p : pivots) {
        is_pivot[p] = true;
    }
    std::vector<PVec> basis;
    for (std::size_t f = 0; f < m.cols(); ++f) {
        if (is_pivot[f]) {
            continue;
        }
        PVec x(m.cols());
        x[f] = Poly(GaussianRational(1));
        // Back substitution, rescaling the whole vector instead of dividing.
        for (std::size_t r = pivots.size(); r-- > 0;) {
            const std::size_t p = pivots[r];
            Poly s;
            for (std::size_t j = p + 1; j < m.cols(); ++j) {
                if (!x[j].is_zero() && !e(r, j).is_zero()) {
                    s += e(r, j) * x[j];
                }
            }
            if (s.is_zero()) {
                continue;
            }
            const Poly a = e(r, p);
            for (auto& xj : x) {
                if (!xj.is_zero()) {
                    xj *= a;
                }
            }
            x[p] = -s;
        }
        basis.push_back(std::move(x));
    }
    return basis;
}

QMatrix evaluate(const PMatrix& m, const Point& point) {
    QMatrix out(m.rows(), m.cols());
    for (std::size_t i = 0; i < m.rows(); ++i) {
        for (std::size_t j = 0; j < m.cols(); ++j) {
            out(i, j) = m(i, j).eval(point);
        }
    }
    return out;
}

QVec evaluate(const PVec& v, const Point& point) {
    QVec out(v.size());
    for (std::size_t k = 0; k < v.size(); ++k) {
        out[k] = v[k].eval(point);
    }
    return out;
}

std::size_t specialized_rank(const PMatrix& m, const Point& point) {
    return rank(evaluate(m, point));
}

std::vector<std::size_t> independent_columns(const PMatrix& m) {
    PMatrix work = m;
    // Bareiss pivots on the original column order are exactly the greedy
    // left-to-right independent columns.
    return bareiss(work);
}

}  // namespace nilhodge
