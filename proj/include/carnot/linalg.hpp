#pragma once

#include <cstddef>
#include <optional>
#include <utility>
#include <vector>

#include "carnot/errors.hpp"
#include "carnot/rational.hpp"

namespace carnot {

/// Small dense row-major matrix over an exact field. Used for the rational
/// decision kernel (RREF, rank, solves); sizes here never exceed a few dozen.
template <class S>
class Mat {
public:
    Mat() = default;
    Mat(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), a_(rows * cols, S(0)) {}

    static Mat identity(std::size_t n) {
        Mat m(n, n);
        for (std::size_t i = 0; i < n; ++i) m(i, i) = S(1);
        return m;
    }

    static Mat from_rows(const std::vector<std::vector<S>>& rows) {
        if (rows.empty()) return Mat(0, 0);
        Mat m(rows.size(), rows.front().size());
        for (std::size_t i = 0; i < rows.size(); ++i) {
            if (rows[i].size() != m.cols_) throw semantic_error("ragged row list");
            for (std::size_t j = 0; j < m.cols_; ++j) m(i, j) = rows[i][j];
        }
        return m;
    }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

    S& operator()(std::size_t i, std::size_t j) { return a_[i * cols_ + j]; }
    const S& operator()(std::size_t i, std::size_t j) const { return a_[i * cols_ + j]; }

    std::vector<S> row(std::size_t i) const {
        return std::vector<S>(a_.begin() + i * cols_, a_.begin() + (i + 1) * cols_);
    }

    void append_row(const std::vector<S>& r) {
        if (rows_ == 0 && cols_ == 0) cols_ = r.size();
        if (r.size() != cols_) throw semantic_error("appended row has wrong length");
        a_.insert(a_.end(), r.begin(), r.end());
        ++rows_;
    }

    bool operator==(const Mat& o) const {
        return rows_ == o.rows_ && cols_ == o.cols_ && a_ == o.a_;
    }

private:
    std::size_t rows_ = 0, cols_ = 0;
    std::vector<S> a_;
};

/// In-place reduced row echelon form; returns the pivot columns in order.
/// Exact arithmetic: a pivot is any entry != 0.
template <class S>
std::vector<std::size_t> rref(Mat<S>& m) {
    std::vector<std::size_t> pivots;
    std::size_t r = 0;
    for (std::size_t c = 0; c < m.cols() && r < m.rows(); ++c) {
        std::size_t p = r;
        while (p < m.rows() && m(p, c) == S(0)) ++p;
        if (p == m.rows()) continue;
        if (p != r)
            for (std::size_t j = 0; j < m.cols(); ++j) std::swap(m(p, j), m(r, j));
        const S inv_piv = S(1) / m(r, c);
        for (std::size_t j = 0; j < m.cols(); ++j) m(r, j) = m(r, j) * inv_piv;
        for (std::size_t i = 0; i < m.rows(); ++i) {
            if (i == r || m(i, c) == S(0)) continue;
            const S f = m(i, c);
            for (std::size_t j = 0; j < m.cols(); ++j) m(i, j) = m(i, j) - f * m(r, j);
        }
        pivots.push_back(c);
        ++r;
    }
    return pivots;
}

template <class S>
std::size_t rank(Mat<S> m) {
    return rref(m).size();
}

/// Drop all-zero rows (useful after rref to get a canonical basis).
template <class S>
Mat<S> nonzero_rows(const Mat<S>& m) {
    Mat<S> out(0, m.cols());
    for (std::size_t i = 0; i < m.rows(); ++i) {
        bool z = true;
        for (std::size_t j = 0; j < m.cols() && z; ++j) z = (m(i, j) == S(0));
        if (!z) out.append_row(m.row(i));
    }
    return out;
}

/// Reduce v against the rows of an RREF matrix; the remainder is zero iff
/// v lies in the row span.
template <class S>
std::vector<S> reduce_against_rref(const Mat<S>& r, const std::vector<std::size_t>& pivots,
                                   std::vector<S> v) {
    for (std::size_t i = 0; i < pivots.size(); ++i) {
        const S f = v[pivots[i]];
        if (f == S(0)) continue;
        for (std::size_t j = 0; j < r.cols(); ++j) v[j] = v[j] - f * r(i, j);
    }
    return v;
}

template <class S>
bool is_zero_vector(const std::vector<S>& v) {
    for (const auto& x : v)
        if (x != S(0)) return false;
    return true;
}

/// Solve A x = b for one solution (free variables set to zero).
/// Returns nullopt when the system is inconsistent.
template <class S>
std::optional<std::vector<S>> solve_consistent(const Mat<S>& a, const std::vector<S>& b) {
    if (b.size() != a.rows()) throw semantic_error("solve: rhs length mismatch");
    Mat<S> aug(a.rows(), a.cols() + 1);
    for (std::size_t i = 0; i < a.rows(); ++i) {
        for (std::size_t j = 0; j < a.cols(); ++j) aug(i, j) = a(i, j);
        aug(i, a.cols()) = b[i];
    }
    const auto pivots = rref(aug);
    std::vector<S> x(a.cols(), S(0));
    for (std::size_t i = 0; i < pivots.size(); ++i) {
        if (pivots[i] == a.cols()) return std::nullopt; // pivot in rhs column
        x[pivots[i]] = aug(i, a.cols());
    }
    return x;
}

/// Basis of { x : A x = 0 }, one kernel vector per returned row.
template <class S>
Mat<S> kernel(Mat<S> a) {
    const std::size_t n = a.cols();
    const auto pivots = rref(a);
    std::vector<bool> is_pivot(n, false);
    for (auto p : pivots) is_pivot[p] = true;
    Mat<S> k(0, n);
    for (std::size_t c = 0; c < n; ++c) {
        if (is_pivot[c]) continue;
        std::vector<S> v(n, S(0));
        v[c] = S(1);
        for (std::size_t i = 0; i < pivots.size(); ++i) v[pivots[i]] = -a(i, c);
        k.append_row(v);
    }
    return k;
}

template <class S>
std::vector<S> matvec(const Mat<S>& a, const std::vector<S>& x) {
    if (x.size() != a.cols()) throw semantic_error("matvec: size mismatch");
    std::vector<S> y(a.rows(), S(0));
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) y[i] = y[i] + a(i, j) * x[j];
    return y;
}

template <class S>
Mat<S> matmul(const Mat<S>& a, const Mat<S>& b) {
    if (a.cols() != b.rows()) throw semantic_error("matmul: size mismatch");
    Mat<S> c(a.rows(), b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t k = 0; k < a.cols(); ++k) {
            const S& f = a(i, k);
            if (f == S(0)) continue;
            for (std::size_t j = 0; j < b.cols(); ++j) c(i, j) = c(i, j) + f * b(k, j);
        }
    return c;
}

template <class S>
std::optional<Mat<S>> invert(const Mat<S>& a) {
    if (a.rows() != a.cols()) throw semantic_error("invert: not square");
    const std::size_t n = a.rows();
    Mat<S> aug(n, 2 * n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) aug(i, j) = a(i, j);
        aug(i, n + i) = S(1);
    }
    const auto pivots = rref(aug);
    if (pivots.size() != n || pivots.back() != n - 1) return std::nullopt;
    Mat<S> inv(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) inv(i, j) = aug(i, n + j);
    return inv;
}

inline Mat<double> to_double(const Mat<Rational>& m) {
    Mat<double> d(m.rows(), m.cols());
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j) d(i, j) = to_double(m(i, j));
    return d;
}

} // namespace carnot
