#pragma once

// Square complex matrix stored by diagonals. Every operator of the truncated
// oscillator used here (ladder operators and polynomials of degree <= 4 in them)
// is banded with half-width <= 4, so this is exact storage, not an approximation.

#include <algorithm>
#include <cassert>
#include <complex>
#include <span>
#include <vector>

namespace qduffing {

/// Plain complex product. std::complex operator* carries the C99 Annex G
/// inf/nan recovery path, which blocks vectorisation in the hot loops.
inline std::complex<double> cmul(std::complex<double> a, std::complex<double> b) {
    return {a.real() * b.real() - a.imag() * b.imag(), a.real() * b.imag() + a.imag() * b.real()};
}

class BandedMatrix {
public:
    using value_type = std::complex<double>;

    BandedMatrix() = default;
    BandedMatrix(int n, int lower, int upper)
        : n_(n), lower_(lower), upper_(upper), data_(static_cast<std::size_t>(n) * (lower + upper + 1)) {}

    int size() const { return n_; }
    int lower() const { return lower_; }
    int upper() const { return upper_; }

    bool in_band(int row, int col) const {
        const int d = col - row;
        return row >= 0 && col >= 0 && row < n_ && col < n_ && d >= -lower_ && d <= upper_;
    }

    value_type& at(int row, int col) {
        assert(in_band(row, col));
        return data_[slot(col - row) + row];
    }

    value_type operator()(int row, int col) const {
        return in_band(row, col) ? data_[slot(col - row) + row] : value_type{};
    }

    /// Entries A(i, i + offset) indexed by row i; valid rows are those with 0 <= i + offset < n.
    std::span<const value_type> diagonal(int offset) const {
        return {data_.data() + slot(offset), static_cast<std::size_t>(n_)};
    }

    /// y += alpha * A x
    void apply_add(value_type alpha, std::span<const value_type> x, std::span<value_type> y) const {
        assert(static_cast<int>(x.size()) == n_ && static_cast<int>(y.size()) == n_);
        for (int d = -lower_; d <= upper_; ++d) {
            const value_type* diag = data_.data() + slot(d);
            const int lo = std::max(0, -d);
            const int hi = std::min(n_, n_ - d);
            if (alpha == value_type(1.0)) {
                for (int i = lo; i < hi; ++i) y[i] += cmul(diag[i], x[i + d]);
            } else {
                for (int i = lo; i < hi; ++i) y[i] += cmul(alpha, cmul(diag[i], x[i + d]));
            }
        }
    }

    void apply(std::span<const value_type> x, std::span<value_type> y) const {
        std::fill(y.begin(), y.end(), value_type{});
        apply_add(1.0, x, y);
    }

    BandedMatrix adjoint() const {
        BandedMatrix out(n_, upper_, lower_);
        for (int i = 0; i < n_; ++i)
            for (int d = -lower_; d <= upper_; ++d)
                if (in_band(i, i + d)) out.at(i + d, i) = std::conj((*this)(i, i + d));
        return out;
    }

    friend BandedMatrix operator*(const BandedMatrix& a, const BandedMatrix& b) {
        assert(a.n_ == b.n_);
        BandedMatrix out(a.n_, a.lower_ + b.lower_, a.upper_ + b.upper_);
        for (int i = 0; i < a.n_; ++i)
            for (int k = i - a.lower_; k <= i + a.upper_; ++k) {
                if (!a.in_band(i, k)) continue;
                const value_type aik = a(i, k);
                for (int j = k - b.lower_; j <= k + b.upper_; ++j)
                    if (b.in_band(k, j)) out.at(i, j) += aik * b(k, j);
            }
        return out;
    }

    friend BandedMatrix operator+(const BandedMatrix& a, const BandedMatrix& b) { return combine(1.0, a, 1.0, b); }
    friend BandedMatrix operator-(const BandedMatrix& a, const BandedMatrix& b) { return combine(1.0, a, -1.0, b); }
    friend BandedMatrix operator*(value_type s, const BandedMatrix& a) { return combine(s, a, 0.0, a); }

    /// Row-major dense copy, for tests and small diagnostics.
    std::vector<value_type> to_dense() const {
        std::vector<value_type> out(static_cast<std::size_t>(n_) * n_);
        for (int i = 0; i < n_; ++i)
            for (int j = std::max(0, i - lower_); j <= std::min(n_ - 1, i + upper_); ++j)
                out[static_cast<std::size_t>(i) * n_ + j] = (*this)(i, j);
        return out;
    }

private:
    std::size_t slot(int offset) const { return static_cast<std::size_t>(offset + lower_) * n_; }

    static BandedMatrix combine(value_type sa, const BandedMatrix& a, value_type sb, const BandedMatrix& b) {
        assert(a.n_ == b.n_);
        BandedMatrix out(a.n_, std::max(a.lower_, b.lower_), std::max(a.upper_, b.upper_));
        for (int i = 0; i < a.n_; ++i)
            for (int j = i - out.lower_; j <= i + out.upper_; ++j)
                if (out.in_band(i, j)) out.at(i, j) = sa * a(i, j) + sb * b(i, j);
        return out;
    }

    int n_ = 0;
    int lower_ = 0;
    int upper_ = 0;
    std::vector<value_type> data_;
};

}  // namespace qduffing
