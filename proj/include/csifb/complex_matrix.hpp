#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <vector>

#include "csifb/errors.hpp"

namespace csifb {

using cplx = std::complex<double>;

// Dense complex matrix, row-major. Small sizes only (the whole codebase
// works on per-subcarrier channel and beamforming matrices of side <= 8).
class ComplexMatrix {
  public:
    ComplexMatrix() = default;
    ComplexMatrix(std::size_t rows, std::size_t cols)
        : rows_(rows), cols_(cols), e_(rows * cols) {
        if (rows == 0 || cols == 0) throw InvalidInputError("matrix dimensions must be >= 1");
    }

    static ComplexMatrix identity(std::size_t n) {
        ComplexMatrix m(n, n);
        for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
        return m;
    }

    // Nt x Ns identity padded with zero rows (the I_{Nt x Ns} of the
    // Givens reconstruction).
    static ComplexMatrix identity_padded(std::size_t rows, std::size_t cols) {
        ComplexMatrix m(rows, cols);
        for (std::size_t i = 0; i < rows && i < cols; ++i) m(i, i) = 1.0;
        return m;
    }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

    cplx& operator()(std::size_t r, std::size_t c) { return e_[r * cols_ + c]; }
    const cplx& operator()(std::size_t r, std::size_t c) const { return e_[r * cols_ + c]; }

    const std::vector<cplx>& entries() const { return e_; }
    std::vector<cplx>& entries() { return e_; }

    bool finite() const {
        for (const auto& z : e_)
            if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return false;
        return true;
    }

    ComplexMatrix hermitian() const {
        ComplexMatrix m(cols_, rows_);
        for (std::size_t r = 0; r < rows_; ++r)
            for (std::size_t c = 0; c < cols_; ++c) m(c, r) = std::conj((*this)(r, c));
        return m;
    }

    ComplexMatrix operator*(const ComplexMatrix& rhs) const {
        if (cols_ != rhs.rows_) throw InvalidInputError("matrix product shape mismatch");
        ComplexMatrix out(rows_, rhs.cols_);
        for (std::size_t r = 0; r < rows_; ++r)
            for (std::size_t k = 0; k < cols_; ++k) {
                cplx a = (*this)(r, k);
                if (a == 0.0) continue;
                for (std::size_t c = 0; c < rhs.cols_; ++c) out(r, c) += a * rhs(k, c);
            }
        return out;
    }

    ComplexMatrix column(std::size_t c) const {
        ComplexMatrix v(rows_, 1);
        for (std::size_t r = 0; r < rows_; ++r) v(r, 0) = (*this)(r, c);
        return v;
    }

    double frobenius_norm_sq() const {
        double s = 0;
        for (const auto& z : e_) s += std::norm(z);
        return s;
    }

    double max_abs_diff(const ComplexMatrix& other) const {
        double m = 0;
        for (std::size_t i = 0; i < e_.size(); ++i) m = std::max(m, std::abs(e_[i] - other.e_[i]));
        return m;
    }

    bool operator==(const ComplexMatrix&) const = default;

  private:
    std::size_t rows_ = 0, cols_ = 0;
    std::vector<cplx> e_;
};

inline double column_norm(const ComplexMatrix& m, std::size_t c) {
    double s = 0;
    for (std::size_t r = 0; r < m.rows(); ++r) s += std::norm(m(r, c));
    return std::sqrt(s);
}

// <a, b> = a^H b over column c_a of a and c_b of b.
inline cplx column_dot(const ComplexMatrix& a, std::size_t ca, const ComplexMatrix& b,
                       std::size_t cb) {
    cplx s = 0;
    for (std::size_t r = 0; r < a.rows(); ++r) s += std::conj(a(r, ca)) * b(r, cb);
    return s;
}

}  // namespace csifb
