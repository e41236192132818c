#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <vector>

#include "parqkd/errors.hpp"

namespace parqkd {

using cplx = std::complex<double>;

/// Dense column-major matrix. Everything here runs at dimension 16 or below,
/// so no attempt is made at blocking or sparsity.
template <typename T>
class basic_matrix {
public:
    basic_matrix() : rows_(0), cols_(0) {}
    basic_matrix(std::size_t rows, std::size_t cols)
        : rows_(rows), cols_(cols), data_(rows * cols, T{}) {}

    static basic_matrix identity(std::size_t n) {
        basic_matrix m(n, n);
        for (std::size_t i = 0; i < n; ++i) m(i, i) = T{1};
        return m;
    }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

    T& operator()(std::size_t r, std::size_t c) { return data_[r + c * rows_]; }
    const T& operator()(std::size_t r, std::size_t c) const { return data_[r + c * rows_]; }

    friend basic_matrix operator+(const basic_matrix& a, const basic_matrix& b) {
        basic_matrix out(a.rows_, a.cols_);
        for (std::size_t i = 0; i < a.data_.size(); ++i) out.data_[i] = a.data_[i] + b.data_[i];
        return out;
    }
    friend basic_matrix operator-(const basic_matrix& a, const basic_matrix& b) {
        basic_matrix out(a.rows_, a.cols_);
        for (std::size_t i = 0; i < a.data_.size(); ++i) out.data_[i] = a.data_[i] - b.data_[i];
        return out;
    }
    friend basic_matrix operator*(const T& s, const basic_matrix& a) {
        basic_matrix out(a.rows_, a.cols_);
        for (std::size_t i = 0; i < a.data_.size(); ++i) out.data_[i] = s * a.data_[i];
        return out;
    }
    friend basic_matrix operator*(const basic_matrix& a, const basic_matrix& b) {
        basic_matrix out(a.rows_, b.cols_);
        for (std::size_t c = 0; c < b.cols_; ++c)
            for (std::size_t k = 0; k < a.cols_; ++k) {
                const T f = b(k, c);
                for (std::size_t r = 0; r < a.rows_; ++r) out(r, c) += a(r, k) * f;
            }
        return out;
    }

    basic_matrix adjoint() const {
        basic_matrix out(cols_, rows_);
        for (std::size_t c = 0; c < cols_; ++c)
            for (std::size_t r = 0; r < rows_; ++r) out(c, r) = std::conj((*this)(r, c));
        return out;
    }

    basic_matrix transpose() const {
        basic_matrix out(cols_, rows_);
        for (std::size_t c = 0; c < cols_; ++c)
            for (std::size_t r = 0; r < rows_; ++r) out(c, r) = (*this)(r, c);
        return out;
    }

    T trace() const {
        T t{};
        for (std::size_t i = 0; i < rows_; ++i) t += (*this)(i, i);
        return t;
    }

    double max_abs() const {
        double m = 0.0;
        for (const T& v : data_) m = std::max(m, std::abs(v));
        return m;
    }

private:
    std::size_t rows_, cols_;
    std::vector<T> data_;
};

using cmat = basic_matrix<cplx>;

inline cmat kron(const cmat& a, const cmat& b) {
    cmat out(a.rows() * b.rows(), a.cols() * b.cols());
    for (std::size_t ac = 0; ac < a.cols(); ++ac)
        for (std::size_t ar = 0; ar < a.rows(); ++ar) {
            const cplx f = a(ar, ac);
            if (f == cplx{}) continue;
            for (std::size_t bc = 0; bc < b.cols(); ++bc)
                for (std::size_t br = 0; br < b.rows(); ++br)
                    out(ar * b.rows() + br, ac * b.cols() + bc) = f * b(br, bc);
        }
    return out;
}

/// Tr[op * rho] without forming the product.
inline cplx trace_product(const cmat& op, const cmat& rho) {
    cplx t{};
    for (std::size_t c = 0; c < op.cols(); ++c)
        for (std::size_t r = 0; r < op.rows(); ++r) t += op(r, c) * rho(c, r);
    return t;
}

inline double hermiticity_defect(const cmat& m) { return (m - m.adjoint()).max_abs(); }

/// Eigenvalues of a Hermitian matrix by cyclic complex Jacobi sweeps.
inline std::vector<double> hermitian_eigenvalues(cmat a) {
    const std::size_t n = a.rows();
    if (a.cols() != n) throw domain_error("hermitian_eigenvalues: matrix not square");
    for (int sweep = 0; sweep < 100; ++sweep) {
        double off = 0.0;
        for (std::size_t p = 0; p < n; ++p)
            for (std::size_t q = p + 1; q < n; ++q) off = std::max(off, std::abs(a(p, q)));
        if (off < 1e-14) break;
        for (std::size_t p = 0; p < n; ++p)
            for (std::size_t q = p + 1; q < n; ++q) {
                const cplx apq = a(p, q);
                if (std::abs(apq) < 1e-300) continue;
                const double app = a(p, p).real();
                const double aqq = a(q, q).real();
                // Unitary 2x2 rotation [c, s; -conj(s), c] zeroing a(p,q).
                const double theta = 0.5 * std::atan2(2.0 * std::abs(apq), app - aqq);
                const cplx phase = apq / std::abs(apq);
                const double c = std::cos(theta);
                const cplx s = std::sin(theta) * phase;
                for (std::size_t k = 0; k < n; ++k) {
                    const cplx akp = a(k, p), akq = a(k, q);
                    a(k, p) = c * akp + std::conj(s) * akq;
                    a(k, q) = -s * akp + c * akq;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const cplx apk = a(p, k), aqk = a(q, k);
                    a(p, k) = c * apk + s * aqk;
                    a(q, k) = -std::conj(s) * apk + c * aqk;
                }
            }
    }
    std::vector<double> eig(n);
    for (std::size_t i = 0; i < n; ++i) eig[i] = a(i, i).real();
    std::sort(eig.begin(), eig.end());
    return eig;
}

} // namespace parqkd
