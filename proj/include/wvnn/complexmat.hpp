#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <initializer_list>
#include <vector>

#include "wvnn/error.hpp"

namespace wvnn {

using Complex = std::complex<double>;

inline constexpr Complex kImaginaryUnit{0.0, 1.0};

inline bool finite(Complex z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); }

/// Dense complex column vector. Entries are validated finite on construction;
/// values are immutable-by-convention (operations return fresh vectors).
class CVector {
  public:
    CVector() = default;

    explicit CVector(std::size_t dim) : e_(check_dim(dim)) {}

    CVector(std::initializer_list<Complex> entries) : e_(entries) {
        check_dim(e_.size());
        check_entries();
    }

    static CVector from_entries(std::vector<Complex> entries) {
        CVector v;
        v.e_ = std::move(entries);
        check_dim(v.e_.size());
        v.check_entries();
        return v;
    }

    std::size_t dim() const { return e_.size(); }
    Complex& operator[](std::size_t i) { return e_[i]; }
    const Complex& operator[](std::size_t i) const { return e_[i]; }

    auto begin() const { return e_.begin(); }
    auto end() const { return e_.end(); }

    double norm_sq() const {
        double s = 0.0;
        for (const Complex& z : e_) s += std::norm(z);
        return s;
    }
    double norm() const { return std::sqrt(norm_sq()); }

    CVector normalized() const {
        double n = norm();
        if (n == 0.0) throw Error(Errc::degenerate_input, "cannot normalize the zero vector");
        CVector out(dim());
        for (std::size_t i = 0; i < dim(); ++i) out[i] = e_[i] / n;
        return out;
    }

  private:
    static std::size_t check_dim(std::size_t d) {
        if (d < 1) throw Error(Errc::invalid_argument, "vector dimension must be >= 1");
        return d;
    }
    void check_entries() const {
        for (const Complex& z : e_)
            if (!finite(z)) throw Error(Errc::invalid_argument, "non-finite vector entry");
    }

    std::vector<Complex> e_;
};

/// Dense square complex matrix, row-major.
class CMatrix {
  public:
    CMatrix() = default;

    explicit CMatrix(std::size_t dim) : n_(check_dim(dim)), e_(dim * dim) {}

    /// Row-major construction from nested braces.
    CMatrix(std::initializer_list<std::initializer_list<Complex>> rows) {
        n_ = check_dim(rows.size());
        e_.reserve(n_ * n_);
        for (const auto& row : rows) {
            if (row.size() != n_) throw Error(Errc::invalid_argument, "matrix must be square");
            for (const Complex& z : row) e_.push_back(z);
        }
        check_entries();
    }

    static CMatrix from_entries(std::size_t dim, std::vector<Complex> entries) {
        if (entries.size() != dim * dim)
            throw Error(Errc::invalid_argument, "entry count does not match dimension");
        CMatrix m;
        m.n_ = check_dim(dim);
        m.e_ = std::move(entries);
        m.check_entries();
        return m;
    }

    static CMatrix identity(std::size_t dim) {
        CMatrix m(dim);
        for (std::size_t i = 0; i < dim; ++i) m(i, i) = 1.0;
        return m;
    }

    std::size_t dim() const { return n_; }
    Complex& operator()(std::size_t r, std::size_t c) { return e_[r * n_ + c]; }
    const Complex& operator()(std::size_t r, std::size_t c) const { return e_[r * n_ + c]; }

  private:
    static std::size_t check_dim(std::size_t d) {
        if (d < 1) throw Error(Errc::invalid_argument, "matrix dimension must be >= 1");
        return d;
    }
    void check_entries() const {
        for (const Complex& z : e_)
            if (!finite(z)) throw Error(Errc::invalid_argument, "non-finite matrix entry");
    }

    std::size_t n_ = 0;
    std::vector<Complex> e_;
};

inline void require_same_dim(std::size_t a, std::size_t b) {
    if (a != b) throw Error(Errc::dimension_mismatch, "operand dimensions differ");
}

/// <a|b> = sum conj(a_i) b_i, conjugate-linear in the first argument.
inline Complex inner(const CVector& a, const CVector& b) {
    require_same_dim(a.dim(), b.dim());
    Complex s = 0.0;
    for (std::size_t i = 0; i < a.dim(); ++i) s += std::conj(a[i]) * b[i];
    return s;
}

/// |u><v| (rank-1).
inline CMatrix outer(const CVector& u, const CVector& v) {
    require_same_dim(u.dim(), v.dim());
    CMatrix m(u.dim());
    for (std::size_t r = 0; r < u.dim(); ++r)
        for (std::size_t c = 0; c < u.dim(); ++c) m(r, c) = u[r] * std::conj(v[c]);
    return m;
}

inline CMatrix operator*(const CMatrix& a, const CMatrix& b) {
    require_same_dim(a.dim(), b.dim());
    const std::size_t n = a.dim();
    CMatrix out(n);
    for (std::size_t r = 0; r < n; ++r)
        for (std::size_t k = 0; k < n; ++k) {
            const Complex ark = a(r, k);
            if (ark == Complex{}) continue;
            for (std::size_t c = 0; c < n; ++c) out(r, c) += ark * b(k, c);
        }
    return out;
}

inline CVector operator*(const CMatrix& a, const CVector& x) {
    require_same_dim(a.dim(), x.dim());
    CVector out(a.dim());
    for (std::size_t r = 0; r < a.dim(); ++r) {
        Complex s = 0.0;
        for (std::size_t c = 0; c < a.dim(); ++c) s += a(r, c) * x[c];
        out[r] = s;
    }
    return out;
}

inline CMatrix operator*(Complex s, const CMatrix& a) {
    CMatrix out(a.dim());
    for (std::size_t r = 0; r < a.dim(); ++r)
        for (std::size_t c = 0; c < a.dim(); ++c) out(r, c) = s * a(r, c);
    return out;
}

inline CMatrix operator+(const CMatrix& a, const CMatrix& b) {
    require_same_dim(a.dim(), b.dim());
    CMatrix out(a.dim());
    for (std::size_t r = 0; r < a.dim(); ++r)
        for (std::size_t c = 0; c < a.dim(); ++c) out(r, c) = a(r, c) + b(r, c);
    return out;
}

inline CMatrix operator-(const CMatrix& a, const CMatrix& b) {
    require_same_dim(a.dim(), b.dim());
    CMatrix out(a.dim());
    for (std::size_t r = 0; r < a.dim(); ++r)
        for (std::size_t c = 0; c < a.dim(); ++c) out(r, c) = a(r, c) - b(r, c);
    return out;
}

inline Complex trace(const CMatrix& m) {
    Complex s = 0.0;
    for (std::size_t i = 0; i < m.dim(); ++i) s += m(i, i);
    return s;
}

/// (M^dagger)_ij = conj(M_ji); an involution.
inline CMatrix adjoint(const CMatrix& m) {
    CMatrix out(m.dim());
    for (std::size_t r = 0; r < m.dim(); ++r)
        for (std::size_t c = 0; c < m.dim(); ++c) out(r, c) = std::conj(m(c, r));
    return out;
}

/// sqrt(sum |m_ij|^2).
inline double frobenius_norm(const CMatrix& m) {
    double s = 0.0;
    for (std::size_t r = 0; r < m.dim(); ++r)
        for (std::size_t c = 0; c < m.dim(); ++c) s += std::norm(m(r, c));
    return std::sqrt(s);
}

/// ||M M^dagger - M^dagger M||_F; zero iff M is normal.
inline double normality_defect(const CMatrix& m) {
    const CMatrix md = adjoint(m);
    return frobenius_norm(m * md - md * m);
}

}  // namespace wvnn
