#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <vector>

#include "wvnn/complexmat.hpp"
#include "wvnn/error.hpp"

namespace wvnn {

namespace detail {

inline constexpr double kEps = 2.220446049250313e-16;

/// Deterministic ordering for spectra: lexicographic by (re, im).
inline void sort_spectrum(std::vector<Complex>& v) {
    std::sort(v.begin(), v.end(), [](Complex a, Complex b) {
        if (a.real() != b.real()) return a.real() < b.real();
        return a.imag() < b.imag();
    });
}

/// Guarded Newton polish on a monic polynomial given by its coefficients
/// (coeffs[k] multiplies lambda^k, coeffs.back() == 1). Falls back to the
/// multiplicity-2 step 2p/p' when the plain step stalls on a double root.
inline Complex polish_root(const std::vector<Complex>& coeffs, Complex z, int steps, double scale) {
    auto eval = [&](Complex x, Complex& dp) {
        Complex p = coeffs.back();
        dp = 0.0;
        for (std::size_t k = coeffs.size() - 1; k-- > 0;) {
            dp = dp * x + p;
            p = p * x + coeffs[k];
        }
        return p;
    };
    for (int s = 0; s < steps; ++s) {
        Complex dp;
        const Complex p = eval(z, dp);
        if (std::abs(p) == 0.0) break;
        if (std::abs(dp) < 1e-14 * scale) break;
        const Complex z1 = z - p / dp;
        Complex dp1;
        const Complex p1 = eval(z1, dp1);
        if (std::abs(p1) <= 0.1 * std::abs(p)) {
            z = z1;
            continue;
        }
        // plain step stalled: assume multiplicity 2
        const Complex z2 = z - 2.0 * p / dp;
        Complex dp2;
        const Complex p2 = eval(z2, dp2);
        z = (std::abs(p2) < std::abs(p1)) ? z2 : z1;
    }
    return z;
}

inline Complex complex_cbrt(Complex z) {
    // principal branch
    const double r = std::abs(z);
    if (r == 0.0) return 0.0;
    return std::polar(std::cbrt(r), std::arg(z) / 3.0);
}

/// Roots computed from polynomial coefficients locate a multiple root only to
/// O(sqrt(eps)). A cluster straddles the true value, and the exact root sum
/// (the trace) pins it down: assign the cluster the sum left over after the
/// well-conditioned isolated roots. Pairs closer than 1e-7 * scale are
/// numerically indistinguishable from multiple roots at this precision.
inline void merge_root_clusters(std::vector<Complex>& roots, Complex root_sum) {
    double scale = 0.0;
    for (const Complex& z : roots) scale = std::max(scale, std::abs(z));
    const double tau = 1e-7 * std::max(scale, 1e-300);
    for (std::size_t i = 0; i < roots.size(); ++i) {
        std::vector<std::size_t> cluster{i};
        for (std::size_t j = i + 1; j < roots.size(); ++j)
            if (std::abs(roots[j] - roots[i]) <= tau) cluster.push_back(j);
        if (cluster.size() < 2) continue;
        Complex rest = root_sum;
        for (std::size_t k = 0; k < roots.size(); ++k) {
            bool in_cluster = false;
            for (std::size_t c : cluster) in_cluster |= (c == k);
            if (!in_cluster) rest -= roots[k];
        }
        rest /= static_cast<double>(cluster.size());
        for (std::size_t k : cluster) roots[k] = rest;
    }
}

}  // namespace detail

/// Roots of the characteristic polynomial for dim 2 and 3 via the closed-form
/// quadratic / Cardano cubic in complex arithmetic, refined by at most two
/// guarded Newton steps. Result sorted lexicographically by (re, im).
inline std::vector<Complex> eigvals_closed(const CMatrix& m) {
    const std::size_t n = m.dim();
    if (n != 2 && n != 3)
        throw Error(Errc::unsupported_dimension, "eigvals_closed supports dim 2 and 3 only",
                    static_cast<double>(n));

    std::vector<Complex> out;
    Complex tr_for_merge;
    if (n == 2) {
        const Complex tr = m(0, 0) + m(1, 1);
        tr_for_merge = tr;
        const Complex ad = m(0, 0) * m(1, 1), bc = m(0, 1) * m(1, 0);
        const Complex det = ad - bc;
        if (std::abs(det) <= 64.0 * detail::kEps * (std::abs(ad) + std::abs(bc))) {
            // determinant is pure cancellation: the matrix is numerically
            // singular and the spectrum is {0, trace} exactly
            out = {Complex{0.0}, tr};
        } else {
            const Complex half = tr / 2.0;
            const Complex disc = std::sqrt(half * half - det);
            out = {half + disc, half - disc};
            const std::vector<Complex> coeffs = {det, -tr, 1.0};
            const double scale = std::max(1.0, std::abs(tr) + std::abs(det));
            for (Complex& z : out) z = detail::polish_root(coeffs, z, 2, scale);
        }
    } else {
        // p(l) = l^3 - tr l^2 + c1 l - det, c1 = sum of principal 2x2 minors
        const Complex tr = trace(m);
        tr_for_merge = tr;
        double c1_mag = 0.0, det_mag = 0.0;
        Complex c1 = 0.0, det = 0.0;
        {
            const Complex mm[3] = {m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0),
                                   m(0, 0) * m(2, 2) - m(0, 2) * m(2, 0),
                                   m(1, 1) * m(2, 2) - m(1, 2) * m(2, 1)};
            for (const Complex& z : mm) c1 += z;
            c1_mag = std::abs(m(0, 0) * m(1, 1)) + std::abs(m(0, 1) * m(1, 0)) +
                     std::abs(m(0, 0) * m(2, 2)) + std::abs(m(0, 2) * m(2, 0)) +
                     std::abs(m(1, 1) * m(2, 2)) + std::abs(m(1, 2) * m(2, 1));
            const Complex dt[3] = {m(0, 0) * (m(1, 1) * m(2, 2) - m(1, 2) * m(2, 1)),
                                   -m(0, 1) * (m(1, 0) * m(2, 2) - m(1, 2) * m(2, 0)),
                                   m(0, 2) * (m(1, 0) * m(2, 1) - m(1, 1) * m(2, 0))};
            for (const Complex& z : dt) det += z;
            // cancellation scale from the six raw monomials, not the minors
            det_mag = std::abs(m(0, 0) * m(1, 1) * m(2, 2)) + std::abs(m(0, 0) * m(1, 2) * m(2, 1)) +
                      std::abs(m(0, 1) * m(1, 0) * m(2, 2)) + std::abs(m(0, 1) * m(1, 2) * m(2, 0)) +
                      std::abs(m(0, 2) * m(1, 0) * m(2, 1)) + std::abs(m(0, 2) * m(1, 1) * m(2, 0));
        }
        const bool det_cancels = std::abs(det) <= 64.0 * detail::kEps * det_mag;
        const bool c1_cancels = std::abs(c1) <= 64.0 * detail::kEps * c1_mag;
        if (det_cancels && c1_cancels) {
            // numerically rank <= 1: spectrum {0, 0, trace}
            out = {Complex{0.0}, Complex{0.0}, tr};
            detail::sort_spectrum(out);
            return out;
        }
        if (det_cancels) {
            // numerically singular: 0 plus the quadratic factor's roots
            const Complex half = tr / 2.0;
            const Complex disc = std::sqrt(half * half - c1);
            out = {Complex{0.0}, half + disc, half - disc};
            detail::merge_root_clusters(out, tr);
            detail::sort_spectrum(out);
            return out;
        }
        // depressed cubic t^3 + p t + q with l = t + tr/3
        const Complex shift = tr / 3.0;
        const Complex p = c1 - tr * tr / 3.0;
        const Complex q = -det + c1 * shift - 2.0 * shift * shift * shift;
        const Complex sq = std::sqrt(q * q / 4.0 + p * p * p / 27.0);
        // pick the sign that avoids cancellation in u^3
        Complex u3 = -q / 2.0 + sq;
        if (std::abs(-q / 2.0 - sq) > std::abs(u3)) u3 = -q / 2.0 - sq;
        Complex t0, t1, t2;
        if (std::abs(u3) == 0.0) {
            // p == q == 0: triple root at the shift
            t0 = t1 = t2 = 0.0;
        } else {
            const Complex u = detail::complex_cbrt(u3);
            const Complex omega{-0.5, std::sqrt(3.0) / 2.0};
            const Complex u1 = u * omega, u2 = u * std::conj(omega);
            t0 = u - p / (3.0 * u);
            t1 = u1 - p / (3.0 * u1);
            t2 = u2 - p / (3.0 * u2);
        }
        out = {t0 + shift, t1 + shift, t2 + shift};
        const std::vector<Complex> coeffs = {-det, c1, -tr, 1.0};
        const double scale = std::max({1.0, std::abs(tr), std::abs(c1), std::abs(det)});
        for (Complex& z : out) z = detail::polish_root(coeffs, z, 2, scale);
    }
    detail::merge_root_clusters(out, tr_for_merge);
    detail::sort_spectrum(out);
    return out;
}

namespace detail {

struct Givens {
    double c;   // real
    Complex s;  // G = [[c, s], [-conj(s), c]] applied to rows (i, i+1)
};

inline Givens make_givens(Complex a, Complex b) {
    const double na = std::abs(a), nb = std::abs(b);
    if (nb == 0.0) return {1.0, 0.0};
    const double r = std::hypot(na, nb);
    if (na == 0.0) return {0.0, std::conj(b) / nb};
    const Complex phase = a / na;
    return {na / r, phase * std::conj(b) / r};
}

/// Householder reduction to upper Hessenberg form (in place).
inline void hessenberg(CMatrix& h) {
    const std::size_t n = h.dim();
    for (std::size_t k = 0; k + 2 < n; ++k) {
        double colnorm = 0.0;
        for (std::size_t i = k + 1; i < n; ++i) colnorm += std::norm(h(i, k));
        colnorm = std::sqrt(colnorm);
        if (colnorm <= 1e-300) continue;
        Complex alpha = h(k + 1, k);
        const double aa = std::abs(alpha);
        const Complex phase = (aa == 0.0) ? Complex{1.0} : alpha / aa;
        const Complex beta = -phase * colnorm;
        // v = x - beta e1, H = I - 2 v v^dag / |v|^2
        std::vector<Complex> v(n - k - 1);
        v[0] = h(k + 1, k) - beta;
        for (std::size_t i = k + 2; i < n; ++i) v[i - k - 1] = h(i, k);
        double vn2 = 0.0;
        for (const Complex& z : v) vn2 += std::norm(z);
        if (vn2 <= 1e-300) continue;
        // apply from the left: rows k+1..n-1
        for (std::size_t c = k; c < n; ++c) {
            Complex dot = 0.0;
            for (std::size_t i = 0; i < v.size(); ++i) dot += std::conj(v[i]) * h(k + 1 + i, c);
            dot *= 2.0 / vn2;
            for (std::size_t i = 0; i < v.size(); ++i) h(k + 1 + i, c) -= dot * v[i];
        }
        // apply from the right: cols k+1..n-1
        for (std::size_t r = 0; r < n; ++r) {
            Complex dot = 0.0;
            for (std::size_t i = 0; i < v.size(); ++i) dot += h(r, k + 1 + i) * v[i];
            dot *= 2.0 / vn2;
            for (std::size_t i = 0; i < v.size(); ++i) h(r, k + 1 + i) -= dot * std::conj(v[i]);
        }
        for (std::size_t i = k + 2; i < n; ++i) h(i, k) = 0.0;
        h(k + 1, k) = beta;
    }
}

inline std::array<Complex, 2> eig2x2(Complex a, Complex b, Complex c, Complex d) {
    const Complex ad = a * d, bc = b * c;
    const Complex det = ad - bc;
    if (std::abs(det) <= 64.0 * kEps * (std::abs(ad) + std::abs(bc)))
        return {a + d, Complex{0.0}};
    const Complex half = (a + d) / 2.0;
    const Complex disc = std::sqrt(half * half - det);
    return {half + disc, half - disc};
}

}  // namespace detail

/// Eigenvalues via Hessenberg reduction plus explicit Wilkinson-shifted QR
/// iteration (complex Givens rotations). `max_iter < 0` selects the default
/// budget of 100 * dim total steps. Result sorted lexicographically.
inline std::vector<Complex> eigvals_qr(const CMatrix& m, double tol = 1e-12, int max_iter = -1) {
    const std::size_t n = m.dim();
    if (max_iter < 0) max_iter = static_cast<int>(100 * n);
    std::vector<Complex> out;
    out.reserve(n);
    if (n == 1) return {m(0, 0)};

    CMatrix h = m;
    detail::hessenberg(h);

    std::size_t hi = n - 1;
    int iter = 0;
    while (true) {
        // deflate negligible subdiagonals
        for (std::size_t i = 0; i < hi; ++i) {
            const double small = tol * (std::abs(h(i, i)) + std::abs(h(i + 1, i + 1)) + 1e-300);
            if (std::abs(h(i + 1, i)) <= small) h(i + 1, i) = 0.0;
        }
        while (hi > 0 && h(hi, hi - 1) == Complex{}) {
            out.push_back(h(hi, hi));
            --hi;
        }
        if (hi == 0) {
            out.push_back(h(0, 0));
            break;
        }
        // active block [lo, hi]
        std::size_t lo = hi;
        while (lo > 0 && h(lo, lo - 1) != Complex{}) --lo;
        if (hi - lo == 1) {
            const auto ev = detail::eig2x2(h(lo, lo), h(lo, hi), h(hi, lo), h(hi, hi));
            out.push_back(ev[0]);
            out.push_back(ev[1]);
            if (lo == 0) break;
            hi = lo - 1;
            continue;
        }
        if (iter++ >= max_iter) {
            throw Error(Errc::iteration_failure,
                        "QR failed to converge after " + std::to_string(max_iter) +
                            " steps; deflated " + std::to_string(out.size()) + " of " +
                            std::to_string(n) + " eigenvalues",
                        static_cast<double>(out.size()));
        }
        // Wilkinson shift: trailing 2x2 eigenvalue closest to h(hi, hi)
        const auto ev =
            detail::eig2x2(h(hi - 1, hi - 1), h(hi - 1, hi), h(hi, hi - 1), h(hi, hi));
        const Complex mu = (std::abs(ev[0] - h(hi, hi)) < std::abs(ev[1] - h(hi, hi))) ? ev[0]
                                                                                       : ev[1];
        // explicit shifted QR step on the active block: H - mu I = Q R, H <- R Q + mu I
        for (std::size_t i = lo; i <= hi; ++i) h(i, i) -= mu;
        std::vector<detail::Givens> rot(hi - lo);
        for (std::size_t i = lo; i < hi; ++i) {
            const auto g = detail::make_givens(h(i, i), h(i + 1, i));
            rot[i - lo] = g;
            for (std::size_t c = i; c <= hi; ++c) {
                const Complex x = h(i, c), y = h(i + 1, c);
                h(i, c) = g.c * x + g.s * y;
                h(i + 1, c) = -std::conj(g.s) * x + g.c * y;
            }
            h(i + 1, i) = 0.0;
        }
        for (std::size_t i = lo; i < hi; ++i) {
            const auto& g = rot[i - lo];
            const std::size_t top = lo;
            for (std::size_t r = top; r <= std::min(hi, i + 1); ++r) {
                const Complex x = h(r, i), y = h(r, i + 1);
                h(r, i) = x * g.c + y * std::conj(g.s);
                h(r, i + 1) = -x * g.s + y * g.c;
            }
        }
        for (std::size_t i = lo; i <= hi; ++i) h(i, i) += mu;
    }
    detail::sort_spectrum(out);
    return out;
}

/// Closed-form route for dim <= 3, QR otherwise.
inline std::vector<Complex> eigvals(const CMatrix& m) {
    if (m.dim() == 1) return {m(0, 0)};
    if (m.dim() <= 3) return eigvals_closed(m);
    return eigvals_qr(m);
}

/// Greedy minimal-distance matching between two spectra of equal size;
/// returns the largest matched pair distance. Adequate for well-separated
/// spectra (clustered spectra may be matched suboptimally).
inline double spectra_match_distance(std::vector<Complex> a, std::vector<Complex> b) {
    require_same_dim(a.size(), b.size());
    double worst = 0.0;
    while (!a.empty()) {
        std::size_t bi = 0, bj = 0;
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < a.size(); ++i)
            for (std::size_t j = 0; j < b.size(); ++j) {
                const double d = std::abs(a[i] - b[j]);
                if (d < best) {
                    best = d;
                    bi = i;
                    bj = j;
                }
            }
        worst = std::max(worst, best);
        a.erase(a.begin() + static_cast<std::ptrdiff_t>(bi));
        b.erase(b.begin() + static_cast<std::ptrdiff_t>(bj));
    }
    return worst;
}

struct HermitianEigen {
    std::vector<double> values;  // ascending
    CMatrix vectors;             // columns are the corresponding unit eigenvectors
};

/// Cyclic Jacobi for complex Hermitian matrices. Used where eigenvectors are
/// required (observable spectra cross-checks, meter eigenbasis decomposition).
inline HermitianEigen hermitian_eigen(const CMatrix& m, double tol = 1e-14, int max_sweeps = 60) {
    const std::size_t n = m.dim();
    CMatrix a = m;
    CMatrix v = CMatrix::identity(n);
    const double scale = std::max(frobenius_norm(a), 1e-300);

    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
        double off = 0.0;
        for (std::size_t p = 0; p < n; ++p)
            for (std::size_t q = p + 1; q < n; ++q) off += std::norm(a(p, q));
        if (std::sqrt(off) <= tol * scale) break;
        for (std::size_t p = 0; p < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const Complex apq = a(p, q);
                if (std::abs(apq) <= 1e-300) continue;
                const double app = a(p, p).real(), aqq = a(q, q).real();
                const Complex phase = apq / std::abs(apq);
                const double g = std::abs(apq);
                // zero A'_pq: t^2 - 2 tau t - 1 = 0, small-magnitude root
                const double tau = (aqq - app) / (2.0 * g);
                const double t = (tau >= 0.0) ? -1.0 / (tau + std::sqrt(1.0 + tau * tau))
                                              : -1.0 / (tau - std::sqrt(1.0 + tau * tau));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const Complex s = t * c * std::conj(phase);  // J = [[c, -conj(s)], [s, c]]
                for (std::size_t r = 0; r < n; ++r) {
                    const Complex arp = a(r, p), arq = a(r, q);
                    a(r, p) = c * arp + s * arq;
                    a(r, q) = -std::conj(s) * arp + c * arq;
                    const Complex vrp = v(r, p), vrq = v(r, q);
                    v(r, p) = c * vrp + s * vrq;
                    v(r, q) = -std::conj(s) * vrp + c * vrq;
                }
                for (std::size_t cidx = 0; cidx < n; ++cidx) {
                    const Complex apc = a(p, cidx), aqc = a(q, cidx);
                    a(p, cidx) = c * apc + std::conj(s) * aqc;
                    a(q, cidx) = -s * apc + c * aqc;
                }
            }
        }
    }

    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    std::sort(order.begin(), order.end(),
              [&](std::size_t i, std::size_t j) { return a(i, i).real() < a(j, j).real(); });

    HermitianEigen out;
    out.values.resize(n);
    out.vectors = CMatrix(n);
    for (std::size_t k = 0; k < n; ++k) {
        out.values[k] = a(order[k], order[k]).real();
        for (std::size_t r = 0; r < n; ++r) out.vectors(r, k) = v(r, order[k]);
    }
    return out;
}

}  // namespace wvnn
