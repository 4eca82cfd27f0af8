#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

#include "wvnn/complexmat.hpp"
#include "wvnn/eig.hpp"
#include "wvnn/error.hpp"
#include "wvnn/observables.hpp"
#include "wvnn/states.hpp"

namespace wvnn {

/// Post-selections with |<psi_f|psi_i>|^2 below this are rejected: the weak
/// value diverges there and downstream sweeps mark the point as a gap.
inline constexpr double kDefaultOverlapFloor = 1e-14;

inline constexpr double kClassifyTol = 1e-9;

enum class WeakVariant { A, APrime };

namespace detail {

inline double checked_overlap_sq(const CVector& psi_f, const CVector& psi_i, double floor) {
    const double ov = std::norm(overlap(psi_f, psi_i));
    if (ov < floor)
        throw Error(Errc::near_orthogonal_postselection,
                    "post-selection overlap below floor", ov);
    return ov;
}

}  // namespace detail

/// <psi_f|O|psi_i> / <psi_f|psi_i>.
inline Complex weak_value_trace(const Observable& obs, const CVector& psi_i,
                                const CVector& psi_f,
                                double overlap_floor = kDefaultOverlapFloor) {
    detail::checked_overlap_sq(psi_f, psi_i, overlap_floor);
    return inner(psi_f, obs.matrix() * psi_i) / inner(psi_f, psi_i);
}

/// The non-normal operator behind the weak value:
/// variant A      -> O |psi_i><psi_i| / |<psi_f|psi_i>|^2
/// variant APrime -> |psi_f><psi_f| O / |<psi_f|psi_i>|^2
/// Rank 1 by construction; the single nonzero eigenvalue equals the trace.
struct WeakOperator {
    CMatrix matrix;
    WeakVariant variant;
    Observable observable;
    CVector psi_i;
    CVector psi_f;
    double overlap_sq;
    Complex nonzero_eig;
};

inline WeakOperator build_weak_operator(const Observable& obs, const CVector& psi_i,
                                        const CVector& psi_f, WeakVariant variant,
                                        double overlap_floor = kDefaultOverlapFloor) {
    const double ov = detail::checked_overlap_sq(psi_f, psi_i, overlap_floor);
    const Complex inv{1.0 / ov, 0.0};
    CMatrix m = (variant == WeakVariant::A) ? inv * (obs.matrix() * outer(psi_i, psi_i))
                                            : inv * (outer(psi_f, psi_f) * obs.matrix());
    WeakOperator w{std::move(m), variant, obs, psi_i, psi_f, ov, 0.0};
    w.nonzero_eig = trace(w.matrix);
    return w;
}

/// Henrici departure from normality, sqrt(||M||_F^2 - sum |lambda_i|^2),
/// spectral route (closed-form eigenvalues for dim <= 3, QR beyond).
inline double henrici_spectral(const CMatrix& m) {
    double s = frobenius_norm(m);
    s = s * s;
    // the departure of a normal matrix is identically zero, and the
    // commutator test certifies normality without the cancellation that
    // limits the norm difference to sqrt(eps) there
    if (normality_defect(m) <= 1e-12 * std::max(1.0, s)) return 0.0;
    for (const Complex& z : eigvals(m)) s -= std::norm(z);
    return std::sqrt(std::max(0.0, s));
}

/// Structural route: sqrt(<psi|O^2|psi> - <psi|O|psi>^2) / overlap_sq.
/// psi is the pre-selected state for variant A, the post-selected one for
/// variant A'. Tiny negative radicands (roundoff) clamp to zero.
inline double henrici_structural(const Observable& obs, const CVector& psi,
                                 double overlap_sq) {
    if (!(overlap_sq > 0.0))
        throw Error(Errc::invalid_argument, "overlap_sq must be positive", overlap_sq);
    const CVector opsi = obs.matrix() * psi;
    const double m1 = inner(psi, opsi).real();
    // <O^2> - <O>^2 evaluated as ||(O - <O>) psi||^2: same quantity, never
    // negative, and free of the cancellation that caps the naive moment
    // difference at sqrt(eps) near eigenvectors
    double radicand = 0.0;
    for (std::size_t r = 0; r < psi.dim(); ++r) radicand += std::norm(opsi[r] - m1 * psi[r]);
    if (radicand < -1e-12)
        throw Error(Errc::numerical_inconsistency, "negative uncertainty radicand", radicand);
    return std::sqrt(std::max(0.0, radicand)) / overlap_sq;
}

/// The structural numerator alone: the quantum uncertainty of O in psi,
/// i.e. the Henrici departure with the post-selection denominator removed.
inline double normalized_henrici(const Observable& obs, const CVector& psi) {
    return henrici_structural(obs, psi, 1.0);
}

// classification flags; 0 = in-range
inline constexpr unsigned kAnomalousComplex = 1u;
inline constexpr unsigned kAnomalousOutsideRange = 2u;
inline constexpr unsigned kAmplifying = 4u;

struct WeakValueReport {
    Complex value;
    double spectrum_min = 0.0;
    double spectrum_max = 0.0;
    unsigned classification = 0;
    double henrici_A = 0.0;
    double henrici_Aprime = 0.0;
    double overlap_sq = 0.0;
};

/// Anomaly flags: nonzero imaginary part, real part outside the eigenvalue
/// range, and amplification |value| > max |lambda_i|.
inline WeakValueReport classify(Complex value, const Observable& obs,
                                double tol = kClassifyTol) {
    WeakValueReport r;
    r.value = value;
    r.spectrum_min = obs.spectrum_min();
    r.spectrum_max = obs.spectrum_max();
    if (std::abs(value.imag()) > tol) r.classification |= kAnomalousComplex;
    if (value.real() > r.spectrum_max + tol || value.real() < r.spectrum_min - tol)
        r.classification |= kAnomalousOutsideRange;
    if (std::abs(value) > obs.spectrum_max_abs() + tol) r.classification |= kAmplifying;
    return r;
}

/// Full single-point report: weak value, classification, both Henrici
/// departures (computed through the structural identity) and the overlap.
inline WeakValueReport weak_value_report(const Observable& obs, const CVector& psi_i,
                                         const CVector& psi_f, double tol = kClassifyTol,
                                         double overlap_floor = kDefaultOverlapFloor) {
    const double ov = detail::checked_overlap_sq(psi_f, psi_i, overlap_floor);
    WeakValueReport r = classify(weak_value_trace(obs, psi_i, psi_f, overlap_floor), obs, tol);
    r.overlap_sq = ov;
    r.henrici_A = henrici_structural(obs, psi_i, ov);
    r.henrici_Aprime = henrici_structural(obs, psi_f, ov);
    return r;
}

struct EigenstructureReport {
    std::vector<Complex> eigenvalues;  // solver output, sorted
    double largest_abs_eig = 0.0;      // |trace|, the single nonzero eigenvalue
    double eigvec_angle = 0.0;         // Fubini-Study angle, dim 2 only (NaN otherwise)
    bool nilpotent = false;
    bool degenerate = false;
};

namespace detail {

/// Eigenvector of a 2x2 matrix for eigenvalue lambda; for a defective matrix
/// both eigenvalues yield the same direction, which is the point of the
/// degeneracy diagnostic.
inline CVector eigvec_2x2(const CMatrix& m, Complex lambda) {
    const Complex a = m(0, 0), b = m(0, 1), c = m(1, 0), d = m(1, 1);
    const CVector cand1{b, lambda - a};
    const CVector cand2{lambda - d, c};
    const double n1 = cand1.norm(), n2 = cand2.norm();
    const double scale = frobenius_norm(m) + std::abs(lambda);
    if (std::max(n1, n2) <= 1e-14 * std::max(1.0, scale)) {
        // diagonal matrix: basis vector for the matching diagonal entry
        return (std::abs(a - lambda) <= std::abs(d - lambda)) ? CVector{1.0, 0.0}
                                                              : CVector{0.0, 1.0};
    }
    return (n1 >= n2) ? cand1.normalized() : cand2.normalized();
}

}  // namespace detail

/// Rank-1 eigenstructure of a weak operator: spectrum {trace, 0, ..., 0}
/// cross-checked against the eigensolver, nilpotency and (dim 2) the
/// Fubini-Study angle between the two eigenvectors.
inline EigenstructureReport eigenstructure(const WeakOperator& w, double tol = 1e-10,
                                           double angle_tol = 1e-6) {
    EigenstructureReport r;
    r.eigenvalues = eigvals(w.matrix);

    std::vector<Complex> analytic(w.matrix.dim(), Complex{0.0});
    analytic.back() = w.nonzero_eig;
    const double scale = std::max(1.0, std::abs(w.nonzero_eig));
    const double mismatch = spectra_match_distance(r.eigenvalues, analytic);
    if (mismatch > tol * scale)
        throw Error(Errc::numerical_inconsistency,
                    "weak-operator spectrum deviates from {trace, 0, ...}", mismatch);

    r.largest_abs_eig = std::abs(w.nonzero_eig);
    const double fnorm = frobenius_norm(w.matrix);
    r.nilpotent = (r.largest_abs_eig <= tol * std::max(1.0, fnorm)) && (fnorm > tol);

    if (w.matrix.dim() == 2) {
        const auto ev = eigvals_closed(w.matrix);
        const CVector v0 = detail::eigvec_2x2(w.matrix, ev[0]);
        const CVector v1 = detail::eigvec_2x2(w.matrix, ev[1]);
        r.eigvec_angle = fubini_angle(v0, v1);
        r.degenerate = r.eigvec_angle <= angle_tol;
    } else {
        r.eigvec_angle = std::numeric_limits<double>::quiet_NaN();
        r.degenerate = r.largest_abs_eig <= tol * std::max(1.0, fnorm);
    }
    return r;
}

/// ||W^2 - trace(W) W||_F; identically zero in exact arithmetic because the
/// weak operator is rank 1.
inline double quasi_idempotence_defect(const WeakOperator& w) {
    return frobenius_norm(w.matrix * w.matrix - w.nonzero_eig * w.matrix);
}

}  // namespace wvnn
