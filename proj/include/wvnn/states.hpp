#pragma once

#include <cmath>
#include <numbers>

#include "wvnn/complexmat.hpp"
#include "wvnn/error.hpp"

namespace wvnn {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kHalfPi = std::numbers::pi / 2.0;

namespace detail {

inline void require_range(double x, double lo, double hi, const char* name) {
    if (!(x >= lo && x <= hi))
        throw Error(Errc::domain_error, std::string(name) + " outside its stated range", x);
}

}  // namespace detail

/// Polar angle / phase of a qubit state (cos theta, e^{i xi} sin theta)^T,
/// theta in [0, pi/2], xi in [0, 2pi]. Out-of-range values are rejected;
/// use `wrapped` when sweeping past the canonical domain.
struct QubitParams {
    double theta;
    double xi;

    QubitParams(double theta_, double xi_) : theta(theta_), xi(xi_) {
        detail::require_range(theta, 0.0, kHalfPi, "theta");
        detail::require_range(xi, 0.0, 2.0 * kPi, "xi");
    }

    /// Non-canonical convenience: folds xi mod 2pi and reflects theta back
    /// into [0, pi/2] (theta -> pi - theta gives the same polar magnitude).
    static QubitParams wrapped(double theta, double xi) {
        xi = std::fmod(xi, 2.0 * kPi);
        if (xi < 0.0) xi += 2.0 * kPi;
        theta = std::fmod(theta, kPi);
        if (theta < 0.0) theta += kPi;
        if (theta > kHalfPi) theta = kPi - theta;
        return QubitParams(theta, xi);
    }
};

struct QutritParams {
    double theta;  // [0, pi/2]
    double alpha;  // [0, pi/2]
    double chi1;   // [0, 2pi]
    double chi2;   // [0, 2pi]

    QutritParams(double theta_, double alpha_, double chi1_, double chi2_)
        : theta(theta_), alpha(alpha_), chi1(chi1_), chi2(chi2_) {
        detail::require_range(theta, 0.0, kHalfPi, "theta");
        detail::require_range(alpha, 0.0, kHalfPi, "alpha");
        detail::require_range(chi1, 0.0, 2.0 * kPi, "chi1");
        detail::require_range(chi2, 0.0, 2.0 * kPi, "chi2");
    }
};

/// (cos theta, e^{i xi} sin theta)^T.
inline CVector qubit_state(const QubitParams& p) {
    return CVector{Complex{std::cos(p.theta), 0.0},
                   std::polar(std::sin(p.theta), p.xi)};
}

/// (cos theta, e^{i chi1} cos alpha sin theta, e^{i chi2} sin alpha sin theta)^T.
inline CVector qutrit_state(const QutritParams& p) {
    const double st = std::sin(p.theta);
    return CVector{Complex{std::cos(p.theta), 0.0},
                   std::polar(std::cos(p.alpha) * st, p.chi1),
                   std::polar(std::sin(p.alpha) * st, p.chi2)};
}

/// <psi_f|psi_i>, conjugate-linear in the first argument. Both states must be
/// unit vectors of equal dimension.
inline Complex overlap(const CVector& psi_f, const CVector& psi_i) {
    require_same_dim(psi_f.dim(), psi_i.dim());
    if (std::abs(psi_f.norm() - 1.0) > 1e-12 || std::abs(psi_i.norm() - 1.0) > 1e-12)
        throw Error(Errc::invalid_argument, "overlap requires unit-norm states");
    return inner(psi_f, psi_i);
}

/// Fubini-Study angle arccos|<v1|v2>| in [0, pi/2]; inputs are normalized
/// internally so eigenvectors of non-normal matrices can be passed directly.
inline double fubini_angle(const CVector& v1, const CVector& v2) {
    require_same_dim(v1.dim(), v2.dim());
    const double n1 = v1.norm(), n2 = v2.norm();
    if (n1 == 0.0 || n2 == 0.0)
        throw Error(Errc::degenerate_input, "fubini_angle of a zero vector");
    double c = std::abs(inner(v1, v2)) / (n1 * n2);
    if (c > 1.0) c = 1.0;
    return std::acos(c);
}

}  // namespace wvnn
