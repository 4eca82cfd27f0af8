#pragma once

#include <cmath>
#include <cstdint>
#include <string>

#include "wvnn/complexmat.hpp"
#include "wvnn/error.hpp"
#include "wvnn/states.hpp"

// Closed-form formulas for the Pauli qubit scenarios and the two-parameter
// observable family. Everything here is evaluated directly from the printed
// expressions with no shared code with the generic operator route, so these
// functions double as independent test oracles for it.

namespace wvnn::oracles {

struct QubitScenario {
    double theta_i;  // [0, pi/2]
    double theta_f;  // [0, pi/2]
    double xi_i;     // [0, 2pi]
    double xi_f;     // [0, 2pi]

    QubitScenario(double ti, double tf, double xii = 0.0, double xif = 0.0)
        : theta_i(ti), theta_f(tf), xi_i(xii), xi_f(xif) {
        wvnn::detail::require_range(theta_i, 0.0, kHalfPi, "theta_i");
        wvnn::detail::require_range(theta_f, 0.0, kHalfPi, "theta_f");
        wvnn::detail::require_range(xi_i, 0.0, 2.0 * kPi, "xi_i");
        wvnn::detail::require_range(xi_f, 0.0, 2.0 * kPi, "xi_f");
    }
};

/// |<psi_f|psi_i>|^2 for general phases.
inline double overlap_sq(const QubitScenario& s) {
    const double ci = std::cos(s.theta_i), si = std::sin(s.theta_i);
    const double cf = std::cos(s.theta_f), sf = std::sin(s.theta_f);
    return cf * cf * ci * ci + sf * sf * si * si +
           2.0 * std::cos(s.xi_i - s.xi_f) * cf * ci * sf * si;
}

namespace detail_sx {

inline double checked_overlap(const QubitScenario& s, double floor) {
    const double ov = overlap_sq(s);
    if (ov < floor)
        throw Error(Errc::near_orthogonal_postselection,
                    "closed-form overlap below floor", ov);
    return ov;
}

}  // namespace detail_sx

/// d_f of the sigma_x weak operator: sqrt(1 - sin^2(2 theta_i) cos^2 xi_i)
/// over the overlap. Reduces to |cos 2 theta_i| / cos^2(theta_f - theta_i)
/// when the phases vanish.
inline double sx_df(const QubitScenario& s, double floor = 1e-14) {
    const double ov = detail_sx::checked_overlap(s, floor);
    // 1 - sin^2(2ti) cos^2(xi) evaluated as cos^2(2ti) + sin^2(2ti) sin^2(xi)
    // (same expression, no subtractive cancellation near theta_i = pi/4)
    const double c2 = std::cos(2.0 * s.theta_i), s2 = std::sin(2.0 * s.theta_i);
    const double sxi = std::sin(s.xi_i);
    return std::sqrt(c2 * c2 + s2 * s2 * sxi * sxi) / ov;
}

/// |sigma_{x,w}|^2 for general phases.
inline double sx_wv_sq(const QubitScenario& s, double floor = 1e-14) {
    const double ov = detail_sx::checked_overlap(s, floor);
    const double ci = std::cos(s.theta_i), si = std::sin(s.theta_i);
    const double cf = std::cos(s.theta_f), sf = std::sin(s.theta_f);
    const double num = sf * sf * ci * ci + cf * cf * si * si +
                       2.0 * std::cos(s.xi_i + s.xi_f) * cf * ci * sf * si;
    return num / ov;
}

/// The post-selection angle at which |sigma_{x,w}|^2 = 1: the positive root
/// of tan^2 - 2 tan(2 theta_i) sin(xi_i) sin(xi_f) tan - 1 = 0 (the one in
/// [0, pi/2]). Undefined at theta_i = pi/4.
inline double sx_theta_tilde_f(double theta_i, double xi_i, double xi_f) {
    const double c2 = std::cos(2.0 * theta_i);
    if (std::abs(c2) < 1e-12)
        throw Error(Errc::excluded_parameter, "theta_i = pi/4 excluded (tan^2 theta_i = 1)",
                    theta_i);
    const double b = std::tan(2.0 * theta_i) * std::sin(xi_i) * std::sin(xi_f);
    return std::atan(b + std::sqrt(b * b + 1.0));
}

/// The post-selection angle maximizing d_f(A_x) at fixed phases, i.e. the
/// stationary point tan(2 theta_f) = tan(2 theta_i) cos(xi_i - xi_f) that
/// minimizes the overlap denominator (pi/4 when cos 2 theta_i = 0).
inline double sx_theta_hat_f(double theta_i, double xi_i, double xi_f) {
    const double c2i = std::cos(2.0 * theta_i);
    if (std::abs(c2i) < 1e-12) return kPi / 4.0;
    const double target = std::tan(2.0 * theta_i) * std::cos(xi_i - xi_f);
    double cand1 = std::atan(target);  // (-pi/2, pi/2)
    if (cand1 < 0.0) cand1 += kPi;
    double cand2 = cand1 + kPi;
    if (cand2 > kPi) cand2 = cand1 - kPi;

    // of the stationary family (mod pi/2), pick the overlap minimizer,
    // i.e. the d_f maximizer (the numerator does not depend on theta_f)
    auto denom = [&](double two_tf) {
        const QubitScenario s(theta_i, two_tf / 2.0, xi_i, xi_f);
        return overlap_sq(s);
    };
    if (cand2 < 0.0 || cand2 > kPi) return cand1 / 2.0;
    return (denom(cand1) <= denom(cand2)) ? cand1 / 2.0 : cand2 / 2.0;
}

enum class Branch { Plus, Minus };

/// tan(theta_f) as a function of d_f at fixed (theta_i, xi_i, xi_f): the
/// roots of [d_f t^2 - (1+t^2) S] x^2 + 2 d_f cos(xi_i-xi_f) t x
/// + [d_f - (1+t^2) S] = 0 with t = tan theta_i and
/// S = sqrt(1 - sin^2(2 theta_i) cos^2 xi_i). The plus branch recovers the
/// theta_f that parametrized d_f.
inline double sx_tan_thetaf_of_df(double d_f, double theta_i, double xi_i, double xi_f,
                                  Branch branch) {
    const double t = std::tan(theta_i);
    const double s2 = std::sin(2.0 * theta_i) * std::cos(xi_i);
    const double S = std::sqrt(std::max(0.0, 1.0 - s2 * s2));
    const double a = d_f * t * t - (1.0 + t * t) * S;
    const double half_b = d_f * std::cos(xi_i - xi_f) * t;
    const double c = d_f - (1.0 + t * t) * S;
    double disc = half_b * half_b - a * c;
    const double scale = std::max({1.0, half_b * half_b, std::abs(a * c)});
    if (disc < -1e-12 * scale)
        throw Error(Errc::no_real_solution, "d_f is below the achievable minimum", disc);
    if (disc < 0.0) disc = 0.0;
    if (std::abs(a) < 1e-14 * std::max(1.0, std::abs(c)))
        throw Error(Errc::branch_singularity, "quadratic degenerates (leading coefficient ~ 0)",
                    a);
    const double root = std::sqrt(disc);
    return (branch == Branch::Plus) ? (-half_b + root) / a : (-half_b - root) / a;
}

struct SyResult {
    Complex wv;
    double df;
};

/// Null-phase sigma_y: wv = i tan(theta_f - theta_i),
/// d_f = 1 / cos^2(theta_f - theta_i), so |wv|^2 = d_f - 1.
inline SyResult sy_relations(double theta_i, double theta_f, double floor = 1e-14) {
    const double c = std::cos(theta_f - theta_i);
    if (c * c < floor)
        throw Error(Errc::near_orthogonal_postselection, "orthogonal null-phase states", c * c);
    return {Complex{0.0, std::tan(theta_f - theta_i)}, 1.0 / (c * c)};
}

struct SzResult {
    double wv_abs;
    double df;
};

/// Null-phase sigma_z: |wv| = |cos 2 theta_i - tan(theta_f-theta_i) sin 2 theta_i|,
/// d_f = |sin 2 theta_i| (1 + tan^2(theta_f-theta_i)).
inline SzResult sz_relations(double theta_i, double theta_f, double floor = 1e-14) {
    const double c = std::cos(theta_f - theta_i);
    if (c * c < floor)
        throw Error(Errc::near_orthogonal_postselection, "orthogonal null-phase states", c * c);
    const double tand = std::tan(theta_f - theta_i);
    const double s2 = std::sin(2.0 * theta_i);
    return {std::abs(std::cos(2.0 * theta_i) - tand * s2),
            std::abs(s2) * (1.0 + tand * tand)};
}

/// Fixed scenario of the rotating-observable analysis: phi = pi/4,
/// psi_f = (1, 0), null phases, psi_i real with polar angle theta_i.
struct QuarterPhiScenario {
    double theta_i;  // [0, pi/2]
    double theta;    // observable polar angle, [0, pi/2]

    QuarterPhiScenario(double ti, double th) : theta_i(ti), theta(th) {
        wvnn::detail::require_range(theta_i, 0.0, kHalfPi, "theta_i");
        wvnn::detail::require_range(theta, 0.0, kHalfPi, "theta");
    }
};

/// The scenario's closed forms, kept under their conventional A/A' labels.
/// Those labels are swapped relative to this library's operator definitions,
/// and the alpha / d_f values are numerator-normalized (the post-selection
/// denominator removed); `resolve_printed_labels` re-derives the mapping.
struct QuarterPhiQuantities {
    double alpha_A;       // cos(theta)                       = <psi_f|O|psi_f>
    double alpha_Aprime;  // cos(th)cos(2ti)+sqrt2 ci st si   = <psi_i|O|psi_i>
    double df_A;          // |sin(theta)|                     = uncertainty in psi_f
    double df_Aprime;     // radical form                     = uncertainty in psi_i
    double wv_abs;
};

inline QuarterPhiQuantities quarter_phi_quantities(const QuarterPhiScenario& s) {
    const double th = s.theta, ti = s.theta_i;
    QuarterPhiQuantities q;
    q.alpha_A = std::cos(th);
    q.alpha_Aprime =
        std::cos(th) * std::cos(2.0 * ti) + std::sqrt(2.0) * std::cos(ti) * std::sin(th) * std::sin(ti);
    q.df_A = std::abs(std::sin(th));
    q.df_Aprime = std::sqrt(std::max(
                      0.0, 5.0 - std::cos(4.0 * ti) - std::cos(2.0 * th) * (1.0 + 3.0 * std::cos(4.0 * ti)) -
                               2.0 * std::sqrt(2.0) * std::sin(2.0 * th) * std::sin(4.0 * ti))) /
                  std::sqrt(8.0);
    const double tt = std::tan(ti);
    q.wv_abs = std::sqrt(std::max(0.0, std::cos(th) * std::cos(th) +
                                           std::sqrt(2.0) * std::cos(th) * std::sin(th) * tt +
                                           std::sin(th) * std::sin(th) * tt * tt));
    return q;
}

/// Observable angle maximizing |O_w| in the phi = pi/4 scenario:
/// 2 theta* = atan2(sin 2 theta_i, sqrt(2) cos 2 theta_i). Equals
/// (1/2) arctan(sqrt2 tan ti / (1 - tan^2 ti)) below theta_i = pi/4 and the
/// average of the two nilpotency angles {arctan(-sqrt2 cot 2ti), pi/2} above
/// it; continuous (value pi/4) at theta_i = pi/4.
inline double quarter_phi_argmax_theta(double theta_i) {
    wvnn::detail::require_range(theta_i, 0.0, kHalfPi, "theta_i");
    return 0.5 * std::atan2(std::sin(2.0 * theta_i), std::sqrt(2.0) * std::cos(2.0 * theta_i));
}

/// Closed forms for the general two-parameter observable at null phases:
/// the weak-value numerator |<psi_f|O|psi_i>|, the two normalized Henrici
/// departures as printed (dfn_1 carries theta_f, dfn_2 carries theta_i), and
/// their printed theta-derivatives.
struct NullPhaseValues {
    double numerator;
    double dfn_1;
    double dfn_2;
    double d_numerator;
    double d_dfn_1;
    double d_dfn_2;
};

namespace detail_nullphase {

inline double dfn_radicand(double theta, double angle, double phi) {
    const double cp = std::cos(phi);
    return (3.0 + 2.0 * std::cos(4.0 * angle) * cp * cp - std::cos(2.0 * phi)) *
               std::sin(theta) * std::sin(theta) +
           4.0 * std::cos(theta) * std::cos(theta) * std::sin(2.0 * angle) * std::sin(2.0 * angle) -
           2.0 * cp * std::sin(2.0 * theta) * std::sin(4.0 * angle);
}

inline double dfn_value(double theta, double angle, double phi) {
    return 0.5 * std::sqrt(std::max(0.0, dfn_radicand(theta, angle, phi)));
}

inline double dfn_derivative(double theta, double angle, double phi) {
    const double rad = dfn_radicand(theta, angle, phi);
    const double num =
        -4.0 * std::cos(2.0 * theta) * std::cos(phi) * std::sin(4.0 * angle) +
        std::sin(2.0 * theta) * (std::cos(4.0 * angle) * (3.0 + std::cos(2.0 * phi)) +
                                 2.0 * std::sin(phi) * std::sin(phi));
    return num / (4.0 * std::sqrt(std::max(rad, 1e-300)));
}

}  // namespace detail_nullphase

inline NullPhaseValues null_phase_values_and_derivatives(double theta, double theta_i, double theta_f,
                                              double phi) {
    NullPhaseValues v;
    const double sum = theta_f + theta_i, diff = theta_f - theta_i;
    const double core = std::cos(theta) * std::cos(sum) + std::cos(phi) * std::sin(theta) * std::sin(sum);
    const double imag = std::sin(theta) * std::sin(diff) * std::sin(phi);
    v.numerator = std::sqrt(core * core + imag * imag);
    v.d_numerator =
        (-std::sin(2.0 * theta) * (std::cos(2.0 * diff) + 3.0 * std::cos(2.0 * sum) -
                                   2.0 * std::cos(2.0 * phi) * std::sin(2.0 * theta_f) *
                                       std::sin(2.0 * theta_i)) +
         4.0 * std::cos(2.0 * theta) * std::cos(phi) * std::sin(2.0 * sum)) /
        (8.0 * std::max(v.numerator, 1e-300));
    v.dfn_1 = detail_nullphase::dfn_value(theta, theta_f, phi);
    v.d_dfn_1 = detail_nullphase::dfn_derivative(theta, theta_f, phi);
    v.dfn_2 = detail_nullphase::dfn_value(theta, theta_i, phi);
    v.d_dfn_2 = detail_nullphase::dfn_derivative(theta, theta_i, phi);
    return v;
}

/// Which generic quantity each printed label matches, decided numerically.
struct LabelResolution {
    bool printed_A_is_final_state;  // true: printed "A" forms carry theta_f
    double residual_swapped;        // max deviation under the swapped assignment
    double residual_direct;         // max deviation under the as-printed assignment
    std::string summary;
};

}  // namespace wvnn::oracles

#include "wvnn/weak.hpp"

namespace wvnn::oracles {

/// Brute-force label resolution: evaluate the printed dfn closed forms on a
/// deterministic sample and compare them against the generic uncertainties
/// of the initial and final states. Records which assignment matches.
inline LabelResolution resolve_printed_labels() {
    LabelResolution r{false, 0.0, 0.0, ""};
    const double thetas[] = {0.17, 0.52, 0.93, 1.31};
    const double phis[] = {0.0, kPi / 12.0, kPi / 4.0, 1.9, 4.71};
    for (double th : thetas)
        for (double ti : thetas)
            for (double tf : thetas)
                for (double ph : phis) {
                    const auto v = null_phase_values_and_derivatives(th, ti, tf, ph);
                    const Observable obs =
                        bloch_observable(BlochObservableParams(th, ph));
                    const double unc_i =
                        normalized_henrici(obs, qubit_state(QubitParams(ti, 0.0)));
                    const double unc_f =
                        normalized_henrici(obs, qubit_state(QubitParams(tf, 0.0)));
                    // swapped: printed "A" (dfn_1, theta_f-dependent) is the
                    // final-state quantity, i.e. the A' side of the pair
                    r.residual_swapped = std::max(
                        {r.residual_swapped, std::abs(v.dfn_1 - unc_f), std::abs(v.dfn_2 - unc_i)});
                    r.residual_direct = std::max(
                        {r.residual_direct, std::abs(v.dfn_1 - unc_i), std::abs(v.dfn_2 - unc_f)});
                }
    r.printed_A_is_final_state = r.residual_swapped < r.residual_direct;
    r.summary = r.printed_A_is_final_state
                    ? "printed dfn(A) matches the final-state uncertainty (A' side); labels swapped"
                    : "printed dfn(A) matches the initial-state uncertainty as written";
    return r;
}

}  // namespace wvnn::oracles
