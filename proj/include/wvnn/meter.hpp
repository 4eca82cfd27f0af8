#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "wvnn/complexmat.hpp"
#include "wvnn/eig.hpp"
#include "wvnn/error.hpp"
#include "wvnn/observables.hpp"
#include "wvnn/weak.hpp"

namespace wvnn {

namespace detail {

/// In-place iterative radix-2 FFT (inverse = conjugate trick). Grid sizes are
/// powers of two by MeterConfig invariant, so this is all that is needed.
inline void fft_radix2(std::vector<Complex>& a, bool inverse) {
    const std::size_t n = a.size();
    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(a[i], a[j]);
    }
    for (std::size_t len = 2; len <= n; len <<= 1) {
        const double ang = (inverse ? 2.0 : -2.0) * kPi / static_cast<double>(len);
        const Complex wlen = std::polar(1.0, ang);
        for (std::size_t i = 0; i < n; i += len) {
            Complex w{1.0};
            for (std::size_t k = 0; k < len / 2; ++k) {
                const Complex u = a[i + k];
                const Complex v = a[i + k + len / 2] * w;
                a[i + k] = u + v;
                a[i + k + len / 2] = u - v;
                w *= wlen;
            }
        }
    }
    if (inverse)
        for (Complex& z : a) z /= static_cast<double>(n);
}

}  // namespace detail

/// Discretized Gaussian meter. The extent invariant keeps the wavefunction
/// tails (and hence the periodic wrap-around of Fourier translations) below
/// 1e-14.
struct MeterConfig {
    int grid_points = 1024;
    double x_extent = 20.0;  // half-width of the position grid
    double sigma_x = 1.0;

    void validate() const {
        if (grid_points < 128 || (grid_points & (grid_points - 1)) != 0)
            throw Error(Errc::invalid_argument,
                        "grid_points must be a power of two >= 128",
                        static_cast<double>(grid_points));
        if (!(sigma_x > 0.0))
            throw Error(Errc::invalid_argument, "sigma_x must be positive", sigma_x);
        if (x_extent < 8.0 * sigma_x)
            throw Error(Errc::invalid_argument, "x_extent must be at least 8 sigma_x", x_extent);
    }
};

/// Sign of the coupling exponent. The protocol figure uses exp(-i gamma O P),
/// which shifts the pointer by +gamma*lambda; the alternative sign flips the
/// shifts.
enum class CouplingSign { ExponentMinus, ExponentPlus };

struct ProtocolConfig {
    Observable observable;
    CVector psi_i;
    CVector psi_f;
    double gamma = 1e-2;
    MeterConfig meter{};
    CouplingSign sign = CouplingSign::ExponentMinus;
    double overlap_floor = kDefaultOverlapFloor;

    void validate() const {
        meter.validate();
        if (!(gamma > 0.0)) throw Error(Errc::invalid_argument, "gamma must be > 0", gamma);
        if (gamma * observable.spectrum_max_abs() >= meter.x_extent / 4.0)
            throw Error(Errc::grid_overflow,
                        "pointer shift gamma*max|lambda| leaves the grid; increase x_extent",
                        gamma * observable.spectrum_max_abs());
    }
};

struct ProtocolResult {
    double mean_x = 0.0;
    double mean_p = 0.0;
    double success_prob = 0.0;
    double joint_norm = 0.0;    // joint-state norm before post-selection
    CVector conditioned_meter;  // normalized position-space wavefunction
};

/// One pass of the von Neumann protocol: prepare psi_i (x) Gaussian, apply
/// exp(-+ i gamma O (x) P) exactly per eigencomponent (momentum-space phase
/// on the discrete Fourier grid), project onto psi_f, read out <x>, <p> and
/// the post-selection probability of the conditioned meter.
inline ProtocolResult run_protocol(const ProtocolConfig& cfg) {
    cfg.validate();
    const auto n = static_cast<std::size_t>(cfg.meter.grid_points);
    const double L = cfg.meter.x_extent;
    const double dx = 2.0 * L / static_cast<double>(n);
    const double sx = cfg.meter.sigma_x;

    const double overlap_sq = std::norm(overlap(cfg.psi_f, cfg.psi_i));
    if (overlap_sq < cfg.overlap_floor)
        throw Error(Errc::near_orthogonal_postselection,
                    "post-selection overlap below floor", overlap_sq);

    std::vector<double> x(n);
    for (std::size_t j = 0; j < n; ++j) x[j] = -L + dx * static_cast<double>(j);

    // |phi(x)|^2 ~ N(0, sigma_x^2)
    const double norm_c = std::pow(2.0 * kPi * sx * sx, -0.25);
    std::vector<Complex> phi_hat(n);
    double phi_norm_sq = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        phi_hat[j] = norm_c * std::exp(-x[j] * x[j] / (4.0 * sx * sx));
        phi_norm_sq += std::norm(phi_hat[j]);
    }
    phi_norm_sq *= dx;
    detail::fft_radix2(phi_hat, false);

    std::vector<double> p(n);
    for (std::size_t k = 0; k < n; ++k) {
        const double idx = (k < n / 2) ? static_cast<double>(k)
                                       : static_cast<double>(k) - static_cast<double>(n);
        p[k] = kPi * idx / L;
    }

    const auto eig = hermitian_eigen(cfg.observable.matrix());
    const std::size_t d = cfg.observable.dim();
    const double shift_sign = (cfg.sign == CouplingSign::ExponentMinus) ? 1.0 : -1.0;

    // joint state after coupling, contracted with <psi_f| per eigencomponent
    std::vector<Complex> meter_hat(n, Complex{0.0});
    double joint_norm_sq = 0.0;
    for (std::size_t k = 0; k < d; ++k) {
        Complex ci = 0.0, cf = 0.0;  // <o_k|psi_i>, <o_k|psi_f>
        for (std::size_t r = 0; r < d; ++r) {
            ci += std::conj(eig.vectors(r, k)) * cfg.psi_i[r];
            cf += std::conj(eig.vectors(r, k)) * cfg.psi_f[r];
        }
        joint_norm_sq += std::norm(ci);  // translation is unitary per component
        const double a = shift_sign * cfg.gamma * eig.values[k];
        const Complex w = std::conj(cf) * ci;
        for (std::size_t j = 0; j < n; ++j)
            meter_hat[j] += w * phi_hat[j] * std::polar(1.0, -p[j] * a);
    }
    // per-component Fourier translation is unitary, so the pre-post-selection
    // joint norm is sum_k |<o_k|psi_i>|^2 * ||phi||^2
    joint_norm_sq *= phi_norm_sq;

    // <p> from the momentum representation
    double pnorm = 0.0, psum = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        const double w = std::norm(meter_hat[j]);
        pnorm += w;
        psum += p[j] * w;
    }

    std::vector<Complex> meter = meter_hat;
    detail::fft_radix2(meter, true);

    double prob = 0.0, xsum = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        const double w = std::norm(meter[j]);
        prob += w;
        xsum += x[j] * w;
    }

    ProtocolResult r;
    r.joint_norm = std::sqrt(joint_norm_sq);
    r.success_prob = prob * dx;
    r.mean_x = xsum / prob;
    r.mean_p = psum / pnorm;
    const double inv = 1.0 / std::sqrt(prob * dx);
    std::vector<Complex> cond(n);
    for (std::size_t j = 0; j < n; ++j) cond[j] = meter[j] * inv;
    r.conditioned_meter = CVector::from_entries(std::move(cond));
    return r;
}

struct ShiftEstimate {
    double re_est = 0.0;
    double im_est = 0.0;
    std::vector<double> re_ladder;  // mean_x / gamma per rung
    std::vector<double> im_ladder;  // mean_p / (2 gamma sigma_p^2) per rung
};

namespace detail {

/// Polynomial extrapolation of f(gamma) to gamma -> 0 (Neville scheme);
/// reduces to iterated Richardson for ratio-2 ladders.
inline double extrapolate_to_zero(std::span<const double> gammas, std::vector<double> vals) {
    const std::size_t n = vals.size();
    for (std::size_t level = 1; level < n; ++level)
        for (std::size_t i = 0; i + level < n; ++i) {
            const double g0 = gammas[i], g1 = gammas[i + level];
            vals[i] = (g0 * vals[i + 1] - g1 * vals[i]) / (g0 - g1);
        }
    return vals[0];
}

}  // namespace detail

/// Richardson-extrapolated estimates of Re O_w and Im O_w from the pointer
/// shifts over a strictly decreasing gamma ladder: mean_x / gamma -> Re O_w
/// and mean_p / (2 gamma sigma_p^2) -> Im O_w with sigma_p^2 = 1/(4 sigma_x^2)
/// for the Gaussian meter.
inline ShiftEstimate weak_shift_estimate(const ProtocolConfig& base,
                                         std::span<const double> gamma_ladder) {
    if (gamma_ladder.size() < 3)
        throw Error(Errc::invalid_argument, "gamma ladder needs at least 3 values",
                    static_cast<double>(gamma_ladder.size()));
    for (std::size_t i = 1; i < gamma_ladder.size(); ++i)
        if (!(gamma_ladder[i] < gamma_ladder[i - 1]))
            throw Error(Errc::invalid_argument, "gamma ladder must be strictly decreasing");

    const double sigma_p_sq = 1.0 / (4.0 * base.meter.sigma_x * base.meter.sigma_x);
    ShiftEstimate est;
    for (double g : gamma_ladder) {
        ProtocolConfig cfg = base;
        cfg.gamma = g;
        const ProtocolResult r = run_protocol(cfg);
        est.re_ladder.push_back(r.mean_x / g);
        est.im_ladder.push_back(r.mean_p / (2.0 * g * sigma_p_sq));
    }
    est.re_est = detail::extrapolate_to_zero(gamma_ladder, est.re_ladder);
    est.im_est = detail::extrapolate_to_zero(gamma_ladder, est.im_ladder);

    // rung errors must shrink toward the extrapolated limit
    for (const auto* ladder : {&est.re_ladder, &est.im_ladder}) {
        const double limit = (ladder == &est.re_ladder) ? est.re_est : est.im_est;
        const double slack = 1e-9 * (1.0 + std::abs(limit));
        for (std::size_t i = 1; i < ladder->size(); ++i) {
            const double prev = std::abs((*ladder)[i - 1] - limit);
            const double cur = std::abs((*ladder)[i] - limit);
            if (cur > prev + slack)
                throw Error(Errc::outside_weak_regime,
                            "pointer shifts do not converge monotonically toward the "
                            "extrapolated weak value; reduce gamma",
                            cur - prev);
        }
    }
    return est;
}

}  // namespace wvnn
