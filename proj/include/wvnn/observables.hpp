#pragma once

#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "wvnn/complexmat.hpp"
#include "wvnn/eig.hpp"
#include "wvnn/error.hpp"
#include "wvnn/states.hpp"

namespace wvnn {

/// Hermitian observable with its real spectrum cached at construction
/// (ascending), so range/amplification classification is O(1) per query.
class Observable {
  public:
    static Observable from_matrix(const CMatrix& m) {
        const double scale = std::max(1.0, frobenius_norm(m));
        const double defect = frobenius_norm(m - adjoint(m));
        if (defect > 1e-12 * scale)
            throw Error(Errc::hermiticity_violation, "matrix is not Hermitian", defect);

        Observable o;
        o.m_ = m;
        auto he = hermitian_eigen(m);
        o.spectrum_ = std::move(he.values);

        // cached spectrum must agree with the generic eigensolver route
        std::vector<Complex> cached(o.spectrum_.begin(), o.spectrum_.end());
        const auto generic = eigvals(m);
        for (const Complex& z : generic)
            if (std::abs(z.imag()) > 1e-10 * scale)
                throw Error(Errc::numerical_inconsistency,
                            "observable spectrum is not real", z.imag());
        const double mismatch = spectra_match_distance(cached, generic);
        if (mismatch > 1e-10 * scale)
            throw Error(Errc::numerical_inconsistency,
                        "cached spectrum disagrees with eigensolver", mismatch);
        return o;
    }

    const CMatrix& matrix() const { return m_; }
    std::size_t dim() const { return m_.dim(); }

    /// Ascending.
    const std::vector<double>& spectrum() const { return spectrum_; }
    double spectrum_min() const { return spectrum_.front(); }
    double spectrum_max() const { return spectrum_.back(); }
    double spectrum_max_abs() const {
        return std::max(std::abs(spectrum_.front()), std::abs(spectrum_.back()));
    }

  private:
    Observable() = default;
    CMatrix m_;
    std::vector<double> spectrum_;
};

enum class PauliAxis { X, Y, Z };

inline Observable pauli(PauliAxis k) {
    switch (k) {
        case PauliAxis::X:
            return Observable::from_matrix(CMatrix{{0.0, 1.0}, {1.0, 0.0}});
        case PauliAxis::Y:
            return Observable::from_matrix(
                CMatrix{{0.0, Complex{0.0, -1.0}}, {Complex{0.0, 1.0}, 0.0}});
        case PauliAxis::Z:
            return Observable::from_matrix(CMatrix{{1.0, 0.0}, {0.0, -1.0}});
    }
    throw Error(Errc::invalid_argument, "unknown Pauli axis");
}

/// (sigma_x + sigma_y + sigma_z) / sqrt(3); unit Bloch vector, spectrum {-1, 1}.
inline Observable pauli_combo_xyz() {
    const double s = 1.0 / std::sqrt(3.0);
    return Observable::from_matrix(
        CMatrix{{s, Complex{s, -s}}, {Complex{s, s}, -s}});
}

/// The eight SU(3) generators, k in 1..8.
inline Observable gellmann(int k) {
    const Complex i{0.0, 1.0};
    const double r3 = 1.0 / std::sqrt(3.0);
    switch (k) {
        case 1: return Observable::from_matrix(CMatrix{{0, 1, 0}, {1, 0, 0}, {0, 0, 0}});
        case 2: return Observable::from_matrix(CMatrix{{0, -i, 0}, {i, 0, 0}, {0, 0, 0}});
        case 3: return Observable::from_matrix(CMatrix{{1, 0, 0}, {0, -1, 0}, {0, 0, 0}});
        case 4: return Observable::from_matrix(CMatrix{{0, 0, 1}, {0, 0, 0}, {1, 0, 0}});
        case 5: return Observable::from_matrix(CMatrix{{0, 0, -i}, {0, 0, 0}, {i, 0, 0}});
        case 6: return Observable::from_matrix(CMatrix{{0, 0, 0}, {0, 0, 1}, {0, 1, 0}});
        case 7: return Observable::from_matrix(CMatrix{{0, 0, 0}, {0, 0, -i}, {0, i, 0}});
        case 8:
            return Observable::from_matrix(
                CMatrix{{r3, 0, 0}, {0, r3, 0}, {0, 0, -2.0 * r3}});
        default:
            throw Error(Errc::invalid_argument, "Gell-Mann index must be in 1..8",
                        static_cast<double>(k));
    }
}

/// Two-parameter observable family on the Bloch sphere,
/// sin(theta)cos(phi) sx + sin(theta)sin(phi) sy + cos(theta) sz.
struct BlochObservableParams {
    double theta;  // [0, pi/2]
    double phi;    // [0, 2pi]

    BlochObservableParams(double theta_, double phi_) : theta(theta_), phi(phi_) {
        detail::require_range(theta, 0.0, kHalfPi, "theta");
        detail::require_range(phi, 0.0, 2.0 * kPi, "phi");
    }
};

inline CMatrix bloch_matrix(double theta, double phi) {
    const double st = std::sin(theta), ct = std::cos(theta);
    const Complex off{st * std::cos(phi), -st * std::sin(phi)};
    return CMatrix{{ct, off}, {std::conj(off), -ct}};
}

inline Observable bloch_observable(const BlochObservableParams& p) {
    return Observable::from_matrix(bloch_matrix(p.theta, p.phi));
}

inline Observable observable_from_matrix(const CMatrix& m) {
    return Observable::from_matrix(m);
}

}  // namespace wvnn
