#pragma once

#include <cstdint>
#include <random>

#include "wvnn/complexmat.hpp"
#include "wvnn/observables.hpp"

namespace wvnn {

/// Seeded 64-bit PRNG with hand-rolled distributions, so identical seeds
/// produce identical streams on every platform (std distributions are
/// implementation-defined).
struct Rng {
    std::mt19937_64 eng;

    explicit Rng(std::uint64_t seed) : eng(seed) {}

    double uniform01() { return static_cast<double>(eng() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    /// Box-Muller standard normal.
    double normal() {
        double u1 = uniform01();
        while (u1 <= 0.0) u1 = uniform01();
        const double u2 = uniform01();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * kPi * u2);
    }

    Complex cnormal() { return {normal(), normal()}; }
};

/// Haar-like random unit state (normalized complex normal vector).
inline CVector random_state(Rng& rng, std::size_t dim) {
    CVector v(dim);
    for (std::size_t i = 0; i < dim; ++i) v[i] = rng.cnormal();
    return v.normalized();
}

inline CMatrix random_matrix(Rng& rng, std::size_t dim, double scale = 1.0) {
    CMatrix m(dim);
    for (std::size_t r = 0; r < dim; ++r)
        for (std::size_t c = 0; c < dim; ++c) m(r, c) = scale * rng.cnormal();
    return m;
}

/// Random Hermitian observable via (M + M^dagger) / 2.
inline Observable random_observable(Rng& rng, std::size_t dim, double scale = 1.0) {
    const CMatrix m = random_matrix(rng, dim, scale);
    return Observable::from_matrix(Complex{0.5} * (m + adjoint(m)));
}

}  // namespace wvnn
