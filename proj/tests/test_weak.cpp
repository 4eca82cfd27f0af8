#include <catch2/catch_amalgamated.hpp>

#include "wvnn/rng.hpp"
#include "wvnn/weak.hpp"

using namespace wvnn;
using Catch::Approx;

TEST_CASE("weak value as a trace ratio") {
    Rng rng(43);

    // psi_f = psi_i reduces to the expectation value: real, inside the range
    for (int k = 0; k < 50; ++k) {
        const Observable obs = random_observable(rng, 3);
        const CVector psi = random_state(rng, 3);
        const Complex v = weak_value_trace(obs, psi, psi);
        CHECK(std::abs(v.imag()) < 1e-12);
        CHECK(v.real() >= obs.spectrum_min() - 1e-10);
        CHECK(v.real() <= obs.spectrum_max() + 1e-10);
    }

    // sigma_z with psi_f = (1,0): the ratio collapses to 1 for every theta_i
    // short of orthogonality; cross-checked against explicit matrix products
    const Observable sz = pauli(PauliAxis::Z);
    for (double ti : {0.1, 0.5, 1.0, 1.5}) {
        const CVector pi_ = qubit_state(QubitParams(ti, 0.0));
        const CVector pf{1.0, 0.0};
        const Complex v = weak_value_trace(sz, pi_, pf);
        const Complex brute = inner(pf, sz.matrix() * pi_) / inner(pf, pi_);
        CHECK(std::abs(v - Complex{1.0}) < 1e-12);
        CHECK(std::abs(v - brute) == 0.0);
    }

    // sigma_y null phases: i tan(theta_f - theta_i)
    const Observable sy = pauli(PauliAxis::Y);
    for (int k = 0; k < 100; ++k) {
        const double ti = rng.uniform(0, kHalfPi), tf = rng.uniform(0, kHalfPi);
        if (std::pow(std::cos(tf - ti), 2) < 1e-6) continue;
        const Complex v = weak_value_trace(sy, qubit_state(QubitParams(ti, 0.0)),
                                           qubit_state(QubitParams(tf, 0.0)));
        CHECK(std::abs(v - Complex{0.0, std::tan(tf - ti)}) < 1e-12 * (1.0 + std::abs(v)));
    }

    try {
        weak_value_trace(sz, CVector{1.0, 0.0}, CVector{0.0, 1.0});
        FAIL("expected near-orthogonal-postselection");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::near_orthogonal_postselection);
        CHECK(e.payload() < 1e-14);  // carries the offending overlap
    }
}

TEST_CASE("weak operator construction") {
    Rng rng(47);

    // eigenvector pre-selection makes the operator normal
    const Observable sx = pauli(PauliAxis::X);
    const CVector plus = CVector{1.0, 1.0}.normalized();
    const WeakOperator w =
        build_weak_operator(sx, plus, qubit_state(QubitParams(0.3, 0.0)), WeakVariant::A);
    CHECK(normality_defect(w.matrix) < 1e-12);

    for (int k = 0; k < 200; ++k) {
        const std::size_t dim = 2 + static_cast<std::size_t>(rng.uniform01() * 1.999);
        const Observable obs = random_observable(rng, dim);
        const CVector pi_ = random_state(rng, dim);
        const CVector pf = random_state(rng, dim);
        if (std::norm(inner(pf, pi_)) < 1e-6) continue;
        const Complex v = weak_value_trace(obs, pi_, pf);

        const WeakOperator a = build_weak_operator(obs, pi_, pf, WeakVariant::A);
        CHECK(std::abs(inner(pf, a.matrix * pf) - v) < 1e-12 * (1.0 + std::abs(v)));
        CHECK(std::abs(a.nonzero_eig - trace(a.matrix)) < 1e-12);

        const WeakOperator ap = build_weak_operator(obs, pi_, pf, WeakVariant::APrime);
        CHECK(std::abs(inner(pi_, ap.matrix * pi_) - v) < 1e-12 * (1.0 + std::abs(v)));
    }
}

TEST_CASE("henrici spectral route") {
    Rng rng(53);
    for (int k = 0; k < 50; ++k) {
        const std::size_t n = 2 + static_cast<std::size_t>(rng.uniform01() * 2.999);
        const CMatrix r = random_matrix(rng, n);
        CHECK(henrici_spectral(Complex{0.5} * (r + adjoint(r))) < 1e-10);
    }

    CHECK(henrici_spectral(CMatrix{{0.0, 1.0}, {0.0, 0.0}}) == Approx(1.0).epsilon(1e-14));

    // sigma_x null phases: |cos 2 theta_i| / cos^2(theta_f - theta_i)
    const Observable sx = pauli(PauliAxis::X);
    for (int k = 0; k < 100; ++k) {
        const double ti = rng.uniform(0, kHalfPi), tf = rng.uniform(0, kHalfPi);
        const double ov = std::pow(std::cos(tf - ti), 2);
        if (ov < 1e-4) continue;
        const WeakOperator a = build_weak_operator(sx, qubit_state(QubitParams(ti, 0.0)),
                                                   qubit_state(QubitParams(tf, 0.0)),
                                                   WeakVariant::A);
        const double want = std::abs(std::cos(2 * ti)) / ov;
        CHECK(std::abs(henrici_spectral(a.matrix) - want) < 1e-10 * (1.0 + want));
    }
}

TEST_CASE("henrici structural route") {
    const Observable sx = pauli(PauliAxis::X);
    const CVector plus = CVector{1.0, 1.0}.normalized();
    CHECK(henrici_structural(sx, plus, 0.73) == Approx(0.0).margin(1e-10));

    // basis state: uncertainty of sigma_x is exactly 1 (brute-force moments)
    const CVector e0{1.0, 0.0};
    CHECK(henrici_structural(sx, e0, 1.0) == Approx(1.0).epsilon(1e-14));

    // dual route: structural equals spectral on random dim-3 instances
    Rng rng(59);
    for (int k = 0; k < 200; ++k) {
        const Observable obs = random_observable(rng, 3);
        const CVector pi_ = random_state(rng, 3);
        const CVector pf = random_state(rng, 3);
        const double ov = std::norm(inner(pf, pi_));
        if (ov < 1e-4) continue;
        const WeakOperator a = build_weak_operator(obs, pi_, pf, WeakVariant::A);
        CHECK(std::abs(henrici_structural(obs, pi_, ov) - henrici_spectral(a.matrix)) < 1e-10);
    }

    CHECK_THROWS_AS(henrici_structural(sx, e0, 0.0), Error);
}

TEST_CASE("normalized henrici departure") {
    const Observable sz = pauli(PauliAxis::Z);
    CHECK(normalized_henrici(sz, CVector{1.0, 0.0}) == Approx(0.0).margin(1e-12));
    CHECK(normalized_henrici(sz, CVector{1.0, 1.0}.normalized()) == Approx(1.0).epsilon(1e-14));
}

TEST_CASE("classification") {
    const Observable sx = pauli(PauliAxis::X);

    const auto in_range = classify(Complex{0.5, 0.0}, sx);
    CHECK(in_range.classification == 0);

    const auto complex_only = classify(Complex{0.0, 0.9}, sx);
    CHECK(complex_only.classification == kAnomalousComplex);

    const auto amplifying = classify(Complex{-3.2, 0.0}, sx);
    CHECK((amplifying.classification & kAnomalousOutsideRange) != 0);
    CHECK((amplifying.classification & kAmplifying) != 0);
    CHECK((amplifying.classification & kAnomalousComplex) == 0);
}

TEST_CASE("eigenstructure of the weak operator") {
    const Observable sz = pauli(PauliAxis::Z);

    // <psi_i|O|psi_i> = 0: nilpotent, all eigenvalues zero
    const CVector eq = CVector{1.0, 1.0}.normalized();
    const WeakOperator nil =
        build_weak_operator(sz, eq, qubit_state(QubitParams(0.4, 0.0)), WeakVariant::A);
    const auto es = eigenstructure(nil);
    CHECK(es.nilpotent);
    for (const Complex& z : es.eigenvalues) CHECK(std::abs(z) < 1e-12);
    CHECK(es.degenerate);
    CHECK(es.eigvec_angle < 1e-6);

    // fixed-scenario eigenvalues: the printed (normalized, label-swapped)
    // closed forms cos(theta) and cos(th)cos(2ti) + sqrt2 ci sin(th) si
    Rng rng(61);
    for (int k = 0; k < 100; ++k) {
        const double ti = rng.uniform(0.05, kHalfPi - 0.05);
        const double th = rng.uniform(0, kHalfPi);
        const Observable obs = bloch_observable(BlochObservableParams(th, kPi / 4.0));
        const CVector pi_ = qubit_state(QubitParams(ti, 0.0));
        const CVector pf{1.0, 0.0};
        const double ov = std::norm(inner(pf, pi_));

        const auto es_a = eigenstructure(build_weak_operator(obs, pi_, pf, WeakVariant::A));
        const double expect_a = std::abs(std::cos(th) * std::cos(2 * ti) +
                                         std::sqrt(2.0) * std::cos(ti) * std::sin(th) * std::sin(ti));
        CHECK(es_a.largest_abs_eig * ov == Approx(expect_a).margin(1e-10));

        const auto es_ap = eigenstructure(build_weak_operator(obs, pi_, pf, WeakVariant::APrime));
        CHECK(es_ap.largest_abs_eig * ov == Approx(std::abs(std::cos(th))).margin(1e-10));
    }
}

TEST_CASE("quasi-idempotence") {
    Rng rng(67);
    for (int k = 0; k < 200; ++k) {
        const Observable obs = random_observable(rng, 2);
        const CVector pi_ = random_state(rng, 2);
        const CVector pf = random_state(rng, 2);
        if (std::norm(inner(pf, pi_)) < 1e-4) continue;
        const WeakOperator a = build_weak_operator(obs, pi_, pf, WeakVariant::A);
        const double f2 = std::pow(frobenius_norm(a.matrix), 2);
        CHECK(quasi_idempotence_defect(a) <= 1e-12 * std::max(1.0, f2));
    }

    // nilpotent instance: W^2 itself vanishes
    const Observable sz = pauli(PauliAxis::Z);
    const WeakOperator nil = build_weak_operator(sz, CVector{1.0, 1.0}.normalized(),
                                                 qubit_state(QubitParams(0.4, 0.0)),
                                                 WeakVariant::A);
    CHECK(frobenius_norm(nil.matrix * nil.matrix) < 1e-12);

    // eigenvector pre-selection: defect still tiny and the operator normal
    const Observable sx = pauli(PauliAxis::X);
    const WeakOperator ev = build_weak_operator(sx, CVector{1.0, 1.0}.normalized(),
                                                qubit_state(QubitParams(0.3, 0.0)),
                                                WeakVariant::A);
    CHECK(quasi_idempotence_defect(ev) < 1e-12 * std::max(1.0, std::pow(frobenius_norm(ev.matrix), 2)));
    CHECK(normality_defect(ev.matrix) < 1e-12);
}

TEST_CASE("route equivalence across dimensions") {
    Rng rng(71);
    for (std::size_t dim : {2u, 3u, 5u}) {
        for (int k = 0; k < 300; ++k) {
            const Observable obs = random_observable(rng, dim);
            const CVector pi_ = random_state(rng, dim);
            const CVector pf = random_state(rng, dim);
            if (std::norm(inner(pf, pi_)) < 1e-6) continue;
            const Complex v = weak_value_trace(obs, pi_, pf);
            const WeakOperator a = build_weak_operator(obs, pi_, pf, WeakVariant::A);
            const WeakOperator ap = build_weak_operator(obs, pi_, pf, WeakVariant::APrime);
            const double scale = 1.0 + std::abs(v);
            CHECK(std::abs(v - inner(pf, a.matrix * pf)) < 1e-12 * scale);
            CHECK(std::abs(v - inner(pi_, ap.matrix * pi_)) < 1e-12 * scale);
        }
    }
}

TEST_CASE("uncertainty equals the Henrici departure at psi_f = psi_i") {
    Rng rng(73);
    for (int k = 0; k < 100; ++k) {
        const std::size_t dim = 2 + static_cast<std::size_t>(rng.uniform01() * 2.999);
        const Observable obs = random_observable(rng, dim);
        const CVector psi = random_state(rng, dim);
        const CMatrix opi = obs.matrix() * outer(psi, psi);
        CHECK(std::abs(henrici_spectral(opi) - normalized_henrici(obs, psi)) < 1e-10);
    }
}

TEST_CASE("full report carries both departures and the overlap") {
    const Observable sy = pauli(PauliAxis::Y);
    const auto rep = weak_value_report(sy, qubit_state(QubitParams(0.3, 0.0)),
                                       qubit_state(QubitParams(0.5, 0.0)));
    CHECK(rep.classification == kAnomalousComplex);
    CHECK(rep.overlap_sq == Approx(std::pow(std::cos(0.2), 2)).epsilon(1e-14));
    CHECK(rep.henrici_A == Approx(1.0 / std::pow(std::cos(0.2), 2)).epsilon(1e-12));
    CHECK(rep.henrici_Aprime == Approx(rep.henrici_A).epsilon(1e-12));
    CHECK(rep.spectrum_min == Approx(-1.0).epsilon(1e-12));
}
