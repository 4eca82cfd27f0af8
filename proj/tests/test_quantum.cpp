#include <catch2/catch_amalgamated.hpp>

#include "wvnn/observables.hpp"
#include "wvnn/rng.hpp"
#include "wvnn/states.hpp"

using namespace wvnn;
using Catch::Approx;

TEST_CASE("qubit state") {
    const CVector pole = qubit_state(QubitParams(0.0, 1.0));
    CHECK(std::abs(pole[0] - Complex{1.0}) < 1e-15);
    CHECK(std::abs(pole[1]) < 1e-15);

    const CVector south = qubit_state(QubitParams(kHalfPi, kPi));
    CHECK(std::abs(south[0]) < 1e-15);
    CHECK(std::abs(south[1] - Complex{-1.0}) < 1e-15);

    const CVector eq = qubit_state(QubitParams(kPi / 4.0, 0.0));
    CHECK(eq[0].real() == Approx(1.0 / std::sqrt(2.0)).epsilon(1e-15));
    CHECK(eq[1].real() == Approx(1.0 / std::sqrt(2.0)).epsilon(1e-15));

    CHECK_THROWS_AS(QubitParams(-0.1, 0.0), Error);
    CHECK_THROWS_AS(QubitParams(0.3, 7.0), Error);

    // the permissive constructor wraps instead
    const QubitParams w = QubitParams::wrapped(kPi - 0.3, -kHalfPi);
    CHECK(w.theta == Approx(0.3));
    CHECK(w.xi == Approx(1.5 * kPi));
}

TEST_CASE("qutrit state") {
    const CVector a = qutrit_state(QutritParams(0.0, 0.3, 1.0, 2.0));
    CHECK(std::abs(a[0] - Complex{1.0}) < 1e-15);
    CHECK(std::abs(a[1]) < 1e-15);
    CHECK(std::abs(a[2]) < 1e-15);

    const CVector b = qutrit_state(QutritParams(kHalfPi, 0.0, 0.0, 1.0));
    CHECK(std::abs(b[1] - Complex{1.0}) < 1e-15);

    const CVector c = qutrit_state(QutritParams(kHalfPi, kHalfPi, 0.0, kHalfPi));
    CHECK(std::abs(c[2] - Complex{0.0, 1.0}) < 1e-15);

    Rng rng(31);
    for (int k = 0; k < 500; ++k) {
        const CVector v = qutrit_state(QutritParams(rng.uniform(0, kHalfPi),
                                                    rng.uniform(0, kHalfPi),
                                                    rng.uniform(0, 2 * kPi),
                                                    rng.uniform(0, 2 * kPi)));
        CHECK(std::abs(v.norm() - 1.0) < 1e-14);
    }
}

TEST_CASE("overlap") {
    const CVector a = qubit_state(QubitParams(0.7, 1.2));
    CHECK(std::abs(overlap(a, a) - Complex{1.0}) < 1e-14);

    CHECK(std::abs(overlap(CVector{1.0, 0.0}, CVector{0.0, 1.0})) == 0.0);

    // null phases: <f|i> = cos(theta_f - theta_i)
    Rng rng(37);
    for (int k = 0; k < 200; ++k) {
        const double ti = rng.uniform(0, kHalfPi), tf = rng.uniform(0, kHalfPi);
        const Complex ov = overlap(qubit_state(QubitParams(tf, 0.0)),
                                   qubit_state(QubitParams(ti, 0.0)));
        CHECK(std::abs(ov - Complex{std::cos(tf - ti)}) < 1e-14);
    }

    CHECK_THROWS_AS(overlap(CVector{1.0, 0.0}, CVector{1.0, 0.0, 0.0}), Error);
    CHECK_THROWS_AS(overlap(CVector{2.0, 0.0}, CVector{1.0, 0.0}), Error);
}

TEST_CASE("fubini angle") {
    const CVector a{1.0, 0.0};
    CHECK(fubini_angle(a, a) == Approx(0.0).margin(1e-15));
    CHECK(fubini_angle(a, CVector{0.0, 1.0}) == Approx(kHalfPi).epsilon(1e-15));
    CHECK(fubini_angle(a, CVector{1.0, 1.0}) == Approx(kPi / 4.0).epsilon(1e-12));

    try {
        fubini_angle(a, CVector{0.0, 0.0});
        FAIL("expected degenerate-input");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::degenerate_input);
    }

    Rng rng(41);
    for (int k = 0; k < 200; ++k) {
        const CVector u = random_state(rng, 3);
        const CVector v = random_state(rng, 3);
        const double ang = fubini_angle(u, v);
        CHECK(std::abs(ang - fubini_angle(v, u)) < 1e-12);
        CVector up(3);
        const Complex ph = std::polar(1.0, rng.uniform(0, 2 * kPi));
        for (std::size_t i = 0; i < 3; ++i) up[i] = ph * u[i];
        CHECK(std::abs(fubini_angle(up, v) - ang) < 1e-12);
    }
}

TEST_CASE("pauli matrices") {
    const CMatrix sx = pauli(PauliAxis::X).matrix();
    CHECK(sx(0, 1) == Complex{1.0});
    CHECK(sx(1, 0) == Complex{1.0});
    CHECK(sx(0, 0) == Complex{0.0});

    const CMatrix sy = pauli(PauliAxis::Y).matrix();
    CHECK(sy(0, 1) == Complex{0.0, -1.0});
    CHECK(sy(1, 0) == Complex{0.0, 1.0});

    const CMatrix sz = pauli(PauliAxis::Z).matrix();
    CHECK(sz(0, 0) == Complex{1.0});
    CHECK(sz(1, 1) == Complex{-1.0});

    for (PauliAxis ax : {PauliAxis::X, PauliAxis::Y, PauliAxis::Z}) {
        const Observable o = pauli(ax);
        CHECK(frobenius_norm(o.matrix() * o.matrix() - CMatrix::identity(2)) < 1e-15);
        CHECK(o.spectrum_min() == Approx(-1.0).epsilon(1e-12));
        CHECK(o.spectrum_max() == Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("gell-mann matrices") {
    const CMatrix l5 = gellmann(5).matrix();
    CHECK(l5(0, 2) == Complex{0.0, -1.0});
    CHECK(l5(2, 0) == Complex{0.0, 1.0});
    CHECK(l5(1, 1) == Complex{0.0});

    const CMatrix l3 = gellmann(3).matrix();
    CHECK(l3(0, 0) == Complex{1.0});
    CHECK(l3(1, 1) == Complex{-1.0});
    CHECK(l3(2, 2) == Complex{0.0});

    const double r3 = 1.0 / std::sqrt(3.0);
    const CMatrix l8 = gellmann(8).matrix();
    CHECK(l8(0, 0) == Complex{r3});
    CHECK(l8(1, 1) == Complex{r3});
    CHECK(l8(2, 2).real() == Approx(-2.0 * r3).epsilon(1e-15));

    for (int a = 1; a <= 8; ++a) {
        CHECK(std::abs(trace(gellmann(a).matrix())) < 1e-15);
        for (int b = 1; b <= 8; ++b) {
            const Complex tr = trace(gellmann(a).matrix() * gellmann(b).matrix());
            CHECK(std::abs(tr - (a == b ? Complex{2.0} : Complex{0.0})) < 1e-12);
        }
    }

    CHECK_THROWS_AS(gellmann(0), Error);
    CHECK_THROWS_AS(gellmann(9), Error);
}

TEST_CASE("bloch observable") {
    const Observable oz = bloch_observable(BlochObservableParams(0.0, 2.2));
    CHECK(frobenius_norm(oz.matrix() - pauli(PauliAxis::Z).matrix()) < 1e-15);

    const Observable ox = bloch_observable(BlochObservableParams(kHalfPi, 0.0));
    CHECK(frobenius_norm(ox.matrix() - pauli(PauliAxis::X).matrix()) < 1e-15);

    // phi = pi/4 slice: off-diagonal (1 -+ i)/sqrt(2) sin(theta)
    const double th = 0.83;
    const Observable oc = bloch_observable(BlochObservableParams(th, kPi / 4.0));
    const Complex want{std::sin(th) / std::sqrt(2.0), -std::sin(th) / std::sqrt(2.0)};
    CHECK(std::abs(oc.matrix()(0, 1) - want) < 1e-15);
    CHECK(std::abs(oc.matrix()(0, 0) - Complex{std::cos(th)}) < 1e-15);

    for (int i = 0; i < 50; ++i)
        for (int j = 0; j < 50; ++j) {
            const Observable o = bloch_observable(
                BlochObservableParams(kHalfPi * (i / 49.0), 2.0 * kPi * (j / 49.0)));
            CHECK(std::abs(o.spectrum_min() + 1.0) < 1e-12);
            CHECK(std::abs(o.spectrum_max() - 1.0) < 1e-12);
        }

    CHECK_THROWS_AS(bloch_observable(BlochObservableParams(2.0, 0.0)), Error);
}

TEST_CASE("observable from matrix") {
    const Observable o = observable_from_matrix(CMatrix{{0.0, 1.0}, {1.0, 0.0}});
    CHECK(o.spectrum_min() == Approx(-1.0).epsilon(1e-12));
    CHECK(o.spectrum_max() == Approx(1.0).epsilon(1e-12));

    // unit Bloch vector (sx + sy + sz)/sqrt(3): spectrum still {-1, 1}
    const Observable combo = pauli_combo_xyz();
    const auto ev = eigvals_closed(combo.matrix());
    CHECK(std::abs(ev[0] - Complex{-1.0}) < 1e-12);
    CHECK(std::abs(ev[1] - Complex{1.0}) < 1e-12);
    CHECK(combo.spectrum_min() == Approx(-1.0).epsilon(1e-12));
    CHECK(combo.spectrum_max() == Approx(1.0).epsilon(1e-12));

    try {
        observable_from_matrix(CMatrix{{0.0, 1.0}, {0.0, 0.0}});
        FAIL("expected hermiticity-violation");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::hermiticity_violation);
        CHECK(e.payload() > 0.0);  // carries the defect norm
    }
}
