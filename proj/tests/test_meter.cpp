#include <catch2/catch_amalgamated.hpp>

#include "wvnn/meter.hpp"
#include "wvnn/oracles.hpp"
#include "wvnn/rng.hpp"

using namespace wvnn;
using Catch::Approx;

namespace {

const std::vector<double> kLadder{1e-2, 5e-3, 2.5e-3};

}  // namespace

TEST_CASE("eigenvector pre-selection shifts the pointer by gamma lambda") {
    ProtocolConfig cfg{pauli(PauliAxis::Z), CVector{1.0, 0.0}, CVector{1.0, 0.0}, 0.3};
    const auto r = run_protocol(cfg);
    CHECK(r.mean_x == Approx(0.3).margin(1e-10));
    CHECK(std::abs(r.mean_p) < 1e-12);
    CHECK(r.success_prob == Approx(1.0).margin(1e-12));
    CHECK(std::abs(r.conditioned_meter.norm_sq() * (2.0 * cfg.meter.x_extent /
                                                    cfg.meter.grid_points) -
                   1.0) < 1e-12);

    // the minus eigenvalue via the other basis state
    cfg.psi_i = CVector{0.0, 1.0};
    cfg.psi_f = cfg.psi_i;
    CHECK(run_protocol(cfg).mean_x == Approx(-0.3).margin(1e-10));

    // flipping the coupling sign flips the shift
    cfg.sign = CouplingSign::ExponentPlus;
    CHECK(run_protocol(cfg).mean_x == Approx(0.3).margin(1e-10));
}

TEST_CASE("success probability approaches the overlap as gamma shrinks") {
    ProtocolConfig cfg{pauli(PauliAxis::X), qubit_state(QubitParams(0.3, 0.0)),
                       qubit_state(QubitParams(1.1, 0.0)), 1e-2};
    const double ov = std::norm(overlap(cfg.psi_f, cfg.psi_i));
    double prev = 1e300;
    for (double g : {2e-2, 1e-2, 5e-3}) {
        cfg.gamma = g;
        const double dev = std::abs(run_protocol(cfg).success_prob - ov);
        CHECK(dev < prev);
        prev = dev;
    }
    cfg.gamma = 1e-4;
    CHECK(run_protocol(cfg).success_prob == Approx(ov).margin(1e-6));
}

TEST_CASE("norm conservation before post-selection") {
    ProtocolConfig cfg{pauli_combo_xyz(), qubit_state(QubitParams(0.4, 0.9)),
                       qubit_state(QubitParams(1.2, 0.2)), 2e-2};
    CHECK(run_protocol(cfg).joint_norm == Approx(1.0).margin(1e-12));
}

TEST_CASE("shift estimates recover the sigma_y weak value") {
    ProtocolConfig cfg{pauli(PauliAxis::Y), qubit_state(QubitParams(0.3, 0.0)),
                       qubit_state(QubitParams(0.5, 0.0)), 1e-2};
    const auto est = weak_shift_estimate(cfg, kLadder);
    CHECK(std::abs(est.re_est) < 1e-6);
    CHECK(est.im_est == Approx(std::tan(0.2)).margin(1e-4));
}

TEST_CASE("identical pre and post selection estimates the expectation value") {
    Rng rng(107);
    const Observable obs = random_observable(rng, 2);
    const CVector psi = random_state(rng, 2);
    ProtocolConfig cfg{obs, psi, psi, 1e-2};
    const auto est = weak_shift_estimate(cfg, kLadder);
    const double expect = inner(psi, obs.matrix() * psi).real();
    CHECK(est.re_est == Approx(expect).margin(1e-6));
    CHECK(std::abs(est.im_est) < 1e-6);
}

TEST_CASE("near-orthogonal amplification |O_w| ~ 10 converges on the ladder") {
    // sin(tf+ti) = 1 and cos(tf-ti) = 0.1 gives a real weak value of 10
    const double delta = std::acos(0.1);
    ProtocolConfig cfg{pauli(PauliAxis::X), qubit_state(QubitParams((kHalfPi - delta) / 2, 0.0)),
                       qubit_state(QubitParams((kHalfPi + delta) / 2, 0.0)), 1e-2};
    const Complex wv = weak_value_trace(cfg.observable, cfg.psi_i, cfg.psi_f);
    REQUIRE(std::abs(wv) == Approx(10.0).epsilon(1e-10));
    const auto est = weak_shift_estimate(cfg, kLadder);
    CHECK(est.re_est == Approx(wv.real()).margin(1e-4));
    CHECK(std::abs(est.im_est) < 1e-4);
}

TEST_CASE("imaginary channel is silent for real weak values") {
    for (double g : {4e-2, 1e-2, 2.5e-3}) {
        ProtocolConfig cfg{pauli(PauliAxis::X), qubit_state(QubitParams(0.2, 0.0)),
                           qubit_state(QubitParams(1.25, 0.0)), g};
        CHECK(std::abs(run_protocol(cfg).mean_p) < 1e-12);
    }
}

TEST_CASE("linear-response bound under gamma halving") {
    ProtocolConfig cfg{pauli(PauliAxis::X), qubit_state(QubitParams(0.3, 1.1)),
                       qubit_state(QubitParams(1.2, 0.4)), 2e-2};
    const Complex wv = weak_value_trace(cfg.observable, cfg.psi_i, cfg.psi_f);
    double err[3];
    double g = 2e-2;
    for (int k = 0; k < 3; ++k, g /= 2) {
        cfg.gamma = g;
        err[k] = std::abs(run_protocol(cfg).mean_x / cfg.gamma - wv.real());
    }
    const double c_est = err[0] / 2e-2;
    CHECK(err[1] <= 1.2 * c_est * 1e-2);
    CHECK(err[2] <= 1.2 * c_est * 5e-3);
    CHECK(err[0] / err[1] >= 1.6);  // measured shrink is quadratic (ratio 4)
}

TEST_CASE("configuration validation") {
    ProtocolConfig cfg{pauli(PauliAxis::Z), CVector{1.0, 0.0}, CVector{1.0, 0.0}, 6.0};
    try {
        run_protocol(cfg);
        FAIL("expected grid-overflow");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::grid_overflow);
    }

    cfg.gamma = 1e-2;
    cfg.meter.grid_points = 100;  // not a power of two
    CHECK_THROWS_AS(run_protocol(cfg), Error);
    cfg.meter.grid_points = 1024;
    cfg.meter.x_extent = 3.0;  // < 8 sigma_x
    CHECK_THROWS_AS(run_protocol(cfg), Error);

    cfg.meter.x_extent = 20.0;
    cfg.psi_f = CVector{0.0, 1.0};
    try {
        run_protocol(cfg);
        FAIL("expected near-orthogonal-postselection");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::near_orthogonal_postselection);
    }

    cfg.psi_f = CVector{1.0, 0.0};
    CHECK_THROWS_AS(weak_shift_estimate(cfg, std::vector<double>{1e-2, 5e-3}), Error);
    CHECK_THROWS_AS(weak_shift_estimate(cfg, std::vector<double>{1e-2, 2e-2, 4e-2}), Error);
}
