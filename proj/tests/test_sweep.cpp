#include <catch2/catch_amalgamated.hpp>

#include <sstream>

#include "wvnn/oracles.hpp"
#include "wvnn/rng.hpp"
#include "wvnn/sweep.hpp"

using namespace wvnn;
using Catch::Approx;

TEST_CASE("state grid sweep") {
    GridSpec g(pauli(PauliAxis::X), "pauli-x");
    g.theta_i_steps = g.theta_f_steps = 101;
    const SweepTable t = state_grid_sweep(g);
    REQUIRE(t.rows() == 101u * 101u);

    // the orthogonal corners are gaps, never fabricated values
    CHECK(t.meta.at("gap_count") == "2");
    CHECK(!std::isfinite(t.at(t.field_index("wv_abs"), 0, 100)));
    CHECK(t.at(t.field_index("class_code"), 0, 100) == kGapClassCode);

    // grid midpoint (pi/4, pi/4): eigenvector pre-selection
    CHECK(t.at(t.field_index("df_A"), 50, 50) == Approx(0.0).margin(1e-12));
    CHECK(t.at(t.field_index("wv_abs"), 50, 50) == Approx(1.0).epsilon(1e-12));

    // spot-check against the single-point computation
    Rng rng(109);
    for (int k = 0; k < 100; ++k) {
        const std::size_t i = static_cast<std::size_t>(rng.uniform01() * 100.999);
        const std::size_t j = static_cast<std::size_t>(rng.uniform01() * 100.999);
        const CVector pi_ = qubit_state(QubitParams(t.axes[0][i], 0.0));
        const CVector pf = qubit_state(QubitParams(t.axes[1][j], 0.0));
        if (std::norm(inner(pf, pi_)) < kDefaultOverlapFloor) continue;
        const auto rep = weak_value_report(g.observable, pi_, pf);
        CHECK(std::abs(t.at(t.field_index("wv_abs"), i, j) - std::abs(rep.value)) < 1e-12);
        CHECK(std::abs(t.at(t.field_index("df_A"), i, j) - rep.henrici_A) < 1e-12);
        CHECK(std::abs(t.at(t.field_index("df_Aprime"), i, j) - rep.henrici_Aprime) < 1e-12);
        CHECK(t.at(t.field_index("class_code"), i, j) ==
              static_cast<double>(rep.classification));
    }

    CHECK_THROWS_AS([] {
        GridSpec bad(pauli(PauliAxis::X), "pauli-x");
        bad.theta_i_steps = 1;
        return state_grid_sweep(bad);
    }(), Error);
}

TEST_CASE("sigma_z grid never amplifies") {
    GridSpec g(pauli(PauliAxis::Z), "pauli-z");
    g.theta_i_steps = g.theta_f_steps = 201;
    const SweepTable t = state_grid_sweep(g);
    int amplifying = 0;
    for (double c : t.field("class_code")) {
        const int code = static_cast<int>(c);
        if (code > 0 && (code & static_cast<int>(kAmplifying))) ++amplifying;
    }
    CHECK(amplifying == 0);
    CHECK(boundary_curves(t, 2.0).empty());
}

TEST_CASE("qutrit grid with the lambda_5 observable") {
    GridSpec g(gellmann(5), "gellmann-5");
    g.qutrit = true;
    g.extra_params = {{"alpha_i", kPi / 8.0},  {"chi1_i", kPi / 7.0}, {"chi2_i", kPi / 21.0},
                      {"alpha_f", kPi / 3.0},  {"chi1_f", kPi / 4.0}, {"chi2_f", 0.0}};
    g.theta_i_steps = g.theta_f_steps = 41;
    const SweepTable t = state_grid_sweep(g);
    CHECK(t.axes[0].size() == 41);
    CHECK(t.axes[1].back() == Approx(kHalfPi));

    // spot-check one interior point against the single-point route
    const std::size_t i = 17, j = 29;
    const CVector pi_ = qutrit_state(QutritParams(t.axes[0][i], kPi / 8.0, kPi / 7.0, kPi / 21.0));
    const CVector pf = qutrit_state(QutritParams(t.axes[1][j], kPi / 3.0, kPi / 4.0, 0.0));
    const auto rep = weak_value_report(g.observable, pi_, pf);
    CHECK(t.at(t.field_index("wv_re"), i, j) == Approx(rep.value.real()).margin(1e-12));
    CHECK(t.at(t.field_index("df_Aprime"), i, j) == Approx(rep.henrici_Aprime).margin(1e-12));
}

TEST_CASE("boundary curves") {
    GridSpec g(pauli(PauliAxis::X), "pauli-x");
    g.theta_i_steps = g.theta_f_steps = 201;
    const SweepTable t = state_grid_sweep(g);

    // the |O_w| = 1 locus at null phases is cos(2 theta_f) cos(2 theta_i) = 0
    const auto level1 = boundary_curves(t, 1.0);
    REQUIRE(!level1.empty());
    std::size_t points = 0;
    for (const auto& c : level1) {
        for (const auto& p : c.points) {
            const double miss =
                std::min(std::abs(std::cos(2 * p[0])), std::abs(std::cos(2 * p[1])));
            CHECK(miss < 1e-10);
            ++points;
        }
    }
    CHECK(points > 100);

    CHECK(!boundary_curves(t, 2.0).empty());
    CHECK(boundary_curves(t, -1.0).empty());
    CHECK(boundary_curves(t, 1e9).empty());
}

TEST_CASE("observable sweep") {
    ObservableSweepSpec s;
    s.phi = kPi / 12.0;
    s.theta_f = 0.0;
    s.theta_i = 1.4;
    s.steps = 501;
    const SweepTable t = observable_sweep(s);
    REQUIRE(t.rows() == 501);

    // per-point fields match the direct computations
    const CVector pi_ = s.make_psi_i();
    const CVector pf = s.make_psi_f();
    for (std::size_t k : {0u, 123u, 250u, 500u}) {
        const Observable obs = bloch_observable(BlochObservableParams(t.axes[0][k], s.phi));
        CHECK(t.at(t.field_index("numerator"), 0, k) ==
              Approx(std::abs(inner(pf, obs.matrix() * pi_))).margin(1e-12));
        CHECK(t.at(t.field_index("dfn_A"), 0, k) ==
              Approx(normalized_henrici(obs, pi_)).margin(1e-12));
        CHECK(t.at(t.field_index("dfn_Aprime"), 0, k) ==
              Approx(normalized_henrici(obs, pf)).margin(1e-12));
    }

    // orthogonal pre/post-selection: numerator and departures still defined,
    // weak-value fields are gaps, and all three curves coincide
    ObservableSweepSpec ortho = s;
    ortho.theta_i = kHalfPi;
    const SweepTable to = observable_sweep(ortho);
    CHECK(to.meta.at("gap_count") == std::to_string(to.rows()));
    for (std::size_t k : {50u, 200u, 450u}) {
        const double num = to.at(to.field_index("numerator"), 0, k);
        CHECK(std::isfinite(num));
        CHECK(num == Approx(to.at(to.field_index("dfn_A"), 0, k)).margin(1e-12));
        CHECK(num == Approx(to.at(to.field_index("dfn_Aprime"), 0, k)).margin(1e-12));
        CHECK(!std::isfinite(to.at(to.field_index("wv_abs"), 0, k)));
    }
}

TEST_CASE("degeneracy location") {
    ObservableSweepSpec s;
    s.phi = kPi / 4.0;
    s.theta_f = 0.0;

    for (double ti : {0.9, 1.2}) {
        s.theta_i = ti;
        // A' trace is proportional to cos(theta): zero at pi/2 for every ti
        const auto dap = locate_degeneracy(s, WeakVariant::APrime, 0.0, kHalfPi);
        CHECK(dap.theta_star == Approx(kHalfPi).margin(1e-10));
        CHECK(dap.fubini_at_star < 1e-6);

        // A trace vanishes at arctan(-sqrt2 cot 2 theta_i) above pi/4
        const auto da = locate_degeneracy(s, WeakVariant::A, 0.0, kHalfPi);
        CHECK(da.theta_star ==
              Approx(std::atan(-std::sqrt(2.0) / std::tan(2 * ti))).margin(1e-10));
        CHECK(da.fubini_at_star < 1e-6);
    }

    // below pi/4 the variant-A trace has no zero in range
    s.theta_i = 0.3;
    try {
        locate_degeneracy(s, WeakVariant::A, 0.0, kHalfPi);
        FAIL("expected not-found");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::not_found);
    }
}

TEST_CASE("extrema report") {
    ObservableSweepSpec s;
    s.phi = kPi / 4.0;
    s.theta_f = 0.0;
    s.theta_i = 0.6;
    s.steps = 2000;
    const auto er = extrema_report(observable_sweep(s));
    CHECK(er.mean_check <= 1e-4);
    CHECK(er.argmax_wv == Approx(oracles::quarter_phi_argmax_theta(0.6)).margin(1e-5));

    // flat table: tie-break at the first grid point
    SweepTable flat;
    flat.axis_names = {"theta"};
    flat.axes = {wvnn::detail::linspace(0.0, 1.0, 11)};
    flat.field_names = {"wv_abs", "dfn_A", "dfn_Aprime", "amp_mask"};
    flat.fields.assign(4, std::vector<double>(11, 0.5));
    flat.meta["amp_threshold"] = "1";
    const auto fr = extrema_report(flat);
    CHECK(fr.argmax_wv == 0.0);
    CHECK(fr.argmax_dfn_A == 0.0);
}

TEST_CASE("sigma_y linearity of |O_w|^2 in the Henrici departure") {
    GridSpec g(pauli(PauliAxis::Y), "pauli-y");
    g.theta_i_steps = g.theta_f_steps = 201;
    const SweepTable t = state_grid_sweep(g);
    for (std::size_t i : {10u, 100u, 180u}) {
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        int n = 0;
        for (std::size_t j = 0; j < t.axes[1].size(); ++j) {
            const double w = t.at(t.field_index("wv_abs"), i, j);
            const double df = t.at(t.field_index("df_A"), i, j);
            if (!std::isfinite(w) || w * w <= 1e-12) continue;  // anomalous region only
            sx += df;
            sy += w * w;
            sxx += df * df;
            sxy += df * w * w;
            ++n;
        }
        REQUIRE(n > 10);
        const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
        const double icept = (sy - slope * sx) / n;
        CHECK(slope == Approx(1.0).margin(1e-9));
        CHECK(icept == Approx(-1.0).margin(1e-9));
    }
}

TEST_CASE("serialization") {
    GridSpec g(pauli(PauliAxis::X), "pauli-x");
    g.theta_i_steps = g.theta_f_steps = 21;
    g.id = "roundtrip";
    const SweepTable t = state_grid_sweep(g);

    std::ostringstream csv1, csv2, js;
    write_csv(t, csv1);
    write_csv(state_grid_sweep(g), csv2);
    CHECK(csv1.str() == csv2.str());  // byte-identical regeneration

    // header carries axes then fields; one row per grid point
    const std::string body = csv1.str();
    CHECK(body.find("theta_i,theta_f,wv_abs,") != std::string::npos);
    std::size_t rows = 0;
    for (char c : body)
        if (c == '\n') ++rows;
    std::size_t comments = 0;
    for (std::size_t pos = 0; (pos = body.find("\n#", pos)) != std::string::npos; ++pos)
        ++comments;
    CHECK(rows == 21 * 21 + comments + 2);  // comments + header + data

    write_json(t, js);
    CHECK(js.str().find("\"wv_abs\"") != std::string::npos);
    CHECK(js.str().find("\"meta\"") != std::string::npos);

    const std::string name = table_filename(t, "csv");
    CHECK(name.rfind("roundtrip__pauli-x__", 0) == 0);
    CHECK(name.substr(name.size() - 4) == ".csv");
}

TEST_CASE("qutrit grid rejects out-of-range extra angles up front") {
    GridSpec g(gellmann(5), "gellmann-5");
    g.qutrit = true;
    g.extra_params = {{"alpha_i", 9.0}};  // outside [0, pi/2]
    CHECK_THROWS_AS(state_grid_sweep(g), Error);
}
