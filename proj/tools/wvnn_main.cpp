// wvnn: weak values, non-normal operators and Henrici departures.
//
// Subcommands: weak-value (single-point report), sweep (figure-data grids and
// observable sweeps, CSV/JSON), meter (von Neumann pointer simulation),
// verify (the full property suite).
//
// Exit codes: 0 ok, 1 usage/IO error, 2 degenerate input (near-orthogonal
// post-selection, non-Hermitian matrix, grid overflow), 3 verification
// failure.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "wvnn/wvnn.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace wvnn;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitDegenerate = 2;
constexpr int kExitVerifyFailure = 3;

int exit_code_for(const Error& e) {
    switch (e.code()) {
        case Errc::near_orthogonal_postselection:
        case Errc::degenerate_input:
        case Errc::hermiticity_violation:
        case Errc::grid_overflow:
        case Errc::excluded_parameter:
        case Errc::domain_error:
        case Errc::not_found:
        case Errc::outside_weak_regime:
            return kExitDegenerate;
        default:
            return kExitUsage;
    }
}

CMatrix read_matrix_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(Errc::io_error, "cannot open " + path);
    std::size_t n = 0;
    in >> n;
    if (!in || n < 1 || n > 64) throw Error(Errc::io_error, "bad matrix header in " + path);
    std::vector<Complex> e;
    e.reserve(n * n);
    for (std::size_t k = 0; k < n * n; ++k) {
        double re = 0, im = 0;
        in >> re >> im;
        if (!in) throw Error(Errc::io_error, "truncated matrix in " + path);
        e.emplace_back(re, im);
    }
    return CMatrix::from_entries(n, std::move(e));
}

CVector read_vector_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(Errc::io_error, "cannot open " + path);
    std::size_t n = 0;
    in >> n;
    if (!in || n < 1 || n > 64) throw Error(Errc::io_error, "bad vector header in " + path);
    std::vector<Complex> e;
    for (std::size_t k = 0; k < n; ++k) {
        double re = 0, im = 0;
        in >> re >> im;
        if (!in) throw Error(Errc::io_error, "truncated vector in " + path);
        e.emplace_back(re, im);
    }
    return CVector::from_entries(std::move(e)).normalized();
}

/// "pauli:x|y|z", "combo", "gellmann:K", "bloch:THETA,PHI", "file:PATH"
Observable parse_observable(const std::string& spec, std::string& tag) {
    auto fail = [&]() -> Observable {
        throw Error(Errc::invalid_argument, "unrecognized observable spec: " + spec);
    };
    if (spec.rfind("pauli:", 0) == 0) {
        if (spec.size() != 7) return fail();
        tag = "pauli-" + spec.substr(6);
        switch (spec[6]) {
            case 'x': return pauli(PauliAxis::X);
            case 'y': return pauli(PauliAxis::Y);
            case 'z': return pauli(PauliAxis::Z);
            default: return fail();
        }
    }
    if (spec == "combo") {
        tag = "combo-xyz";
        return pauli_combo_xyz();
    }
    if (spec.rfind("gellmann:", 0) == 0) {
        const int k = std::atoi(spec.c_str() + 9);
        tag = "gellmann-" + std::to_string(k);
        return gellmann(k);
    }
    if (spec.rfind("bloch:", 0) == 0) {
        double th = 0, ph = 0;
        if (std::sscanf(spec.c_str() + 6, "%lf,%lf", &th, &ph) != 2) return fail();
        tag = "bloch";
        return bloch_observable(BlochObservableParams(th, ph));
    }
    if (spec.rfind("file:", 0) == 0) {
        tag = "file";
        return observable_from_matrix(read_matrix_file(spec.substr(5)));
    }
    return fail();
}

json complex_json(Complex z) { return json{{"re", z.real()}, {"im", z.imag()}}; }

std::vector<std::string> class_tags(unsigned code) {
    std::vector<std::string> tags;
    if (code & kAnomalousComplex) tags.push_back("anomalous-complex");
    if (code & kAnomalousOutsideRange) tags.push_back("anomalous-outside-range");
    if (code & kAmplifying) tags.push_back("amplifying");
    if (tags.empty()) tags.push_back("in-range");
    return tags;
}

struct StateArgs {
    double theta_i = 0.0, theta_f = 0.0, xi_i = 0.0, xi_f = 0.0;
    bool qutrit = false;
    double alpha_i = 0.0, chi1_i = 0.0, chi2_i = 0.0;
    double alpha_f = 0.0, chi1_f = 0.0, chi2_f = 0.0;
    std::string psi_i_file, psi_f_file;

    CVector make(bool final_state) const {
        const std::string& file = final_state ? psi_f_file : psi_i_file;
        if (!file.empty()) return read_vector_file(file);
        if (qutrit) {
            return final_state
                       ? qutrit_state(QutritParams(theta_f, alpha_f, chi1_f, chi2_f))
                       : qutrit_state(QutritParams(theta_i, alpha_i, chi1_i, chi2_i));
        }
        return final_state ? qubit_state(QubitParams(theta_f, xi_f))
                           : qubit_state(QubitParams(theta_i, xi_i));
    }
};

void add_state_options(CLI::App* cmd, StateArgs& st) {
    cmd->add_option("--theta-i", st.theta_i, "pre-selection polar angle [0, pi/2]");
    cmd->add_option("--theta-f", st.theta_f, "post-selection polar angle [0, pi/2]");
    cmd->add_option("--xi-i", st.xi_i, "pre-selection phase [0, 2pi]");
    cmd->add_option("--xi-f", st.xi_f, "post-selection phase [0, 2pi]");
    cmd->add_flag("--qutrit", st.qutrit, "three-level states");
    cmd->add_option("--alpha-i", st.alpha_i, "qutrit alpha_i");
    cmd->add_option("--chi1-i", st.chi1_i, "qutrit chi1_i");
    cmd->add_option("--chi2-i", st.chi2_i, "qutrit chi2_i");
    cmd->add_option("--alpha-f", st.alpha_f, "qutrit alpha_f");
    cmd->add_option("--chi1-f", st.chi1_f, "qutrit chi1_f");
    cmd->add_option("--chi2-f", st.chi2_f, "qutrit chi2_f");
    cmd->add_option("--psi-i-file", st.psi_i_file, "pre-selected state from file");
    cmd->add_option("--psi-f-file", st.psi_f_file, "post-selected state from file");
}

bool parse_range(const std::string& spec, double& lo, double& hi, int& steps) {
    return std::sscanf(spec.c_str(), "%lf:%lf:%d", &lo, &hi, &steps) == 3;
}

// ---------------------------------------------------------------------------
// weak-value

struct WeakValueArgs {
    std::string obs_spec = "pauli:z";
    StateArgs st;
    double tol = kClassifyTol;
    double overlap_floor = kDefaultOverlapFloor;
};

int run_weak_value(const WeakValueArgs& a) {
    std::string tag;
    const Observable obs = parse_observable(a.obs_spec, tag);
    const CVector psi_i = a.st.make(false);
    const CVector psi_f = a.st.make(true);
    const WeakValueReport rep = weak_value_report(obs, psi_i, psi_f, a.tol, a.overlap_floor);
    json out{{"value", complex_json(rep.value)},
             {"value_abs", std::abs(rep.value)},
             {"spectrum_min", rep.spectrum_min},
             {"spectrum_max", rep.spectrum_max},
             {"classification", class_tags(rep.classification)},
             {"class_code", rep.classification},
             {"henrici_A", rep.henrici_A},
             {"henrici_Aprime", rep.henrici_Aprime},
             {"overlap_sq", rep.overlap_sq}};
    std::cout << out.dump(2) << "\n";
    return kExitOk;
}

// ---------------------------------------------------------------------------
// sweep

struct SweepArgs {
    std::string kind = "state-grid";  // state-grid | obs-sweep | extrema | branch-curve
    std::string obs_spec = "pauli:x";
    std::string theta_i_range = "0:1.5707963267948966:400";
    std::string theta_f_range = "0:1.5707963267948966:400";
    double xi_i = 0.0, xi_f = 0.0;
    bool qutrit = false;
    double alpha_i = 0.0, chi1_i = 0.0, chi2_i = 0.0;
    double alpha_f = 0.0, chi1_f = 0.0, chi2_f = 0.0;
    // obs-sweep / extrema / branch-curve
    double phi = kPi / 4.0;
    double theta_f = 0.0;
    std::vector<double> theta_i_list;
    std::string theta_range = "0:1.5707963267948966:2000";
    std::vector<double> xi_i_list;
    double theta_i = 0.0;
    // common
    std::vector<double> levels = {1.0, 2.0};
    std::string out_dir = ".";
    std::string out_path;  // overrides the canonical name
    std::string format = "csv";
    std::string id;
    double overlap_floor = kDefaultOverlapFloor;
};

SweepTable build_obs_sweep_family(const SweepArgs& a) {
    double lo, hi;
    int steps;
    if (!parse_range(a.theta_range, lo, hi, steps))
        throw Error(Errc::invalid_argument, "bad --theta-range, want lo:hi:steps");
    std::vector<double> tis = a.theta_i_list;
    if (tis.empty()) tis = {a.theta_i};

    SweepTable all;
    for (std::size_t r = 0; r < tis.size(); ++r) {
        ObservableSweepSpec s;
        s.phi = a.phi;
        s.theta_f = a.theta_f;
        s.theta_i = tis[r];
        s.xi_i = a.xi_i;
        s.xi_f = a.xi_f;
        s.theta_lo = lo;
        s.theta_hi = hi;
        s.steps = steps;
        s.overlap_floor = a.overlap_floor;
        s.id = a.id.empty() ? "obs-sweep" : a.id;
        const SweepTable one = observable_sweep(s);
        if (r == 0) {
            all = one;
            all.axis_names = {"theta_i", "theta"};
            all.axes = {tis, one.axes[0]};
        } else {
            for (std::size_t f = 0; f < all.fields.size(); ++f)
                all.fields[f].insert(all.fields[f].end(), one.fields[f].begin(),
                                     one.fields[f].end());
        }
    }
    all.meta["id"] = a.id.empty() ? "obs-sweep" : a.id;
    all.meta["provenance"] +=
        ";theta_i_count=" + std::to_string(tis.size()) + ";phi=" + wvnn::detail::fmt17(a.phi);
    return all;
}

SweepTable build_extrema_table(const SweepArgs& a) {
    double lo, hi;
    int steps;
    if (!parse_range(a.theta_range, lo, hi, steps))
        throw Error(Errc::invalid_argument, "bad --theta-range, want lo:hi:steps");
    std::vector<double> tis = a.theta_i_list;
    if (tis.empty()) {
        double tlo, thi;
        int tsteps;
        if (!parse_range(a.theta_i_range, tlo, thi, tsteps))
            throw Error(Errc::invalid_argument, "bad --theta-i-range, want lo:hi:steps");
        tis = wvnn::detail::linspace(tlo, thi, tsteps);
    }

    SweepTable t;
    t.axis_names = {"theta_i"};
    t.axes = {tis};
    t.field_names = {"argmax_wv",    "argmax_dfn_A", "argmax_dfn_Aprime", "mean_dfn_argmax",
                     "mean_check",   "theta_nil_A",  "theta_nil_Aprime",  "max_wv_abs",
                     "min_alpha2_A", "min_alpha2_Aprime"};
    t.fields.assign(t.field_names.size(), std::vector<double>(tis.size(), kGapSentinel));

    for (std::size_t r = 0; r < tis.size(); ++r) {
        ObservableSweepSpec s;
        s.phi = a.phi;
        s.theta_f = a.theta_f;
        s.theta_i = tis[r];
        s.xi_i = a.xi_i;
        s.xi_f = a.xi_f;
        s.theta_lo = lo;
        s.theta_hi = hi;
        s.steps = steps;
        s.overlap_floor = a.overlap_floor;
        const SweepTable one = observable_sweep(s);
        const ExtremaReport er = extrema_report(one);
        t.fields[0][r] = er.argmax_wv;
        t.fields[1][r] = er.argmax_dfn_A;
        t.fields[2][r] = er.argmax_dfn_Aprime;
        t.fields[3][r] = 0.5 * (er.argmax_dfn_A + er.argmax_dfn_Aprime);
        t.fields[4][r] = er.mean_check;
        for (auto [variant, slot] : {std::pair<WeakVariant, int>{WeakVariant::A, 5},
                                     {WeakVariant::APrime, 6}}) {
            try {
                t.fields[static_cast<std::size_t>(slot)][r] =
                    locate_degeneracy(s, variant, lo, hi).theta_star;
            } catch (const Error&) {
                // no zero crossing in range: leave the gap sentinel
            }
        }
        double mx = 0.0, mn_a = 1e300, mn_ap = 1e300;
        const auto& wv = one.field("wv_abs");
        const auto& a2 = one.field("alpha2_A");
        const auto& a2p = one.field("alpha2_Aprime");
        for (std::size_t k = 0; k < wv.size(); ++k) {
            if (std::isfinite(wv[k])) mx = std::max(mx, wv[k]);
            mn_a = std::min(mn_a, a2[k]);
            mn_ap = std::min(mn_ap, a2p[k]);
        }
        t.fields[7][r] = mx;
        t.fields[8][r] = mn_a;
        t.fields[9][r] = mn_ap;
    }
    t.meta["id"] = a.id.empty() ? "extrema" : a.id;
    t.meta["observable"] = "bloch";
    t.meta["provenance"] = "extrema;phi=" + wvnn::detail::fmt17(a.phi) +
                           ";theta_f=" + wvnn::detail::fmt17(a.theta_f) +
                           ";theta_i_count=" + std::to_string(tis.size()) + ";theta=" +
                           a.theta_range;
    return t;
}

SweepTable build_branch_curve_table(const SweepArgs& a) {
    double lo, hi;
    int steps;
    if (!parse_range(a.theta_range, lo, hi, steps))
        throw Error(Errc::invalid_argument, "bad --theta-range, want lo:hi:steps");
    std::vector<double> xis = a.xi_i_list;
    if (xis.empty()) xis = {a.xi_i};
    const double ti = a.theta_i;

    SweepTable t;
    t.axis_names = {"xi_i", "theta_f"};
    t.axes = {xis, wvnn::detail::linspace(lo, hi, steps)};
    t.field_names = {"df", "wv_sq", "tan_thetaf_plus", "tan_thetaf_minus"};
    t.fields.assign(t.field_names.size(), std::vector<double>(t.rows(), kGapSentinel));

    for (std::size_t r = 0; r < xis.size(); ++r) {
        for (std::size_t k = 0; k < t.axes[1].size(); ++k) {
            const double tf = t.axes[1][k];
            const std::size_t idx = r * t.axes[1].size() + k;
            const oracles::QubitScenario s(ti, tf, xis[r], a.xi_f);
            if (oracles::overlap_sq(s) < a.overlap_floor) continue;
            const double df = oracles::sx_df(s);
            t.fields[0][idx] = df;
            t.fields[1][idx] = oracles::sx_wv_sq(s);
            for (auto [br, slot] : {std::pair<oracles::Branch, int>{oracles::Branch::Plus, 2},
                                    {oracles::Branch::Minus, 3}}) {
                try {
                    t.fields[static_cast<std::size_t>(slot)][idx] =
                        oracles::sx_tan_thetaf_of_df(df, ti, xis[r], a.xi_f, br);
                } catch (const Error&) {
                }
            }
        }
    }
    t.meta["id"] = a.id.empty() ? "branch-curve" : a.id;
    t.meta["observable"] = "pauli-x";
    t.meta["provenance"] = "branch-curve;theta_i=" + wvnn::detail::fmt17(ti) +
                           ";xi_f=" + wvnn::detail::fmt17(a.xi_f) +
                           ";xi_i_count=" + std::to_string(xis.size()) + ";theta_f=" +
                           a.theta_range;
    return t;
}

int run_sweep(const SweepArgs& a) {
    SweepTable t;
    std::string tag;
    if (a.kind == "state-grid") {
        Observable obs = parse_observable(a.obs_spec, tag);
        GridSpec g(std::move(obs), tag);
        if (!parse_range(a.theta_i_range, g.theta_i_lo, g.theta_i_hi, g.theta_i_steps) ||
            !parse_range(a.theta_f_range, g.theta_f_lo, g.theta_f_hi, g.theta_f_steps))
            throw Error(Errc::invalid_argument, "bad axis range, want lo:hi:steps");
        g.xi_i = a.xi_i;
        g.xi_f = a.xi_f;
        g.qutrit = a.qutrit;
        if (a.qutrit)
            g.extra_params = {{"alpha_i", a.alpha_i}, {"chi1_i", a.chi1_i},
                              {"chi2_i", a.chi2_i},   {"alpha_f", a.alpha_f},
                              {"chi1_f", a.chi1_f},   {"chi2_f", a.chi2_f}};
        g.overlap_floor = a.overlap_floor;
        if (!a.id.empty()) g.id = a.id;
        t = state_grid_sweep(g);
    } else if (a.kind == "obs-sweep") {
        t = build_obs_sweep_family(a);
    } else if (a.kind == "extrema") {
        t = build_extrema_table(a);
    } else if (a.kind == "branch-curve") {
        t = build_branch_curve_table(a);
    } else {
        throw Error(Errc::invalid_argument, "unknown sweep kind: " + a.kind);
    }

    fs::path out = a.out_path.empty()
                       ? fs::path(a.out_dir) / table_filename(t, a.format)
                       : fs::path(a.out_path);
    if (out.has_parent_path()) fs::create_directories(out.parent_path());
    std::ofstream os(out, std::ios::binary);
    if (!os) throw Error(Errc::io_error, "cannot write " + out.string());
    if (a.format == "json")
        write_json(t, os);
    else
        write_csv(t, os);
    os.close();

    // summary: amplifying fraction, max |O_w| and its site, curve counts
    double max_wv = 0.0;
    std::size_t amp = 0, valid = 0, max_idx = 0;
    if (std::find(t.field_names.begin(), t.field_names.end(), "wv_abs") !=
        t.field_names.end()) {
        const auto& wv = t.field("wv_abs");
        const auto& cc = t.field("class_code");
        for (std::size_t k = 0; k < wv.size(); ++k) {
            if (!std::isfinite(wv[k])) continue;
            ++valid;
            if (wv[k] > max_wv) {
                max_wv = wv[k];
                max_idx = k;
            }
            const int code = static_cast<int>(cc[k]);
            if (code > 0 && (code & static_cast<int>(kAmplifying))) ++amp;
        }
    }
    std::cout << "wrote " << out.string() << "\n";
    if (valid > 0) {
        std::string site;
        {
            std::size_t rem = max_idx;
            std::vector<double> coord(t.axes.size());
            for (std::size_t a = t.axes.size(); a-- > 0;) {
                coord[a] = t.axes[a][rem % t.axes[a].size()];
                rem /= t.axes[a].size();
            }
            for (std::size_t a = 0; a < coord.size(); ++a)
                site += (a ? ", " : "(") + std::to_string(coord[a]);
            site += ")";
        }
        std::printf("points %zu  amplifying fraction %.6f  max |O_w| %.6g at %s\n", valid,
                    static_cast<double>(amp) / static_cast<double>(valid), max_wv,
                    site.c_str());
        if (t.axes.size() == 2 && a.kind == "state-grid") {
            for (double level : a.levels) {
                const auto curves = boundary_curves(t, level);
                std::printf("level %.6g boundary curves: %zu\n", level, curves.size());
            }
        }
    }
    std::cout << "gap count " << (t.meta.count("gap_count") ? t.meta.at("gap_count") : "0")
              << "\n";
    return kExitOk;
}

// ---------------------------------------------------------------------------
// meter

struct MeterArgs {
    std::string obs_spec = "pauli:z";
    StateArgs st;
    double gamma = 1e-2;
    std::vector<double> ladder = {1e-2, 5e-3, 2.5e-3};
    int grid_points = 1024;
    double x_extent = 20.0;
    double sigma_x = 1.0;
    std::string sign = "minus";
    double overlap_floor = kDefaultOverlapFloor;
};

int run_meter(const MeterArgs& a) {
    std::string tag;
    ProtocolConfig cfg{parse_observable(a.obs_spec, tag), a.st.make(false), a.st.make(true),
                       a.gamma,
                       MeterConfig{a.grid_points, a.x_extent, a.sigma_x},
                       a.sign == "plus" ? CouplingSign::ExponentPlus
                                        : CouplingSign::ExponentMinus,
                       a.overlap_floor};
    const ProtocolResult r = run_protocol(cfg);
    const ShiftEstimate est = weak_shift_estimate(cfg, a.ladder);
    const json out{{"gamma", cfg.gamma},       {"mean_x", r.mean_x},
                   {"mean_p", r.mean_p},       {"success_prob", r.success_prob},
                   {"re_est", est.re_est},     {"im_est", est.im_est}};
    std::cout << out.dump(2) << "\n";
    return kExitOk;
}

// ---------------------------------------------------------------------------
// verify

struct VerifyArgs {
    std::uint64_t seed = 42;
    std::string report = "text";
    bool inject_fault = false;
};

int run_verify(const VerifyArgs& a) {
    const auto results = selftest::run_all(a.seed, a.inject_fault);
    std::size_t failed = 0;
    for (const auto& r : results)
        if (!r.pass) ++failed;

    if (a.report == "json") {
        json checks = json::array();
        for (const auto& r : results)
            checks.push_back(json{{"name", r.name}, {"pass", r.pass}, {"detail", r.detail}});
        const json out{{"seed", a.seed},
                       {"passed", results.size() - failed},
                       {"failed", failed},
                       {"label_note", oracles::resolve_printed_labels().summary},
                       {"checks", checks}};
        std::cout << out.dump(2) << "\n";
    } else {
        std::printf("wvnn verify (seed %llu)\n", static_cast<unsigned long long>(a.seed));
        for (const auto& r : results)
            std::printf("[%s] %s  (%s)\n", r.pass ? "PASS" : "FAIL", r.name.c_str(),
                        r.detail.c_str());
        std::printf("%zu checks, %zu failed, seed %llu\n", results.size(), failed,
                    static_cast<unsigned long long>(a.seed));
        std::printf("note: %s\n", oracles::resolve_printed_labels().summary.c_str());
    }
    return failed == 0 ? kExitOk : kExitVerifyFailure;
}

/// Flat key=value config lines; '#' starts a comment, blank lines skipped.
/// Flag keys carry the value "true".
std::vector<std::pair<std::string, std::string>> load_flat_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(Errc::io_error, "cannot open config " + path);
    std::vector<std::pair<std::string, std::string>> kv;
    std::string line;
    auto trim = [](std::string t) {
        const auto b = t.find_first_not_of(" \t\r");
        const auto e = t.find_last_not_of(" \t\r");
        return b == std::string::npos ? std::string() : t.substr(b, e - b + 1);
    };
    while (std::getline(in, line)) {
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw Error(Errc::io_error, "config line without '=': " + line);
        kv.emplace_back(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    }
    return kv;
}

/// --preset NAME resolves to a config file: literal path, then $WVNN_PRESETS,
/// then ./presets/NAME.cfg next to the working directory.
std::string resolve_preset(const std::string& name) {
    std::vector<fs::path> candidates;
    candidates.emplace_back(name);
    candidates.emplace_back(fs::path(name + ".cfg"));
    if (const char* env = std::getenv("WVNN_PRESETS")) {
        candidates.emplace_back(fs::path(env) / (name + ".cfg"));
        candidates.emplace_back(fs::path(env) / name);
    }
    candidates.emplace_back(fs::path("presets") / (name + ".cfg"));
    for (const auto& c : candidates)
        if (fs::exists(c) && fs::is_regular_file(c)) return c.string();
    throw Error(Errc::io_error, "preset not found: " + name);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"weak values, non-normal operators and Henrici departures"};
    app.require_subcommand(1);

    WeakValueArgs wv;
    auto* cmd_wv = app.add_subcommand("weak-value", "single-point weak-value report (JSON)");
    cmd_wv->add_option("--obs", wv.obs_spec, "observable spec (pauli:x|y|z, combo, gellmann:K, bloch:T,P, file:PATH)");
    add_state_options(cmd_wv, wv.st);
    cmd_wv->add_option("--tol", wv.tol, "classification tolerance");
    cmd_wv->add_option("--overlap-floor", wv.overlap_floor, "minimum |<f|i>|^2");

    SweepArgs sw;
    auto* cmd_sw = app.add_subcommand("sweep", "figure-data sweeps (CSV/JSON)");
    cmd_sw->add_option("--kind", sw.kind, "state-grid | obs-sweep | extrema | branch-curve");
    cmd_sw->add_option("--obs", sw.obs_spec, "observable spec");
    cmd_sw->add_option("--theta-i-range", sw.theta_i_range, "lo:hi:steps");
    cmd_sw->add_option("--theta-f-range", sw.theta_f_range, "lo:hi:steps");
    cmd_sw->add_option("--xi-i", sw.xi_i, "pre-selection phase");
    cmd_sw->add_option("--xi-f", sw.xi_f, "post-selection phase");
    cmd_sw->add_flag("--qutrit", sw.qutrit, "three-level state grid");
    cmd_sw->add_option("--alpha-i", sw.alpha_i, "");
    cmd_sw->add_option("--chi1-i", sw.chi1_i, "");
    cmd_sw->add_option("--chi2-i", sw.chi2_i, "");
    cmd_sw->add_option("--alpha-f", sw.alpha_f, "");
    cmd_sw->add_option("--chi1-f", sw.chi1_f, "");
    cmd_sw->add_option("--chi2-f", sw.chi2_f, "");
    cmd_sw->add_option("--phi", sw.phi, "observable azimuth (obs-sweep kinds)");
    cmd_sw->add_option("--theta-f", sw.theta_f, "fixed post-selection angle (obs-sweep kinds)");
    cmd_sw->add_option("--theta-i", sw.theta_i, "fixed pre-selection angle");
    cmd_sw->add_option("--theta-i-list", sw.theta_i_list, "explicit theta_i values")
        ->delimiter(',');
    cmd_sw->add_option("--xi-i-list", sw.xi_i_list, "explicit xi_i values (branch-curve)")
        ->delimiter(',');
    cmd_sw->add_option("--theta-range", sw.theta_range, "lo:hi:steps (obs-sweep kinds)");
    cmd_sw->add_option("--levels", sw.levels, "boundary curve levels")->delimiter(',');
    cmd_sw->add_option("--out-dir", sw.out_dir, "output directory");
    cmd_sw->add_option("--out", sw.out_path, "explicit output path");
    cmd_sw->add_option("--format", sw.format, "csv | json");
    cmd_sw->add_option("--id", sw.id, "sweep id (file name prefix)");
    cmd_sw->add_option("--overlap-floor", sw.overlap_floor, "gap sentinel threshold");

    MeterArgs mt;
    auto* cmd_mt = app.add_subcommand("meter", "von Neumann pointer simulation (JSON)");
    cmd_mt->add_option("--obs", mt.obs_spec, "observable spec");
    add_state_options(cmd_mt, mt.st);
    cmd_mt->add_option("--gamma", mt.gamma, "coupling strength");
    cmd_mt->add_option("--gamma-ladder", mt.ladder, "strictly decreasing ladder")
        ->delimiter(',');
    cmd_mt->add_option("--grid-points", mt.grid_points, "power of two >= 128");
    cmd_mt->add_option("--x-extent", mt.x_extent, "position grid half-width");
    cmd_mt->add_option("--sigma-x", mt.sigma_x, "meter position spread");
    cmd_mt->add_option("--sign", mt.sign, "coupling exponent sign: minus | plus");
    cmd_mt->add_option("--overlap-floor", mt.overlap_floor, "minimum |<f|i>|^2");

    VerifyArgs vf;
    auto* cmd_vf = app.add_subcommand("verify", "run the full property suite");
    cmd_vf->add_option("--seed", vf.seed, "PRNG seed (printed in the report)");
    cmd_vf->add_option("--report", vf.report, "text | json");
    cmd_vf->add_flag("--inject-fault", vf.inject_fault,
                     "append a deliberately failing check (exit-path testing)");

    // --preset NAME / --config PATH: flat key=value files merged in before
    // explicit flags (a key given on the command line wins)
    std::vector<std::string> args(argv + 1, argv + argc);
    try {
        for (std::size_t i = 0; i < args.size();) {
            std::string path;
            if (args[i] == "--preset" && i + 1 < args.size())
                path = resolve_preset(args[i + 1]);
            else if (args[i] == "--config" && i + 1 < args.size())
                path = args[i + 1];
            if (path.empty()) {
                ++i;
                continue;
            }
            args.erase(args.begin() + static_cast<std::ptrdiff_t>(i),
                       args.begin() + static_cast<std::ptrdiff_t>(i) + 2);
            std::vector<std::string> spliced;
            for (const auto& [key, value] : load_flat_config(path)) {
                const std::string flag = "--" + key;
                bool given = false;
                for (const auto& tok : args) given |= (tok == flag);
                if (given) continue;
                spliced.push_back(flag);
                if (value != "true") spliced.push_back(value);
            }
            args.insert(args.begin() + static_cast<std::ptrdiff_t>(i), spliced.begin(),
                        spliced.end());
            i += spliced.size();
        }
    } catch (const Error& e) {
        std::cerr << e.what() << "\n";
        return kExitUsage;
    }

    try {
        std::vector<const char*> cargs;
        cargs.push_back(argv[0]);
        for (const auto& s : args) cargs.push_back(s.c_str());
        app.parse(static_cast<int>(cargs.size()), cargs.data());
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);  // --help
        app.exit(e);
        return kExitUsage;
    }

    try {
        if (cmd_wv->parsed()) return run_weak_value(wv);
        if (cmd_sw->parsed()) return run_sweep(sw);
        if (cmd_mt->parsed()) return run_meter(mt);
        if (cmd_vf->parsed()) return run_verify(vf);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        if (e.code() == Errc::grid_overflow)
            std::cerr << "hint: increase --x-extent or reduce --gamma\n";
        return exit_code_for(e);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    }
    return kExitUsage;
}
