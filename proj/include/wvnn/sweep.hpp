#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdlib>
#include <cstdint>
#include <cstdio>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <thread>
#include <vector>

#include "wvnn/complexmat.hpp"
#include "wvnn/error.hpp"
#include "wvnn/observables.hpp"
#include "wvnn/states.hpp"
#include "wvnn/weak.hpp"

namespace wvnn {

inline constexpr double kGapSentinel = std::numeric_limits<double>::quiet_NaN();
inline constexpr double kGapClassCode = -1.0;

/// Rectangular table of per-point scalar fields over named axes; the unit of
/// exchange between the sweep engine, the CSV/JSON writers and the plots.
struct SweepTable {
    std::vector<std::string> axis_names;
    std::vector<std::vector<double>> axes;  // coordinate lists, one per axis
    std::vector<std::string> field_names;
    std::vector<std::vector<double>> fields;     // row-major over the axes grid
    std::map<std::string, std::string> meta;     // provenance and diagnostics

    std::size_t rows() const {
        std::size_t n = 1;
        for (const auto& a : axes) n *= a.size();
        return n;
    }

    std::size_t field_index(const std::string& name) const {
        for (std::size_t i = 0; i < field_names.size(); ++i)
            if (field_names[i] == name) return i;
        throw Error(Errc::invalid_argument, "no such field: " + name);
    }

    const std::vector<double>& field(const std::string& name) const {
        return fields[field_index(name)];
    }

    /// 2-axis accessor, axis0 major.
    double at(std::size_t f, std::size_t i, std::size_t j) const {
        return fields[f][i * axes[1].size() + j];
    }

    double meta_num(const std::string& key, double fallback) const {
        auto it = meta.find(key);
        if (it == meta.end()) return fallback;
        return std::strtod(it->second.c_str(), nullptr);
    }
};

namespace detail {

inline std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

inline std::uint64_t fnv1a64(const std::string& s) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

inline std::vector<double> linspace(double lo, double hi, int steps) {
    if (steps < 2) throw Error(Errc::invalid_argument, "axis needs at least 2 steps");
    std::vector<double> v(static_cast<std::size_t>(steps));
    for (int k = 0; k < steps; ++k)
        v[static_cast<std::size_t>(k)] = lo + (hi - lo) * static_cast<double>(k) /
                                                  static_cast<double>(steps - 1);
    return v;
}

inline unsigned thread_count() {
    if (const char* env = std::getenv("WVNN_THREADS")) {
        const long n = std::strtol(env, nullptr, 10);
        if (n > 0) return static_cast<unsigned>(n);
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1u : hw;
}

/// Run fn(i) for i in [0, n) across the configured worker count. Each index
/// writes only its own output slots, so results do not depend on scheduling.
/// The first worker exception is rethrown on the calling thread.
inline void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn) {
    const unsigned workers = std::min<unsigned>(thread_count(), 8u);
    if (workers <= 1 || n < 256) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(workers);
    for (unsigned w = 0; w < workers; ++w)
        pool.emplace_back([&, w] {
            try {
                for (std::size_t i = w; i < n; i += workers) fn(i);
            } catch (...) {
                errors[w] = std::current_exception();
            }
        });
    for (auto& t : pool) t.join();
    for (const auto& e : errors)
        if (e) std::rethrow_exception(e);
}

}  // namespace detail

/// State-angle grid specification for the qubit and qutrit color-map sweeps.
/// extra_params carries the qutrit alpha/chi angles when qutrit is set, keyed
/// alpha_i, chi1_i, chi2_i, alpha_f, chi1_f, chi2_f.
struct GridSpec {
    explicit GridSpec(Observable obs, std::string tag = "observable")
        : observable(std::move(obs)), observable_tag(std::move(tag)) {}

    double theta_i_lo = 0.0, theta_i_hi = kHalfPi;
    int theta_i_steps = 400;
    double theta_f_lo = 0.0, theta_f_hi = kHalfPi;
    int theta_f_steps = 400;
    double xi_i = 0.0, xi_f = 0.0;
    Observable observable;
    bool qutrit = false;
    std::map<std::string, double> extra_params;
    double overlap_floor = kDefaultOverlapFloor;
    std::string id = "state-grid";
    std::string observable_tag;

    void validate() const {
        if (theta_i_steps < 2 || theta_f_steps < 2)
            throw Error(Errc::invalid_argument, "grid needs at least 2 steps per axis");
        for (double t : {theta_i_lo, theta_i_hi, theta_f_lo, theta_f_hi})
            detail::require_range(t, 0.0, kHalfPi, "theta range");
        detail::require_range(xi_i, 0.0, 2.0 * kPi, "xi_i");
        detail::require_range(xi_f, 0.0, 2.0 * kPi, "xi_f");
        if (qutrit) {
            // reject bad qutrit angles before any worker touches them
            (void)QutritParams(0.0, extra("alpha_i"), extra("chi1_i"), extra("chi2_i"));
            (void)QutritParams(0.0, extra("alpha_f"), extra("chi1_f"), extra("chi2_f"));
        }
    }

    double extra(const std::string& key) const {
        auto it = extra_params.find(key);
        return it == extra_params.end() ? 0.0 : it->second;
    }
};

namespace detail {

inline const std::vector<std::string>& state_grid_fields() {
    static const std::vector<std::string> names = {
        "wv_abs", "wv_re",   "wv_im",   "df_A",     "df_Aprime", "dfn_A",
        "dfn_Aprime", "numerator", "alpha2_A", "alpha2_Aprime", "class_code"};
    return names;
}

struct PointValues {
    std::array<double, 11> v;
};

/// All per-point scalars from the single-point weak-core computations.
/// alpha2 columns hold the overlap-normalized nonzero eigenvalue magnitude,
/// |<psi|O|psi>|, matching the closed forms plotted in the source figures.
inline std::optional<PointValues> evaluate_point(const Observable& obs, const CVector& psi_i,
                                                 const CVector& psi_f, double floor) {
    const double ov = std::norm(inner(psi_f, psi_i));
    if (ov < floor) return std::nullopt;
    const Complex wv = inner(psi_f, obs.matrix() * psi_i) / inner(psi_f, psi_i);
    const double dfn_a = normalized_henrici(obs, psi_i);
    const double dfn_ap = normalized_henrici(obs, psi_f);
    const double alpha_a = std::abs(inner(psi_i, obs.matrix() * psi_i));
    const double alpha_ap = std::abs(inner(psi_f, obs.matrix() * psi_f));
    const auto rep = classify(wv, obs);
    PointValues p{};
    p.v = {std::abs(wv), wv.real(), wv.imag(), dfn_a / ov, dfn_ap / ov, dfn_a, dfn_ap,
           std::abs(inner(psi_f, obs.matrix() * psi_i)), alpha_a, alpha_ap,
           static_cast<double>(rep.classification)};
    return p;
}

}  // namespace detail

/// Per-point weak value, Henrici metrics (both variants) and classification
/// over a (theta_i, theta_f) grid. Near-orthogonal points become gap
/// sentinels (NaN fields, class_code -1), counted in meta["gap_count"].
inline SweepTable state_grid_sweep(const GridSpec& g) {
    g.validate();
    SweepTable t;
    t.axis_names = {"theta_i", "theta_f"};
    t.axes = {detail::linspace(g.theta_i_lo, g.theta_i_hi, g.theta_i_steps),
              detail::linspace(g.theta_f_lo, g.theta_f_hi, g.theta_f_steps)};
    t.field_names = detail::state_grid_fields();
    const std::size_t n = t.rows();
    t.fields.assign(t.field_names.size(), std::vector<double>(n, kGapSentinel));

    const std::size_t nf = t.axes[1].size();
    std::vector<int> gaps(t.axes[0].size(), 0);

    detail::parallel_for(t.axes[0].size(), [&](std::size_t i) {
        const double ti = t.axes[0][i];
        CVector psi_i =
            g.qutrit ? qutrit_state(QutritParams(ti, g.extra("alpha_i"), g.extra("chi1_i"),
                                                 g.extra("chi2_i")))
                     : qubit_state(QubitParams(ti, g.xi_i));
        for (std::size_t j = 0; j < nf; ++j) {
            const double tf = t.axes[1][j];
            CVector psi_f =
                g.qutrit ? qutrit_state(QutritParams(tf, g.extra("alpha_f"), g.extra("chi1_f"),
                                                     g.extra("chi2_f")))
                         : qubit_state(QubitParams(tf, g.xi_f));
            const auto p = detail::evaluate_point(g.observable, psi_i, psi_f, g.overlap_floor);
            const std::size_t idx = i * nf + j;
            if (!p) {
                ++gaps[i];
                t.fields[t.field_names.size() - 1][idx] = kGapClassCode;
                continue;
            }
            for (std::size_t f = 0; f < t.field_names.size(); ++f)
                t.fields[f][idx] = p->v[f];
        }
    });

    int gap_count = 0;
    for (int c : gaps) gap_count += c;
    t.meta["id"] = g.id;
    t.meta["observable"] = g.observable_tag;
    t.meta["amp_threshold"] = detail::fmt17(g.observable.spectrum_max_abs());
    t.meta["gap_count"] = std::to_string(gap_count);
    {
        std::string prov = "state_grid_sweep;obs=" + g.observable_tag +
                           ";theta_i=" + detail::fmt17(g.theta_i_lo) + ":" +
                           detail::fmt17(g.theta_i_hi) + ":" + std::to_string(g.theta_i_steps) +
                           ";theta_f=" + detail::fmt17(g.theta_f_lo) + ":" +
                           detail::fmt17(g.theta_f_hi) + ":" + std::to_string(g.theta_f_steps) +
                           ";xi_i=" + detail::fmt17(g.xi_i) + ";xi_f=" + detail::fmt17(g.xi_f);
        if (g.qutrit) {
            prov += ";qutrit=1";
            for (const auto& [k, v] : g.extra_params) prov += ";" + k + "=" + detail::fmt17(v);
        }
        t.meta["provenance"] = prov;
    }
    return t;
}

/// One level-curve polyline; closed (first == last) or terminated on the grid
/// boundary.
struct BoundaryCurve {
    double level = 0.0;
    std::vector<std::array<double, 2>> points;  // (theta_i, theta_f)
};

namespace detail {

struct SegKey {
    std::int64_t a, b;
    bool operator<(const SegKey& o) const { return a != o.a ? a < o.a : b < o.b; }
    bool operator==(const SegKey& o) const { return a == o.a && b == o.b; }
};

}  // namespace detail

/// Marching-squares extraction of the |O_w| = level curve with linear edge
/// interpolation. Cells touching a gap point are skipped. Returns an empty
/// list when the level misses the data range.
inline std::vector<BoundaryCurve> boundary_curves(const SweepTable& t, double level,
                                                  const std::string& field = "wv_abs") {
    if (t.axes.size() != 2)
        throw Error(Errc::invalid_argument, "boundary_curves needs a 2-axis table");
    const auto& ti = t.axes[0];
    const auto& tf = t.axes[1];
    const auto& v = t.field(field);
    const std::size_t ni = ti.size(), nf = tf.size();
    auto val = [&](std::size_t i, std::size_t j) { return v[i * nf + j]; };

    // segment endpoints live on grid edges; key (edge id) makes endpoints
    // shared between neighboring cells exactly identical for stitching
    struct Endpoint {
        detail::SegKey key;
        std::array<double, 2> xy;
    };
    struct Segment {
        Endpoint e0, e1;
        bool used = false;
    };
    std::vector<Segment> segs;

    auto edge_point = [&](std::size_t i0, std::size_t j0, std::size_t i1, std::size_t j1)
        -> Endpoint {
        const double v0 = val(i0, j0), v1 = val(i1, j1);
        double s = (level - v0) / (v1 - v0);
        s = std::clamp(s, 0.0, 1.0);
        Endpoint e;
        e.key = {static_cast<std::int64_t>(i0 * nf + j0),
                 static_cast<std::int64_t>(i1 * nf + j1)};
        e.xy = {ti[i0] + s * (ti[i1] - ti[i0]), tf[j0] + s * (tf[j1] - tf[j0])};
        return e;
    };

    for (std::size_t i = 0; i + 1 < ni; ++i) {
        for (std::size_t j = 0; j + 1 < nf; ++j) {
            const double c00 = val(i, j), c01 = val(i, j + 1);
            const double c10 = val(i + 1, j), c11 = val(i + 1, j + 1);
            if (!(std::isfinite(c00) && std::isfinite(c01) && std::isfinite(c10) &&
                  std::isfinite(c11)))
                continue;
            // strictly above: the curves border the region where the field
            // exceeds the level, so a field that only touches it yields none
            int code = 0;
            if (c00 > level) code |= 1;
            if (c01 > level) code |= 2;
            if (c11 > level) code |= 4;
            if (c10 > level) code |= 8;
            if (code == 0 || code == 15) continue;

            // edges: left (c00-c01), top (c01-c11), right (c10-c11), bottom (c00-c10)
            auto L = [&] { return edge_point(i, j, i, j + 1); };
            auto T = [&] { return edge_point(i, j + 1, i + 1, j + 1); };
            auto R = [&] { return edge_point(i + 1, j, i + 1, j + 1); };
            auto B = [&] { return edge_point(i, j, i + 1, j); };
            auto add = [&](Endpoint a, Endpoint b) { segs.push_back({a, b, false}); };

            switch (code) {
                case 1: case 14: add(L(), B()); break;
                case 2: case 13: add(L(), T()); break;
                case 3: case 12: add(B(), T()); break;
                case 4: case 11: add(T(), R()); break;
                case 6: case 9: add(L(), R()); break;
                case 7: case 8: add(B(), R()); break;
                case 5: case 10: {
                    const double center = 0.25 * (c00 + c01 + c10 + c11);
                    const bool center_hi = center > level;
                    if ((code == 5) == center_hi) {
                        add(L(), T());
                        add(B(), R());
                    } else {
                        add(L(), B());
                        add(T(), R());
                    }
                    break;
                }
                default: break;
            }
        }
    }

    // stitch segments into polylines by shared edge keys
    std::map<detail::SegKey, std::vector<std::pair<std::size_t, int>>> incidence;
    for (std::size_t s = 0; s < segs.size(); ++s) {
        incidence[segs[s].e0.key].push_back({s, 0});
        incidence[segs[s].e1.key].push_back({s, 1});
    }

    std::vector<BoundaryCurve> curves;
    auto walk = [&](std::size_t start, int start_end) {
        BoundaryCurve c;
        c.level = level;
        std::size_t s = start;
        int enter = start_end;
        c.points.push_back(enter == 0 ? segs[s].e0.xy : segs[s].e1.xy);
        while (true) {
            segs[s].used = true;
            const Endpoint& out = (enter == 0) ? segs[s].e1 : segs[s].e0;
            c.points.push_back(out.xy);
            std::size_t next = segs.size();
            int next_end = 0;
            for (auto [cand, end] : incidence[out.key]) {
                if (!segs[cand].used) {
                    next = cand;
                    next_end = end;
                    break;
                }
            }
            if (next == segs.size()) break;
            s = next;
            enter = next_end;
        }
        return c;
    };

    // open chains first (an endpoint whose edge key has no unused partner)
    for (std::size_t s = 0; s < segs.size(); ++s) {
        if (segs[s].used) continue;
        for (int end = 0; end < 2; ++end) {
            const auto& key = (end == 0) ? segs[s].e0.key : segs[s].e1.key;
            std::size_t unused_here = 0;
            for (auto [cand, _] : incidence[key])
                if (!segs[cand].used) ++unused_here;
            if (unused_here == 1) {
                curves.push_back(walk(s, end));
                break;
            }
        }
    }
    for (std::size_t s = 0; s < segs.size(); ++s)
        if (!segs[s].used) curves.push_back(walk(s, 0));  // remaining closed loops
    return curves;
}

/// Fixed pre/post-selection, rotating observable O(theta) at fixed phi
/// (the varying-observable analysis).
struct ObservableSweepSpec {
    double phi = kPi / 4.0;
    double theta_i = 0.0, theta_f = 0.0;
    double xi_i = 0.0, xi_f = 0.0;
    double theta_lo = 0.0, theta_hi = kHalfPi;
    int steps = 2000;
    double overlap_floor = kDefaultOverlapFloor;
    std::string id = "obs-sweep";

    void validate() const {
        if (steps < 2) throw Error(Errc::invalid_argument, "sweep needs at least 2 steps");
        detail::require_range(theta_lo, 0.0, kHalfPi, "theta_lo");
        detail::require_range(theta_hi, 0.0, kHalfPi, "theta_hi");
        detail::require_range(phi, 0.0, 2.0 * kPi, "phi");
    }

    CVector make_psi_i() const { return qubit_state(QubitParams(theta_i, xi_i)); }
    CVector make_psi_f() const { return qubit_state(QubitParams(theta_f, xi_f)); }
};

/// Per-theta numerator, normalized Henrici departures of both variants with
/// their grid central-difference derivatives, normalized alpha2 magnitudes,
/// weak value and the amplification-range mask.
inline SweepTable observable_sweep(const ObservableSweepSpec& s) {
    s.validate();
    SweepTable t;
    t.axis_names = {"theta"};
    t.axes = {detail::linspace(s.theta_lo, s.theta_hi, s.steps)};
    t.field_names = {"numerator", "dfn_A",   "dfn_Aprime", "d_numerator", "d_dfn_A",
                     "d_dfn_Aprime", "alpha2_A", "alpha2_Aprime", "wv_abs", "wv_re",
                     "wv_im", "class_code", "amp_mask", "eigvec_angle_A"};
    const std::size_t n = t.rows();
    t.fields.assign(t.field_names.size(), std::vector<double>(n, kGapSentinel));

    const CVector psi_i = s.make_psi_i();
    const CVector psi_f = s.make_psi_f();
    int gap_count = 0;

    for (std::size_t k = 0; k < n; ++k) {
        const double theta = t.axes[0][k];
        const Observable obs = bloch_observable(BlochObservableParams(theta, s.phi));
        t.fields[0][k] = std::abs(inner(psi_f, obs.matrix() * psi_i));
        t.fields[1][k] = normalized_henrici(obs, psi_i);
        t.fields[2][k] = normalized_henrici(obs, psi_f);
        t.fields[6][k] = std::abs(inner(psi_i, obs.matrix() * psi_i));
        t.fields[7][k] = std::abs(inner(psi_f, obs.matrix() * psi_f));
        {
            // the eigenvector directions of A do not depend on the overlap
            // normalization, so O |psi_i><psi_i| serves even when the states
            // are orthogonal
            const CMatrix op = obs.matrix() * outer(psi_i, psi_i);
            const auto ev = eigvals_closed(op);
            const CVector v0 = wvnn::detail::eigvec_2x2(op, ev[0]);
            const CVector v1 = wvnn::detail::eigvec_2x2(op, ev[1]);
            t.fields[13][k] = fubini_angle(v0, v1);
        }
        const double ov = std::norm(inner(psi_f, psi_i));
        if (ov < s.overlap_floor) {
            ++gap_count;
            t.fields[11][k] = kGapClassCode;
            t.fields[12][k] = 0.0;
            continue;
        }
        const Complex wv = inner(psi_f, obs.matrix() * psi_i) / inner(psi_f, psi_i);
        const auto rep = classify(wv, obs);
        t.fields[8][k] = std::abs(wv);
        t.fields[9][k] = wv.real();
        t.fields[10][k] = wv.imag();
        t.fields[11][k] = static_cast<double>(rep.classification);
        t.fields[12][k] = (rep.classification & kAmplifying) ? 1.0 : 0.0;
    }

    // central differences on the grid (one-sided at the ends)
    const double h = t.axes[0][1] - t.axes[0][0];
    for (auto [src, dst] : {std::pair<int, int>{0, 3}, {1, 4}, {2, 5}}) {
        auto& f = t.fields[static_cast<std::size_t>(src)];
        auto& d = t.fields[static_cast<std::size_t>(dst)];
        for (std::size_t k = 0; k < n; ++k) {
            if (k == 0)
                d[k] = (f[1] - f[0]) / h;
            else if (k == n - 1)
                d[k] = (f[n - 1] - f[n - 2]) / h;
            else
                d[k] = (f[k + 1] - f[k - 1]) / (2.0 * h);
        }
    }

    t.meta["id"] = s.id;
    t.meta["observable"] = "bloch";
    t.meta["amp_threshold"] = detail::fmt17(1.0);
    t.meta["gap_count"] = std::to_string(gap_count);
    t.meta["provenance"] = "observable_sweep;phi=" + detail::fmt17(s.phi) +
                           ";theta_i=" + detail::fmt17(s.theta_i) +
                           ";theta_f=" + detail::fmt17(s.theta_f) + ";xi_i=" +
                           detail::fmt17(s.xi_i) + ";xi_f=" + detail::fmt17(s.xi_f) +
                           ";theta=" + detail::fmt17(s.theta_lo) + ":" +
                           detail::fmt17(s.theta_hi) + ":" + std::to_string(s.steps);
    return t;
}

struct DegeneracyResult {
    double theta_star = 0.0;
    double fubini_at_star = 0.0;
};

/// Locate the nilpotency angle of the chosen variant: bisection on the
/// expectation value behind trace(A) (initial state for A, final for A'),
/// which is the variant's nonzero eigenvalue up to the positive overlap
/// factor. Falls back to a grid |minimum| when the trace touches zero
/// without crossing; throws not-found otherwise.
inline DegeneracyResult locate_degeneracy(const ObservableSweepSpec& s, WeakVariant variant,
                                          double theta_lo, double theta_hi) {
    const CVector psi = (variant == WeakVariant::A) ? s.make_psi_i() : s.make_psi_f();
    auto g = [&](double theta) {
        const Observable obs = bloch_observable(BlochObservableParams(theta, s.phi));
        return inner(psi, obs.matrix() * psi).real();
    };

    const int scan = 2048;
    double theta_star = std::numeric_limits<double>::quiet_NaN();
    double prev_t = theta_lo, prev_g = g(theta_lo);
    double best_abs = std::abs(prev_g), best_t = theta_lo;
    for (int k = 1; k <= scan; ++k) {
        const double tt = theta_lo + (theta_hi - theta_lo) * k / scan;
        const double gg = g(tt);
        if (std::abs(gg) < best_abs) {
            best_abs = std::abs(gg);
            best_t = tt;
        }
        if ((prev_g <= 0.0 && gg >= 0.0) || (prev_g >= 0.0 && gg <= 0.0)) {
            double lo = prev_t, hi = tt, glo = prev_g;
            for (int it = 0; it < 200 && hi - lo > 1e-14; ++it) {
                const double mid = 0.5 * (lo + hi);
                const double gm = g(mid);
                if ((glo <= 0.0) == (gm <= 0.0)) {
                    lo = mid;
                    glo = gm;
                } else {
                    hi = mid;
                }
            }
            theta_star = 0.5 * (lo + hi);
            break;
        }
        prev_t = tt;
        prev_g = gg;
    }
    if (!std::isfinite(theta_star)) {
        if (best_abs <= 1e-10)
            theta_star = best_t;  // touching zero (typically a domain endpoint)
        else
            throw Error(Errc::not_found, "trace has no zero in the requested range", best_abs);
    }

    const Observable obs_star = bloch_observable(BlochObservableParams(theta_star, s.phi));
    const WeakOperator w =
        build_weak_operator(obs_star, s.make_psi_i(), s.make_psi_f(), variant, s.overlap_floor);
    const auto es = eigenstructure(w);
    return {theta_star, es.eigvec_angle};
}

struct ExtremaReport {
    double argmax_wv = 0.0;
    double argmax_dfn_A = 0.0;
    double argmax_dfn_Aprime = 0.0;
    double mean_check = 0.0;
};

namespace detail {

/// Refined argmax of field f over the index window [lo, hi]: three-point
/// parabolic interpolation for interior maxima; window edges refined by the
/// crossing coordinates supplied by the caller (domain ends as-is).
inline double refined_argmax(const std::vector<double>& x, const std::vector<double>& f,
                             std::size_t lo, std::size_t hi, double edge_lo, double edge_hi) {
    std::size_t k = lo;
    for (std::size_t i = lo; i <= hi; ++i)
        if (std::isfinite(f[i]) && (!std::isfinite(f[k]) || f[i] > f[k])) k = i;
    if (k == lo) return edge_lo;
    if (k == hi) return edge_hi;
    const double fm = f[k - 1], f0 = f[k], fp = f[k + 1];
    const double denom = fm - 2.0 * f0 + fp;
    if (!(std::abs(denom) > 0.0)) return x[k];
    const double h = x[k + 1] - x[k];
    double shift = 0.5 * h * (fm - fp) / denom;
    shift = std::clamp(shift, -h, h);
    return x[k] + shift;
}

}  // namespace detail

/// Argmax positions of wv_abs and both normalized Henrici departures inside
/// the amplification window, plus the distance of the weak-value argmax from
/// the mean of the two dfn argmaxes.
inline ExtremaReport extrema_report(const SweepTable& t) {
    if (t.axes.size() != 1)
        throw Error(Errc::invalid_argument, "extrema_report needs an observable-sweep table");
    const auto& x = t.axes[0];
    const auto& wv = t.field("wv_abs");
    const auto& mask = t.field("amp_mask");
    const std::size_t n = x.size();
    const double thr = t.meta_num("amp_threshold", 1.0);

    // window: the contiguous masked run containing the best masked point
    std::size_t best = n;
    for (std::size_t i = 0; i < n; ++i)
        if (mask[i] == 1.0 && std::isfinite(wv[i]) && (best == n || wv[i] > wv[best])) best = i;
    std::size_t lo = 0, hi = n - 1;
    if (best != n) {
        lo = best;
        while (lo > 0 && mask[lo - 1] == 1.0) --lo;
        hi = best;
        while (hi + 1 < n && mask[hi + 1] == 1.0) ++hi;
    }

    // window edges to sub-grid accuracy via the |O_w| = threshold crossing
    double edge_lo = x[lo], edge_hi = x[hi];
    if (best != n && lo > 0 && std::isfinite(wv[lo - 1])) {
        const double s = (thr - wv[lo - 1]) / (wv[lo] - wv[lo - 1]);
        edge_lo = x[lo - 1] + std::clamp(s, 0.0, 1.0) * (x[lo] - x[lo - 1]);
    }
    if (best != n && hi + 1 < n && std::isfinite(wv[hi + 1])) {
        const double s = (thr - wv[hi]) / (wv[hi + 1] - wv[hi]);
        edge_hi = x[hi] + std::clamp(s, 0.0, 1.0) * (x[hi + 1] - x[hi]);
    }

    ExtremaReport r;
    r.argmax_wv = detail::refined_argmax(x, wv, lo, hi, edge_lo, edge_hi);
    r.argmax_dfn_A = detail::refined_argmax(x, t.field("dfn_A"), lo, hi, edge_lo, edge_hi);
    r.argmax_dfn_Aprime =
        detail::refined_argmax(x, t.field("dfn_Aprime"), lo, hi, edge_lo, edge_hi);
    r.mean_check = std::abs(r.argmax_wv - 0.5 * (r.argmax_dfn_A + r.argmax_dfn_Aprime));
    return r;
}

/// `<sweep-id>__<observable>__<params-hash>.<ext>` per the file contract.
inline std::string table_filename(const SweepTable& t, const std::string& ext) {
    auto get = [&](const char* k) {
        auto it = t.meta.find(k);
        return it == t.meta.end() ? std::string("unknown") : it->second;
    };
    char hash[20];
    std::snprintf(hash, sizeof(hash), "%016llx",
                  static_cast<unsigned long long>(detail::fnv1a64(get("provenance"))));
    return get("id") + "__" + get("observable") + "__" + hash + "." + ext;
}

/// One row per grid point, axes then fields, 17-significant-digit doubles,
/// `#`-prefixed provenance comments. Gap points carry nan / class_code -1.
inline void write_csv(const SweepTable& t, std::ostream& os) {
    os << "# wvnn sweep table\n";
    for (const auto& [k, v] : t.meta) os << "# " << k << ": " << v << "\n";
    os << "# class_code: 0=in-range, bit1=anomalous-complex, bit2=anomalous-outside-range, "
          "bit4=amplifying, -1=gap\n";
    for (std::size_t a = 0; a < t.axis_names.size(); ++a)
        os << t.axis_names[a] << (a + 1 < t.axis_names.size() || !t.field_names.empty() ? ","
                                                                                        : "");
    for (std::size_t f = 0; f < t.field_names.size(); ++f)
        os << t.field_names[f] << (f + 1 < t.field_names.size() ? "," : "");
    os << "\n";

    const std::size_t n = t.rows();
    const std::size_t ncols = t.axes.size();
    for (std::size_t idx = 0; idx < n; ++idx) {
        // decode row-major multi-index
        std::size_t rem = idx;
        std::vector<std::size_t> mi(ncols);
        for (std::size_t a = ncols; a-- > 0;) {
            mi[a] = rem % t.axes[a].size();
            rem /= t.axes[a].size();
        }
        for (std::size_t a = 0; a < ncols; ++a) os << detail::fmt17(t.axes[a][mi[a]]) << ",";
        for (std::size_t f = 0; f < t.field_names.size(); ++f)
            os << detail::fmt17(t.fields[f][idx]) << (f + 1 < t.field_names.size() ? "," : "");
        os << "\n";
    }
}

/// Same content as the CSV, JSON-encoded: {"meta": {...}, "axes": {...},
/// "fields": {...}} with identical names. NaN gaps become null.
inline void write_json(const SweepTable& t, std::ostream& os) {
    auto esc = [](const std::string& in) {
        std::string out;
        for (char c : in) {
            if (c == '"' || c == '\\') out += '\\';
            out += c;
        }
        return out;
    };
    auto num = [](double v) {
        return std::isfinite(v) ? detail::fmt17(v) : std::string("null");
    };
    os << "{\n  \"meta\": {";
    bool first = true;
    for (const auto& [k, v] : t.meta) {
        os << (first ? "" : ", ") << "\"" << esc(k) << "\": \"" << esc(v) << "\"";
        first = false;
    }
    os << "},\n  \"axes\": {";
    for (std::size_t a = 0; a < t.axes.size(); ++a) {
        os << (a ? ", " : "") << "\"" << esc(t.axis_names[a]) << "\": [";
        for (std::size_t k = 0; k < t.axes[a].size(); ++k)
            os << (k ? "," : "") << num(t.axes[a][k]);
        os << "]";
    }
    os << "},\n  \"fields\": {";
    for (std::size_t f = 0; f < t.field_names.size(); ++f) {
        os << (f ? ", " : "") << "\"" << esc(t.field_names[f]) << "\": [";
        for (std::size_t k = 0; k < t.fields[f].size(); ++k)
            os << (k ? "," : "") << num(t.fields[f][k]);
        os << "]";
    }
    os << "}\n}\n";
}

}  // namespace wvnn
