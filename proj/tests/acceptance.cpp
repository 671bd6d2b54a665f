// Acceptance checks. One line per criterion:
//   PASS|FAIL  <id>  <what>  <measured values>  [wall time]
// Exit status is the number of failed criteria (0 when everything passes).

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "bflow/burgers.hpp"
#include "bflow/disc_spectral.hpp"
#include "bflow/geodesic.hpp"
#include "bflow/geometry.hpp"
#include "bflow/jacobi.hpp"
#include "bflow/operators.hpp"
#include "bflow/random_fields.hpp"
#include "bflow/torus_modes.hpp"
#include "bflow/trig_series.hpp"

using namespace bflow;
using std::numbers::pi;

namespace {

struct Verdict {
    bool pass = false;
    std::string detail;
};

struct Criterion {
    const char* id;
    const char* what;
    double time_limit;  // seconds; infinity when the criterion names none
    std::function<Verdict()> check;
};

std::string fmt(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

const auto gamma3 = pressure::PressureModel::catalog("3/rho");

// Constant geodesic u = rho = 1, v0 = cos(n x).
Verdict conjugate_times() {
    const CircleGrid g(128);
    CircleScalar one(g, 1.0);
    double worst = 0.0;
    bool complete = true;
    for (int n : {1, 2, 4, 8}) {
        const auto expected = burgers::conjugate_times(n, 2);
        jacobi::ConjugateOptions opt;
        opt.dt = 2e-3;
        opt.t_end = expected.back() + 0.5 * pi / n;
        const auto pts = jacobi::detect_conjugate_points(
            geodesic::barotropic_initializer(as_vector(one), one, gamma3), geodesic::FlowMap<CircleGrid>::identity(one),
            as_vector(sample(g, [n](double x) { return std::cos(n * x); })), gamma3, opt);
        complete = complete && pts.size() == expected.size();
        for (std::size_t m = 0; m < std::min(pts.size(), expected.size()); ++m)
            worst = std::max(worst, std::abs(pts[m].t - expected[m]));
    }
    return {complete && worst < 1e-6, fmt("all 8 zeros found=%s, max |T - 2 pi m/n| = %.2e", complete ? "yes" : "no", worst)};
}

CircleScalar scaled(CircleScalar f, double amp) { return f * (amp / f.max_abs()); }

// 50 seeded random cases, gamma = 3, up to 0.9 T*.
Verdict growth_bound() {
    const CircleGrid g(128);
    double worst_num = 0.0, worst_exact = 0.0;
    for (std::uint64_t trial = 0; trial < 50; ++trial) {
        auto ru = SplitMix64::substream(20240, 3 * trial);
        auto rr = SplitMix64::substream(20240, 3 * trial + 1);
        auto rv = SplitMix64::substream(20240, 3 * trial + 2);
        const auto u0 = scaled(random_band_limited(g, 3, ru), 0.5);
        const auto rho0 = scaled(random_band_limited(g, 3, rr), 0.3) + 1.0;
        const auto v0 = random_band_limited(g, 3, rv);
        const double ts = burgers::shock_time(burgers::riemann_invariants(u0, rho0));
        const double t_end = 0.9 * ts;

        auto bg = geodesic::barotropic_initializer(as_vector(u0), rho0, gamma3);
        jacobi::JacobiOptions opt;
        opt.t_end = t_end;
        opt.dt = t_end / std::ceil(t_end / std::min(t_end / 400, 0.5 * geodesic::cfl_bound(bg, gamma3)));
        const auto tr =
            jacobi::integrate_jacobi(bg, geodesic::FlowMap<CircleGrid>::identity(rho0), as_vector(v0), gamma3, opt);
        worst_num = std::max(worst_num, jacobi::growth_report(tr.samples).max_ratio);

        // closed form on a geometric-then-uniform set of times
        const double vsup = TrigSeries::from_field(v0).sup_abs();
        std::vector<double> times;
        for (int k = 4; k >= 1; --k) times.push_back(t_end * std::pow(10.0, -k));
        for (int k = 1; k <= 30; ++k) times.push_back(t_end * k / 30);
        for (double t : times)
            worst_exact = std::max(worst_exact, burgers::exact_jacobi(u0, rho0, v0, t).max_abs() / (t * vsup));
    }
    const bool ok = worst_num <= 1.0 + 1e-6 && worst_exact <= 1.0 + 1e-6;
    return {ok, fmt("max ratio numeric %.9f, closed form %.9f", worst_num, worst_exact)};
}

Verdict curvature_scan() {
    geometry::ScanOptions opt;
    opt.trials = 200;
    opt.seed = 7;
    opt.n_grid = 64;
    std::string detail;
    bool ok = true;
    for (double gamma : {1.4, 2.0, 3.0}) {
        const auto rep = geometry::curvature_sign_scan_1d(pressure::PressureModel::polytropic(1.0, gamma), opt);
        ok = ok && rep.min_total >= -1e-10;
        detail += fmt("gamma %.1f min %.3e; ", gamma, rep.min_total);
    }
    const auto rep4 = geometry::curvature_sign_scan_1d(pressure::PressureModel::polytropic(1.0, 4.0), opt);
    int negative = 0;
    for (const auto& r : rep4.rows) negative += r.report.total < 0.0;
    ok = ok && negative > 0;
    detail += fmt("gamma 4: %d/200 negative (min %.3e, trial %d)", negative, rep4.min_total, rep4.argmin);
    return {ok, detail};
}

double sine_gap(double dt) {
    const CircleGrid g(256);
    const auto u0 = sample(g, [](double x) { return std::sin(x); });
    const CircleScalar rho0(g, 1.0);
    geodesic::IntegrateOptions opt;
    opt.dt = dt;
    opt.t_end = 0.5;
    opt.sample_every = 1000000;
    const auto tr = geodesic::integrate(geodesic::barotropic_initializer(as_vector(u0), rho0, gamma3),
                                        geodesic::FlowMap<CircleGrid>::identity(rho0), gamma3, opt);
    const auto ex = burgers::exact_state(u0, rho0, 0.5);
    return std::max((tr.final_state.u[0] - ex.u).max_abs(), (tr.final_state.rho - ex.rho).max_abs());
}

Verdict exact_vs_numeric() {
    const double e1 = sine_gap(0.005), e2 = sine_gap(0.0025);
    return {e1 < 1e-6 && e1 / e2 >= 8.0, fmt("gap %.3e at dt 0.005, %.3e at dt 0.0025, ratio %.1f", e1, e2, e1 / e2)};
}

Verdict deviation_slope() {
    const CircleGrid g(128);
    const auto u0 = as_vector(sample(g, [](double x) { return 0.5 * std::sin(x); }));
    const auto rho0 = sample(g, [](double x) { return 1.0 + 0.2 * std::cos(x); });
    const auto v0 = as_vector(sample(g, [](double x) { return std::cos(2 * x); }));
    jacobi::DeviationOptions dopt;
    dopt.dt = 0.005;
    dopt.t_end = 0.5;
    dopt.sample_every = 100;
    jacobi::JacobiOptions jopt;
    jopt.dt = dopt.dt;
    jopt.t_end = dopt.t_end;
    const auto tr = jacobi::integrate_jacobi(geodesic::barotropic_initializer(u0, rho0, gamma3),
                                             geodesic::FlowMap<CircleGrid>::identity(rho0), v0, gamma3, jopt);
    const auto ref = jacobi::lagrangian(tr.final_state.j, tr.final_map);
    std::vector<double> ls, le;
    for (double s : {1e-2, 1e-3, 1e-4}) {
        const auto dev = jacobi::deviation_oracle(u0, rho0, v0, gamma3, s, dopt);
        const auto d = dev.deviation.back() - ref;
        ls.push_back(std::log10(s));
        le.push_back(std::log10(std::sqrt(integrate(dot(d, d)))));
    }
    // least-squares slope of log error against log s
    const double mx = (ls[0] + ls[1] + ls[2]) / 3, my = (le[0] + le[1] + le[2]) / 3;
    double sxy = 0.0, sxx = 0.0;
    for (int i = 0; i < 3; ++i) {
        sxy += (ls[i] - mx) * (le[i] - my);
        sxx += (ls[i] - mx) * (ls[i] - mx);
    }
    const double slope = sxy / sxx;
    const double s1 = le[0] - le[1], s2 = le[1] - le[2];
    const bool ok = std::abs(slope - 2.0) <= 0.2 && std::abs(s1 - 2.0) <= 0.2 && std::abs(s2 - 2.0) <= 0.2;
    return {ok, fmt("fitted slope %.3f (pairwise %.3f, %.3f)", slope, s1, s2)};
}

Verdict torus_classification() {
    const TorusGrid g(32, 32);
    const double c = 1.0, omega = 0.8;
    auto rf = SplitMix64::substream(99, 0);
    auto rg = SplitMix64::substream(99, 1);
    const auto grad_v = gradient(random_band_limited(g, 4, rf));
    const auto rot_v = skew_gradient(random_band_limited(g, 4, rg));

    const torus::TorusModeSolution bounded(grad_v, omega, c);
    const double sup = torus::sup_over_time(bounded, 100.0 / c);
    const auto cls_g = torus::classify_boundedness(grad_v, c);

    const torus::TorusModeSolution grows(rot_v, omega, c);
    const auto fit = torus::fit_growth(grows, 10.0 / c, 100.0 / c);
    const double z = grows.z().max_norm();
    const auto cls_r = torus::classify_boundedness(rot_v, c);

    auto mixed = grad_v;
    mixed.axpy(1e-3, rot_v);
    const auto cls_m = torus::classify_boundedness(mixed, c);

    const bool ok = sup <= bounded.series_bound() + 1e-10 && cls_g.kind == torus::Boundedness::Bounded &&
                    std::abs(fit.slope / z - 1.0) < 0.01 && cls_r.kind == torus::Boundedness::LinearGrowth &&
                    cls_m.kind == torus::Boundedness::LinearGrowth;
    return {ok, fmt("gradient sup %.4f <= bound %.4f; divergence-free slope %.5f vs |z| %.5f (%.2e rel); "
                    "gradient + 1e-3 rotation classified %s",
                    sup, bounded.series_bound(), fit.slope, z, std::abs(fit.slope / z - 1.0),
                    cls_m.kind == torus::Boundedness::LinearGrowth ? "growing" : "bounded")};
}

Verdict torus_curvature() {
    const TorusGrid g(32, 32);
    const TorusScalar one(g, 1.0);
    const TorusVector u({TorusScalar(g), sample(g, [](double x, double) { return 0.4 + std::cos(x); })});
    const TorusVector v({sample(g, [](double x, double y) { return std::sin(x) + 0.3 * std::cos(2 * y); }),
                         sample(g, [](double x, double y) { return std::cos(x + y); })});
    const double div2 = integrate(divergence(v) * divergence(v));
    double worst = 0.0, coef_gap = 0.0;
    for (double gamma : {1.4, 2.0, 2.5}) {
        const double A = 0.8;
        const auto model = pressure::PressureModel::polytropic(A, gamma);
        const double coef = torus::torus_curvature_coefficient(model);
        coef_gap = std::max(coef_gap, std::abs(coef - A * (3 - gamma) / 2));
        const double f0 = 1.0 / model.lambda(1.0);
        geometry::TangentVector<TorusGrid> U(u, TorusScalar(g, f0)), V(v, TorusScalar(g, f0));
        const auto rep = geometry::sectional_curvature(U, V, one, model);
        worst = std::max(worst, std::abs(rep.total - coef * div2) / std::abs(coef * div2));
    }
    return {worst < 1e-8 && coef_gap < 1e-14,
            fmt("max rel gap K vs coef * int (div v)^2 = %.2e; |coef - A(3-gamma)/2| <= %.1e", worst, coef_gap)};
}

Verdict disc_spectrum() {
    const disc::DiscBackground bg(1.0, 1.0, 1.0);
    double min_margin = std::numeric_limits<double>::infinity(), vieta = 0.0, min_gap = min_margin;
    bool distinct = true;
    for (int an = 0; an <= 16; ++an) {
        const auto eig = disc::sturm_liouville_eigs(bg, an, 12, 400);
        for (int n : {an, -an}) {
            for (const auto& e : eig) {
                try {
                    const auto y = disc::characteristic_roots(e.lambda, n, 1.0, 1.0);
                    const auto chk = disc::check_roots(e.lambda, n, 1.0, 1.0, y);
                    min_margin = std::min(min_margin, chk.margin);
                    min_gap = std::min(min_gap, chk.min_gap);
                    vieta = std::max({vieta, chk.vieta_sum, chk.vieta_pair});
                    distinct = distinct && chk.margin > 0.0 && chk.min_gap > 0.0;
                } catch (const Error&) {
                    distinct = false;
                }
            }
        }
    }
    const auto ray = disc::rayleigh_bound_check(bg, 16, 400);
    double rm = std::numeric_limits<double>::infinity(), dm = rm;
    for (const auto& r : ray.rows) {
        rm = std::min(rm, r.margin);
        dm = std::min(dm, r.downstream);
    }
    const bool ok = distinct && vieta < 1e-9 && ray.holds() && rm > 0.0 && dm > 0.0;
    return {ok, fmt("min p^3 - q^2 = %.3f, min root gap %.3f, Vieta residual %.1e; Rayleigh margin %.4f, "
                    "downstream margin %.4f",
                    min_margin, min_gap, vieta, rm, dm)};
}

Verdict bessel_roots() {
    const double c0 = disc::bessel_first_root(0), c1 = disc::bessel_first_root(1);
    const double e0 = std::abs(c0 - 2.404826), e1 = std::abs(c1 - 3.831706);
    return {e0 < 1e-6 && e1 < 1e-6, fmt("c0 = %.9f (%.1e), c1 = %.9f (%.1e)", c0, e0, c1, e1)};
}

Verdict disc_jacobi() {
    const disc::DiscBackground bg(1.0, 1.0, 1.0);
    const DiscGrid g(48, 16);
    auto grad = disc::gradient_example(g, bg, 0);
    grad += disc::gradient_example(g, bg, 2);
    const auto cg = disc::synthesize_and_classify(grad, bg, 0, -1);
    const auto cr = disc::synthesize_and_classify(disc::swirl_example(g, bg, 3), bg, 0, -1);

    // direct integration: sup over time of ||j|| stays flat for gradient data, grows for the swirl
    const DiscGrid gd(32, 16);
    auto run = [&](const DiscVector& v0) {
        auto s = disc::DiscLinearState::initial(v0, bg);
        const double t1 = 40.0;
        const long steps = std::lround(std::ceil(t1 / (0.5 * disc::disc_step_bound(gd, bg))));
        double mid = 0.0;
        for (long k = 1; k <= steps; ++k) {
            disc::disc_linear_step(s, bg, t1 / steps);
            if (k == steps / 2) mid = s.j_l2();
        }
        return s.j_l2() / mid;
    };
    auto gdir = disc::gradient_example(gd, bg, 0);
    gdir += disc::gradient_example(gd, bg, 2);
    const double grow_g = run(gdir), grow_r = run(disc::swirl_example(gd, bg, 3));

    const bool ok = cg.bounded && cg.min_excited_frequency > 0.0 && cg.growth_rate < 1e-10 && !cr.bounded &&
                    cr.growth_rate > 0.1 && grow_g < 1.5 && grow_r > 1.7;
    return {ok, fmt("gradient: bounded, min |y| %.2e over %d modes; swirl: growth rate %.4f; direct "
                    "||j(40)||/||j(20)|| = %.3f (gradient), %.3f (swirl)",
                    cg.min_excited_frequency, cg.modes, cr.growth_rate, grow_g, grow_r)};
}

Verdict disc_curvature() {
    const double c = 1.0;
    const auto model = pressure::PressureModel::catalog("const", c);
    const DiscGrid d(200, 16);
    const auto rho = sample(d, [&](double r, double) { return r * r / (2 * c * c); });
    const auto f = rho * (1.0 / model.lambda(1.0));
    double worst = 0.0, constant = 0.0;
    for (double k : {0.0, 2.0, 3.5}) {
        geometry::TangentVector<DiscGrid> U(rotation_field(d, 1.0), f), V(rotation_field(d, k), f);
        const auto rep = geometry::sectional_curvature(U, V, rho, model);
        const auto z = rotation_field(d, k - 1.0);
        const double reduced = 0.5 * c * c * integrate(rho * rho * geometry::q_operator(z, z));
        worst = std::max(worst, std::abs(rep.total - reduced) / std::abs(reduced));
        if (k == 3.5) constant = -reduced * c * c / (pi * (k - 1) * (k - 1));
    }
    return {worst < 1e-8, fmt("full vs reduced rel gap %.2e; K = -pi (k-1)^2 / (%.4f c^2), printed /48 "
                              "(factor %.4f, see ledger)",
                              worst, 1.0 / constant, 48.0 * constant)};
}

}  // namespace

int main() {
    const double none = std::numeric_limits<double>::infinity();
    const std::vector<Criterion> criteria = {
        {"C1", "conjugate times 2 pi m / n", 30.0, conjugate_times},
        {"C2", "1-D Jacobi growth bound", 120.0, growth_bound},
        {"C3", "curvature sign scan", 60.0, curvature_scan},
        {"C4", "exact vs numeric geodesic", 30.0, exact_vs_numeric},
        {"C5", "geodesic deviation converges to Jacobi field", 120.0, deviation_slope},
        {"C6", "torus boundedness iff gradient", 60.0, torus_classification},
        {"C7", "torus curvature coefficient", none, torus_curvature},
        {"C8", "disc spectrum and cubic roots", 120.0, disc_spectrum},
        {"C9", "Bessel roots", none, bessel_roots},
        {"C10", "disc Jacobi criterion", 60.0, disc_jacobi},
        {"C11", "disc curvature constant", none, disc_curvature},
    };
    int failed = 0;
    for (const auto& c : criteria) {
        const auto t0 = std::chrono::steady_clock::now();
        Verdict v;
        try {
            v = c.check();
        } catch (const std::exception& e) {
            v = {false, std::string("exception: ") + e.what()};
        }
        const double dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        std::string limit;
        if (std::isfinite(c.time_limit)) {
            limit = fmt(" / %.0f s", c.time_limit);
            if (dt >= c.time_limit) {
                v.pass = false;
                v.detail += "; over the time limit";
            }
        }
        failed += !v.pass;
        std::printf("%s  %-4s %s: %s [%.1f s%s]\n", v.pass ? "PASS" : "FAIL", c.id, c.what, v.detail.c_str(), dt,
                    limit.c_str());
        std::fflush(stdout);
    }
    std::printf("%d/%zu criteria pass\n", static_cast<int>(criteria.size()) - failed, criteria.size());
    return failed;
}
