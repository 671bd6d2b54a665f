#include "bflow/cli.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <memory>
#include <numbers>
#include <optional>
#include <ostream>

#include "CLI11.hpp"
#include "json.hpp"

#include "bflow/burgers.hpp"
#include "bflow/disc_spectral.hpp"
#include "bflow/error.hpp"
#include "bflow/geodesic.hpp"
#include "bflow/geometry.hpp"
#include "bflow/jacobi.hpp"
#include "bflow/operators.hpp"
#include "bflow/random_fields.hpp"
#include "bflow/spectral.hpp"
#include "bflow/torus_modes.hpp"

namespace bflow::cli {
namespace {

using json = nlohmann::ordered_json;
namespace fs = std::filesystem;
using std::numbers::pi;

constexpr const char* version = "0.1.0";
constexpr const char* seed_algorithm =
    "SplitMix64, counter based: draw i of stream s is mix(s + (i + 1) * 0x9E3779B97F4A7C15); "
    "substream(s, k) is the stream seeded with mix(s ^ mix(k + 0x9E3779B97F4A7C15)); uniforms take the top 53 bits; "
    "normals are cos-branch Box-Muller on consecutive uniforms";

// Failures raised before any computation, mapped to exit 2.
struct UsageFailure {
    std::string message;
    std::string usage;
};

struct ValidationFailure {
    json violations;
};

std::string num(double v) {
    if (std::isnan(v)) return "nan";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string cell(double v) { return num(v); }
std::string cell(int v) { return std::to_string(v); }
std::string cell(std::uint64_t v) { return std::to_string(v); }

class Table {
public:
    explicit Table(std::vector<std::string> header) : header_(std::move(header)) {}

    template <class... T>
    void row(const T&... cells) {
        rows_.push_back({cell(cells)...});
    }
    std::size_t size() const noexcept { return rows_.size(); }

    void write(const fs::path& path) const {
        std::ofstream os(path, std::ios::binary);
        require(static_cast<bool>(os), ErrorKind::Usage, "cannot write " + path.string());
        auto line = [&](const std::vector<std::string>& r) {
            for (std::size_t i = 0; i < r.size(); ++i) os << (i ? "," : "") << r[i];
            os << '\n';
        };
        line(header_);
        for (const auto& r : rows_) line(r);
    }

private:
    std::vector<std::string> header_;
    std::vector<std::vector<std::string>> rows_;
};

json number(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

struct Output {
    fs::path dir;
    std::string name;
    std::vector<std::string> files;
    std::optional<Error> failure;  // reported after the artifacts are on disk

    void table(const std::string& suffix, const Table& t) {
        const std::string file = name + suffix + ".csv";
        t.write(dir / file);
        files.push_back(file);
    }
};

// Validation ------------------------------------------------------------------

class Checker {
public:
    void check(bool ok, const std::string& parameter, const json& value, const std::string& bound) {
        if (!ok) violations_.push_back({{"parameter", parameter}, {"value", value}, {"bound", bound}});
    }
    void range(const std::string& p, double v, double lo, double hi) {
        check(std::isfinite(v) && v >= lo && v <= hi, p, number(v), "[" + num(lo) + ", " + num(hi) + "]");
    }
    void open_low(const std::string& p, double v, double lo, double hi) {
        check(std::isfinite(v) && v > lo && v <= hi, p, number(v), "(" + num(lo) + ", " + num(hi) + "]");
    }
    void irange(const std::string& p, long v, long lo, long hi) {
        check(v >= lo && v <= hi, p, v, "[" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
    }
    void even(const std::string& p, int v, int lo, int hi) {
        check(v % 2 == 0 && v >= lo && v <= hi, p, v,
              "even integer in [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
    }
    void one_of(const std::string& p, const std::string& v, std::initializer_list<const char*> allowed) {
        std::string list;
        bool ok = false;
        for (const char* a : allowed) {
            ok = ok || v == a;
            list += (list.empty() ? "" : " | ") + std::string(a);
        }
        check(ok, p, v, list);
    }
    void finish() const {
        if (!violations_.empty()) throw ValidationFailure{violations_};
    }

private:
    json violations_ = json::array();
};

bool is_gamma3(const ExperimentConfig& c) { return c.gamma == 3.0 && std::abs(c.A - 1.0 / 3.0) < 1e-15; }

int grid_or(int n, int fallback) { return n == 0 ? fallback : n; }

void check_model(Checker& ck, const ExperimentConfig& c) {
    ck.open_low("gamma", c.gamma, 1.0, 5.0);
    ck.open_low("A", c.A, 0.0, 1e3);
}

void check_profile(Checker& ck, const ExperimentConfig& c, int n) {
    ck.one_of("profile", c.profile, {"sine", "random"});
    ck.range("u-amp", c.u_amp, 0.0, 10.0);
    ck.range("rho-amp", c.rho_amp, 0.0, 0.9);
    ck.irange("kmax", c.kmax, 1, std::max(1, n / 4 - 1));
}

// Initial data on the circle. Random profiles draw band-limited fields from
// substreams 0 (velocity) and 1 (density) of the seed and scale them to the
// requested amplitude.
struct Profile {
    CircleScalar u0, rho0;
};

CircleScalar scaled(CircleScalar f, double amp) {
    const double m = f.max_abs();
    return m > 0.0 ? f * (amp / m) : f;
}

Profile initial_profile(const ExperimentConfig& c, const CircleGrid& g) {
    if (c.profile == "sine") {
        return {sample(g, [&](double x) { return c.u_amp * std::sin(x); }),
                sample(g, [&](double x) { return 1.0 + c.rho_amp * std::cos(x); })};
    }
    auto ru = SplitMix64::substream(c.seed, 0);
    auto rr = SplitMix64::substream(c.seed, 1);
    return {scaled(random_band_limited(g, c.kmax, ru), c.u_amp),
            scaled(random_band_limited(g, c.kmax, rr), c.rho_amp) + 1.0};
}

double steps_dt(double t_end, double dt) { return t_end / std::ceil(t_end / dt - 1e-9); }

// Experiments -----------------------------------------------------------------

json run_geodesic(const ExperimentConfig& c, Output& out) {
    const int n = grid_or(c.n_grid, 256);
    const double t_end = c.t_end == 0.0 ? 0.5 : c.t_end;
    Checker ck;
    ck.even("n-grid", n, 8, 8192);
    check_model(ck, c);
    check_profile(ck, c, n);
    ck.range("t-end", t_end, 0.0, 100.0);
    ck.range("dt", c.dt, 0.0, 1.0);
    ck.irange("sample-every", c.sample_every, 1, 1000000);
    ck.finish();

    const CircleGrid g(n);
    const auto model = pressure::PressureModel::polytropic(c.A, c.gamma);
    const auto prof = initial_profile(c, g);
    auto s0 = geodesic::barotropic_initializer(as_vector(prof.u0), prof.rho0, model);
    geodesic::IntegrateOptions opt;
    opt.dt = steps_dt(t_end, c.dt > 0.0 ? c.dt : 0.5 * geodesic::cfl_bound(s0, model));
    opt.t_end = t_end;
    opt.sample_every = c.sample_every;
    opt.stop_at_shock = c.stop_at_shock;
    const auto tr = geodesic::integrate(s0, geodesic::FlowMap<CircleGrid>::identity(prof.rho0), model, opt);

    const auto& fs = tr.final_state;
    const auto jac = tr.final_map.jacobian();
    std::optional<burgers::ExactSolution> ex;
    if (is_gamma3(c) && !tr.shock_time) ex = burgers::exact_state(prof.u0, prof.rho0, fs.t);

    Table prof_t(ex ? std::vector<std::string>{"x", "u", "rho", "jacobian", "u_exact", "rho_exact"}
                    : std::vector<std::string>{"x", "u", "rho", "jacobian"});
    double gap = 0.0;
    for (int i = 0; i < n; ++i) {
        if (ex) {
            prof_t.row(g.x(i), fs.u[0][i], fs.rho[i], jac[i], ex->u[i], ex->rho[i]);
            gap = std::max({gap, std::abs(fs.u[0][i] - ex->u[i]), std::abs(fs.rho[i] - ex->rho[i])});
        } else {
            prof_t.row(g.x(i), fs.u[0][i], fs.rho[i], jac[i]);
        }
    }
    out.table("", prof_t);
    Table traj({"t", "energy", "min_jacobian"});
    for (const auto& s : tr.samples) traj.row(s.t, s.energy, s.min_jacobian);
    out.table("_trajectory", traj);

    json r;
    r["n_grid"] = n;
    r["dt"] = opt.dt;
    r["t_final"] = fs.t;
    r["shock_time"] = tr.shock_time ? json(*tr.shock_time) : json(nullptr);
    r["energy_drift"] = tr.energy_drift;
    r["min_jacobian"] = tr.samples.empty() ? 1.0 : tr.samples.back().min_jacobian;
    r["compatibility_residual"] = geodesic::compatibility_residual(fs, tr.final_map);
    r["exact_gap_inf"] = ex ? json(gap) : json(nullptr);
    return r;
}

json run_jacobi(const ExperimentConfig& c, Output& out) {
    const int n = grid_or(c.n_grid, 256);
    Checker ck;
    ck.even("n-grid", n, 8, 8192);
    check_model(ck, c);
    check_profile(ck, c, n);
    ck.one_of("v-profile", c.v_profile, {"random", "cos"});
    ck.range("t-end", c.t_end, 0.0, 100.0);
    ck.check(c.t_end > 0.0 || is_gamma3(c), "t-end", c.t_end,
             "positive unless gamma = 3 and A = 1/3, where 0 means 0.9 of the shock time");
    ck.range("dt", c.dt, 0.0, 1.0);
    ck.irange("sample-every", c.sample_every, 1, 1000000);
    ck.finish();

    const CircleGrid g(n);
    const auto model = pressure::PressureModel::polytropic(c.A, c.gamma);
    const auto prof = initial_profile(c, g);
    CircleScalar v0 = c.v_profile == "cos" ? sample(g, [&](double x) { return std::cos(c.kmax * x); }) : [&] {
        auto rv = SplitMix64::substream(c.seed, 2);
        return scaled(random_band_limited(g, c.kmax, rv), 1.0);
    }();
    // closed forms exist only for p = rho^3 / 3
    const bool exact = is_gamma3(c);
    const double ts = exact ? burgers::shock_time(burgers::riemann_invariants(prof.u0, prof.rho0))
                            : std::numeric_limits<double>::quiet_NaN();
    double t_end = c.t_end;
    if (t_end == 0.0) {
        require(std::isfinite(ts), ErrorKind::Validation, "t-end: data never shocks, give t-end explicitly");
        t_end = 0.9 * ts;
    }

    auto bg = geodesic::barotropic_initializer(as_vector(prof.u0), prof.rho0, model);
    jacobi::JacobiOptions opt;
    opt.dt = steps_dt(t_end, c.dt > 0.0 ? c.dt : std::min(t_end / 800, 0.5 * geodesic::cfl_bound(bg, model)));
    opt.t_end = t_end;
    opt.stop_at_shock = c.stop_at_shock;
    const auto tr = jacobi::integrate_jacobi(bg, geodesic::FlowMap<CircleGrid>::identity(prof.rho0), as_vector(v0),
                                             model, opt);
    const auto rep = jacobi::growth_report(tr.samples);

    Table t(exact ? std::vector<std::string>{"t", "j_sup", "ratio", "sigma_l2", "G_sup", "constraint", "j_exact_sup",
                                             "exact_ratio"}
                  : std::vector<std::string>{"t", "j_sup", "ratio", "sigma_l2", "G_sup", "constraint"});
    double exact_max_ratio = 0.0, max_constraint = 0.0;
    for (std::size_t k = 0; k < tr.samples.size(); ++k) {
        const auto& s = tr.samples[k];
        max_constraint = std::max(max_constraint, s.constraint);
        if (k % c.sample_every != 0 && k + 1 != tr.samples.size()) continue;
        if (exact && s.t > 0.0 && !(s.t >= ts)) {
            const double je = burgers::exact_jacobi(prof.u0, prof.rho0, v0, s.t).max_abs();
            const double er = tr.v0_sup > 0.0 ? je / (s.t * tr.v0_sup) : 0.0;
            exact_max_ratio = std::max(exact_max_ratio, er);
            t.row(s.t, s.j_sup, s.ratio, s.sigma_l2, s.G_sup, s.constraint, je, er);
        } else if (exact) {
            t.row(s.t, s.j_sup, s.ratio, s.sigma_l2, s.G_sup, s.constraint, 0.0, 0.0);
        } else {
            t.row(s.t, s.j_sup, s.ratio, s.sigma_l2, s.G_sup, s.constraint);
        }
    }
    out.table("", t);

    json r;
    r["n_grid"] = n;
    r["dt"] = opt.dt;
    r["t_end"] = t_end;
    r["shock_time"] = number(ts);
    r["background_shock"] = tr.shock_time ? json(*tr.shock_time) : json(nullptr);
    r["v0_sup"] = tr.v0_sup;
    r["max_ratio"] = rep.max_ratio;
    r["t_at_max"] = rep.t_at_max;
    r["growth_rate"] = rep.growth_rate;
    r["exact_max_ratio"] = exact ? json(exact_max_ratio) : json(nullptr);
    r["max_constraint"] = max_constraint;
    return r;
}

json run_burgers_exact(const ExperimentConfig& c, Output& out) {
    const int n = grid_or(c.n_grid, 256);
    Checker ck;
    ck.even("n-grid", n, 8, 8192);
    check_profile(ck, c, n);
    ck.range("t-end", c.t_end, 0.0, 100.0);
    ck.irange("frames", c.frames, 1, 1000);
    ck.finish();

    const CircleGrid g(n);
    const auto prof = initial_profile(c, g);
    const auto inv = burgers::riemann_invariants(prof.u0, prof.rho0);
    const double tp = burgers::shock_time(inv.plus), tm = burgers::shock_time(inv.minus);
    const double ts = std::min(tp, tm);
    double t_end = c.t_end;
    if (t_end == 0.0) {
        require(std::isfinite(ts), ErrorKind::Validation, "t-end: data never shocks, give t-end explicitly");
        t_end = 0.9 * ts;
    }
    Table t({"t", "x", "u", "rho", "alpha_plus", "alpha_minus"});
    for (int f = 0; f <= c.frames; ++f) {
        const double tf = t_end * f / c.frames;
        const auto ex = burgers::exact_state(prof.u0, prof.rho0, tf);
        for (int i = 0; i < n; ++i) t.row(tf, g.x(i), ex.u[i], ex.rho[i], ex.u[i] + ex.rho[i], ex.u[i] - ex.rho[i]);
    }
    out.table("", t);

    json r;
    r["n_grid"] = n;
    r["t_end"] = t_end;
    r["shock_time_plus"] = number(tp);
    r["shock_time_minus"] = number(tm);
    r["shock_time"] = number(ts);
    r["frames"] = c.frames;
    return r;
}

json run_conjugate(const ExperimentConfig& c, Output& out) {
    const int n = grid_or(c.n_grid, 128);
    const int mode = c.mode < 0 ? 2 : c.mode;
    const double dt = c.dt > 0.0 ? c.dt : 2e-3;
    Checker ck;
    ck.even("n-grid", n, 8, 4096);
    ck.irange("n", mode, 1, std::max(1, n / 4));
    ck.irange("m-max", c.m_max, 1, 32);
    ck.range("dt", dt, 0.0, 0.05);
    ck.open_low("tol", c.tol, 0.0, 1.0);
    ck.finish();

    const CircleGrid g(n);
    const auto model = pressure::PressureModel::catalog("3/rho");
    CircleScalar one(g, 1.0);
    const auto expected = burgers::conjugate_times(mode, c.m_max);
    jacobi::ConjugateOptions opt;
    opt.dt = dt;
    opt.t_end = expected.back() + 0.5 * pi / mode;
    const auto pts = jacobi::detect_conjugate_points(
        geodesic::barotropic_initializer(as_vector(one), one, model), geodesic::FlowMap<CircleGrid>::identity(one),
        as_vector(sample(g, [&](double x) { return std::cos(mode * x); })), model, opt);

    Table t({"m", "T_expected", "T_detected", "abs_error", "residual"});
    double worst = 0.0;
    for (int m = 1; m <= c.m_max; ++m) {
        const double te = expected[m - 1];
        if (static_cast<std::size_t>(m) <= pts.size()) {
            const auto& p = pts[m - 1];
            worst = std::max(worst, std::abs(p.t - te));
            t.row(m, te, p.t, std::abs(p.t - te), p.residual);
        } else {
            t.row(m, te, std::nan(""), std::nan(""), std::nan(""));
        }
    }
    out.table("", t);
    const bool complete = pts.size() == expected.size();
    if (!complete)
        out.failure = Error(ErrorKind::Convergence, "detected " + std::to_string(pts.size()) + " conjugate points, expected " +
                                                        std::to_string(expected.size()));

    json r;
    r["n"] = mode;
    r["m_max"] = c.m_max;
    r["n_grid"] = n;
    r["dt"] = dt;
    r["detected"] = pts.size();
    r["max_abs_error"] = complete ? json(worst) : json(nullptr);
    r["within_tol"] = complete && worst <= c.tol;
    return r;
}

json run_curvature_scan(const ExperimentConfig& c, Output& out) {
    const int n = grid_or(c.n_grid, 64);
    Checker ck;
    ck.even("n-grid", n, 16, 4096);
    check_model(ck, c);
    ck.irange("trials", c.trials, 1, 1000000);
    ck.finish();

    geometry::ScanOptions opt;
    opt.trials = c.trials;
    opt.seed = c.seed;
    opt.n_grid = n;
    const auto rep = geometry::curvature_sign_scan_1d(pressure::PressureModel::polytropic(c.A, c.gamma), opt);
    Table t({"trial", "seed", "term_div", "term_Q", "term_grad", "total"});
    int negative = 0;
    for (const auto& row : rep.rows) {
        t.row(row.trial, row.seed, row.report.term_div, row.report.term_Q, row.report.term_grad, row.report.total);
        if (row.report.total < 0.0) ++negative;
    }
    out.table("", t);

    json r;
    r["gamma"] = c.gamma;
    r["A"] = c.A;
    r["trials"] = c.trials;
    r["n_grid"] = n;
    r["min_total"] = rep.min_total;
    r["argmin"] = rep.argmin;
    r["argmin_seed"] = rep.argmin >= 0 ? json(rep.rows[rep.argmin].seed) : json(nullptr);
    r["negative_count"] = negative;
    r["nonnegativity_expected"] = rep.nonnegativity_expected;
    r["nonnegative"] = rep.min_total >= -1e-10;
    return r;
}

json run_torus_modes(const ExperimentConfig& c, Output& out) {
    const int n = grid_or(c.n_grid, 32);
    Checker ck;
    ck.even("n-grid", n, 8, 1024);
    ck.one_of("kind", c.kind, {"gradient", "rotational", "mixed"});
    ck.irange("kmax", c.kmax, 1, std::max(1, n / 4));
    ck.range("omega", c.omega, -100.0, 100.0);
    ck.open_low("c", c.c, 0.0, 100.0);
    ck.range("t-end", c.t_end, 0.0, 1e5);
    ck.irange("samples", c.samples, 2, 1000000);
    ck.range("crosscheck-t", c.crosscheck_t, 0.0, 100.0);
    ck.finish();

    const TorusGrid g(n, n);
    auto rf = SplitMix64::substream(c.seed, 0);
    auto rg = SplitMix64::substream(c.seed, 1);
    const auto f = random_band_limited(g, c.kmax, rf);
    const auto psi = random_band_limited(g, c.kmax, rg);
    TorusVector v0(g);
    if (c.kind != "rotational") v0 += gradient(f);
    if (c.kind != "gradient") v0 += skew_gradient(psi);

    const double t_end = c.t_end == 0.0 ? 100.0 / c.c : c.t_end;
    const torus::TorusModeSolution sol(v0, c.omega, c.c);
    const auto cls = torus::classify_boundedness(v0, c.c);
    Table t({"t", "j_sup"});
    double sup = 0.0;
    for (int k = 0; k < c.samples; ++k) {
        const double tk = t_end * k / (c.samples - 1);
        const double j = sol.evaluate(tk).max_norm();
        sup = std::max(sup, j);
        t.row(tk, j);
    }
    out.table("", t);
    const auto fit = torus::fit_growth(sol, 0.1 * t_end, t_end);

    json r;
    r["kind"] = c.kind;
    r["n_grid"] = n;
    r["t_end"] = t_end;
    r["classification"] = cls.kind == torus::Boundedness::Bounded ? "bounded" : "linear_growth";
    r["w_l2"] = cls.w_l2;
    r["z_sup"] = cls.z_sup;
    r["series_bound"] = sol.series_bound();
    r["sup_j"] = sup;
    r["bounded_by_series"] = cls.kind == torus::Boundedness::Bounded ? json(sup <= sol.series_bound() + 1e-10)
                                                                     : json(nullptr);
    r["fitted_slope"] = fit.slope;
    r["slope_rel_error"] = cls.z_sup > 0.0 ? json(std::abs(fit.slope - cls.z_sup) / cls.z_sup) : json(nullptr);
    if (c.crosscheck_t > 0.0) {
        const auto cc = torus::mode_numeric_crosscheck(v0, c.omega, c.c, c.crosscheck_t);
        r["crosscheck_max_rel_gap"] = cc.max_rel_gap;
    }
    return r;
}

json run_disc_spectrum(const ExperimentConfig& c, Output& out) {
    Checker ck;
    ck.range("omega", c.omega, -100.0, 100.0);
    ck.open_low("c", c.c, 0.0, 100.0);
    ck.open_low("rho0", c.rho0, 0.0, 1e6);
    ck.check(c.rho0 > c.omega * c.omega / (2 * c.c * c.c), "rho0", number(c.rho0),
             "greater than omega^2 / (2 c^2) = " + num(c.omega * c.omega / (2 * c.c * c.c)) + " (no vacuum)");
    ck.irange("nodes", c.nodes, 200, 20000);
    ck.irange("k-max", c.k_max, 1, std::max(1, c.nodes - 2));
    ck.irange("n-max", c.n_max, 0, 64);
    ck.one_of("initial", c.initial, {"none", "gradient", "swirl"});
    ck.irange("nr", c.nr, 8, 1024);
    ck.even("ntheta", c.ntheta, 8, 1024);
    ck.irange("mode", c.mode, -1, 32);
    ck.finish();

    const disc::DiscBackground bg(c.omega, c.c, c.rho0);
    Table t({"n", "k", "lambda", "y1", "y2", "y3", "p", "q", "margin", "vieta_sum", "vieta_pair", "min_gap"});
    bool distinct = true;
    double min_margin = std::numeric_limits<double>::infinity(), min_gap = min_margin;
    double vieta = 0.0;
    for (int an = 0; an <= c.n_max; ++an) {
        const auto eig = disc::sturm_liouville_eigs(bg, an, c.k_max, c.nodes);
        for (int n : {-an, an}) {
            for (const auto& e : eig) {
                try {
                    const auto y = disc::characteristic_roots(e.lambda, n, c.omega, c.c);
                    const auto chk = disc::check_roots(e.lambda, n, c.omega, c.c, y);
                    min_margin = std::min(min_margin, chk.margin);
                    min_gap = std::min(min_gap, chk.min_gap);
                    vieta = std::max({vieta, chk.vieta_sum, chk.vieta_pair});
                    t.row(n, e.k, e.lambda, y[0], y[1], y[2], chk.p, chk.q, chk.margin, chk.vieta_sum, chk.vieta_pair,
                          chk.min_gap);
                } catch (const Error& err) {
                    if (err.kind() != ErrorKind::Instability) throw;
                    distinct = false;
                    const double p = (c.c * c.c * e.lambda + 4 * c.omega * c.omega) / 3;
                    const double q = n * c.omega * c.omega * c.omega;
                    const double nan = std::nan("");
                    min_margin = std::min(min_margin, p * p * p - q * q);
                    t.row(n, e.k, e.lambda, nan, nan, nan, p, q, p * p * p - q * q, nan, nan, nan);
                }
            }
            if (an == 0) break;
        }
    }
    out.table("", t);

    const auto ray = disc::rayleigh_bound_check(bg, c.n_max, c.nodes);
    Table rt({"n", "lambda1", "bessel_root", "bound", "margin", "downstream", "arithmetic"});
    double min_ray = std::numeric_limits<double>::infinity(), min_down = min_ray;
    for (const auto& row : ray.rows) {
        rt.row(row.n, row.lambda1, row.bessel_root, row.bound, row.margin, row.downstream, row.arithmetic);
        min_ray = std::min(min_ray, row.margin);
        min_down = std::min(min_down, row.downstream);
    }
    out.table("_rayleigh", rt);

    json r;
    r["omega"] = c.omega;
    r["c"] = c.c;
    r["rho0"] = c.rho0;
    r["a"] = bg.a();
    r["b"] = bg.b();
    r["k_max"] = c.k_max;
    r["n_max"] = c.n_max;
    r["nodes"] = c.nodes;
    r["all_distinct_real"] = distinct;
    r["min_cubic_margin"] = number(min_margin);
    r["min_root_gap"] = number(min_gap);
    r["max_vieta_residual"] = vieta;
    r["rayleigh_holds"] = ray.holds();
    r["min_rayleigh_margin"] = number(min_ray);
    r["min_downstream_margin"] = number(min_down);
    r["falsifications"] = ray.falsifications;
    if (c.initial != "none") {
        const DiscGrid g(c.nr, c.ntheta);
        const int mode = c.mode >= 0 ? c.mode : (c.initial == "gradient" ? 2 : 3);
        const auto v0 = c.initial == "gradient" ? disc::gradient_example(g, bg, mode) : disc::swirl_example(g, bg, mode);
        const auto cls = disc::DiscModeSolution(v0, bg).classification();
        r["classification"] = {{"initial", c.initial},
                               {"mode", mode},
                               {"bounded", cls.bounded},
                               {"criterion", cls.criterion},
                               {"growth_rate", cls.growth_rate},
                               {"min_excited_frequency", cls.min_excited_frequency},
                               {"projection_residual", cls.projection_residual},
                               {"modes", cls.modes}};
    }
    return r;
}

// Command table -----------------------------------------------------------------

struct Binding {
    std::string key;
    std::function<json()> value;
};

struct Command {
    CLI::App* app = nullptr;
    std::vector<Binding> params;
    json (*run)(const ExperimentConfig&, Output&) = nullptr;
};

struct Parser {
    ExperimentConfig cfg;
    CLI::App app{"Batch experiments for compressible barotropic flow", "bflow"};
    std::map<std::string, Command> commands;
    CLI::App* run_cmd = nullptr;
    std::string config_path;
    std::map<std::string, CLI::Option*> output_flags;

    template <class T>
    void bind(Command& cmd, const std::string& flag, T& var, const std::string& desc) {
        cmd.app->add_option("--" + flag, var, desc)->capture_default_str();
        cmd.params.push_back({flag, [&var] { return json(var); }});
    }

    Command& add(const std::string& name, const std::string& desc, json (*fn)(const ExperimentConfig&, Output&)) {
        Command& cmd = commands[name];
        cmd.app = app.add_subcommand(name, desc);
        cmd.run = fn;
        output_flags[name] = cmd.app->add_option("--output-dir", cfg.output_dir,
                                                  std::string("output directory (overrides ") + output_dir_env + ")");
        cmd.app->add_option("--backend", cfg.backend, "serial | openmp")
            ->check(CLI::IsMember({"serial", "openmp"}))
            ->capture_default_str();
        cmd.params.push_back({"backend", [this] { return json(cfg.backend); }});
        return cmd;
    }

    void add_model(Command& cmd) {
        bind(cmd, "gamma", cfg.gamma, "polytropic exponent, p = A rho^gamma");
        bind(cmd, "A", cfg.A, "polytropic constant");
    }

    void add_profile(Command& cmd) {
        bind(cmd, "profile", cfg.profile, "sine: u = u-amp sin x, rho = 1 + rho-amp cos x; random: seeded band-limited");
        bind(cmd, "u-amp", cfg.u_amp, "velocity amplitude");
        bind(cmd, "rho-amp", cfg.rho_amp, "density perturbation amplitude");
        bind(cmd, "kmax", cfg.kmax, "largest wavenumber of random data");
        bind(cmd, "seed", cfg.seed, "64-bit seed");
        bind(cmd, "n-grid", cfg.n_grid, "grid points (0 = 256)");
    }

    Parser() {
        app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
        app.require_subcommand(1);
        app.set_help_all_flag("--help-all", "help for every experiment");

        run_cmd = app.add_subcommand("run", "run the experiment named in a key=value config file; flags override it");
        run_cmd->add_option("--config", config_path, "config file with experiment=<name> and key=value lines")
            ->required();
        run_cmd->allow_extras();

        auto& geo = add("geodesic", "1-D barotropic geodesic (RK4), compared with characteristics when gamma = 3",
                        run_geodesic);
        add_model(geo);
        add_profile(geo);
        bind(geo, "dt", cfg.dt, "time step (0 = half the CFL bound)");
        bind(geo, "t-end", cfg.t_end, "final time (0 = 0.5)");
        bind(geo, "sample-every", cfg.sample_every, "trajectory sampling stride");
        geo.app->add_flag("--stop-at-shock", cfg.stop_at_shock, "record the shock time instead of failing");
        geo.params.push_back({"stop-at-shock", [this] { return json(cfg.stop_at_shock); }});

        auto& jac = add("jacobi", "Jacobi field along a 1-D geodesic and its growth ratio", run_jacobi);
        add_model(jac);
        add_profile(jac);
        bind(jac, "v-profile", cfg.v_profile, "random (seeded, substream 2) | cos (cos(kmax x))");
        bind(jac, "dt", cfg.dt, "time step (0 = min(t-end / 800, half the CFL bound))");
        bind(jac, "t-end", cfg.t_end, "final time (0 = 0.9 of the shock time, gamma = 3 only)");
        bind(jac, "sample-every", cfg.sample_every, "output stride");
        jac.app->add_flag("--stop-at-shock", cfg.stop_at_shock, "stop at a background shock instead of failing");
        jac.params.push_back({"stop-at-shock", [this] { return json(cfg.stop_at_shock); }});

        auto& bur = add("burgers-exact", "closed-form state for p = rho^3 / 3 via Riemann invariants",
                        run_burgers_exact);
        add_profile(bur);
        bind(bur, "t-end", cfg.t_end, "last frame time (0 = 0.9 of the shock time)");
        bind(bur, "frames", cfg.frames, "number of frames after t = 0");

        auto& con = add("conjugate", "conjugate points along u = rho = 1 with v0 = cos(n x)", run_conjugate);
        bind(con, "n", cfg.mode, "wavenumber of v0 (-1 = 2)");
        bind(con, "m-max", cfg.m_max, "number of conjugate times");
        bind(con, "n-grid", cfg.n_grid, "grid points (0 = 128)");
        bind(con, "dt", cfg.dt, "time step (0 = 0.002)");
        bind(con, "tol", cfg.tol, "accepted absolute time error");

        auto& scan = add("curvature-scan", "sectional curvature of random 1-D sections", run_curvature_scan);
        add_model(scan);
        bind(scan, "trials", cfg.trials, "number of sections");
        bind(scan, "seed", cfg.seed, "64-bit seed");
        bind(scan, "n-grid", cfg.n_grid, "grid points (0 = 64)");

        auto& tor = add("torus-modes", "Jacobi fields along the steady shear on the torus", run_torus_modes);
        bind(tor, "kind", cfg.kind, "gradient | rotational | mixed");
        bind(tor, "omega", cfg.omega, "shear speed");
        bind(tor, "c", cfg.c, "sound speed at rho = 1");
        bind(tor, "kmax", cfg.kmax, "largest wavenumber of the random potentials");
        bind(tor, "seed", cfg.seed, "64-bit seed");
        bind(tor, "n-grid", cfg.n_grid, "grid points per side (0 = 32)");
        bind(tor, "t-end", cfg.t_end, "final time (0 = 100 / c)");
        bind(tor, "samples", cfg.samples, "time samples on [0, t-end]");
        bind(tor, "crosscheck-t", cfg.crosscheck_t, "if positive, compare with the linearized integrator up to this time");

        auto& disc = add("disc-spectrum", "eigenvalues and mode frequencies of the rotating disc", run_disc_spectrum);
        bind(disc, "omega", cfg.omega, "angular velocity");
        bind(disc, "c", cfg.c, "sound speed constant, p = c^2 rho^2 / 2");
        bind(disc, "rho0", cfg.rho0, "boundary density");
        bind(disc, "k-max", cfg.k_max, "radial modes per azimuthal number");
        bind(disc, "n-max", cfg.n_max, "largest |n|");
        bind(disc, "nodes", cfg.nodes, "radial intervals");
        bind(disc, "initial", cfg.initial, "none | gradient | swirl: classify example initial data");
        bind(disc, "mode", cfg.mode, "n for gradient data (-1 = 2), exponent m for swirl data (-1 = 3)");
        bind(disc, "nr", cfg.nr, "radial nodes of the classification grid");
        bind(disc, "ntheta", cfg.ntheta, "azimuthal nodes of the classification grid");
    }
};

json error_document(ErrorKind kind, const std::string& message, int code) {
    return {{"status", "error"}, {"exit_code", code}, {"kind", std::string(to_string(kind))}, {"message", message}};
}

int exit_code(ErrorKind kind) { return kind == ErrorKind::Usage || kind == ErrorKind::Validation ? 2 : 1; }

std::string help_for(const Parser& p) {
    for (const auto* sub : p.app.get_subcommands()) return sub->help();
    return p.app.help();
}

// Parses into p; returns true when help was printed.
bool parse(Parser& p, std::vector<std::string> args, std::ostream& out) {
    std::reverse(args.begin(), args.end());
    try {
        p.app.parse(args);
    } catch (const CLI::CallForHelp&) {
        out << help_for(p);
        return true;
    } catch (const CLI::CallForAllHelp&) {
        out << p.app.help("", CLI::AppFormatMode::All);
        return true;
    } catch (const CLI::ParseError& e) {
        throw UsageFailure{e.what(), help_for(p)};
    }
    return false;
}

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    return s.substr(b, s.find_last_not_of(" \t\r") - b + 1);
}

}  // namespace

std::vector<std::pair<std::string, std::string>> read_config_file(const std::string& path) {
    std::ifstream is(path);
    require(static_cast<bool>(is), ErrorKind::Usage, "cannot read config file " + path);
    std::vector<std::pair<std::string, std::string>> kv;
    std::string line;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        line = trim(line.substr(0, line.find('#')));
        if (line.empty()) continue;
        const auto eq = line.find('=');
        require(eq != std::string::npos && eq > 0, ErrorKind::Usage,
                path + ":" + std::to_string(lineno) + ": expected key=value");
        std::string key = trim(line.substr(0, eq));
        std::replace(key.begin(), key.end(), '_', '-');
        kv.emplace_back(key, trim(line.substr(eq + 1)));
    }
    return kv;
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    std::string experiment;
    try {
        auto p = std::make_unique<Parser>();
        if (parse(*p, args, out)) return 0;

        std::string config_output_dir;
        if (p->run_cmd->parsed()) {
            std::vector<std::string> expanded;
            for (const auto& [key, value] : read_config_file(p->config_path)) {
                if (key == "experiment") {
                    expanded.insert(expanded.begin(), value);
                } else if (key == "output-dir") {
                    config_output_dir = value;
                } else {
                    expanded.push_back("--" + key + "=" + value);
                }
            }
            if (expanded.empty() || expanded.front().rfind("--", 0) == 0 || expanded.front() == "run")
                throw UsageFailure{"config file " + p->config_path + " must name an experiment (experiment=<name>)",
                                   p->run_cmd->help()};
            for (const auto& extra : p->run_cmd->remaining()) expanded.push_back(extra);
            p = std::make_unique<Parser>();
            if (parse(*p, expanded, out)) return 0;
        }

        const CLI::App* sub = p->app.get_subcommands().front();
        experiment = sub->get_name();
        auto& cfg = p->cfg;
        cfg.experiment = experiment;
        if (p->output_flags.at(experiment)->count() == 0) {
            const char* env = std::getenv(output_dir_env);
            if (env != nullptr && *env != '\0') {
                cfg.output_dir = env;
            } else if (!config_output_dir.empty()) {
                cfg.output_dir = config_output_dir;
            }
        }
        set_default_backend(cfg.backend == "serial" ? Backend::Serial : Backend::OpenMP);

        const auto& cmd = p->commands.at(experiment);
        Output o{cfg.output_dir, experiment, {}, std::nullopt};
        std::error_code ec;
        fs::create_directories(o.dir, ec);
        if (ec) fail(ErrorKind::Usage, "cannot create output directory " + cfg.output_dir + ": " + ec.message());

        const auto start = std::chrono::steady_clock::now();
        json summary = cmd.run(cfg, o);
        const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

        json params;
        for (const auto& b : cmd.params) params[b.key] = b.value();
        json doc;
        doc["experiment"] = experiment;
        doc["parameters"] = params;
        doc["summary"] = summary;
        const std::string summary_file = experiment + ".json";
        std::ofstream(o.dir / summary_file, std::ios::binary) << doc.dump(2) << '\n';
        o.files.push_back(summary_file);

        json manifest;
        manifest["experiment"] = experiment;
        manifest["parameters"] = params;
        manifest["outputs"] = o.files;
        manifest["seed_algorithm"] = seed_algorithm;
        manifest["backend"] = cfg.backend;
        manifest["threads"] = cfg.backend == "serial" ? 1 : max_threads();
        manifest["versions"] = {{"bflow", version},
                                {"compiler", __VERSION__},
                                {"fftw", std::string(spectral::fftw_version())},
                                {"cli11", CLI11_VERSION},
                                {"nlohmann_json", std::to_string(NLOHMANN_JSON_VERSION_MAJOR) + "." +
                                                      std::to_string(NLOHMANN_JSON_VERSION_MINOR) + "." +
                                                      std::to_string(NLOHMANN_JSON_VERSION_PATCH)}};
        manifest["status"] = o.failure ? "failed" : "ok";
        manifest["wall_time_seconds"] = wall;
        std::ofstream(o.dir / "manifest.json", std::ios::binary) << manifest.dump(2) << '\n';

        if (o.failure) {
            const int code = exit_code(o.failure->kind());
            auto e = error_document(o.failure->kind(), o.failure->what(), code);
            e["experiment"] = experiment;
            out << e.dump() << '\n';
            return code;
        }
        out << json{{"status", "ok"}, {"experiment", experiment}, {"output_dir", cfg.output_dir}, {"outputs", o.files}}
                   .dump()
            << '\n';
        return 0;
    } catch (const UsageFailure& u) {
        out << error_document(ErrorKind::Usage, u.message, 2).dump() << '\n';
        err << u.usage;
        return 2;
    } catch (const ValidationFailure& v) {
        std::string msg;
        for (const auto& x : v.violations)
            msg += (msg.empty() ? "" : "; ") + x["parameter"].get<std::string>() + " = " + x["value"].dump() +
                   " outside " + x["bound"].get<std::string>();
        auto e = error_document(ErrorKind::Validation, msg, 2);
        e["experiment"] = experiment;
        e["violations"] = v.violations;
        out << e.dump() << '\n';
        return 2;
    } catch (const Error& e) {
        const int code = exit_code(e.kind());
        auto d = error_document(e.kind(), e.what(), code);
        if (!experiment.empty()) d["experiment"] = experiment;
        out << d.dump() << '\n';
        return code;
    } catch (const std::exception& e) {
        json d = {{"status", "error"}, {"exit_code", 1}, {"kind", "Internal"}, {"message", e.what()}};
        out << d.dump() << '\n';
        return 1;
    }
}

}  // namespace bflow::cli
