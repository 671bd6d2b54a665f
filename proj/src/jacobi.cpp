#include "bflow/jacobi.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "bflow/operators.hpp"
#include "bflow/trig_series.hpp"

namespace bflow::jacobi {

using geodesic::GeodesicRates;

namespace {

// Background and perturbation advanced together.
template <class Grid>
struct Joint {
    FluidState<Grid> bg;
    FlowMap<Grid> eta;
    JacobiState<Grid> js;
};

template <class Grid>
struct JointRates {
    GeodesicRates<Grid> bg;
    JacobiRates<Grid> js;
};

template <class Grid>
JointRates<Grid> joint_rates(const Joint<Grid>& x, const PressureModel& model, const StepOptions& opt) {
    try {
        return {geodesic::geodesic_rates(x.bg, x.eta, model, opt), jacobi_rates(x.js, x.bg, x.eta, model, opt)};
    } catch (const Error& e) {
        if (e.kind() != ErrorKind::Domain) throw;
        fail(ErrorKind::ShockReached, "background stage failed near t = " + std::to_string(x.bg.t) + ": " + e.what());
    }
}

template <class Grid>
void add_scaled(Joint<Grid>& x, double h, const JointRates<Grid>& k) {
    x.bg.u.axpy(h, k.bg.u);
    x.bg.rho.axpy(h, k.bg.rho);
    x.bg.q.axpy(h, k.bg.q);
    x.eta.displacement.axpy(h, k.bg.eta);
    x.js.v.axpy(h, k.js.v);
    x.js.sigma.axpy(h, k.js.sigma);
    x.js.j.axpy(h, k.js.j);
    x.js.G.axpy(h, k.js.G);
}

template <class Grid>
void rk4(Joint<Grid>& x, const PressureModel& model, double dt, const StepOptions& opt) {
    geodesic::check_shock(x.bg, x.eta, opt);
    geodesic::check_step(x.bg, model, dt, opt);
    const double t0 = x.bg.t;
    auto stage = [&](const JointRates<Grid>& k, double h) {
        Joint<Grid> y = x;
        add_scaled(y, h, k);
        y.bg.t = y.js.t = t0 + h;
        return y;
    };
    const auto k1 = joint_rates(x, model, opt);
    const auto k2 = joint_rates(stage(k1, 0.5 * dt), model, opt);
    const auto k3 = joint_rates(stage(k2, 0.5 * dt), model, opt);
    const auto k4 = joint_rates(stage(k3, dt), model, opt);
    add_scaled(x, dt / 6.0, k1);
    add_scaled(x, dt / 3.0, k2);
    add_scaled(x, dt / 3.0, k3);
    add_scaled(x, dt / 6.0, k4);
    x.bg.t = x.js.t = t0 + dt;
    geodesic::check_shock(x.bg, x.eta, opt);
}

// The field between nodes is the trigonometric interpolant, and j samples v0
// off the nodes, so the 1-D ratio needs the continuous sup.
double sup_norm(const VectorField<CircleGrid>& v) { return TrigSeries::from_field(v[0]).sup_abs(); }
double sup_norm(const VectorField<TorusGrid>& v) { return v.max_norm(); }

template <class Grid>
double l2(const ScalarField<Grid>& f) {
    return std::sqrt(std::max(0.0, integrate(f * f)));
}

template <class Grid>
double l2(const VectorField<Grid>& v) {
    return std::sqrt(std::max(0.0, integrate(dot(v, v))));
}

// |J|^2 and d/dt (|J|^2 / 2), the latter from the rates at x.
template <class Grid>
std::pair<double, double> norm_and_slope(const Joint<Grid>& x, const PressureModel& model, const StepOptions& opt) {
    const auto k = jacobi_rates(x.js, x.bg, x.eta, model, opt);
    const double n2 = integrate(dot(x.js.j, x.js.j) + x.js.G * x.js.G);
    const double s = integrate(dot(x.js.j, k.j) + x.js.G * k.G);
    return {n2, s};
}

}  // namespace

template <class Grid>
JacobiState<Grid> JacobiState<Grid>::initial(const VectorField<Grid>& v0, double t0) {
    const auto& g = v0.grid();
    return JacobiState<Grid>{v0, ScalarField<Grid>(g), VectorField<Grid>(g), ScalarField<Grid>(g), t0};
}

template <class Grid>
ScalarField<Grid> function_rate(const JacobiState<Grid>& js, const FluidState<Grid>& bg, const PressureModel& model) {
    require_same_grid(js.grid(), bg.grid());
    ScalarField<Grid> a(bg.grid()), w(bg.grid());
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double r = bg.rho[i];
        const double l = model.lambda(r);
        a[i] = 2.0 * model.phi(r) / (l * l);
        w[i] = r / l;
    }
    return a * js.sigma + dot(gradient(w), js.j);
}

template <class Grid>
JacobiRates<Grid> jacobi_rates(const JacobiState<Grid>& js, const FluidState<Grid>& bg, const FlowMap<Grid>& eta,
                               const PressureModel& model, const StepOptions& opt) {
    require_same_grid(js.grid(), bg.grid());
    const auto& u = bg.u;
    const auto& rho = bg.rho;
    ScalarField<Grid> pres(bg.grid()), dp_sigma(bg.grid()), inv_rho(bg.grid());
    parallel_for(
        pres.size(),
        [&](std::size_t i) {
            const double r = rho[i];
            const double l = model.lambda(r);
            pres[i] = bg.q[i] * bg.q[i] * model.phi(r) / (l * l);
            dp_sigma[i] = model.dpressure(r) * js.sigma[i];
            inv_rho[i] = 1.0 / r;
        },
        opt.backend);

    JacobiRates<Grid> out{covariant_derivative(u, js.v) + covariant_derivative(js.v, u),
                          -1.0 * divergence(js.sigma * u + rho * js.v),
                          js.v - covariant_derivative(u, js.j) + covariant_derivative(js.j, u),
                          ScalarField<Grid>(bg.grid())};
    // grad(h'(rho) sigma), written as the variation of grad(p) / rho so that it
    // is the exact derivative of the discrete momentum rate.
    out.v += inv_rho * gradient(dp_sigma);
    out.v -= (js.sigma * inv_rho * inv_rho) * gradient(pres);
    out.v *= -1.0;
    out.G = geodesic::compose(function_rate(js, bg, model), eta, opt.interpolation, opt.backend);
    return out;
}

template <class Grid>
void linearized_step(JacobiState<Grid>& js, FluidState<Grid>& bg, FlowMap<Grid>& eta, const PressureModel& model,
                     double dt, const StepOptions& opt) {
    require_same_grid(js.grid(), bg.grid());
    Joint<Grid> x{bg, eta, js};
    rk4(x, model, dt, opt);
    bg = std::move(x.bg);
    eta = std::move(x.eta);
    js = std::move(x.js);
}

template <class Grid>
double constraint_residual(const JacobiState<Grid>& js, const FluidState<Grid>& bg) {
    return (js.sigma + divergence(bg.rho * js.j)).max_abs();
}

template <class Grid>
JacobiTrajectory<Grid> integrate_jacobi(FluidState<Grid> bg, FlowMap<Grid> eta, const VectorField<Grid>& v0,
                                        const PressureModel& model, const JacobiOptions& opt) {
    require(opt.dt > 0.0 && opt.t_end >= 0.0, ErrorKind::Validation, "dt must be positive and t_end nonnegative");
    require(opt.sample_every >= 1, ErrorKind::Validation, "sample_every must be at least 1");
    Joint<Grid> x{std::move(bg), std::move(eta), JacobiState<Grid>::initial(v0)};
    x.js.t = x.bg.t;
    JacobiTrajectory<Grid> tr{{}, {}, {}, x.js, x.bg, x.eta, sup_norm(v0), std::nullopt};
    const double t0 = x.bg.t;
    auto record = [&]() {
        JacobiSample smp;
        smp.t = x.bg.t;
        smp.j_sup = x.js.j.max_norm();
        smp.v_l2 = l2(x.js.v);
        smp.sigma_l2 = l2(x.js.sigma);
        smp.G_sup = x.js.G.max_abs();
        const double el = smp.t - t0;
        smp.ratio = (el > 0.0 && tr.v0_sup > 0.0) ? smp.j_sup / (el * tr.v0_sup) : 0.0;
        smp.constraint = constraint_residual(x.js, x.bg);
        tr.samples.push_back(smp);
        if (opt.keep_states) {
            tr.states.push_back(x.js);
            tr.maps.push_back(x.eta);
        }
    };
    record();
    const long steps = std::lround(std::ceil(opt.t_end / opt.dt - 1e-9));
    for (long k = 0; k < steps; ++k) {
        const double target = std::min(t0 + (k + 1) * opt.dt, t0 + opt.t_end);
        try {
            rk4(x, model, target - x.bg.t, opt.step);
        } catch (const Error& e) {
            if (e.kind() != ErrorKind::ShockReached || !opt.stop_at_shock) throw;
            tr.shock_time = x.bg.t;
            break;
        }
        x.bg.t = x.js.t = target;
        if ((k + 1) % opt.sample_every == 0 || k + 1 == steps) record();
    }
    tr.final_state = x.js;
    tr.final_background = x.bg;
    tr.final_map = x.eta;
    return tr;
}

GrowthReport growth_report(std::span<const JacobiSample> samples) {
    require(!samples.empty(), ErrorKind::Validation, "growth report needs at least one sample");
    GrowthReport rep;
    double st = 0, sj = 0, stt = 0, stj = 0;
    for (const auto& s : samples) {
        if (s.ratio > rep.max_ratio) {
            rep.max_ratio = s.ratio;
            rep.t_at_max = s.t;
        }
        st += s.t;
        sj += s.j_sup;
        stt += s.t * s.t;
        stj += s.t * s.j_sup;
    }
    const double n = static_cast<double>(samples.size());
    const double den = n * stt - st * st;
    if (den > 0.0) {
        rep.growth_rate = (n * stj - st * sj) / den;
        rep.intercept = (sj - rep.growth_rate * st) / n;
    } else {
        rep.intercept = sj / n;
    }
    return rep;
}

// Deviation ------------------------------------------------------------------------

VectorField<CircleGrid> lagrangian(const VectorField<CircleGrid>& j, const FlowMap<CircleGrid>& eta,
                                   Interpolation method) {
    return as_vector(geodesic::compose(j[0], eta, method));
}

VectorField<TorusGrid> lagrangian(const VectorField<TorusGrid>& j, const FlowMap<TorusGrid>& eta,
                                  Interpolation method) {
    return VectorField<TorusGrid>({geodesic::compose(j[0], eta, method), geodesic::compose(j[1], eta, method)});
}

template <class Grid>
DeviationSeries<Grid> deviation_oracle(const VectorField<Grid>& u0, const ScalarField<Grid>& rho0,
                                       const VectorField<Grid>& v0, const PressureModel& model, double s,
                                       const DeviationOptions& opt) {
    require(s > 0.0 && std::isfinite(s), ErrorKind::Validation, "deviation step s must be positive");
    require(opt.dt > 0.0 && opt.t_end >= 0.0, ErrorKind::Validation, "dt must be positive and t_end nonnegative");
    require(opt.sample_every >= 1, ErrorKind::Validation, "sample_every must be at least 1");
    geodesic::IntegrateOptions io;
    io.dt = opt.dt;
    io.t_end = opt.t_end;
    io.sample_every = opt.sample_every;
    io.keep_states = true;
    io.stop_at_shock = false;
    io.step = opt.step;
    auto run = [&](double sign, const char* name) {
        VectorField<Grid> u = u0;
        u.axpy(sign * s, v0);
        try {
            return geodesic::integrate(geodesic::barotropic_initializer(u, rho0, model), FlowMap<Grid>::identity(rho0),
                                       model, io);
        } catch (const Error& e) {
            fail(e.kind(), std::string("deviation branch ") + name + ": " + e.what());
        }
    };
    const auto plus = run(1.0, "u0 + s v0");
    const auto minus = run(-1.0, "u0 - s v0");
    DeviationSeries<Grid> out;
    for (std::size_t k = 0; k < plus.maps.size(); ++k) {
        auto d = plus.maps[k].displacement - minus.maps[k].displacement;
        d *= 0.5 / s;
        out.t.push_back(plus.samples[k].t);
        out.deviation.push_back(std::move(d));
    }
    return out;
}

// Conjugate points -----------------------------------------------------------------

template <class Grid>
std::vector<ConjugatePoint> detect_conjugate_points(FluidState<Grid> bg, FlowMap<Grid> eta,
                                                    const VectorField<Grid>& v0, const PressureModel& model,
                                                    const ConjugateOptions& opt) {
    require(opt.dt > 0.0 && opt.t_end > 0.0, ErrorKind::Validation, "dt and t_end must be positive");
    require(opt.zero_tol > 0.0, ErrorKind::Validation, "zero tolerance must be positive");
    Joint<Grid> x{std::move(bg), std::move(eta), JacobiState<Grid>::initial(v0)};
    x.js.t = x.bg.t;
    const double t0 = x.bg.t;
    std::vector<ConjugatePoint> found;
    auto [n_max, s_prev] = norm_and_slope(x, model, opt.step);
    const long steps = std::lround(std::ceil(opt.t_end / opt.dt - 1e-9));
    for (long k = 0; k < steps; ++k) {
        const double target = std::min(t0 + (k + 1) * opt.dt, t0 + opt.t_end);
        const double h = target - x.bg.t;
        Joint<Grid> next = x;
        rk4(next, model, h, opt.step);
        auto [n_cur, s_cur] = norm_and_slope(next, model, opt.step);
        n_max = std::max(n_max, n_cur);
        // |J|^2 has a local minimum inside the step when its slope turns from
        // negative to nonnegative.
        if (s_prev < 0.0 && s_cur >= 0.0 && k > 0) {
            double a = 0.0, b = h, fa = s_prev, fb = s_cur;
            double root = b, n_root = n_cur;
            int side = 0;
            for (int it = 0; it < opt.max_refine && b - a > opt.time_tol; ++it) {
                // Illinois false position
                double c = (a * fb - b * fa) / (fb - fa);
                if (!(c > a && c < b)) c = 0.5 * (a + b);
                Joint<Grid> y = x;
                rk4(y, model, c, opt.step);
                const auto [nc, fc] = norm_and_slope(y, model, opt.step);
                root = c;
                n_root = nc;
                if (fc == 0.0) break;
                if (fc < 0.0) {
                    a = c;
                    fa = fc;
                    if (side == -1) fb *= 0.5;
                    side = -1;
                } else {
                    b = c;
                    fb = fc;
                    if (side == 1) fa *= 0.5;
                    side = 1;
                }
            }
            const double rel = n_max > 0.0 ? std::sqrt(std::max(0.0, n_root) / n_max) : 0.0;
            if (rel <= opt.zero_tol) found.push_back({x.bg.t + root, rel});
        }
        x = std::move(next);
        x.bg.t = x.js.t = target;
        s_prev = s_cur;
    }
    return found;
}

// Instantiations --------------------------------------------------------------------

#define BFLOW_JACOBI_INSTANTIATE(G)                                                                          \
    template struct JacobiState<G>;                                                                          \
    template ScalarField<G> function_rate(const JacobiState<G>&, const FluidState<G>&, const PressureModel&); \
    template JacobiRates<G> jacobi_rates(const JacobiState<G>&, const FluidState<G>&, const FlowMap<G>&,     \
                                         const PressureModel&, const StepOptions&);                          \
    template void linearized_step(JacobiState<G>&, FluidState<G>&, FlowMap<G>&, const PressureModel&, double, \
                                  const StepOptions&);                                                       \
    template double constraint_residual(const JacobiState<G>&, const FluidState<G>&);                        \
    template JacobiTrajectory<G> integrate_jacobi(FluidState<G>, FlowMap<G>, const VectorField<G>&,          \
                                                  const PressureModel&, const JacobiOptions&);               \
    template DeviationSeries<G> deviation_oracle(const VectorField<G>&, const ScalarField<G>&,               \
                                                 const VectorField<G>&, const PressureModel&, double,        \
                                                 const DeviationOptions&);                                   \
    template std::vector<ConjugatePoint> detect_conjugate_points(FluidState<G>, FlowMap<G>,                  \
                                                                 const VectorField<G>&, const PressureModel&, \
                                                                 const ConjugateOptions&);

BFLOW_JACOBI_INSTANTIATE(CircleGrid)
BFLOW_JACOBI_INSTANTIATE(TorusGrid)

}  // namespace bflow::jacobi
