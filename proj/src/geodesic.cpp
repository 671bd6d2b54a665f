#include "bflow/geodesic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "bflow/operators.hpp"

namespace bflow::geodesic {

namespace {

template <class Grid, class Fn>
ScalarField<Grid> pointwise(const ScalarField<Grid>& rho, Backend backend, Fn&& fn) {
    ScalarField<Grid> out(rho.grid());
    parallel_for(rho.size(), [&](std::size_t i) { out[i] = fn(rho[i]); }, backend);
    return out;
}

template <class Grid>
void check_density(const ScalarField<Grid>& rho) {
    for (std::size_t i = 0; i < rho.size(); ++i)
        if (!(rho[i] > 0.0)) fail(ErrorKind::Domain, "density must be positive at every node");
}

double min_spacing(const CircleGrid& g) { return g.spacing(); }
double min_spacing(const TorusGrid& g) { return std::min(g.hx(), g.hy()); }

// u at the current particle positions.
VectorField<CircleGrid> velocity_at(const VectorField<CircleGrid>& u, const FlowMap<CircleGrid>& eta,
                                    const StepOptions& opt) {
    return as_vector(compose(u[0], eta, opt.interpolation, opt.backend));
}

VectorField<TorusGrid> velocity_at(const VectorField<TorusGrid>& u, const FlowMap<TorusGrid>& eta,
                                   const StepOptions& opt) {
    return VectorField<TorusGrid>({compose(u[0], eta, opt.interpolation, opt.backend),
                                   compose(u[1], eta, opt.interpolation, opt.backend)});
}

}  // namespace

template <class Grid>
ScalarField<Grid> FluidState<Grid>::f(const PressureModel& model) const {
    ScalarField<Grid> out(rho.grid());
    for (std::size_t i = 0; i < rho.size(); ++i) out[i] = q[i] / model.lambda(rho[i]);
    return out;
}

template <class Grid>
FlowMap<Grid> FlowMap<Grid>::identity(const ScalarField<Grid>& rho0) {
    return FlowMap<Grid>{VectorField<Grid>(rho0.grid()), rho0};
}

template <>
double FlowMap<CircleGrid>::position(int, std::size_t i) const {
    return grid().x(static_cast<int>(i)) + displacement[0][i];
}

template <>
double FlowMap<TorusGrid>::position(int c, std::size_t i) const {
    const auto& g = grid();
    const int ix = static_cast<int>(i) / g.ny();
    const int iy = static_cast<int>(i) % g.ny();
    return (c == 0 ? g.x(ix) : g.y(iy)) + displacement[c][i];
}

template <>
ScalarField<CircleGrid> FlowMap<CircleGrid>::jacobian() const {
    return derivative(displacement[0]) + 1.0;
}

template <>
ScalarField<TorusGrid> FlowMap<TorusGrid>::jacobian() const {
    const auto a = partial_x(displacement[0]) + 1.0;
    const auto b = partial_y(displacement[0]);
    const auto c = partial_x(displacement[1]);
    const auto d = partial_y(displacement[1]) + 1.0;
    return a * d - b * c;
}

ScalarField<CircleGrid> compose(const ScalarField<CircleGrid>& f, const FlowMap<CircleGrid>& eta,
                                Interpolation method, Backend backend) {
    require_same_grid(f.grid(), eta.grid());
    std::vector<double> xs(f.size());
    for (std::size_t i = 0; i < xs.size(); ++i) xs[i] = eta.position(0, i);
    return ScalarField<CircleGrid>(f.grid(), interpolate(f, xs, method, backend));
}

ScalarField<TorusGrid> compose(const ScalarField<TorusGrid>& f, const FlowMap<TorusGrid>& eta,
                               Interpolation method, Backend backend) {
    require_same_grid(f.grid(), eta.grid());
    std::vector<double> xs(f.size()), ys(f.size());
    for (std::size_t i = 0; i < xs.size(); ++i) {
        xs[i] = eta.position(0, i);
        ys[i] = eta.position(1, i);
    }
    return ScalarField<TorusGrid>(f.grid(), interpolate(f, xs, ys, method, backend));
}

template <class Grid>
FluidState<Grid> barotropic_initializer(const VectorField<Grid>& u0, const ScalarField<Grid>& rho0,
                                        const PressureModel& model) {
    require_same_grid(u0.grid(), rho0.grid());
    check_density(rho0);
    for (std::size_t i = 0; i < rho0.size(); ++i) (void)model.lambda(rho0[i]);  // range check
    return FluidState<Grid>{u0, rho0, rho0, 0.0};
}

template <class Grid>
double energy(const FluidState<Grid>& s, const PressureModel& model) {
    check_density(s.rho);
    ScalarField<Grid> dens(s.grid());
    for (std::size_t i = 0; i < dens.size(); ++i) dens[i] = s.q[i] * s.q[i] / model.lambda(s.rho[i]);
    return 0.5 * integrate(dens + s.rho * dot(s.u, s.u));
}

template <class Grid>
double cfl_bound(const FluidState<Grid>& s, const PressureModel& model) {
    double m = 0.0;
    for (std::size_t i = 0; i < s.rho.size(); ++i) {
        double speed = 0.0;
        for (int c = 0; c < Grid::dim; ++c) speed += s.u[c][i] * s.u[c][i];
        m = std::max(m, std::sqrt(speed) + model.sound_speed(s.rho[i]));
    }
    const double h = min_spacing(s.grid());
    return m > 0.0 ? 0.5 * h / m : std::numeric_limits<double>::infinity();
}

template <class Grid>
GeodesicRates<Grid> geodesic_rates(const FluidState<Grid>& s, const FlowMap<Grid>& eta,
                                   const PressureModel& model, const StepOptions& opt) {
    check_density(s.rho);
    // q^2 phi(rho) / lambda(rho)^2, which is p(rho) on the barotropic distribution
    ScalarField<Grid> pres(s.grid());
    parallel_for(
        pres.size(),
        [&](std::size_t i) {
            const double r = s.rho[i];
            const double l = model.lambda(r);
            pres[i] = s.q[i] * s.q[i] * model.phi(r) / (l * l);
        },
        opt.backend);
    const auto inv_rho = pointwise(s.rho, opt.backend, [](double r) { return 1.0 / r; });

    GeodesicRates<Grid> out{covariant_derivative(s.u, s.u), -1.0 * divergence(s.rho * s.u),
                            -1.0 * divergence(s.q * s.u), velocity_at(s.u, eta, opt)};
    out.u += inv_rho * gradient(pres);
    out.u *= -1.0;
    return out;
}

template <class Grid>
void check_step(const FluidState<Grid>& s, const PressureModel& model, double dt, const StepOptions& opt) {
    require(dt > 0.0, ErrorKind::StepSize, "time step must be positive");
    if (opt.check_cfl) {
        const double bound = cfl_bound(s, model);
        if (dt > bound * (1.0 + 1e-12))
            fail(ErrorKind::StepSize, "dt = " + std::to_string(dt) + " exceeds the CFL bound " + std::to_string(bound));
    }
}

template <class Grid>
void check_shock(const FluidState<Grid>& s, const FlowMap<Grid>& eta, const StepOptions& opt) {
    const double jmin = eta.jacobian().min();
    if (!(jmin > opt.shock_threshold) || !s.rho.all_finite())
        fail(ErrorKind::ShockReached, "flow map Jacobian fell to " + std::to_string(jmin) + " at t = " + std::to_string(s.t));
    if (opt.compression_limit > 0.0) {
        const double c = -divergence(s.u).min() * min_spacing(s.grid());
        if (!(c < opt.compression_limit))
            fail(ErrorKind::ShockReached, "velocity compression reached " + std::to_string(c) + " cells at t = " + std::to_string(s.t));
    }
}

template <class Grid>
void step_geodesic(FluidState<Grid>& s, FlowMap<Grid>& eta, const PressureModel& model, double dt,
                   const StepOptions& opt) {
    check_step(s, model, dt, opt);

    auto stage = [&](const FluidState<Grid>& base, const FlowMap<Grid>& bmap, const GeodesicRates<Grid>& k,
                     double h) {
        FluidState<Grid> st = base;
        FlowMap<Grid> mp = bmap;
        st.u.axpy(h, k.u);
        st.rho.axpy(h, k.rho);
        st.q.axpy(h, k.q);
        mp.displacement.axpy(h, k.eta);
        st.t = base.t + h;
        return std::pair{std::move(st), std::move(mp)};
    };

    // A stage density that is no longer positive means the solution has
    // steepened past what the grid resolves; report it as the shock.
    auto rates = [&](const FluidState<Grid>& st, const FlowMap<Grid>& mp) {
        try {
            return geodesic_rates(st, mp, model, opt);
        } catch (const Error& e) {
            if (e.kind() != ErrorKind::Domain) throw;
            fail(ErrorKind::ShockReached, std::string("stage failed near t = ") + std::to_string(st.t) + ": " + e.what());
        }
    };
    const auto k1 = rates(s, eta);
    auto [s2, m2] = stage(s, eta, k1, 0.5 * dt);
    const auto k2 = rates(s2, m2);
    auto [s3, m3] = stage(s, eta, k2, 0.5 * dt);
    const auto k3 = rates(s3, m3);
    auto [s4, m4] = stage(s, eta, k3, dt);
    const auto k4 = rates(s4, m4);

    const double w1 = dt / 6.0, w2 = dt / 3.0;
    s.u.axpy(w1, k1.u).axpy(w2, k2.u).axpy(w2, k3.u).axpy(w1, k4.u);
    s.rho.axpy(w1, k1.rho).axpy(w2, k2.rho).axpy(w2, k3.rho).axpy(w1, k4.rho);
    s.q.axpy(w1, k1.q).axpy(w2, k2.q).axpy(w2, k3.q).axpy(w1, k4.q);
    eta.displacement.axpy(w1, k1.eta).axpy(w2, k2.eta).axpy(w2, k3.eta).axpy(w1, k4.eta);
    s.t += dt;

    check_shock(s, eta, opt);
}

template <class Grid>
Trajectory<Grid> integrate(FluidState<Grid> s, FlowMap<Grid> eta, const PressureModel& model,
                           const IntegrateOptions& opt) {
    require(opt.dt > 0.0 && opt.t_end >= 0.0, ErrorKind::Validation, "dt must be positive and t_end nonnegative");
    require(opt.sample_every >= 1, ErrorKind::Validation, "sample_every must be at least 1");
    const double e0 = energy(s, model);
    Trajectory<Grid> tr{{}, {}, {}, s, eta, std::nullopt, 0.0};
    auto record = [&]() {
        const double e = energy(s, model);
        tr.samples.push_back({s.t, e, eta.jacobian().min()});
        if (e0 > 0.0) tr.energy_drift = std::max(tr.energy_drift, std::abs(e - e0) / e0);
        if (opt.keep_states) {
            tr.states.push_back(s);
            tr.maps.push_back(eta);
        }
    };
    record();
    const long steps = std::lround(std::ceil(opt.t_end / opt.dt - 1e-9));
    const double t0 = s.t;
    for (long k = 0; k < steps; ++k) {
        const double target = std::min(t0 + (k + 1) * opt.dt, t0 + opt.t_end);
        const double h = target - s.t;
        try {
            step_geodesic(s, eta, model, h, opt.step);
        } catch (const Error& e) {
            if (e.kind() != ErrorKind::ShockReached || !opt.stop_at_shock) throw;
            tr.shock_time = s.t;
            break;
        }
        s.t = target;
        if ((k + 1) % opt.sample_every == 0 || k + 1 == steps) record();
    }
    tr.final_state = s;
    tr.final_map = eta;
    return tr;
}

double compatibility_residual(const FluidState<CircleGrid>& s, const FlowMap<CircleGrid>& eta,
                              Interpolation method) {
    const auto pulled = compose(s.rho, eta, method) * eta.jacobian();
    return (pulled - eta.rho0).max_abs();
}

// Steady states ----------------------------------------------------------------------

FluidState<TorusGrid> steady_shear_torus(const TorusGrid& grid, const std::function<double(double)>& omega) {
    TorusVector u(grid);
    u[1] = sample(grid, [&](double x, double) { return omega(x); });
    TorusScalar one(grid, 1.0);
    return FluidState<TorusGrid>{u, one, one, 0.0};
}

FluidState<DiscGrid> rigid_rotation_disc(const DiscGrid& grid, double omega, double c, double rho0) {
    require(c > 0.0, ErrorKind::Validation, "sound speed c must be positive");
    const double b = omega * omega / (2.0 * c * c);
    if (!(rho0 > b))
        fail(ErrorKind::Vacuum, "rho0 must exceed omega^2/(2c^2) = " + std::to_string(b));
    auto rho = sample(grid, [&](double r, double) { return rho0 - b + b * r * r; });
    return FluidState<DiscGrid>{rotation_field(grid, omega), rho, rho, 0.0};
}

template <class Grid>
SteadyResidual steady_residual(const FluidState<Grid>& s, const PressureModel& model) {
    check_density(s.rho);
    // grad p(rho) / rho = h'(rho) grad rho
    ScalarField<Grid> hp(s.grid());
    for (std::size_t i = 0; i < hp.size(); ++i) hp[i] = model.linearization_coefficient(s.rho[i]);
    auto mom = covariant_derivative(s.u, s.u) + hp * gradient(s.rho);
    return {mom.max_norm(), divergence(s.rho * s.u).max_abs()};
}

// Instantiations ---------------------------------------------------------------------

template struct FluidState<CircleGrid>;
template struct FluidState<TorusGrid>;
template struct FluidState<DiscGrid>;
template struct FlowMap<CircleGrid>;
template struct FlowMap<TorusGrid>;

#define BFLOW_GEODESIC_INSTANTIATE(G)                                                            \
    template FluidState<G> barotropic_initializer(const VectorField<G>&, const ScalarField<G>&,  \
                                                  const PressureModel&);                        \
    template double energy(const FluidState<G>&, const PressureModel&);                         \
    template double cfl_bound(const FluidState<G>&, const PressureModel&);                      \
    template GeodesicRates<G> geodesic_rates(const FluidState<G>&, const FlowMap<G>&,           \
                                             const PressureModel&, const StepOptions&);         \
    template void check_step(const FluidState<G>&, const PressureModel&, double, const StepOptions&); \
    template void check_shock(const FluidState<G>&, const FlowMap<G>&, const StepOptions&);           \
    template void step_geodesic(FluidState<G>&, FlowMap<G>&, const PressureModel&, double,      \
                                const StepOptions&);                                             \
    template Trajectory<G> integrate(FluidState<G>, FlowMap<G>, const PressureModel&,           \
                                     const IntegrateOptions&);                                   \
    template SteadyResidual steady_residual(const FluidState<G>&, const PressureModel&);

BFLOW_GEODESIC_INSTANTIATE(CircleGrid)
BFLOW_GEODESIC_INSTANTIATE(TorusGrid)

#undef BFLOW_GEODESIC_INSTANTIATE

template FluidState<DiscGrid> barotropic_initializer(const VectorField<DiscGrid>&, const ScalarField<DiscGrid>&,
                                                     const PressureModel&);
template double energy(const FluidState<DiscGrid>&, const PressureModel&);
template SteadyResidual steady_residual(const FluidState<DiscGrid>&, const PressureModel&);

}  // namespace bflow::geodesic
