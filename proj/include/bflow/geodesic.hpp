#pragma once

// Geodesics of the warped product metric: the barotropic Euler system with
// the auxiliary variable q = lambda(rho) f,
//   u_t + nabla_u u + grad(q^2 phi(rho) / lambda(rho)^2) / rho = 0
//   q_t + div(q u) = 0,   rho_t + div(rho u) = 0,   eta_t = u o eta.
// Eulerian spectral discretization, classical RK4 in time, flow map carried
// as a periodic displacement eta(x) - x. The reference measure is fixed by
// eta(0) = id, so rho(t) o eta(t) * Jac eta(t) = rho_0.

#include <functional>
#include <optional>
#include <vector>

#include "bflow/field.hpp"
#include "bflow/interpolation.hpp"
#include "bflow/parallel.hpp"
#include "bflow/pressure.hpp"

namespace bflow::geodesic {

using pressure::PressureModel;

template <class Grid>
struct FluidState {
    VectorField<Grid> u;
    ScalarField<Grid> rho;
    ScalarField<Grid> q;
    double t = 0.0;

    const Grid& grid() const noexcept { return rho.grid(); }
    /// f = q / lambda(rho)
    ScalarField<Grid> f(const PressureModel& model) const;
};

template <class Grid>
struct FlowMap {
    VectorField<Grid> displacement;  ///< eta(x) - x, periodic
    ScalarField<Grid> rho0;

    static FlowMap identity(const ScalarField<Grid>& rho0);
    const Grid& grid() const noexcept { return rho0.grid(); }
    /// Component c of eta at node i.
    double position(int c, std::size_t i) const;
    /// Jac eta at every node.
    ScalarField<Grid> jacobian() const;
};

/// f o eta
ScalarField<CircleGrid> compose(const ScalarField<CircleGrid>& f, const FlowMap<CircleGrid>& eta,
                                Interpolation method, Backend backend = default_backend());
ScalarField<TorusGrid> compose(const ScalarField<TorusGrid>& f, const FlowMap<TorusGrid>& eta,
                               Interpolation method, Backend backend = default_backend());

/// Initial data on the barotropic distribution: q0 = rho0, i.e. f0 = rho0/lambda(rho0).
template <class Grid>
FluidState<Grid> barotropic_initializer(const VectorField<Grid>& u0, const ScalarField<Grid>& rho0,
                                        const PressureModel& model);

/// 1/2 int [lambda(rho) f^2 + rho |u|^2] with f = q / lambda(rho).
template <class Grid>
double energy(const FluidState<Grid>& s, const PressureModel& model);

/// 0.5 dx / max(|u| + sqrt(p'(rho)))
template <class Grid>
double cfl_bound(const FluidState<Grid>& s, const PressureModel& model);

struct StepOptions {
    Interpolation interpolation = Interpolation::Trigonometric;
    Backend backend = default_backend();
    double shock_threshold = 1e-3;  ///< minimum admissible Jac eta
    /// Maximum admissible compression -min(div u) times the finest grid spacing.
    /// Catches gradient catastrophes in which Jac eta stays bounded away from zero
    /// (e.g. gamma = 3 with constant initial density). Non-positive disables it.
    double compression_limit = 1.0;
    bool check_cfl = true;
};

/// Time derivatives of the method-of-lines system.
template <class Grid>
struct GeodesicRates {
    VectorField<Grid> u;
    ScalarField<Grid> rho;
    ScalarField<Grid> q;
    VectorField<Grid> eta;
};

template <class Grid>
GeodesicRates<Grid> geodesic_rates(const FluidState<Grid>& s, const FlowMap<Grid>& eta,
                                   const PressureModel& model, const StepOptions& opt);

/// StepSize unless 0 < dt <= CFL bound (when opt.check_cfl).
template <class Grid>
void check_step(const FluidState<Grid>& s, const PressureModel& model, double dt, const StepOptions& opt);

/// ShockReached if Jac eta or the compression test says the profile is no
/// longer resolved.
template <class Grid>
void check_shock(const FluidState<Grid>& s, const FlowMap<Grid>& eta, const StepOptions& opt);

/// One RK4 step. Throws StepSize if dt exceeds the CFL bound and
/// ShockReached if min Jac eta drops to the threshold or the velocity
/// compresses faster than the grid resolves.
template <class Grid>
void step_geodesic(FluidState<Grid>& s, FlowMap<Grid>& eta, const PressureModel& model, double dt,
                   const StepOptions& opt = {});

struct TrajectorySample {
    double t = 0.0;
    double energy = 0.0;
    double min_jacobian = 1.0;
};

template <class Grid>
struct Trajectory {
    std::vector<TrajectorySample> samples;
    std::vector<FluidState<Grid>> states;  ///< only when keep_states
    std::vector<FlowMap<Grid>> maps;
    FluidState<Grid> final_state;
    FlowMap<Grid> final_map;
    std::optional<double> shock_time;  ///< set when integration stopped at a shock
    double energy_drift = 0.0;          ///< max |E(t) - E(0)| / E(0)
};

struct IntegrateOptions {
    double dt = 1e-3;
    double t_end = 1.0;
    int sample_every = 1;
    bool keep_states = false;
    bool stop_at_shock = true;  ///< record the shock time instead of throwing
    StepOptions step;
};

template <class Grid>
Trajectory<Grid> integrate(FluidState<Grid> s, FlowMap<Grid> eta, const PressureModel& model,
                           const IntegrateOptions& opt);

/// sup |rho o eta * Jac eta - rho0|
double compatibility_residual(const FluidState<CircleGrid>& s, const FlowMap<CircleGrid>& eta,
                              Interpolation method = Interpolation::Trigonometric);

// Steady states -------------------------------------------------------------------

/// u = omega(x) d/dy, rho = q = 1.
FluidState<TorusGrid> steady_shear_torus(const TorusGrid& grid, const std::function<double(double)>& omega);

/// u = omega d/dtheta, rho = rho0 - omega^2/(2c^2) + omega^2 r^2/(2c^2), q = rho.
/// Throws Vacuum unless rho0 > omega^2/(2c^2).
FluidState<DiscGrid> rigid_rotation_disc(const DiscGrid& grid, double omega, double c, double rho0);

struct SteadyResidual {
    double momentum = 0.0;    ///< sup |nabla_u u + grad p(rho) / rho|
    double continuity = 0.0;  ///< sup |div(rho u)|
};

template <class Grid>
SteadyResidual steady_residual(const FluidState<Grid>& s, const PressureModel& model);

}  // namespace bflow::geodesic
