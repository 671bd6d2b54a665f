#pragma once

// Jacobi fields along a barotropic geodesic. With J(t) = (j o eta, G) the
// linearized system is
//   sigma_t = -div(sigma u) - div(rho v)
//   v_t     = -nabla_u v - nabla_v u - grad(h'(rho) sigma)
//   j_t     = v - [u, j]
//   G_t     = g o eta,  g = 2 phi(rho) sigma / lambda(rho)^2 + <grad(rho / lambda(rho)), j>
// integrated jointly with the background so that one RK4 step advances both.
// Only velocity-direction initial data are supported: j(0) = 0, sigma(0) = 0, G(0) = 0.

#include <optional>
#include <span>
#include <vector>

#include "bflow/geodesic.hpp"

namespace bflow::jacobi {

using geodesic::FlowMap;
using geodesic::FluidState;
using geodesic::StepOptions;
using pressure::PressureModel;

template <class Grid>
struct JacobiState {
    VectorField<Grid> v;      ///< Eulerian velocity perturbation
    ScalarField<Grid> sigma;  ///< density perturbation
    VectorField<Grid> j;      ///< Eulerian displacement, J = j o eta
    ScalarField<Grid> G;      ///< function-direction displacement along eta
    double t = 0.0;

    /// v = v0, everything else zero.
    static JacobiState initial(const VectorField<Grid>& v0, double t0 = 0.0);
    const Grid& grid() const noexcept { return sigma.grid(); }
};

template <class Grid>
struct JacobiRates {
    VectorField<Grid> v;
    ScalarField<Grid> sigma;
    VectorField<Grid> j;
    ScalarField<Grid> G;
};

/// g = 2 phi sigma / lambda^2 + <grad(rho / lambda), j>
template <class Grid>
ScalarField<Grid> function_rate(const JacobiState<Grid>& js, const FluidState<Grid>& bg, const PressureModel& model);

template <class Grid>
JacobiRates<Grid> jacobi_rates(const JacobiState<Grid>& js, const FluidState<Grid>& bg, const FlowMap<Grid>& eta,
                               const PressureModel& model, const StepOptions& opt);

/// One joint RK4 step of background and perturbation. Refuses (ShockReached)
/// when the background is at or past a shock; StepSize outside the CFL bound.
template <class Grid>
void linearized_step(JacobiState<Grid>& js, FluidState<Grid>& bg, FlowMap<Grid>& eta, const PressureModel& model,
                     double dt, const StepOptions& opt = {});

/// sup |sigma + div(rho j)|
template <class Grid>
double constraint_residual(const JacobiState<Grid>& js, const FluidState<Grid>& bg);

struct JacobiSample {
    double t = 0.0;
    double j_sup = 0.0;      ///< ||j||_inf over nodes
    double v_l2 = 0.0;
    double sigma_l2 = 0.0;
    double G_sup = 0.0;
    double ratio = 0.0;      ///< ||j||_inf / (t ||v0||_inf), 0 at t = 0 (see v0_sup)
    double constraint = 0.0;
};

template <class Grid>
struct JacobiTrajectory {
    std::vector<JacobiSample> samples;
    std::vector<JacobiState<Grid>> states;  ///< only when keep_states
    std::vector<FlowMap<Grid>> maps;
    JacobiState<Grid> final_state;
    FluidState<Grid> final_background;
    FlowMap<Grid> final_map;
    double v0_sup = 0.0;  ///< sup of the interpolant of v0 in 1-D, node maximum on the torus
    std::optional<double> shock_time;
};

struct JacobiOptions {
    double dt = 1e-3;
    double t_end = 1.0;
    int sample_every = 1;
    bool keep_states = false;
    bool stop_at_shock = false;  ///< default: a background shock is an error
    StepOptions step;
};

template <class Grid>
JacobiTrajectory<Grid> integrate_jacobi(FluidState<Grid> bg, FlowMap<Grid> eta, const VectorField<Grid>& v0,
                                        const PressureModel& model, const JacobiOptions& opt);

struct GrowthReport {
    double max_ratio = 0.0;    ///< max_t ||j||_inf / (t ||v0||_inf) over t > 0
    double t_at_max = 0.0;
    double growth_rate = 0.0;  ///< least-squares slope of ||j||_inf against t
    double intercept = 0.0;
};

/// Throws Validation on an empty series.
GrowthReport growth_report(std::span<const JacobiSample> samples);

// Geodesic deviation ------------------------------------------------------------

template <class Grid>
struct DeviationSeries {
    std::vector<double> t;
    std::vector<VectorField<Grid>> deviation;  ///< (eta+ - eta-) / 2s at the nodes
};

struct DeviationOptions {
    double dt = 1e-3;
    double t_end = 1.0;
    int sample_every = 1;
    StepOptions step;
};

/// Centered difference of the geodesics from u0 + s v0 and u0 - s v0, both
/// barotropic with density rho0. Approximates j o eta to O(s^2).
template <class Grid>
DeviationSeries<Grid> deviation_oracle(const VectorField<Grid>& u0, const ScalarField<Grid>& rho0,
                                       const VectorField<Grid>& v0, const PressureModel& model, double s,
                                       const DeviationOptions& opt);

/// j o eta at the nodes.
VectorField<CircleGrid> lagrangian(const VectorField<CircleGrid>& j, const FlowMap<CircleGrid>& eta,
                                   Interpolation method = Interpolation::Trigonometric);
VectorField<TorusGrid> lagrangian(const VectorField<TorusGrid>& j, const FlowMap<TorusGrid>& eta,
                                  Interpolation method = Interpolation::Trigonometric);

// Conjugate points ----------------------------------------------------------------

struct ConjugatePoint {
    double t = 0.0;
    double residual = 0.0;  ///< |J(t)| / max_{s<=t} |J(s)| in L2
};

struct ConjugateOptions {
    double dt = 1e-3;
    double t_end = 1.0;
    double zero_tol = 1e-3;   ///< accept a minimum of |J| only below this relative size
    double time_tol = 1e-12;  ///< refinement stops once the bracket is this narrow
    int max_refine = 100;
    StepOptions step;
};

/// Times in (0, t_end] at which J vanishes. Minima of |J|^2 are bracketed by
/// sign changes of <j, j_t> + <G, G_t> and refined with fractional RK4 steps.
template <class Grid>
std::vector<ConjugatePoint> detect_conjugate_points(FluidState<Grid> bg, FlowMap<Grid> eta,
                                                    const VectorField<Grid>& v0, const PressureModel& model,
                                                    const ConjugateOptions& opt);

}  // namespace bflow::jacobi
