#pragma once

// Metric, Christoffel map, Q operator and sectional curvature of the warped
// product metric
//   <<(u,f),(v,g)>> = int_M [ lambda(rho) f g + rho <u,v> ] dmu
// on flat M (circle, torus, disc). Everything is templated on the grid and
// instantiated for the three supported grids.

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "bflow/field.hpp"
#include "bflow/parallel.hpp"
#include "bflow/pressure.hpp"

namespace bflow::geometry {

using pressure::PressureModel;

template <class Grid>
struct TangentVector {
    VectorField<Grid> u;
    ScalarField<Grid> f;

    TangentVector(VectorField<Grid> u_, ScalarField<Grid> f_) : u(std::move(u_)), f(std::move(f_)) {
        require_same_grid(u.grid(), f.grid());
    }
};

template <class Grid>
TangentVector<Grid> operator*(double a, TangentVector<Grid> U) {
    U.u *= a;
    U.f *= a;
    return U;
}
template <class Grid>
TangentVector<Grid> operator+(TangentVector<Grid> U, const TangentVector<Grid>& V) {
    U.u += V.u;
    U.f += V.f;
    return U;
}

struct CurvatureReport {
    double term_R = 0.0;     ///< curvature of M; zero on the flat grids supported here
    double term_div = 0.0;   ///< int (rho phi' + phi^2/lambda) [f div v - g div u]^2
    double term_Q = 0.0;     ///< int phi [f^2 Q(v,v) + g^2 Q(u,u) - 2 f g Q(u,v)]
    double term_grad = 0.0;  ///< int (phi^2/rho) |f grad g - g grad f|^2
    double total = 0.0;
    /// total / (|U|^2 |V|^2 - <<U,V>>^2); empty when U, V are (numerically) parallel.
    std::optional<double> normalized;
};

/// lambda(rho), phi(rho), ... applied node by node; throws Domain on rho <= 0.
template <class Grid> ScalarField<Grid> lambda_of(const PressureModel& m, const ScalarField<Grid>& rho);
template <class Grid> ScalarField<Grid> phi_of(const PressureModel& m, const ScalarField<Grid>& rho);

template <class Grid>
double metric_inner(const TangentVector<Grid>& U, const TangentVector<Grid>& V,
                    const ScalarField<Grid>& rho, const PressureModel& model);

/// Gamma_rho(U, V) = (z, j), j = (phi/lambda)(f div v + g div u), z = grad(phi f g)/rho.
template <class Grid>
TangentVector<Grid> christoffel(const TangentVector<Grid>& U, const TangentVector<Grid>& V,
                                const ScalarField<Grid>& rho, const PressureModel& model);

/// int phi (h f div v + h g div u - f g div w): the pairing <<Gamma(U,V), W>>
/// without forming Gamma.
template <class Grid>
double christoffel_pairing(const TangentVector<Grid>& U, const TangentVector<Grid>& V,
                           const TangentVector<Grid>& W, const ScalarField<Grid>& rho,
                           const PressureModel& model);

/// Q(u,v) = div(nabla_u v) - u(div v) - (div u)(div v)
template <class Grid>
ScalarField<Grid> q_operator(const VectorField<Grid>& u, const VectorField<Grid>& v);

/// A scalar function of density and its derivative. An empty derivative is
/// replaced by a centered difference with step 1e-6 x.
struct DensityFunction {
    std::function<double(double)> value;
    std::function<double(double)> derivative;
    double d(double x) const;
};

/// Derivative of int alpha phi_fn(rho) dmu in the direction w:
///   -int div(rho w) alpha phi_fn'(rho) dmu
template <class Grid>
double density_functional_derivative(const ScalarField<Grid>& alpha, const DensityFunction& phi_fn,
                                     const ScalarField<Grid>& rho, const VectorField<Grid>& w);

template <class Grid>
CurvatureReport sectional_curvature(const TangentVector<Grid>& U, const TangentVector<Grid>& V,
                                    const ScalarField<Grid>& rho, const PressureModel& model);

// 1-D scan ---------------------------------------------------------------------

struct ScanRow {
    int trial = 0;
    std::uint64_t seed = 0;  ///< substream seed actually used for this trial
    CurvatureReport report;
};

struct ScanReport {
    std::vector<ScanRow> rows;
    double min_total = 0.0;
    int argmin = -1;
    /// Whether x phi' + phi^2/lambda >= 0 holds for the model (gamma <= 3 for
    /// polytropic), i.e. whether nonnegativity is expected.
    bool nonnegativity_expected = false;
};

struct ScanOptions {
    int trials = 200;
    std::uint64_t seed = 1;
    int n_grid = 64;
    Backend backend = default_backend();
};

/// Random sections on the circle. Each of u, f, v, g is a band-limited field
/// (|k| <= n/4 - 1, standard normal coefficients) scaled by 10^U(-1,1); the
/// density is exp(b / (2 max|b|)) for another such field b.
ScanReport curvature_sign_scan_1d(const PressureModel& model, const ScanOptions& options);

/// Sectional curvature of the circle diffeomorphism group in the Jacobi
/// metric with energy E, in the plane spanned by u, v. The pair must be
/// orthonormal in int rho u v dx (checked within 1e-8).
double jacobi_metric_curvature_1d(const ScalarField<CircleGrid>& u, const ScalarField<CircleGrid>& v,
                                  const ScalarField<CircleGrid>& rho, const PressureModel& model,
                                  double E);

/// Potential energy int rho psi(rho) dx.
double potential_energy(const ScalarField<CircleGrid>& rho, const PressureModel& model);

}  // namespace bflow::geometry
