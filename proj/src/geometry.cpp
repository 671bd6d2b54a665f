#include "bflow/geometry.hpp"

#include <cmath>
#include <limits>

#include "bflow/operators.hpp"
#include "bflow/random_fields.hpp"

namespace bflow::geometry {

namespace {

template <class Grid>
void check_positive(const ScalarField<Grid>& rho) {
    for (std::size_t i = 0; i < rho.size(); ++i)
        if (!(rho[i] > 0.0)) fail(ErrorKind::Domain, "density must be positive at every node");
}

template <class Grid, class Fn>
ScalarField<Grid> apply(const ScalarField<Grid>& rho, Fn&& fn) {
    check_positive(rho);
    ScalarField<Grid> out(rho.grid());
    for (std::size_t i = 0; i < rho.size(); ++i) out[i] = fn(rho[i]);
    return out;
}

template <class Grid>
double vec_norm2_integral(const VectorField<Grid>& a) {
    return integrate(dot(a, a));
}

}  // namespace

template <class Grid>
ScalarField<Grid> lambda_of(const PressureModel& m, const ScalarField<Grid>& rho) {
    return apply(rho, [&](double r) { return m.lambda(r); });
}

template <class Grid>
ScalarField<Grid> phi_of(const PressureModel& m, const ScalarField<Grid>& rho) {
    return apply(rho, [&](double r) { return m.phi(r); });
}

template <class Grid>
double metric_inner(const TangentVector<Grid>& U, const TangentVector<Grid>& V,
                    const ScalarField<Grid>& rho, const PressureModel& model) {
    require_same_grid(U.f.grid(), V.f.grid());
    require_same_grid(U.f.grid(), rho.grid());
    const auto lam = lambda_of(model, rho);
    return integrate(lam * U.f * V.f + rho * dot(U.u, V.u));
}

template <class Grid>
TangentVector<Grid> christoffel(const TangentVector<Grid>& U, const TangentVector<Grid>& V,
                                const ScalarField<Grid>& rho, const PressureModel& model) {
    require_same_grid(U.f.grid(), V.f.grid());
    require_same_grid(U.f.grid(), rho.grid());
    const auto phi = phi_of(model, rho);
    const auto lam = lambda_of(model, rho);
    auto j = (phi / lam) * (U.f * divergence(V.u) + V.f * divergence(U.u));
    ScalarField<Grid> inv_rho = rho.map([](double r) { return 1.0 / r; });
    auto z = inv_rho * gradient(phi * U.f * V.f);
    return TangentVector<Grid>(std::move(z), std::move(j));
}

template <class Grid>
double christoffel_pairing(const TangentVector<Grid>& U, const TangentVector<Grid>& V,
                           const TangentVector<Grid>& W, const ScalarField<Grid>& rho,
                           const PressureModel& model) {
    const auto phi = phi_of(model, rho);
    return integrate(phi * (W.f * U.f * divergence(V.u) + W.f * V.f * divergence(U.u) -
                            U.f * V.f * divergence(W.u)));
}

template <class Grid>
ScalarField<Grid> q_operator(const VectorField<Grid>& u, const VectorField<Grid>& v) {
    const auto dv = divergence(v);
    return divergence(covariant_derivative(u, v)) - directional(u, dv) - divergence(u) * dv;
}

double DensityFunction::d(double x) const {
    if (derivative) return derivative(x);
    const double h = 1e-6 * x;
    return (value(x + h) - value(x - h)) / (2.0 * h);
}

template <class Grid>
double density_functional_derivative(const ScalarField<Grid>& alpha, const DensityFunction& phi_fn,
                                     const ScalarField<Grid>& rho, const VectorField<Grid>& w) {
    const auto dphi = apply(rho, [&](double r) { return phi_fn.d(r); });
    return -integrate(divergence(rho * w) * alpha * dphi);
}

template <class Grid>
CurvatureReport sectional_curvature(const TangentVector<Grid>& U, const TangentVector<Grid>& V,
                                    const ScalarField<Grid>& rho, const PressureModel& model) {
    require_same_grid(U.f.grid(), V.f.grid());
    require_same_grid(U.f.grid(), rho.grid());
    const auto& f = U.f;
    const auto& g = V.f;
    const auto phi = phi_of(model, rho);
    const auto coef = apply(rho, [&](double r) { return model.curvature_coefficient(r); });

    CurvatureReport rep;
    rep.term_R = 0.0;

    auto mix = f * divergence(V.u) - g * divergence(U.u);
    rep.term_div = integrate(coef * mix * mix);

    auto qs = f * f * q_operator(V.u, V.u) + g * g * q_operator(U.u, U.u) -
              2.0 * (f * g * q_operator(U.u, V.u));
    rep.term_Q = integrate(phi * qs);

    auto cross = g * gradient(f);
    cross = f * gradient(g) - cross;
    const auto w = (phi * phi) / rho;
    rep.term_grad = integrate(w * dot(cross, cross));

    rep.total = rep.term_R + rep.term_div + rep.term_Q + rep.term_grad;

    const double uu = metric_inner(U, U, rho, model);
    const double vv = metric_inner(V, V, rho, model);
    const double uv = metric_inner(U, V, rho, model);
    const double gram = uu * vv - uv * uv;
    if (gram > 1e-12 * uu * vv && gram > 0.0) rep.normalized = rep.total / gram;
    return rep;
}

// Scan ----------------------------------------------------------------------------

ScanReport curvature_sign_scan_1d(const PressureModel& model, const ScanOptions& opt) {
    require(model.is_power_law(), ErrorKind::Unsupported, "curvature scan needs a power-law model");
    require(opt.trials > 0, ErrorKind::Validation, "trials must be positive");
    const CircleGrid grid(opt.n_grid);
    // Products of two fields must stay below the Nyquist mode.
    const int kmax = opt.n_grid / 4 - 1;
    require(kmax >= 1, ErrorKind::Validation, "scan grid too small");

    auto run = [&](std::size_t t) {
        ScanRow row;
        row.trial = static_cast<int>(t);
        SplitMix64 rng = SplitMix64::substream(opt.seed, t);
        row.seed = rng.next_u64();
        SplitMix64 draw(row.seed);
        auto scaled = [&]() {
            auto fld = random_band_limited(grid, kmax, draw);
            return fld *= std::pow(10.0, draw.uniform(-1.0, 1.0));
        };
        auto u = scaled();
        auto f = scaled();
        auto v = scaled();
        auto g = scaled();
        auto b = random_band_limited(grid, kmax, draw);
        const double bmax = b.max_abs();
        auto rho = b.map([&](double x) { return std::exp(0.5 * x / bmax); });
        TangentVector<CircleGrid> U(as_vector(std::move(u)), std::move(f));
        TangentVector<CircleGrid> V(as_vector(std::move(v)), std::move(g));
        row.report = sectional_curvature(U, V, rho, model);
        return row;
    };

    ScanReport rep;
    rep.rows = parallel_map<ScanRow>(static_cast<std::size_t>(opt.trials), run, opt.backend);
    rep.min_total = std::numeric_limits<double>::infinity();
    for (const auto& r : rep.rows) {
        if (r.report.total < rep.min_total) {
            rep.min_total = r.report.total;
            rep.argmin = r.trial;
        }
    }
    rep.nonnegativity_expected = model.curvature_coefficient(1.0) >= 0.0;
    return rep;
}

// Jacobi metric -------------------------------------------------------------------

double potential_energy(const ScalarField<CircleGrid>& rho, const PressureModel& model) {
    return integrate(apply(rho, [&](double r) { return r * model.potential_density(r); }));
}

double jacobi_metric_curvature_1d(const ScalarField<CircleGrid>& u, const ScalarField<CircleGrid>& v,
                                  const ScalarField<CircleGrid>& rho, const PressureModel& model,
                                  double E) {
    require_same_grid(u.grid(), v.grid());
    require_same_grid(u.grid(), rho.grid());
    const double uu = integrate(rho * u * u);
    const double vv = integrate(rho * v * v);
    const double uv = integrate(rho * u * v);
    require(std::abs(uu - 1.0) < 1e-8 && std::abs(vv - 1.0) < 1e-8 && std::abs(uv) < 1e-8,
            ErrorKind::Precondition, "u, v must be orthonormal in int rho u v dx");
    const double gap = E - potential_energy(rho, model);
    require(gap > 0.0, ErrorKind::Domain, "energy must exceed the potential energy");

    const auto dp = apply(rho, [&](double r) { return model.dpressure(r); });
    const auto drho = derivative(rho);
    const auto du = derivative(u);
    const auto dv = derivative(v);
    const double a = integrate(rho * dp * (du * du + dv * dv));
    const double bv = integrate(dp * drho * v);
    const double bu = integrate(dp * drho * u);
    const double c = integrate(dp * dp * drho * drho / rho);
    return (2.0 * a + (3.0 * bv * bv + 3.0 * bu * bu - c) / gap) / (4.0 * gap * gap);
}

// Instantiations ------------------------------------------------------------------

#define BFLOW_GEOMETRY_INSTANTIATE(G)                                                              \
    template ScalarField<G> lambda_of(const PressureModel&, const ScalarField<G>&);                 \
    template ScalarField<G> phi_of(const PressureModel&, const ScalarField<G>&);                    \
    template double metric_inner(const TangentVector<G>&, const TangentVector<G>&,                 \
                                 const ScalarField<G>&, const PressureModel&);                     \
    template TangentVector<G> christoffel(const TangentVector<G>&, const TangentVector<G>&,        \
                                          const ScalarField<G>&, const PressureModel&);            \
    template double christoffel_pairing(const TangentVector<G>&, const TangentVector<G>&,          \
                                        const TangentVector<G>&, const ScalarField<G>&,            \
                                        const PressureModel&);                                     \
    template ScalarField<G> q_operator(const VectorField<G>&, const VectorField<G>&);              \
    template double density_functional_derivative(const ScalarField<G>&, const DensityFunction&,   \
                                                  const ScalarField<G>&, const VectorField<G>&);   \
    template CurvatureReport sectional_curvature(const TangentVector<G>&, const TangentVector<G>&, \
                                                 const ScalarField<G>&, const PressureModel&);

BFLOW_GEOMETRY_INSTANTIATE(CircleGrid)
BFLOW_GEOMETRY_INSTANTIATE(TorusGrid)
BFLOW_GEOMETRY_INSTANTIATE(DiscGrid)

#undef BFLOW_GEOMETRY_INSTANTIATE

}  // namespace bflow::geometry
