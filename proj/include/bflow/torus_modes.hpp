#pragma once

// Jacobi fields along the uniform shear u = omega d/dy, rho = 1 on the flat
// torus with p'(1) = c^2. Writing v0 = grad f0 + z (Hodge), the field with
// j(0) = 0, j_t(0) = v0 is
//   j(t, x, y) = sum_k a_k sin(c|k|t) / (c|k|) grad e_k(x, y - omega t) + t z(x, y - omega t),
// with f0 = sum_k a_k e_k and e_k = exp(i k.x). Bounded iff z = 0.

#include <optional>
#include <vector>

#include "bflow/field.hpp"
#include "bflow/parallel.hpp"
#include "bflow/pressure.hpp"
#include "bflow/spectral.hpp"

namespace bflow::torus {

class TorusModeSolution {
public:
    /// Throws Precondition unless v0 is band-limited to |kx|, |ky| <= n/4.
    TorusModeSolution(const VectorField<TorusGrid>& v0, double omega, double c);

    const TorusGrid& grid() const noexcept { return grid_; }
    double omega() const noexcept { return omega_; }
    double c() const noexcept { return c_; }

    /// j(t) on the grid.
    VectorField<TorusGrid> evaluate(double t) const;
    /// Divergence-free part z of v0 (harmonic part included).
    const VectorField<TorusGrid>& z() const noexcept { return z_; }
    /// Gradient potential f0 (mean zero).
    const ScalarField<TorusGrid>& potential() const noexcept { return f0_; }
    /// sum_k |a_k| ||grad e_k||_inf / (c |k|) = sum_k |a_k| / c
    double series_bound() const noexcept { return bound_; }

private:
    TorusGrid grid_;
    double omega_, c_;
    ScalarField<TorusGrid> f0_;
    VectorField<TorusGrid> z_;
    std::vector<spectral::cplx> fhat_, zxhat_, zyhat_;  // normalized half spectra
    double bound_ = 0.0;
};

VectorField<TorusGrid> torus_jacobi(const VectorField<TorusGrid>& v0, double omega, double c, double t);

enum class Boundedness { Bounded, LinearGrowth };

struct Classification {
    Boundedness kind = Boundedness::Bounded;
    double w_l2 = 0.0;                 ///< L2 norm of the divergence-free part
    double z_sup = 0.0;                ///< its sup norm, the asymptotic growth rate
    std::optional<double> bound;       ///< series bound when bounded
};

/// Bounded iff ||w||_2 < tol.
Classification classify_boundedness(const VectorField<TorusGrid>& v0, double c, double tol = 1e-10);

/// (phi'(1) + phi(1)^2 / lambda(1)) / lambda(1)^2; A(3 - gamma)/2 for p = A rho^gamma.
double torus_curvature_coefficient(const pressure::PressureModel& model);

struct LineFit {
    double slope = 0.0;
    double intercept = 0.0;
};

/// Least-squares line through (t_i, ||j(t_i)||_inf) for t_i uniform on [t0, t1].
LineFit fit_growth(const TorusModeSolution& sol, double t0, double t1, int samples = 91);

/// sup over uniform samples of [0, t1] of ||j(t)||_inf.
double sup_over_time(const TorusModeSolution& sol, double t1, int samples = 1001);

struct CrosscheckOptions {
    double dt = 0.0;           ///< 0 picks a quarter of the CFL bound
    int samples = 10;          ///< comparison times, uniform on (0, t_end]
    Backend backend = default_backend();
};

struct CrosscheckReport {
    std::vector<double> t;
    std::vector<double> rel_gap;  ///< ||j_num - j_series||_2 / ||j_series||_2 (absolute if the latter is 0)
    double max_rel_gap = 0.0;
    double slope = 0.0;           ///< linear fit of the numeric ||j||_2 (shift invariant, unlike the node sup)
    double z_l2 = 0.0;
};

/// Integrates the linearized equations along steady_shear_torus with
/// p = (c^2 / 2) rho^2 and compares with the series.
CrosscheckReport mode_numeric_crosscheck(const VectorField<TorusGrid>& v0, double omega, double c, double t_end,
                                         const CrosscheckOptions& opt = {});

}  // namespace bflow::torus
