#pragma once

// Closed-form one-dimensional machinery for p(rho) = rho^3 / 3 (lambda = 3/rho).
// The Riemann invariants alpha+- = u +- rho each solve Burgers' equation, so
// alpha(t, x + t alpha0(x)) = alpha0(x) up to the shock time.

#include <vector>

#include "bflow/geodesic.hpp"
#include "bflow/parallel.hpp"
#include "bflow/trig_series.hpp"

namespace bflow::burgers {

struct RiemannData {
    TrigSeries plus;   ///< u0 + rho0
    TrigSeries minus;  ///< u0 - rho0
};

RiemannData riemann_invariants(const ScalarField<CircleGrid>& u0, const ScalarField<CircleGrid>& rho0);

/// 1 / max(-alpha0'), or +infinity when alpha0 is nondecreasing.
double shock_time(const TrigSeries& alpha0);
/// Earlier of the two invariants' shock times.
double shock_time(const RiemannData& data);

/// x -> xi(t, x) = x + t alpha0(x) and its inverse chi(t, .).
class CharacteristicFlow {
public:
    explicit CharacteristicFlow(TrigSeries alpha0);

    const TrigSeries& alpha0() const noexcept { return alpha0_; }
    double shock_time() const noexcept { return shock_time_; }

    double forward(double t, double x) const { return x + t * alpha0_(x); }
    /// Solves x = chi + t alpha0(chi) for chi on the real line (continuous
    /// lift near x) by Newton safeguarded with bisection. Throws ShockReached
    /// for t >= T*.
    double invert(double t, double x) const;

private:
    TrigSeries alpha0_;
    double shock_time_;
    double amin_, amax_;
};

struct ExactSolution {
    ScalarField<CircleGrid> u;
    ScalarField<CircleGrid> rho;
};

ExactSolution exact_state(const ScalarField<CircleGrid>& u0, const ScalarField<CircleGrid>& rho0, double t,
                          Backend backend = default_backend());

/// Jacobi field with J(0) = 0, J'(0) = (v0, 0):
///   j(t, x) = (1 / 2 rho(t, x)) int_{chi+}^{chi-} v0(y) dy,
/// with v0 the trigonometric interpolant integrated exactly.
ScalarField<CircleGrid> exact_jacobi(const ScalarField<CircleGrid>& u0, const ScalarField<CircleGrid>& rho0,
                                     const ScalarField<CircleGrid>& v0, double t,
                                     Backend backend = default_backend());

/// Conjugate times 2 pi m / n, m = 1..m_max, along u = rho = 1.
std::vector<double> conjugate_times(int n, int m_max);

// Closed forms along u = rho = 1 with v0 = cos(n x).
double conjugate_j(int n, double t, double x);
double conjugate_G(int n, double t, double x);
double conjugate_sigma(int n, double t, double x);
/// g = (2/3) sigma
double conjugate_g(int n, double t, double x);

}  // namespace bflow::burgers
