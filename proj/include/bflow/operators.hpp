#pragma once

// Differential operators and quadrature on the three supported grids.
//
// Circle and torus: Fourier differentiation (the Nyquist mode is dropped from
// odd derivatives) and periodic trapezoidal quadrature. Disc: spectral in
// theta, second-order finite differences in r (centered inside, one-sided at
// the first node and at r = 1), Simpson in r with weight r dr.

#include <ostream>

#include "bflow/field.hpp"

namespace bflow {

// Circle ---------------------------------------------------------------------

using CircleScalar = ScalarField<CircleGrid>;
using CircleVector = VectorField<CircleGrid>;

/// Spectral derivative of the given order (order >= 1).
CircleScalar derivative(const CircleScalar& f, int order = 1);
CircleVector gradient(const CircleScalar& f);
CircleScalar divergence(const CircleVector& u);
/// u(f), the derivative of f along u.
CircleScalar directional(const CircleVector& u, const CircleScalar& f);
/// Flat covariant derivative nabla_u v.
CircleVector covariant_derivative(const CircleVector& u, const CircleVector& v);
double integrate(const CircleScalar& f);

// Torus ----------------------------------------------------------------------

using TorusScalar = ScalarField<TorusGrid>;
using TorusVector = VectorField<TorusGrid>;

TorusScalar partial_x(const TorusScalar& f);
TorusScalar partial_y(const TorusScalar& f);
TorusScalar laplacian(const TorusScalar& f);
TorusVector gradient(const TorusScalar& f);
/// Symplectic gradient (d_y g, -d_x g); divergence-free by construction.
TorusVector skew_gradient(const TorusScalar& g);
TorusScalar divergence(const TorusVector& u);
/// Scalar vorticity d_x u_y - d_y u_x.
TorusScalar curl(const TorusVector& u);
TorusScalar directional(const TorusVector& u, const TorusScalar& f);
TorusVector covariant_derivative(const TorusVector& u, const TorusVector& v);
double integrate(const TorusScalar& f);

struct TorusHodge {
    TorusScalar f;  ///< mean-zero potential of the gradient part
    TorusVector w;  ///< divergence-free remainder, harmonic (constant) part included
};

/// v = grad f + w, computed mode by mode in Fourier space.
TorusHodge hodge_decompose(const TorusVector& v);

// Disc -----------------------------------------------------------------------

using DiscScalar = ScalarField<DiscGrid>;
using DiscVector = VectorField<DiscGrid>;

DiscScalar partial_r(const DiscScalar& f);
DiscScalar partial_theta(const DiscScalar& f);
/// Physical components (f_r, f_theta / r).
DiscVector gradient(const DiscScalar& f);
/// Physical components (g_theta / r, -g_r).
DiscVector skew_gradient(const DiscScalar& g);
DiscScalar divergence(const DiscVector& u);
DiscScalar curl(const DiscVector& u);
DiscScalar directional(const DiscVector& u, const DiscScalar& f);
/// Levi-Civita derivative in physical polar components.
DiscVector covariant_derivative(const DiscVector& u, const DiscVector& v);
double integrate(const DiscScalar& f);

/// Rigid rotation a * d/dtheta (physical theta component a * r).
DiscVector rotation_field(const DiscGrid& grid, double a);

// CSV ------------------------------------------------------------------------

/// One row per node: coordinates, then the value(s).
void write_csv(std::ostream& os, const CircleScalar& f, const char* name = "value");
void write_csv(std::ostream& os, const TorusScalar& f, const char* name = "value");
void write_csv(std::ostream& os, const DiscScalar& f, const char* name = "value");
void write_csv(std::ostream& os, const TorusVector& v);
void write_csv(std::ostream& os, const DiscVector& v);

}  // namespace bflow
