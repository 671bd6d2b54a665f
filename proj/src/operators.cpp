#include "bflow/operators.hpp"

#include <cstdio>
#include <vector>

#include "bflow/spectral.hpp"

namespace bflow {

using spectral::cplx;

namespace {

// Fourier multiplier (i k)^order, with the Nyquist mode removed from odd orders.
cplx derivative_symbol(int k, int n, int order) {
    if (order % 2 == 1 && 2 * std::abs(k) == n) return {0.0, 0.0};
    cplx s{1.0, 0.0};
    const cplx ik{0.0, static_cast<double>(k)};
    for (int p = 0; p < order; ++p) s *= ik;
    return s;
}

// Effective first-derivative wavenumber (0 at Nyquist).
double eff_k(int idx, int n) {
    const int k = spectral::wavenumber(idx, n);
    return 2 * std::abs(k) == n ? 0.0 : static_cast<double>(k);
}

std::vector<cplx> torus_forward(const TorusScalar& f) {
    const auto& g = f.grid();
    std::vector<cplx> hat(static_cast<std::size_t>(g.nx()) * (g.ny() / 2 + 1));
    spectral::forward2(g.nx(), g.ny(), f.values(), hat);
    return hat;
}

TorusScalar torus_backward(const TorusGrid& g, const std::vector<cplx>& hat) {
    TorusScalar out(g);
    spectral::backward2(g.nx(), g.ny(), hat, out.values());
    return out;
}

// Multiplies the half spectrum by i*kx (axis 0) or i*ky (axis 1).
std::vector<cplx> torus_diff(const TorusGrid& g, const std::vector<cplx>& hat, int axis) {
    const int nyh = g.ny() / 2 + 1;
    std::vector<cplx> out(hat.size());
    for (int i = 0; i < g.nx(); ++i) {
        const double kx = eff_k(i, g.nx());
        for (int j = 0; j < nyh; ++j) {
            const double ky = (2 * j == g.ny()) ? 0.0 : static_cast<double>(j);
            const double k = axis == 0 ? kx : ky;
            out[static_cast<std::size_t>(i) * nyh + j] = cplx{0.0, k} * hat[static_cast<std::size_t>(i) * nyh + j];
        }
    }
    return out;
}

// Radial derivative along every theta column. If origin_zero, the function
// is known to vanish at r = 0 and the first node uses a centered stencil.
DiscScalar radial_derivative(const DiscScalar& f, bool origin_zero) {
    const auto& g = f.grid();
    const int nr = g.nr();
    const int nt = g.ntheta();
    const double h = g.dr();
    DiscScalar out(g);
    for (int j = 0; j < nt; ++j) {
        auto at = [&](int i) { return f[g.index(i, j)]; };
        out[g.index(0, j)] = origin_zero ? at(1) / (2.0 * h)
                                         : (-3.0 * at(0) + 4.0 * at(1) - at(2)) / (2.0 * h);
        for (int i = 1; i < nr - 1; ++i) out[g.index(i, j)] = (at(i + 1) - at(i - 1)) / (2.0 * h);
        out[g.index(nr - 1, j)] = (3.0 * at(nr - 1) - 4.0 * at(nr - 2) + at(nr - 3)) / (2.0 * h);
    }
    return out;
}

DiscScalar scale_by_r(const DiscScalar& f, double power) {
    const auto& g = f.grid();
    DiscScalar out(g);
    for (int i = 0; i < g.nr(); ++i) {
        const double s = std::pow(g.r(i), power);
        for (int j = 0; j < g.ntheta(); ++j) out[g.index(i, j)] = s * f[g.index(i, j)];
    }
    return out;
}

}  // namespace

// Circle ---------------------------------------------------------------------

CircleScalar derivative(const CircleScalar& f, int order) {
    const int n = f.grid().n();
    std::vector<cplx> hat(n / 2 + 1);
    spectral::forward(n, f.values(), hat);
    for (int k = 0; k <= n / 2; ++k) hat[k] *= derivative_symbol(k, n, order);
    CircleScalar out(f.grid());
    spectral::backward(n, hat, out.values());
    return out;
}

CircleVector gradient(const CircleScalar& f) { return as_vector(derivative(f)); }

CircleScalar divergence(const CircleVector& u) { return derivative(u[0]); }

CircleScalar directional(const CircleVector& u, const CircleScalar& f) {
    return u[0] * derivative(f);
}

CircleVector covariant_derivative(const CircleVector& u, const CircleVector& v) {
    return as_vector(u[0] * derivative(v[0]));
}

double integrate(const CircleScalar& f) {
    double s = 0.0;
    for (double v : f.values()) s += v;
    return s * f.grid().spacing();
}

// Torus ----------------------------------------------------------------------

TorusScalar partial_x(const TorusScalar& f) {
    return torus_backward(f.grid(), torus_diff(f.grid(), torus_forward(f), 0));
}

TorusScalar partial_y(const TorusScalar& f) {
    return torus_backward(f.grid(), torus_diff(f.grid(), torus_forward(f), 1));
}

TorusScalar laplacian(const TorusScalar& f) {
    const auto& g = f.grid();
    auto hat = torus_forward(f);
    const int nyh = g.ny() / 2 + 1;
    for (int i = 0; i < g.nx(); ++i) {
        const double kx = spectral::wavenumber(i, g.nx());
        for (int j = 0; j < nyh; ++j) hat[static_cast<std::size_t>(i) * nyh + j] *= -(kx * kx + double(j) * j);
    }
    return torus_backward(g, hat);
}

TorusVector gradient(const TorusScalar& f) {
    const auto hat = torus_forward(f);
    const auto& g = f.grid();
    return TorusVector({torus_backward(g, torus_diff(g, hat, 0)), torus_backward(g, torus_diff(g, hat, 1))});
}

TorusVector skew_gradient(const TorusScalar& gfun) {
    auto grad = gradient(gfun);
    return TorusVector({grad[1], -grad[0]});
}

TorusScalar divergence(const TorusVector& u) { return partial_x(u[0]) + partial_y(u[1]); }

TorusScalar curl(const TorusVector& u) { return partial_x(u[1]) - partial_y(u[0]); }

TorusScalar directional(const TorusVector& u, const TorusScalar& f) {
    const auto grad = gradient(f);
    return dot(u, grad);
}

TorusVector covariant_derivative(const TorusVector& u, const TorusVector& v) {
    return TorusVector({directional(u, v[0]), directional(u, v[1])});
}

double integrate(const TorusScalar& f) {
    double s = 0.0;
    for (double v : f.values()) s += v;
    return s * f.grid().hx() * f.grid().hy();
}

TorusHodge hodge_decompose(const TorusVector& v) {
    const auto& g = v.grid();
    const auto vx = torus_forward(v[0]);
    const auto vy = torus_forward(v[1]);
    const int nyh = g.ny() / 2 + 1;
    std::vector<cplx> fhat(vx.size());
    for (int i = 0; i < g.nx(); ++i) {
        const double kx = eff_k(i, g.nx());
        for (int j = 0; j < nyh; ++j) {
            const double ky = (2 * j == g.ny()) ? 0.0 : static_cast<double>(j);
            const double k2 = kx * kx + ky * ky;
            const std::size_t idx = static_cast<std::size_t>(i) * nyh + j;
            if (k2 == 0.0) {
                fhat[idx] = 0.0;
                continue;
            }
            // Delta f = div v  =>  -k^2 fhat = i (kx vx + ky vy)
            const cplx divhat = cplx{0.0, kx} * vx[idx] + cplx{0.0, ky} * vy[idx];
            fhat[idx] = -divhat / k2;
        }
    }
    TorusScalar f = torus_backward(g, fhat);
    TorusVector gf({torus_backward(g, torus_diff(g, fhat, 0)), torus_backward(g, torus_diff(g, fhat, 1))});
    return {std::move(f), v - gf};
}

// Disc -----------------------------------------------------------------------

DiscScalar partial_r(const DiscScalar& f) { return radial_derivative(f, false); }

DiscScalar partial_theta(const DiscScalar& f) {
    const auto& g = f.grid();
    const int nt = g.ntheta();
    DiscScalar out(g);
    std::vector<cplx> hat(nt / 2 + 1);
    for (int i = 0; i < g.nr(); ++i) {
        const auto ring = f.values().subspan(g.index(i, 0), nt);
        spectral::forward(nt, ring, hat);
        for (int k = 0; k <= nt / 2; ++k) hat[k] *= derivative_symbol(k, nt, 1);
        spectral::backward(nt, hat, out.values().subspan(g.index(i, 0), nt));
    }
    return out;
}

DiscVector gradient(const DiscScalar& f) {
    return DiscVector({partial_r(f), scale_by_r(partial_theta(f), -1.0)});
}

DiscVector skew_gradient(const DiscScalar& gfun) {
    return DiscVector({scale_by_r(partial_theta(gfun), -1.0), -partial_r(gfun)});
}

DiscScalar divergence(const DiscVector& u) {
    const auto flux = radial_derivative(scale_by_r(u[0], 1.0), true);
    return scale_by_r(flux + partial_theta(u[1]), -1.0);
}

DiscScalar curl(const DiscVector& u) {
    const auto circ = radial_derivative(scale_by_r(u[1], 1.0), true);
    return scale_by_r(circ - partial_theta(u[0]), -1.0);
}

DiscScalar directional(const DiscVector& u, const DiscScalar& f) {
    return u[0] * partial_r(f) + scale_by_r(u[1] * partial_theta(f), -1.0);
}

DiscVector covariant_derivative(const DiscVector& u, const DiscVector& v) {
    const auto ut_over_r = scale_by_r(u[1], -1.0);
    return DiscVector({directional(u, v[0]) - ut_over_r * v[1], directional(u, v[1]) + ut_over_r * v[0]});
}

double integrate(const DiscScalar& f) {
    const auto& g = f.grid();
    const int n = g.nr();
    // samples of F(r) = r * int f dtheta on r = 0, h, ..., 1
    std::vector<double> F(n + 1, 0.0);
    for (int i = 0; i < n; ++i) {
        double ring = 0.0;
        for (int j = 0; j < g.ntheta(); ++j) ring += f[g.index(i, j)];
        F[i + 1] = g.r(i) * ring * g.dtheta();
    }
    const double h = g.dr();
    const int simpson_end = (n % 2 == 0) ? n : n - 3;
    double s = 0.0;
    for (int i = 0; i + 2 <= simpson_end; i += 2) s += h / 3.0 * (F[i] + 4.0 * F[i + 1] + F[i + 2]);
    if (simpson_end != n) {
        const int i = simpson_end;
        s += 3.0 * h / 8.0 * (F[i] + 3.0 * F[i + 1] + 3.0 * F[i + 2] + F[i + 3]);
    }
    return s;
}

DiscVector rotation_field(const DiscGrid& grid, double a) {
    DiscVector z(grid);
    z[1] = sample(grid, [a](double r, double) { return a * r; });
    return z;
}

// CSV ------------------------------------------------------------------------

namespace {
void put(std::ostream& os, double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    os << buf;
}
}  // namespace

void write_csv(std::ostream& os, const CircleScalar& f, const char* name) {
    os << "x," << name << '\n';
    for (int i = 0; i < f.grid().n(); ++i) {
        put(os, f.grid().x(i));
        os << ',';
        put(os, f[i]);
        os << '\n';
    }
}

void write_csv(std::ostream& os, const TorusScalar& f, const char* name) {
    const auto& g = f.grid();
    os << "x,y," << name << '\n';
    for (int i = 0; i < g.nx(); ++i)
        for (int j = 0; j < g.ny(); ++j) {
            put(os, g.x(i)); os << ',';
            put(os, g.y(j)); os << ',';
            put(os, f[g.index(i, j)]); os << '\n';
        }
}

void write_csv(std::ostream& os, const DiscScalar& f, const char* name) {
    const auto& g = f.grid();
    os << "r,theta," << name << '\n';
    for (int i = 0; i < g.nr(); ++i)
        for (int j = 0; j < g.ntheta(); ++j) {
            put(os, g.r(i)); os << ',';
            put(os, g.theta(j)); os << ',';
            put(os, f[g.index(i, j)]); os << '\n';
        }
}

void write_csv(std::ostream& os, const TorusVector& v) {
    const auto& g = v.grid();
    os << "x,y,vx,vy\n";
    for (int i = 0; i < g.nx(); ++i)
        for (int j = 0; j < g.ny(); ++j) {
            const auto k = g.index(i, j);
            put(os, g.x(i)); os << ',';
            put(os, g.y(j)); os << ',';
            put(os, v[0][k]); os << ',';
            put(os, v[1][k]); os << '\n';
        }
}

void write_csv(std::ostream& os, const DiscVector& v) {
    const auto& g = v.grid();
    os << "r,theta,v_r,v_theta\n";
    for (int i = 0; i < g.nr(); ++i)
        for (int j = 0; j < g.ntheta(); ++j) {
            const auto k = g.index(i, j);
            put(os, g.r(i)); os << ',';
            put(os, g.theta(j)); os << ',';
            put(os, v[0][k]); os << ',';
            put(os, v[1][k]); os << '\n';
        }
}

}  // namespace bflow
