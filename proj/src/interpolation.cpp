#include "bflow/interpolation.hpp"

#include <array>
#include <cmath>
#include <complex>

#include "bflow/spectral.hpp"
#include "bflow/trig_series.hpp"

namespace bflow {
namespace {

using cplx = std::complex<double>;

struct Stencil {
    int base;  // index of the node left of the point
    std::array<double, 4> w;
};

// Weights for nodes base-1 .. base+2.
Stencil cubic_stencil(double x, double h) {
    const double s = x / h;
    const double fl = std::floor(s);
    const double t = s - fl;
    Stencil st;
    st.base = static_cast<int>(fl);
    st.w = {-t * (t - 1.0) * (t - 2.0) / 6.0, (t + 1.0) * (t - 1.0) * (t - 2.0) / 2.0,
            -(t + 1.0) * t * (t - 2.0) / 2.0, (t + 1.0) * t * (t - 1.0) / 6.0};
    return st;
}

int wrap(int i, int n) {
    const int m = i % n;
    return m < 0 ? m + n : m;
}

}  // namespace

std::vector<double> interpolate(const ScalarField<CircleGrid>& f, std::span<const double> xs,
                                Interpolation method, Backend backend) {
    std::vector<double> out(xs.size());
    const int n = f.grid().n();
    if (method == Interpolation::Trigonometric) {
        const auto series = TrigSeries::from_field(f);
        parallel_for(xs.size(), [&](std::size_t p) { out[p] = series(xs[p]); }, backend);
        return out;
    }
    const double h = f.grid().spacing();
    parallel_for(
        xs.size(),
        [&](std::size_t p) {
            const auto st = cubic_stencil(xs[p], h);
            double acc = 0.0;
            for (int q = 0; q < 4; ++q) acc += st.w[q] * f[wrap(st.base - 1 + q, n)];
            out[p] = acc;
        },
        backend);
    return out;
}

std::vector<double> interpolate(const ScalarField<TorusGrid>& f, std::span<const double> xs,
                                std::span<const double> ys, Interpolation method,
                                Backend backend) {
    const auto& g = f.grid();
    std::vector<double> out(xs.size());
    if (method == Interpolation::Cubic) {
        parallel_for(
            xs.size(),
            [&](std::size_t p) {
                const auto sx = cubic_stencil(xs[p], g.hx());
                const auto sy = cubic_stencil(ys[p], g.hy());
                double acc = 0.0;
                for (int a = 0; a < 4; ++a) {
                    const int i = wrap(sx.base - 1 + a, g.nx());
                    double row = 0.0;
                    for (int b = 0; b < 4; ++b) row += sy.w[b] * f[g.index(i, wrap(sy.base - 1 + b, g.ny()))];
                    acc += sx.w[a] * row;
                }
                out[p] = acc;
            },
            backend);
        return out;
    }

    // Trigonometric: real part of the half spectrum, Nyquist rows split symmetrically.
    const int nx = g.nx();
    const int ny = g.ny();
    const int nyh = ny / 2 + 1;
    std::vector<cplx> hat(static_cast<std::size_t>(nx) * nyh);
    spectral::forward2(nx, ny, f.values(), hat);
    const double norm = 1.0 / (static_cast<double>(nx) * ny);
    for (int i = 0; i < nx; ++i) {
        for (int j = 0; j < nyh; ++j) {
            double w = norm;
            if (2 * i == nx) w *= 0.5;             // split between +-nx/2
            if (j != 0 && 2 * j != ny) w *= 2.0;   // conjugate partner not stored
            hat[static_cast<std::size_t>(i) * nyh + j] *= w;
        }
    }
    parallel_for(
        xs.size(),
        [&](std::size_t p) {
            double acc = 0.0;
            for (int i = 0; i < nx; ++i) {
                const int kx = spectral::wavenumber(i, nx);
                cplx row = 0.0;
                const cplx step = std::polar(1.0, ys[p]);
                cplx e = 1.0;
                for (int j = 0; j < nyh; ++j) {
                    row += hat[static_cast<std::size_t>(i) * nyh + j] * e;
                    e *= step;
                }
                acc += (std::polar(1.0, kx * xs[p]) * row).real();
                if (2 * i == nx) acc += (std::polar(1.0, -kx * xs[p]) * row).real();
            }
            out[p] = acc;
        },
        backend);
    return out;
}

}  // namespace bflow
