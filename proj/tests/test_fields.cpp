#include <cmath>
#include <numbers>

#include "doctest.h"

#include "bflow/interpolation.hpp"
#include "bflow/operators.hpp"
#include "bflow/random.hpp"
#include "bflow/trig_series.hpp"

using namespace bflow;
using std::numbers::pi;

namespace {

template <class G>
double max_diff(const ScalarField<G>& a, const ScalarField<G>& b) {
    return (a - b).max_abs();
}

// Random band-limited torus field with |kx|, |ky| <= kmax.
TorusScalar random_torus(const TorusGrid& g, int kmax, std::uint64_t seed) {
    SplitMix64 rng(seed);
    TorusScalar f(g);
    for (int kx = -kmax; kx <= kmax; ++kx) {
        for (int ky = 0; ky <= kmax; ++ky) {
            const double a = rng.normal();
            const double b = rng.normal();
            for (int i = 0; i < g.nx(); ++i)
                for (int j = 0; j < g.ny(); ++j) {
                    const double ph = kx * g.x(i) + ky * g.y(j);
                    f[g.index(i, j)] += a * std::cos(ph) + b * std::sin(ph);
                }
        }
    }
    return f;
}

}  // namespace

TEST_CASE("grids reject invalid sizes") {
    CHECK_THROWS_AS(CircleGrid(6), Error);
    CHECK_THROWS_AS(CircleGrid(9), Error);
    CHECK_THROWS_AS(TorusGrid(8, 7), Error);
    CHECK_THROWS_AS(DiscGrid(3, 8), Error);
    CHECK_NOTHROW(DiscGrid(4, 8));
    DiscGrid d(10, 16);
    CHECK(d.r(d.nr() - 1) == doctest::Approx(1.0));
    CHECK(d.r(0) > 0.0);
}

TEST_CASE("circle derivative") {
    CircleGrid g(64);
    auto s = sample(g, [](double x) { return std::sin(x); });
    auto c = sample(g, [](double x) { return std::cos(x); });
    CHECK(max_diff(derivative(s), c) < 1e-12);
    CHECK(derivative(ScalarField<CircleGrid>(g, 1.0)).max_abs() < 1e-14);

    auto f = sample(g, [](double x) { return std::sin(3 * x) + std::cos(5 * x); });
    auto df = sample(g, [](double x) { return 3 * std::cos(3 * x) - 5 * std::sin(5 * x); });
    CHECK(max_diff(derivative(f), df) < 1e-10);
    auto d2 = sample(g, [](double x) { return -9 * std::sin(3 * x) - 25 * std::cos(5 * x); });
    CHECK(max_diff(derivative(f, 2), d2) < 1e-9);
}

TEST_CASE("circle derivative commutes with index shift") {
    CircleGrid g(48);
    auto f = sample(g, [](double x) { return std::exp(std::sin(x)) + 0.3 * std::cos(4 * x); });
    auto shifted = f;
    const int s = 7;
    for (int i = 0; i < g.n(); ++i) shifted[i] = f[(i + s) % g.n()];
    auto a = derivative(shifted);
    auto b = derivative(f);
    double err = 0.0;
    for (int i = 0; i < g.n(); ++i) err = std::max(err, std::abs(a[i] - b[(i + s) % g.n()]));
    CHECK(err < 1e-10);
}

TEST_CASE("quadrature") {
    CircleGrid g(32);
    CHECK(integrate(sample(g, [](double x) { return std::cos(x) * std::cos(x); })) ==
          doctest::Approx(pi).epsilon(1e-12));
    TorusGrid t(16, 16);
    CHECK(integrate(TorusScalar(t, 1.0)) == doctest::Approx(4 * pi * pi).epsilon(1e-12));
    DiscGrid d(64, 16);
    CHECK(integrate(sample(d, [](double r, double) { return r * r; })) ==
          doctest::Approx(pi / 2).epsilon(1e-8));
    DiscGrid d_odd(65, 16);
    CHECK(integrate(sample(d_odd, [](double r, double) { return r * r; })) ==
          doctest::Approx(pi / 2).epsilon(1e-8));
}

TEST_CASE("torus gradient, divergence, curl") {
    TorusGrid g(32, 32);
    auto f = sample(g, [](double x, double) { return std::cos(x); });
    auto gr = gradient(f);
    auto ms = sample(g, [](double x, double) { return -std::sin(x); });
    CHECK(max_diff(gr[0], ms) < 1e-12);
    CHECK(gr[1].max_abs() < 1e-12);
    CHECK(max_diff(divergence(gr), -1.0 * f) < 1e-12);

    auto r = random_torus(g, 8, 11);
    CHECK(curl(gradient(r)).max_abs() < 1e-10);
    CHECK(divergence(skew_gradient(r)).max_abs() < 1e-10);

    auto rho = random_torus(g, 4, 12).map([](double v) { return 2.0 + 0.05 * v; });
    TorusVector w({random_torus(g, 6, 13), random_torus(g, 6, 14)});
    CHECK(std::abs(integrate(divergence(rho * w))) < 1e-10);
}

TEST_CASE("torus hodge decomposition") {
    TorusGrid g(32, 32);
    auto c = sample(g, [](double x, double) { return std::cos(x); });
    auto h = hodge_decompose(gradient(c));
    CHECK(max_diff(h.f, c) < 1e-12);
    CHECK(h.w.max_norm() < 1e-12);

    TorusVector k({TorusScalar(g, 0.0), TorusScalar(g, 1.0)});
    auto hk = hodge_decompose(k);
    CHECK(hk.f.max_abs() < 1e-14);
    CHECK(max_diff(hk.w[1], k[1]) < 1e-14);

    TorusVector v({random_torus(g, 8, 21), random_torus(g, 8, 22)});
    auto hv = hodge_decompose(v);
    auto back = gradient(hv.f) + hv.w;
    CHECK(max_diff(back[0], v[0]) < 1e-10);
    CHECK(max_diff(back[1], v[1]) < 1e-10);
    CHECK(divergence(hv.w).max_abs() < 1e-10);
    CHECK(std::abs(integrate(dot(gradient(hv.f), hv.w))) < 1e-9);
    CHECK(std::abs(integrate(hv.f)) < 1e-10);
}

TEST_CASE("disc operators") {
    DiscGrid g(200, 32);
    // f = r^2 cos(theta) = x r: grad = (2 r cos, -r sin)
    auto f = sample(g, [](double r, double t) { return r * r * std::cos(t); });
    auto gr = gradient(f);
    auto er = sample(g, [](double r, double t) { return 2 * r * std::cos(t); });
    auto et = sample(g, [](double r, double t) { return -r * std::sin(t); });
    CHECK(max_diff(gr[0], er) < 1e-3);
    CHECK(max_diff(gr[1], et) < 1e-10);
    // div of rigid rotation is zero, curl is 2a
    auto rot = rotation_field(g, 1.5);
    CHECK(divergence(rot).max_abs() < 1e-10);
    CHECK(max_diff(curl(rot), DiscScalar(g, 3.0)) < 1e-10);
    // div of the radial field (r, 0) is 2
    DiscVector radial({sample(g, [](double r, double) { return r; }), DiscScalar(g)});
    CHECK(max_diff(divergence(radial), DiscScalar(g, 2.0)) < 1e-10);
    // nabla_u u for rigid rotation is centripetal: (-a^2 r, 0)
    auto acc = covariant_derivative(rot, rot);
    auto cen = sample(g, [](double r, double) { return -2.25 * r; });
    CHECK(max_diff(acc[0], cen) < 1e-10);
    CHECK(acc[1].max_abs() < 1e-10);
    CHECK(divergence(skew_gradient(f)).max_abs() < 1e-2);
}

TEST_CASE("trig series") {
    CircleGrid g(32);
    auto f = sample(g, [](double x) { return 1.0 + std::sin(2 * x) - 0.5 * std::cos(3 * x); });
    auto s = TrigSeries::from_field(f);
    CHECK(s.max_mode() == 3);
    CHECK(s(0.3) == doctest::Approx(1.0 + std::sin(0.6) - 0.5 * std::cos(0.9)).epsilon(1e-13));
    CHECK(s.derivative(0.3, 1) == doctest::Approx(2 * std::cos(0.6) + 1.5 * std::sin(0.9)).epsilon(1e-12));
    double v, d1, d2;
    s.evaluate3(0.3, v, d1, d2);
    CHECK(d2 == doctest::Approx(-4 * std::sin(0.6) + 4.5 * std::cos(0.9)).epsilon(1e-12));
    // exact integral over a non-period interval
    const double exact = (1.3 - 0.2) + (-std::cos(2.6) + std::cos(0.4)) / 2 - 0.5 * (std::sin(3.9) - std::sin(0.6)) / 3;
    CHECK(s.integral(0.2, 1.3) == doctest::Approx(exact).epsilon(1e-13));
    auto m = TrigSeries::mode(2, 0.5, -1.0);
    CHECK(m(0.7) == doctest::Approx(0.5 * std::cos(1.4) - std::sin(1.4)).epsilon(1e-14));
}

TEST_CASE("interpolation") {
    CircleGrid g(32);
    auto f = sample(g, [](double x) { return std::sin(x) + 0.2 * std::cos(5 * x); });
    std::vector<double> xs{0.05, 1.234, 3.3, 6.2, -0.4, 7.0};
    auto tv = interpolate(f, xs, Interpolation::Trigonometric, Backend::Serial);
    auto cv = interpolate(f, xs, Interpolation::Cubic, Backend::Serial);
    for (std::size_t p = 0; p < xs.size(); ++p) {
        const double e = std::sin(xs[p]) + 0.2 * std::cos(5 * xs[p]);
        CHECK(std::abs(tv[p] - e) < 1e-13);
        CHECK(std::abs(cv[p] - e) < 2e-2);
    }
    TorusGrid t(16, 12);
    auto h = sample(t, [](double x, double y) { return std::cos(x - 2 * y) + std::sin(3 * y) + std::cos(8 * x); });
    std::vector<double> px{0.1, 2.0, 5.9}, py{0.7, 4.4, -1.0};
    auto tt = interpolate(h, px, py, Interpolation::Trigonometric, Backend::Serial);
    auto tc = interpolate(h, px, py, Interpolation::Cubic, Backend::OpenMP);
    for (std::size_t p = 0; p < px.size(); ++p) {
        const double e = std::cos(px[p] - 2 * py[p]) + std::sin(3 * py[p]) + std::cos(8 * px[p]);
        CHECK(std::abs(tt[p] - e) < 1e-12);
        CHECK(std::isfinite(tc[p]));
    }
}
