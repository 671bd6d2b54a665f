#include <cmath>
#include <numbers>

#include "doctest.h"

#include "bflow/burgers.hpp"
#include "bflow/operators.hpp"
#include "bflow/random_fields.hpp"

using namespace bflow;
using namespace bflow::burgers;
using std::numbers::pi;

namespace {

// Smooth random data with rho0 bounded away from zero.
std::pair<CircleScalar, CircleScalar> smooth_data(const CircleGrid& g, SplitMix64& rng) {
    auto u = random_band_limited(g, 3, rng) * 0.2;
    auto b = random_band_limited(g, 3, rng);
    const double m = b.max_abs();
    auto rho = b.map([&](double x) { return 1.0 + 0.4 * x / m; });
    return {u, rho};
}

}  // namespace

TEST_CASE("riemann invariants") {
    CircleGrid g(16);
    auto rd = riemann_invariants(CircleScalar(g, 1.0), CircleScalar(g, 1.0));
    CHECK(rd.plus(0.3) == doctest::Approx(2.0));
    CHECK(std::abs(rd.minus(0.3)) < 1e-15);
    auto r2 = riemann_invariants(CircleScalar(g, 0.0), CircleScalar(g, 1.0));
    CHECK(r2.plus(1.0) == doctest::Approx(1.0));
    CHECK(r2.minus(1.0) == doctest::Approx(-1.0));
    auto bad = CircleScalar(g, 1.0);
    bad[2] = -0.1;
    CHECK_THROWS_AS(riemann_invariants(CircleScalar(g, 0.0), bad), Error);

    SplitMix64 rng(4);
    auto [u, rho] = smooth_data(g, rng);
    auto rr = riemann_invariants(u, rho);
    for (int i = 0; i < g.n(); ++i) {
        const double x = g.x(i);
        CHECK(0.5 * (rr.plus(x) + rr.minus(x)) == doctest::Approx(u[i]).epsilon(1e-13));
        CHECK(0.5 * (rr.plus(x) - rr.minus(x)) == doctest::Approx(rho[i]).epsilon(1e-13));
    }
}

TEST_CASE("shock time") {
    CHECK(std::isinf(shock_time(TrigSeries::mode(0, 3.0, 0.0))));
    CircleGrid g(64);
    auto u0 = sample(g, [](double x) { return std::sin(x); });
    auto rd = riemann_invariants(u0, CircleScalar(g, 1.0));
    CHECK(shock_time(rd.plus) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(shock_time(rd) == doctest::Approx(1.0).epsilon(1e-14));

    // bisection on first loss of monotonicity of xi(t, .) on a fine sampling
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        SplitMix64 rng(seed);
        auto a = TrigSeries::from_field(random_band_limited(CircleGrid(32), 5, rng));
        const double ts = shock_time(a);
        auto monotone = [&](double t) {
            const int n = 20000;
            double prev = 0.0;
            for (int i = 0; i <= n; ++i) {
                const double x = two_pi * i / n;
                const double xi = x + t * a(x);
                if (i > 0 && xi <= prev) return false;
                prev = xi;
            }
            return true;
        };
        // dxi/dx = 1 + t a' on the same sampling, bisection in t
        auto min_slope = [&](double t) {
            double m = 1e300;
            for (int i = 0; i < 200000; ++i) m = std::min(m, 1.0 + t * a.derivative(two_pi * i / 200000, 1));
            return m;
        };
        double lo = 0.0, hi = 10.0 * ts;
        for (int it = 0; it < 60; ++it) {
            const double mid = 0.5 * (lo + hi);
            if (min_slope(mid) > 0.0) lo = mid; else hi = mid;
        }
        CHECK(std::abs(lo - ts) < 1e-8 * ts);
        CHECK(monotone(0.99 * ts));
    }
}

TEST_CASE("characteristic inverse") {
    CharacteristicFlow two(TrigSeries::mode(0, 2.0, 0.0));
    CHECK(two.invert(0.7, 1.0) == doctest::Approx(1.0 - 1.4).epsilon(1e-15));
    CharacteristicFlow zero(TrigSeries::mode(0, 0.0, 0.0));
    CHECK(zero.invert(3.0, 2.5) == 2.5);

    for (std::uint64_t seed = 10; seed < 20; ++seed) {
        SplitMix64 rng(seed);
        CharacteristicFlow fl(TrigSeries::from_field(random_band_limited(CircleGrid(32), 6, rng)));
        const double t = 0.5 * fl.shock_time();
        for (int i = 0; i < 40; ++i) {
            const double x = -3.0 + 0.4 * i;
            CHECK(std::abs(fl.forward(t, fl.invert(t, x)) - x) < 1e-10);
            CHECK(std::abs(fl.invert(t, fl.forward(t, x)) - x) < 1e-10);
        }
        CHECK_THROWS_AS(fl.invert(fl.shock_time(), 0.0), Error);
    }
}

TEST_CASE("exact state") {
    CircleGrid g(64);
    auto c = exact_state(CircleScalar(g, 0.3), CircleScalar(g, 1.2), 5.0);
    CHECK((c.u - CircleScalar(g, 0.3)).max_abs() < 1e-14);
    CHECK((c.rho - CircleScalar(g, 1.2)).max_abs() < 1e-14);

    // PDE residual u_t + u u_x + rho rho_x with a centered time difference
    CircleGrid fine(1024);
    SplitMix64 rng(31);
    auto [u0, rho0] = smooth_data(fine, rng);
    const double ts = shock_time(riemann_invariants(u0, rho0));
    for (double frac : {0.2, 0.5, 0.8}) {
        const double t = frac * ts;
        const double dt = 2e-5 * ts;
        auto a = exact_state(u0, rho0, t + dt);
        auto b = exact_state(u0, rho0, t - dt);
        auto m = exact_state(u0, rho0, t);
        auto ut = (a.u - b.u) * (0.5 / dt);
        auto rt = (a.rho - b.rho) * (0.5 / dt);
        auto res_u = ut + m.u * derivative(m.u) + m.rho * derivative(m.rho);
        auto res_r = rt + derivative(m.rho * m.u);
        CHECK(res_u.max_abs() < 1e-6);
        CHECK(res_r.max_abs() < 1e-6);
        CHECK(m.rho.min() > 0.0);
    }
}

TEST_CASE("exact jacobi field") {
    CircleGrid g(64);
    CircleScalar one(g, 1.0);
    for (int n : {1, 3}) {
        auto v0 = sample(g, [n](double x) { return std::cos(n * x); });
        for (double t : {0.3, 2.0, 7.5}) {
            auto j = exact_jacobi(one, one, v0, t);
            double err = 0.0;
            for (int i = 0; i < g.n(); ++i) err = std::max(err, std::abs(j[i] - conjugate_j(n, t, g.x(i))));
            CHECK(err < 1e-13);
        }
    }
    CHECK(exact_jacobi(one, one, CircleScalar(g, 0.0), 1.0).max_abs() == 0.0);

    int checked = 0;
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        SplitMix64 rng = SplitMix64::substream(777, seed);
        auto [u0, rho0] = smooth_data(g, rng);
        auto v0 = random_band_limited(g, 4, rng);
        const double ts = shock_time(riemann_invariants(u0, rho0));
        const double t = 0.9 * std::min(ts, 50.0);
        auto j = exact_jacobi(u0, rho0, v0, t);
        // the continuous sup of v0 can exceed its grid sup; use the interpolant's sup
        auto vs = TrigSeries::from_field(v0);
        double vmax = 0.0;
        for (int i = 0; i < 4096; ++i) vmax = std::max(vmax, std::abs(vs(two_pi * i / 4096)));
        CHECK(j.max_abs() <= t * vmax * (1.0 + 1e-9));
        ++checked;
    }
    CHECK(checked == 50);
}

TEST_CASE("conjugate closed forms") {
    auto ts = conjugate_times(2, 3);
    REQUIRE(ts.size() == 3);
    CHECK(ts[0] == doctest::Approx(pi));
    CHECK(ts[2] == doctest::Approx(3 * pi));
    CHECK(conjugate_times(1, 1)[0] == doctest::Approx(2 * pi));
    for (int n : {1, 2, 5}) {
        for (double t : conjugate_times(n, 2))
            for (double x : {0.1, 1.0, 2.5}) {
                CHECK(std::abs(conjugate_G(n, t, x)) < 1e-14);
                CHECK(std::abs(conjugate_j(n, t, x)) < 1e-14);
            }
        CHECK(conjugate_G(n, pi / n, pi / (2 * n)) == doctest::Approx(4.0 / (3 * n)));
        CHECK(conjugate_G(n, 0.0, 0.4) == 0.0);
        // G_t = g o eta with eta = x + t
        const double t = 0.37, x = 1.1, h = 1e-5;
        const double Gt = (conjugate_G(n, t + h, x) - conjugate_G(n, t - h, x)) / (2 * h);
        CHECK(Gt == doctest::Approx(conjugate_g(n, t, x + t)).epsilon(1e-8));
        // sigma = -d/dx j
        const double dj = (conjugate_j(n, t, x + h) - conjugate_j(n, t, x - h)) / (2 * h);
        CHECK(conjugate_sigma(n, t, x) == doctest::Approx(-dj).epsilon(1e-8));
    }
}
