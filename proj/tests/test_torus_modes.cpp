#include <cmath>
#include <numbers>

#include "doctest.h"

#include "bflow/geometry.hpp"
#include "bflow/operators.hpp"
#include "bflow/torus_modes.hpp"

using namespace bflow;
using namespace bflow::torus;
using std::numbers::pi;

namespace {

TorusVector field(const TorusGrid& g, double (*fx)(double, double), double (*fy)(double, double)) {
    return TorusVector({sample(g, fx), sample(g, fy)});
}

double zero2(double, double) { return 0.0; }

}  // namespace

TEST_CASE("single gradient mode") {
    TorusGrid g(32, 32);
    const double c = 1.7;
    auto v0 = field(g, [](double x, double) { return -std::sin(x); }, zero2);
    TorusModeSolution sol(v0, 0.0, c);
    CHECK(sol.series_bound() == doctest::Approx(1.0 / c).epsilon(1e-12));
    for (double t : {0.3, 1.0, 2.5}) {
        auto j = sol.evaluate(t);
        auto ex = sample(g, [&](double x, double) { return -std::sin(c * t) / c * std::sin(x); });
        CHECK((j[0] - ex).max_abs() < 1e-13);
        CHECK(j[1].max_abs() < 1e-13);
        CHECK(j.max_norm() == doctest::Approx(std::abs(std::sin(c * t)) / c).epsilon(1e-12));
    }
}

TEST_CASE("divergence-free mode grows linearly") {
    TorusGrid g(16, 16);
    auto v0 = field(g, zero2, [](double, double) { return 1.0; });
    TorusModeSolution sol(v0, 0.7, 1.0);
    for (double t : {0.5, 3.0}) {
        auto j = sol.evaluate(t);
        CHECK(j[0].max_abs() < 1e-13);
        CHECK((j[1] - TorusScalar(g, t)).max_abs() < 1e-12);
    }
    auto zero = TorusModeSolution(TorusVector(g), 0.3, 1.0).evaluate(2.0);
    CHECK(zero.max_norm() == 0.0);
}

TEST_CASE("initial conditions of the synthesized field") {
    TorusGrid g(32, 32);
    auto v0 = TorusVector({sample(g, [](double x, double y) { return std::cos(x + 2 * y) - std::sin(y); }),
                           sample(g, [](double x, double y) { return 0.5 * std::sin(3 * x) + std::cos(x - y); })});
    TorusModeSolution sol(v0, 0.9, 1.3);
    CHECK(sol.evaluate(0.0).max_norm() < 1e-14);
    const double h = 1e-5;
    auto fd = sol.evaluate(h) - sol.evaluate(-h);
    fd *= 0.5 / h;
    CHECK((fd - v0).max_norm() < 1e-6);
    CHECK(divergence(sol.z()).max_abs() < 1e-10);
}

TEST_CASE("classification") {
    TorusGrid g(32, 32);
    const double c = 1.0;
    auto f = sample(g, [](double x, double y) { return std::sin(2 * x) + std::cos(3 * y); });
    auto grad_v = gradient(f);
    auto a = classify_boundedness(grad_v, c);
    CHECK(a.kind == Boundedness::Bounded);
    REQUIRE(a.bound.has_value());
    CHECK(*a.bound == doctest::Approx(2.0).epsilon(1e-12));

    auto rot = field(g, [](double, double y) { return -std::sin(y); }, zero2);
    auto b = classify_boundedness(rot, c);
    CHECK(b.kind == Boundedness::LinearGrowth);
    CHECK_FALSE(b.bound.has_value());
    CHECK(b.w_l2 == doctest::Approx(std::sqrt(2.0) * pi).epsilon(1e-12));

    for (double eps : {0.0, 1e-3}) {
        TorusVector mixed = grad_v;
        mixed.axpy(eps, rot);
        auto r = classify_boundedness(mixed, c);
        CHECK((r.kind == Boundedness::Bounded) == (eps == 0.0));
    }
}

TEST_CASE("bounded and growing classes over long times") {
    TorusGrid g(32, 32);
    const double c = 2.0;
    auto f = sample(g, [](double x, double y) { return std::sin(2 * x) + 0.5 * std::cos(3 * y) + 0.2 * std::sin(x + y); });
    TorusModeSolution bounded(gradient(f), 0.8, c);
    CHECK(sup_over_time(bounded, 100.0 / c) <= bounded.series_bound() + 1e-10);

    auto rot = field(g, [](double, double y) { return -std::sin(y); }, zero2);
    TorusModeSolution grows(rot, 0.8, c);
    const auto fit = fit_growth(grows, 10.0, 100.0);
    CHECK(fit.slope == doctest::Approx(grows.z().max_norm()).epsilon(0.01));

    // gradient part on top of the rotational one leaves the slope unchanged
    TorusVector mixed = gradient(f);
    mixed += rot;
    const auto fit2 = fit_growth(TorusModeSolution(mixed, 0.8, c), 10.0, 100.0);
    CHECK(fit2.slope == doctest::Approx(grows.z().max_norm()).epsilon(0.01));
}

TEST_CASE("band limit is enforced") {
    TorusGrid g(16, 16);
    auto v0 = field(g, [](double x, double) { return std::cos(6 * x); }, zero2);
    CHECK_THROWS_AS(TorusModeSolution(v0, 0.0, 1.0), Error);
    CHECK_THROWS_AS(TorusModeSolution(TorusVector(g), 0.0, 0.0), Error);
}

TEST_CASE("torus curvature coefficient") {
    const double c = 1.4;
    auto m2 = pressure::PressureModel::polytropic(c * c / 2, 2.0);
    CHECK(torus_curvature_coefficient(m2) == doctest::Approx(c * c / 4).epsilon(1e-13));
    CHECK(std::abs(torus_curvature_coefficient(pressure::PressureModel::polytropic(0.7, 3.0))) < 1e-15);

    // agreement with the full sectional curvature at rho = 1, shear U
    TorusGrid g(32, 32);
    TorusScalar one(g, 1.0);
    TorusVector u({TorusScalar(g), sample(g, [](double x, double) { return 0.4 + std::cos(x); })});
    TorusVector v({sample(g, [](double x, double y) { return std::sin(x) + 0.3 * std::cos(2 * y); }),
                   sample(g, [](double x, double y) { return std::cos(x + y); })});
    const double div2 = integrate(divergence(v) * divergence(v));
    for (double gamma : {1.4, 2.0, 2.5}) {
        const double A = 0.8;
        auto model = pressure::PressureModel::polytropic(A, gamma);
        const double coef = torus_curvature_coefficient(model);
        CHECK(coef == doctest::Approx(A * (3 - gamma) / 2).epsilon(1e-13));
        const double f0 = 1.0 / model.lambda(1.0);
        geometry::TangentVector<TorusGrid> U(u, TorusScalar(g, f0)), V(v, TorusScalar(g, f0));
        const auto rep = geometry::sectional_curvature(U, V, one, model);
        CHECK(std::abs(rep.total - coef * div2) <= 1e-8 * std::abs(coef * div2));
    }
}

TEST_CASE("series agrees with the linearized integrator") {
    TorusGrid g(32, 32);
    const double c = 1.0, omega = 0.5;
    auto grad_mode = gradient(sample(g, [](double x, double y) { return std::cos(x + 2 * y); }));
    auto r1 = mode_numeric_crosscheck(grad_mode, omega, c, 1.0);
    MESSAGE("gradient mode gap " << r1.max_rel_gap);
    CHECK(r1.max_rel_gap < 1e-5);

    auto rot = field(g, [](double, double y) { return -std::sin(y); }, zero2);
    auto r2 = mode_numeric_crosscheck(rot, omega, c, 2.0);
    CHECK(r2.max_rel_gap < 1e-5);
    CHECK(std::abs(r2.slope - r2.z_l2) < 1e-4);

    auto r0 = mode_numeric_crosscheck(TorusVector(g), omega, c, 0.5);
    CHECK(r0.max_rel_gap == 0.0);
}
