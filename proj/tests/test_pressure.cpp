#include <cmath>
#include <vector>

#include "doctest.h"

#include "bflow/error.hpp"
#include "bflow/pressure.hpp"

using namespace bflow;
using namespace bflow::pressure;

TEST_CASE("phi from lambda") {
    auto lin = PressureModel::catalog("rho");
    for (double r : {0.1, 1.0, 7.0}) CHECK(phi_from_lambda(lin, r) == 0.0);
    const double c = 1.7;
    auto cst = PressureModel::catalog("const", c);
    CHECK(phi_from_lambda(cst, 2.0) == doctest::Approx(1.0 / (2 * c * c)).epsilon(1e-15));
    auto inv = PressureModel::catalog("3/rho");
    CHECK(phi_from_lambda(inv, 1.5) == doctest::Approx(3.0 / 1.5).epsilon(1e-15));
    CHECK_THROWS_AS(phi_from_lambda(inv, 0.0), Error);
    CHECK_THROWS_AS(phi_from_lambda(inv, -1.0), Error);
}

TEST_CASE("pressure from lambda") {
    auto inv = PressureModel::catalog("3/rho");
    for (double r : {0.3, 1.0, 2.5}) CHECK(pressure_from_lambda(inv, r) == doctest::Approx(r * r * r / 3).epsilon(1e-14));
    const double c = 0.8;
    auto cst = PressureModel::catalog("const", c);
    CHECK(pressure_from_lambda(cst, 1.3) == doctest::Approx(c * c * 1.69 / 2).epsilon(1e-14));
    CHECK(pressure_from_lambda(PressureModel::catalog("rho"), 4.0) == 0.0);
}

TEST_CASE("general lambda agrees with the closed forms") {
    auto custom = PressureModel::custom([](double r) { return 3.0 / r; }, [](double r) { return -3.0 / (r * r); });
    for (double r : {0.2, 1.0, 3.0}) {
        CHECK(custom.pressure(r) == doctest::Approx(r * r * r / 3).epsilon(1e-12));
        CHECK(custom.dpressure(r) == doctest::Approx(r * r).epsilon(1e-6));
        CHECK(std::abs(custom.curvature_coefficient(r)) < 1e-6);
    }
}

TEST_CASE("polytropic inverse") {
    auto a = lambda_for_polytropic(1.0 / 3.0, 3.0);
    CHECK(a.lambda(2.0) == doctest::Approx(1.5).epsilon(1e-15));
    const double c = 1.3;
    auto b = lambda_for_polytropic(c * c / 2, 2.0);
    CHECK(b.lambda(0.4) == doctest::Approx(1 / (c * c)).epsilon(1e-15));
    CHECK(b.lambda(9.0) == doctest::Approx(1 / (c * c)).epsilon(1e-15));
    auto g14 = lambda_for_polytropic(1.0, 1.4);
    for (int k = 0; k < 20; ++k) {
        const double r = 0.1 + 0.5 * k;
        CHECK(std::abs(pressure_from_lambda(g14, r) - std::pow(r, 1.4)) < 1e-12 * std::max(1.0, std::pow(r, 1.4)));
    }
    CHECK_THROWS_AS(lambda_for_polytropic(1.0, 1.0), Error);
    CHECK_THROWS_AS(lambda_for_polytropic(1.0, 0.5), Error);
    try {
        lambda_for_polytropic(1.0, 1.0);
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::Unsupported);
    }
}

TEST_CASE("polytropic pressure over the working range") {
    for (double A : {0.2, 1.0, 3.0})
        for (double g : {1.1, 1.4, 2.0, 3.0, 3.5, 4.0}) {
            auto m = lambda_for_polytropic(A, g);
            for (int k = 0; k <= 40; ++k) {
                const double r = 0.1 * std::pow(100.0, k / 40.0);
                const double ref = A * std::pow(r, g);
                CHECK(std::abs(m.pressure(r) - ref) <= 1e-10 * ref);
                // through the generic formula as well
                const double l = m.lambda(r);
                CHECK(std::abs(r * r * m.phi(r) / (l * l) - ref) <= 1e-10 * ref);
            }
        }
}

TEST_CASE("curvature coefficient sign follows 3 - gamma") {
    for (double g : {1.1, 1.4, 2.0, 3.0, 3.5, 4.0}) {
        auto m = lambda_for_polytropic(0.7, g);
        for (int k = 0; k <= 40; ++k) {
            const double x = 0.1 * std::pow(100.0, k / 40.0);
            const double v = curvature_coefficient(m, x);
            if (g < 3.0) CHECK(v > 0.0);
            if (g == 3.0) CHECK(v == 0.0);
            if (g > 3.0) CHECK(v < 0.0);
            // generic expression x phi' + phi^2 / lambda
            const double gen = x * m.dphi(x) + m.phi(x) * m.phi(x) / m.lambda(x);
            CHECK(std::abs(gen - v) <= 1e-12 * std::max(1.0, std::abs(v)));
            CHECK(std::abs(m.dphi_fd(x) - m.dphi(x)) <= 1e-6 * std::max(std::abs(m.dphi(x)), 1e-300) + 1e-12);
        }
    }
    // gamma = 2, A = c^2/2: C = 1/c^2, so 1/4 C (gamma-1)(3-gamma) = 1/(4c^2); equals c^2/4 only at c = 1
    auto unit = lambda_for_polytropic(0.5, 2.0);
    CHECK(curvature_coefficient(unit, 1.0) == doctest::Approx(0.25).epsilon(1e-14));
    const double c = 2.0;
    auto m = lambda_for_polytropic(c * c / 2, 2.0);
    CHECK(curvature_coefficient(m, 1.0) == doctest::Approx(1.0 / (4 * c * c)).epsilon(1e-14));
    // divided by lambda(1)^2 it becomes A (3 - gamma) / 2
    for (double g : {1.4, 2.0, 2.5}) {
        auto mg = lambda_for_polytropic(0.9, g);
        const double l = mg.lambda(1.0);
        CHECK(curvature_coefficient(mg, 1.0) / (l * l) == doctest::Approx(0.9 * (3 - g) / 2).epsilon(1e-13));
    }
}

TEST_CASE("potential and linearization coefficient") {
    const double c = 1.6;
    auto m2 = lambda_for_polytropic(c * c / 2, 2.0);
    auto m3 = lambda_for_polytropic(1.0 / 3.0, 3.0);
    for (double r : {0.5, 1.0, 4.0}) {
        CHECK(linearization_coefficient(m2, r) == doctest::Approx(c * c).epsilon(1e-14));
        CHECK(linearization_coefficient(m3, r) == doctest::Approx(r).epsilon(1e-14));
        CHECK(potential_density(m2, r) == doctest::Approx(c * c * r / 2).epsilon(1e-14));
        // psi' = p / rho^2 by centered difference
        const double h = 1e-5 * r;
        const double dpsi = (potential_density(m3, r + h) - potential_density(m3, r - h)) / (2 * h);
        CHECK(dpsi == doctest::Approx(m3.pressure(r) / (r * r)).epsilon(1e-8));
    }
    CHECK_THROWS_AS(linearization_coefficient(m2, 0.0), Error);
    CHECK_THROWS_AS(m2.pressure(1e7), Error);
}

TEST_CASE("entropy separable pressure") {
    auto base = lambda_for_polytropic(0.5, 2.0);
    EntropyPressure ep(base, [](double s) { return std::exp(s / 2); });
    CHECK(ep.pressure(1.2, 0.0) == doctest::Approx(base.pressure(1.2)));
    CHECK(ep.pressure(1.2, 2.0) == doctest::Approx(base.pressure(1.2) * std::exp(2.0)));
}
