// Serial reference vs OpenMP for the data-parallel kernels. Both paths give
// bit-identical results (see the backend tests); only the wall time differs.

#include <benchmark/benchmark.h>

#include <cmath>

#include "bflow/disc_spectral.hpp"
#include "bflow/geodesic.hpp"
#include "bflow/geometry.hpp"
#include "bflow/jacobi.hpp"
#include "bflow/operators.hpp"

using namespace bflow;

namespace {

Backend backend_of(const benchmark::State& st) { return st.range(0) == 0 ? Backend::Serial : Backend::OpenMP; }

void label(benchmark::State& st) { st.SetLabel(std::string(to_string(backend_of(st)))); }

const auto gamma3 = pressure::PressureModel::catalog("3/rho");

void BM_curvature_scan(benchmark::State& st) {
    geometry::ScanOptions opt;
    opt.trials = 64;
    opt.seed = 7;
    opt.n_grid = 64;
    opt.backend = backend_of(st);
    const auto model = pressure::PressureModel::polytropic(1.0, 2.0);
    for (auto _ : st) benchmark::DoNotOptimize(geometry::curvature_sign_scan_1d(model, opt).min_total);
    label(st);
}

void BM_geodesic_step(benchmark::State& st) {
    const CircleGrid g(static_cast<int>(st.range(1)));
    const auto u0 = sample(g, [](double x) { return 0.5 * std::sin(x); });
    const auto rho0 = sample(g, [](double x) { return 1.0 + 0.2 * std::cos(x); });
    auto s = geodesic::barotropic_initializer(as_vector(u0), rho0, gamma3);
    auto eta = geodesic::FlowMap<CircleGrid>::identity(rho0);
    geodesic::StepOptions opt;
    opt.backend = backend_of(st);
    const double dt = 1e-5;
    for (auto _ : st) geodesic::step_geodesic(s, eta, gamma3, dt, opt);
    label(st);
}

void BM_jacobi_step(benchmark::State& st) {
    const CircleGrid g(static_cast<int>(st.range(1)));
    const auto u0 = sample(g, [](double x) { return 0.5 * std::sin(x); });
    const auto rho0 = sample(g, [](double x) { return 1.0 + 0.2 * std::cos(x); });
    auto bg = geodesic::barotropic_initializer(as_vector(u0), rho0, gamma3);
    auto eta = geodesic::FlowMap<CircleGrid>::identity(rho0);
    auto js = jacobi::JacobiState<CircleGrid>::initial(as_vector(sample(g, [](double x) { return std::cos(2 * x); })));
    geodesic::StepOptions opt;
    opt.backend = backend_of(st);
    for (auto _ : st) jacobi::linearized_step(js, bg, eta, gamma3, 1e-5, opt);
    label(st);
}

void BM_disc_linear_step(benchmark::State& st) {
    const disc::DiscBackground bg(1.0, 1.0, 1.0);
    const DiscGrid g(static_cast<int>(st.range(1)), 32);
    auto v0 = disc::gradient_example(g, bg, 2);
    v0 += disc::swirl_example(g, bg, 3);
    auto s = disc::DiscLinearState::initial(v0, bg);
    const double dt = 0.5 * disc::disc_step_bound(g, bg);
    for (auto _ : st) disc::disc_linear_step(s, bg, dt, backend_of(st));
    label(st);
}

}  // namespace

BENCHMARK(BM_curvature_scan)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_geodesic_step)->Args({0, 256})->Args({1, 256})->Args({0, 1024})->Args({1, 1024});
BENCHMARK(BM_jacobi_step)->Args({0, 256})->Args({1, 256})->Args({0, 1024})->Args({1, 1024});
BENCHMARK(BM_disc_linear_step)->Args({0, 64})->Args({1, 64})->Args({0, 256})->Args({1, 256});

BENCHMARK_MAIN();
