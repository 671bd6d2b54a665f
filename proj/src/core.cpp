#include <atomic>
#include <cmath>
#include <numbers>
#include <string>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "bflow/error.hpp"
#include "bflow/grid.hpp"
#include "bflow/parallel.hpp"
#include "bflow/random.hpp"

namespace bflow {

std::string_view to_string(ErrorKind kind) noexcept {
    switch (kind) {
        case ErrorKind::Domain: return "domain";
        case ErrorKind::GridMismatch: return "grid_mismatch";
        case ErrorKind::StepSize: return "step_size";
        case ErrorKind::ShockReached: return "shock_reached";
        case ErrorKind::Vacuum: return "vacuum";
        case ErrorKind::Instability: return "instability";
        case ErrorKind::Precondition: return "precondition";
        case ErrorKind::Projection: return "projection";
        case ErrorKind::Convergence: return "convergence";
        case ErrorKind::Unsupported: return "unsupported";
        case ErrorKind::Usage: return "usage";
        case ErrorKind::Validation: return "validation";
    }
    return "unknown";
}

// Grids ----------------------------------------------------------------------

CircleGrid::CircleGrid(int n) : n_(n) {
    require(n >= 8 && n % 2 == 0, ErrorKind::Validation,
            "circle grid needs an even point count >= 8, got " + std::to_string(n));
}

TorusGrid::TorusGrid(int nx, int ny) : nx_(nx), ny_(ny) {
    require(nx >= 8 && ny >= 8 && nx % 2 == 0 && ny % 2 == 0, ErrorKind::Validation,
            "torus grid needs even point counts >= 8");
}

DiscGrid::DiscGrid(int nr, int ntheta) : nr_(nr), ntheta_(ntheta) {
    require(nr >= 4, ErrorKind::Validation, "disc grid needs at least 4 radial nodes");
    require(ntheta >= 8 && ntheta % 2 == 0, ErrorKind::Validation,
            "disc grid needs an even azimuthal count >= 8");
}

// Parallel -------------------------------------------------------------------

namespace {
#ifdef _OPENMP
std::atomic<Backend> g_backend{Backend::OpenMP};
#else
std::atomic<Backend> g_backend{Backend::Serial};
#endif
}  // namespace

Backend default_backend() noexcept { return g_backend.load(); }
void set_default_backend(Backend backend) noexcept { g_backend.store(backend); }

std::string_view to_string(Backend backend) noexcept {
    return backend == Backend::OpenMP ? "openmp" : "serial";
}

int max_threads() noexcept {
#ifdef _OPENMP
    return omp_get_max_threads();
#else
    return 1;
#endif
}

// Random ---------------------------------------------------------------------

namespace {
constexpr std::uint64_t golden = 0x9E3779B97F4A7C15ULL;

std::uint64_t mix(std::uint64_t z) noexcept {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}
}  // namespace

std::uint64_t SplitMix64::next_u64() noexcept {
    state_ += golden;
    return mix(state_);
}

double SplitMix64::uniform() noexcept {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double SplitMix64::normal() noexcept {
    const double u1 = 1.0 - uniform();  // (0, 1]
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(two_pi * u2);
}

SplitMix64 SplitMix64::substream(std::uint64_t seed, std::uint64_t index) noexcept {
    return SplitMix64(mix(seed ^ mix(index + golden)));
}

}  // namespace bflow
