#include "bflow/spectral.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <tuple>
#include <vector>

#include "bflow/error.hpp"

namespace bflow::spectral {
namespace {

enum class Kind { R2C, C2R };
using Key = std::tuple<Kind, int, int>;  // ny == 0 for 1-D

class PlanCache {
public:
    ~PlanCache() {
        for (auto& [key, plan] : plans_) fftw_destroy_plan(plan);
    }

    fftw_plan get(Kind kind, int nx, int ny) {
        std::lock_guard lock(mutex_);
        const Key key{kind, nx, ny};
        if (auto it = plans_.find(key); it != plans_.end()) return it->second;

        const std::size_t nreal = static_cast<std::size_t>(nx) * (ny == 0 ? 1 : ny);
        const std::size_t ncplx = ny == 0 ? static_cast<std::size_t>(nx / 2 + 1)
                                          : static_cast<std::size_t>(nx) * (ny / 2 + 1);
        std::vector<double> r(nreal);
        std::vector<cplx> c(ncplx);
        auto* cp = reinterpret_cast<fftw_complex*>(c.data());
        const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
        fftw_plan plan = nullptr;
        if (ny == 0) {
            plan = kind == Kind::R2C ? fftw_plan_dft_r2c_1d(nx, r.data(), cp, flags)
                                     : fftw_plan_dft_c2r_1d(nx, cp, r.data(), flags);
        } else {
            plan = kind == Kind::R2C ? fftw_plan_dft_r2c_2d(nx, ny, r.data(), cp, flags)
                                     : fftw_plan_dft_c2r_2d(nx, ny, cp, r.data(), flags);
        }
        require(plan != nullptr, ErrorKind::Convergence, "FFTW planning failed");
        plans_.emplace(key, plan);
        return plan;
    }

private:
    std::mutex mutex_;
    std::map<Key, fftw_plan> plans_;
};

PlanCache& cache() {
    static PlanCache instance;
    return instance;
}

}  // namespace

void forward(int n, std::span<const double> in, std::span<cplx> out) {
    fftw_plan plan = cache().get(Kind::R2C, n, 0);
    fftw_execute_dft_r2c(plan, const_cast<double*>(in.data()),
                         reinterpret_cast<fftw_complex*>(out.data()));
}

void backward(int n, std::span<const cplx> in, std::span<double> out) {
    // c2r overwrites its input
    std::vector<cplx> scratch(in.begin(), in.end());
    fftw_plan plan = cache().get(Kind::C2R, n, 0);
    fftw_execute_dft_c2r(plan, reinterpret_cast<fftw_complex*>(scratch.data()), out.data());
    const double scale = 1.0 / n;
    for (double& v : out) v *= scale;
}

void forward2(int nx, int ny, std::span<const double> in, std::span<cplx> out) {
    fftw_plan plan = cache().get(Kind::R2C, nx, ny);
    fftw_execute_dft_r2c(plan, const_cast<double*>(in.data()),
                         reinterpret_cast<fftw_complex*>(out.data()));
}

void backward2(int nx, int ny, std::span<const cplx> in, std::span<double> out) {
    std::vector<cplx> scratch(in.begin(), in.end());
    fftw_plan plan = cache().get(Kind::C2R, nx, ny);
    fftw_execute_dft_c2r(plan, reinterpret_cast<fftw_complex*>(scratch.data()), out.data());
    const double scale = 1.0 / (static_cast<double>(nx) * ny);
    for (double& v : out) v *= scale;
}

std::string_view fftw_version() noexcept { return ::fftw_version; }

}  // namespace bflow::spectral
