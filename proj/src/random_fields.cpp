#include "bflow/random_fields.hpp"

#include <cmath>

namespace bflow {

ScalarField<CircleGrid> random_band_limited(const CircleGrid& g, int kmax, SplitMix64& rng) {
    ScalarField<CircleGrid> f(g, rng.normal());
    for (int k = 1; k <= kmax; ++k) {
        const double a = rng.normal();
        const double b = rng.normal();
        for (int i = 0; i < g.n(); ++i) f[i] += a * std::cos(k * g.x(i)) + b * std::sin(k * g.x(i));
    }
    return f;
}

ScalarField<TorusGrid> random_band_limited(const TorusGrid& g, int kmax, SplitMix64& rng) {
    ScalarField<TorusGrid> f(g);
    for (int kx = -kmax; kx <= kmax; ++kx) {
        for (int ky = 0; ky <= kmax; ++ky) {
            if (ky == 0 && kx < 0) continue;
            const double a = rng.normal();
            const double b = (kx == 0 && ky == 0) ? 0.0 : rng.normal();
            for (int i = 0; i < g.nx(); ++i)
                for (int j = 0; j < g.ny(); ++j) {
                    const double ph = kx * g.x(i) + ky * g.y(j);
                    f[g.index(i, j)] += a * std::cos(ph) + b * std::sin(ph);
                }
        }
    }
    return f;
}

}  // namespace bflow
