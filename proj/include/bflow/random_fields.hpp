#pragma once

#include "bflow/field.hpp"
#include "bflow/random.hpp"

namespace bflow {

/// sum_{k=0..kmax} a_k cos kx + b_k sin kx with standard normal a_k, b_k
/// (b_0 unused), drawn in the order a_0, a_1, b_1, a_2, b_2, ...
ScalarField<CircleGrid> random_band_limited(const CircleGrid& g, int kmax, SplitMix64& rng);

/// Same on the torus for 0 <= |kx|, |ky| <= kmax, half-plane ky > 0 or
/// (ky == 0, kx >= 0), drawn row by row in kx then ky.
ScalarField<TorusGrid> random_band_limited(const TorusGrid& g, int kmax, SplitMix64& rng);

}  // namespace bflow
