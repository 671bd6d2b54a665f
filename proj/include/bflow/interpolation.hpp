#pragma once

#include <span>
#include <vector>

#include "bflow/field.hpp"
#include "bflow/parallel.hpp"

namespace bflow {

/// How periodic fields are read off at arbitrary (off-grid) points.
enum class Interpolation {
    Trigonometric,  ///< exact band-limited interpolant, O(N) per point
    Cubic,          ///< 4-point (per axis) periodic Lagrange, O(1) per point
};

std::vector<double> interpolate(const ScalarField<CircleGrid>& f, std::span<const double> xs,
                                Interpolation method, Backend backend = default_backend());

std::vector<double> interpolate(const ScalarField<TorusGrid>& f, std::span<const double> xs,
                                std::span<const double> ys, Interpolation method,
                                Backend backend = default_backend());

}  // namespace bflow
