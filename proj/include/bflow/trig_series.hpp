#pragma once

#include <complex>
#include <span>
#include <vector>

#include "bflow/field.hpp"

namespace bflow {

/// Real trigonometric polynomial on the circle,
///   f(x) = a_0 + 2 Re sum_{k=1..K} a_k e^{ikx}.
/// Built from grid samples it is the trigonometric interpolant (the Nyquist
/// coefficient is halved so the Nyquist term is a plain cosine). Modes whose
/// magnitude is below 1e-14 of the largest are trimmed from the top, which
/// keeps point evaluation cheap for band-limited data.
class TrigSeries {
public:
    TrigSeries() = default;
    /// coeffs[0] is the mean (imaginary part ignored), coeffs[k] multiplies e^{ikx}.
    explicit TrigSeries(std::vector<std::complex<double>> coeffs);

    static TrigSeries from_samples(std::span<const double> samples);
    static TrigSeries from_field(const ScalarField<CircleGrid>& f) { return from_samples(f.values()); }

    /// a cos(kx) + b sin(kx)
    static TrigSeries mode(int k, double a, double b);

    int max_mode() const noexcept { return static_cast<int>(coeffs_.size()) - 1; }
    double mean() const noexcept { return coeffs_.empty() ? 0.0 : coeffs_[0].real(); }
    const std::vector<std::complex<double>>& coefficients() const noexcept { return coeffs_; }

    double operator()(double x) const noexcept { return derivative(x, 0); }
    /// order-th derivative; order 0 is the value.
    double derivative(double x, int order) const noexcept;
    /// Value and first two derivatives in one pass.
    void evaluate3(double x, double& f, double& fp, double& fpp) const noexcept;
    /// Exact integral over [a, b] (any real a, b; the mean contributes linearly).
    double integral(double a, double b) const noexcept;

    /// max_x |f(x)|: dense scan, then Newton on f' at the extreme sample.
    double sup_abs() const noexcept;

    /// Samples on a circle grid.
    ScalarField<CircleGrid> sample(const CircleGrid& g) const;

private:
    double periodic_antiderivative(double x) const noexcept;

    std::vector<std::complex<double>> coeffs_;
};

}  // namespace bflow
