#include "bflow/trig_series.hpp"

#include <algorithm>
#include <cmath>

#include "bflow/spectral.hpp"

namespace bflow {

using cplx = std::complex<double>;

TrigSeries::TrigSeries(std::vector<cplx> coeffs) : coeffs_(std::move(coeffs)) {
    if (coeffs_.empty()) coeffs_.push_back(0.0);
    coeffs_[0] = coeffs_[0].real();
    double big = 0.0;
    for (const auto& c : coeffs_) big = std::max(big, std::abs(c));
    const double cut = 1e-14 * big;
    while (coeffs_.size() > 1 && std::abs(coeffs_.back()) <= cut) coeffs_.pop_back();
}

TrigSeries TrigSeries::from_samples(std::span<const double> samples) {
    const int n = static_cast<int>(samples.size());
    std::vector<cplx> hat(n / 2 + 1);
    spectral::forward(n, samples, hat);
    for (auto& c : hat) c /= n;
    if (n % 2 == 0) hat[n / 2] *= 0.5;
    return TrigSeries(std::move(hat));
}

TrigSeries TrigSeries::mode(int k, double a, double b) {
    std::vector<cplx> c(k + 1, 0.0);
    if (k == 0) {
        c[0] = a;
    } else {
        // a cos + b sin = 2 Re[(a - i b)/2 e^{ikx}]
        c[k] = cplx{a / 2.0, -b / 2.0};
    }
    return TrigSeries(std::move(c));
}

double TrigSeries::derivative(double x, int order) const noexcept {
    double acc = 0.0;
    const cplx step = std::polar(1.0, x);
    cplx e = step;
    for (std::size_t k = 1; k < coeffs_.size(); ++k) {
        cplx term = coeffs_[k] * e;
        // (ik)^order
        const double kk = static_cast<double>(k);
        switch (order % 4) {
            case 0: break;
            case 1: term = cplx{-term.imag(), term.real()}; break;
            case 2: term = -term; break;
            case 3: term = cplx{term.imag(), -term.real()}; break;
        }
        acc += 2.0 * std::pow(kk, order) * term.real();
        e *= step;
    }
    return order == 0 ? acc + coeffs_[0].real() : acc;
}

void TrigSeries::evaluate3(double x, double& f, double& fp, double& fpp) const noexcept {
    f = coeffs_[0].real();
    fp = 0.0;
    fpp = 0.0;
    const cplx step = std::polar(1.0, x);
    cplx e = step;
    for (std::size_t k = 1; k < coeffs_.size(); ++k) {
        const cplx t = coeffs_[k] * e;
        const double kk = static_cast<double>(k);
        f += 2.0 * t.real();
        fp += -2.0 * kk * t.imag();
        fpp += -2.0 * kk * kk * t.real();
        e *= step;
    }
}

double TrigSeries::periodic_antiderivative(double x) const noexcept {
    double acc = 0.0;
    const cplx step = std::polar(1.0, x);
    cplx e = step;
    for (std::size_t k = 1; k < coeffs_.size(); ++k) {
        // integral of 2 Re[a e^{ikx}] = 2 Re[a e^{ikx} / (ik)]
        const cplx t = coeffs_[k] * e / cplx{0.0, static_cast<double>(k)};
        acc += 2.0 * t.real();
        e *= step;
    }
    return acc;
}

double TrigSeries::integral(double a, double b) const noexcept {
    return coeffs_[0].real() * (b - a) + periodic_antiderivative(b) - periodic_antiderivative(a);
}

ScalarField<CircleGrid> TrigSeries::sample(const CircleGrid& g) const {
    ScalarField<CircleGrid> out(g);
    for (int i = 0; i < g.n(); ++i) out[i] = (*this)(g.x(i));
    return out;
}

double TrigSeries::sup_abs() const noexcept {
    if (max_mode() <= 0) return std::abs(mean());
    const int n = std::max(1024, 32 * (max_mode() + 1));
    const double h = two_pi / n;
    double best_x = 0.0, best = -1.0;
    for (int i = 0; i < n; ++i) {
        const double v = std::abs((*this)(h * i));
        if (v > best) {
            best = v;
            best_x = h * i;
        }
    }
    double x = best_x;
    for (int it = 0; it < 50; ++it) {
        double f, fp, fpp;
        evaluate3(x, f, fp, fpp);
        if (fpp == 0.0) break;
        const double step = std::clamp(fp / fpp, -h, h);
        x -= step;
        if (std::abs(step) < 1e-15) break;
    }
    return std::max(best, std::abs((*this)(x)));
}

}  // namespace bflow
