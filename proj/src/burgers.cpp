#include "bflow/burgers.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "bflow/error.hpp"

namespace bflow::burgers {

namespace {

// Sample count used to locate extrema before polishing.
int scan_points(const TrigSeries& s) { return std::max(1024, 32 * (s.max_mode() + 1)); }

}  // namespace

RiemannData riemann_invariants(const ScalarField<CircleGrid>& u0, const ScalarField<CircleGrid>& rho0) {
    require_same_grid(u0.grid(), rho0.grid());
    for (std::size_t i = 0; i < rho0.size(); ++i)
        if (!(rho0[i] > 0.0)) fail(ErrorKind::Domain, "density must be positive at every node");
    return {TrigSeries::from_field(u0 + rho0), TrigSeries::from_field(u0 - rho0)};
}

double shock_time(const TrigSeries& a) {
    if (a.max_mode() == 0) return std::numeric_limits<double>::infinity();
    // maximize s(x) = -a'(x): coarse scan, then Newton on s'(x) = -a''(x) = 0
    const int n = scan_points(a);
    double best_x = 0.0, best = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < n; ++i) {
        const double x = two_pi * i / n;
        const double s = -a.derivative(x, 1);
        if (s > best) {
            best = s;
            best_x = x;
        }
    }
    const double h = two_pi / n;
    double x = best_x;
    for (int it = 0; it < 50; ++it) {
        const double d2 = a.derivative(x, 2);
        const double d3 = a.derivative(x, 3);
        if (d3 == 0.0) break;
        double step = d2 / d3;
        step = std::clamp(step, -h, h);
        x -= step;
        if (std::abs(step) < 1e-15) break;
    }
    best = std::max(best, -a.derivative(x, 1));
    if (best <= 0.0) return std::numeric_limits<double>::infinity();
    return 1.0 / best;
}

double shock_time(const RiemannData& d) { return std::min(shock_time(d.plus), shock_time(d.minus)); }

CharacteristicFlow::CharacteristicFlow(TrigSeries alpha0) : alpha0_(std::move(alpha0)) {
    shock_time_ = burgers::shock_time(alpha0_);
    const int n = scan_points(alpha0_);
    amin_ = std::numeric_limits<double>::infinity();
    amax_ = -amin_;
    for (int i = 0; i < n; ++i) {
        const double v = alpha0_(two_pi * i / n);
        amin_ = std::min(amin_, v);
        amax_ = std::max(amax_, v);
    }
    // sampling misses the true extrema by O(h^2); widen the range
    const double pad = 0.01 * (amax_ - amin_) + 1e-12 * (1.0 + std::abs(amax_) + std::abs(amin_));
    amin_ -= pad;
    amax_ += pad;
}

double CharacteristicFlow::invert(double t, double x) const {
    if (t >= shock_time_)
        fail(ErrorKind::ShockReached, "t = " + std::to_string(t) + " is past the shock time " + std::to_string(shock_time_));
    if (t == 0.0) return x;
    double lo = x - t * amax_;
    double hi = x - t * amin_;
    auto F = [&](double c) { return c + t * alpha0_(c) - x; };
    double c = x - t * alpha0_(x);
    c = std::clamp(c, lo, hi);
    const double tol = 1e-14 * (1.0 + std::abs(x));
    for (int it = 0; it < 200; ++it) {
        double f, fp, fpp;
        alpha0_.evaluate3(c, f, fp, fpp);
        const double r = c + t * f - x;
        if (std::abs(r) <= tol) return c;
        if (r > 0.0) hi = c; else lo = c;
        const double d = 1.0 + t * fp;
        double next = c - r / d;
        if (!(d > 0.0) || !(next > lo && next < hi)) next = 0.5 * (lo + hi);
        if (std::abs(next - c) <= 1e-16 * (1.0 + std::abs(c)) || hi - lo <= 1e-15 * (1.0 + std::abs(c)))
            return next;
        c = next;
    }
    // bisection to the end of the bracket
    for (int it = 0; it < 200 && hi - lo > 1e-15 * (1.0 + std::abs(lo)); ++it) {
        const double mid = 0.5 * (lo + hi);
        if (F(mid) > 0.0) hi = mid; else lo = mid;
    }
    return 0.5 * (lo + hi);
}

ExactSolution exact_state(const ScalarField<CircleGrid>& u0, const ScalarField<CircleGrid>& rho0, double t,
                          Backend backend) {
    const auto rd = riemann_invariants(u0, rho0);
    const CharacteristicFlow fp(rd.plus), fm(rd.minus);
    const auto& g = u0.grid();
    ExactSolution out{ScalarField<CircleGrid>(g), ScalarField<CircleGrid>(g)};
    parallel_for(
        g.size(),
        [&](std::size_t i) {
            const double x = g.x(static_cast<int>(i));
            const double ap = rd.plus(fp.invert(t, x));
            const double am = rd.minus(fm.invert(t, x));
            out.u[i] = 0.5 * (ap + am);
            out.rho[i] = 0.5 * (ap - am);
        },
        backend);
    return out;
}

ScalarField<CircleGrid> exact_jacobi(const ScalarField<CircleGrid>& u0, const ScalarField<CircleGrid>& rho0,
                                     const ScalarField<CircleGrid>& v0, double t, Backend backend) {
    require_same_grid(u0.grid(), v0.grid());
    const auto rd = riemann_invariants(u0, rho0);
    const CharacteristicFlow fp(rd.plus), fm(rd.minus);
    const auto vs = TrigSeries::from_field(v0);
    const auto& g = u0.grid();
    ScalarField<CircleGrid> j(g);
    parallel_for(
        g.size(),
        [&](std::size_t i) {
            const double x = g.x(static_cast<int>(i));
            const double cp = fp.invert(t, x);
            const double cm = fm.invert(t, x);
            const double rho = 0.5 * (rd.plus(cp) - rd.minus(cm));
            j[i] = vs.integral(cp, cm) / (2.0 * rho);
        },
        backend);
    return j;
}

std::vector<double> conjugate_times(int n, int m_max) {
    require(n >= 1, ErrorKind::Validation, "mode number must be positive");
    std::vector<double> out;
    for (int m = 1; m <= m_max; ++m) out.push_back(two_pi * m / n);
    return out;
}

double conjugate_j(int n, double t, double x) { return std::sin(n * t) * std::cos(n * (x - t)) / n; }

double conjugate_G(int n, double t, double x) {
    const double s = std::sin(0.5 * n * t);
    return 4.0 / (3.0 * n) * std::sin(n * x) * s * s;
}

double conjugate_sigma(int n, double t, double x) {
    return 0.5 * (std::cos(n * (x - 2.0 * t)) - std::cos(n * x));
}

double conjugate_g(int n, double t, double x) { return 2.0 / 3.0 * conjugate_sigma(n, t, x); }

}  // namespace bflow::burgers
