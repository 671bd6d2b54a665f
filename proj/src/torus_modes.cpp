#include "bflow/torus_modes.hpp"

#include <algorithm>
#include <cmath>

#include "bflow/geodesic.hpp"
#include "bflow/jacobi.hpp"
#include "bflow/operators.hpp"

namespace bflow::torus {

using spectral::cplx;

namespace {

std::vector<cplx> half_spectrum(const ScalarField<TorusGrid>& f) {
    const auto& g = f.grid();
    std::vector<cplx> hat(static_cast<std::size_t>(g.nx()) * (g.ny() / 2 + 1));
    spectral::forward2(g.nx(), g.ny(), f.values(), hat);
    const double norm = 1.0 / static_cast<double>(g.size());
    for (auto& h : hat) h *= norm;
    return hat;
}

ScalarField<TorusGrid> from_half_spectrum(const TorusGrid& g, std::vector<cplx> hat) {
    for (auto& h : hat) h *= static_cast<double>(g.size());
    ScalarField<TorusGrid> out(g);
    spectral::backward2(g.nx(), g.ny(), hat, out.values());
    return out;
}

void require_band_limited(const VectorField<TorusGrid>& v0) {
    const auto& g = v0.grid();
    const int nyh = g.ny() / 2 + 1;
    for (int c = 0; c < 2; ++c) {
        const auto hat = half_spectrum(v0[c]);
        double inside = 0.0, outside = 0.0;
        for (int i = 0; i < g.nx(); ++i) {
            const int kx = spectral::wavenumber(i, g.nx());
            for (int j = 0; j < nyh; ++j) {
                const double a = std::abs(hat[static_cast<std::size_t>(i) * nyh + j]);
                if (4 * std::abs(kx) <= g.nx() && 4 * j <= g.ny())
                    inside = std::max(inside, a);
                else
                    outside = std::max(outside, a);
            }
        }
        require(outside <= 1e-10 * std::max(inside, 1.0), ErrorKind::Precondition,
                "v0 must be band-limited to |k| <= n/4 on each axis");
    }
}

}  // namespace

TorusModeSolution::TorusModeSolution(const VectorField<TorusGrid>& v0, double omega, double c)
    : grid_(v0.grid()), omega_(omega), c_(c), f0_(v0.grid()), z_(v0.grid()) {
    require(c > 0.0 && std::isfinite(c), ErrorKind::Validation, "sound speed c must be positive");
    require(std::isfinite(omega), ErrorKind::Validation, "shear rate must be finite");
    require_band_limited(v0);
    auto hodge = hodge_decompose(v0);
    f0_ = std::move(hodge.f);
    z_ = std::move(hodge.w);
    fhat_ = half_spectrum(f0_);
    zxhat_ = half_spectrum(z_[0]);
    zyhat_ = half_spectrum(z_[1]);
    // each stored ky > 0 stands for the pair +-k
    const int nyh = grid_.ny() / 2 + 1;
    for (int i = 0; i < grid_.nx(); ++i)
        for (int j = 0; j < nyh; ++j) {
            const double w = (j == 0) ? 1.0 : 2.0;
            bound_ += w * std::abs(fhat_[static_cast<std::size_t>(i) * nyh + j]);
        }
    bound_ /= c_;
}

VectorField<TorusGrid> TorusModeSolution::evaluate(double t) const {
    const int nx = grid_.nx();
    const int nyh = grid_.ny() / 2 + 1;
    std::vector<cplx> jx(fhat_.size()), jy(fhat_.size());
    for (int i = 0; i < nx; ++i) {
        const double kx = spectral::wavenumber(i, nx);
        for (int j = 0; j < nyh; ++j) {
            const double ky = j;
            const std::size_t idx = static_cast<std::size_t>(i) * nyh + j;
            const double k = std::hypot(kx, ky);
            const double s = k > 0.0 ? std::sin(c_ * k * t) / (c_ * k) : t;
            const cplx shift = std::polar(1.0, -ky * omega_ * t);
            jx[idx] = shift * (cplx{0.0, kx} * fhat_[idx] * s + t * zxhat_[idx]);
            jy[idx] = shift * (cplx{0.0, ky} * fhat_[idx] * s + t * zyhat_[idx]);
        }
    }
    return VectorField<TorusGrid>({from_half_spectrum(grid_, std::move(jx)), from_half_spectrum(grid_, std::move(jy))});
}

VectorField<TorusGrid> torus_jacobi(const VectorField<TorusGrid>& v0, double omega, double c, double t) {
    return TorusModeSolution(v0, omega, c).evaluate(t);
}

Classification classify_boundedness(const VectorField<TorusGrid>& v0, double c, double tol) {
    const TorusModeSolution sol(v0, 0.0, c);
    Classification out;
    out.w_l2 = std::sqrt(integrate(dot(sol.z(), sol.z())));
    out.z_sup = sol.z().max_norm();
    if (out.w_l2 < tol) {
        out.kind = Boundedness::Bounded;
        out.bound = sol.series_bound();
    } else {
        out.kind = Boundedness::LinearGrowth;
    }
    return out;
}

double torus_curvature_coefficient(const pressure::PressureModel& model) {
    const double l = model.lambda(1.0);
    return model.curvature_coefficient(1.0) / (l * l);
}

namespace {

LineFit least_squares(const std::vector<double>& t, const std::vector<double>& y) {
    const double n = static_cast<double>(t.size());
    double st = 0, sy = 0, stt = 0, sty = 0;
    for (std::size_t i = 0; i < t.size(); ++i) {
        st += t[i];
        sy += y[i];
        stt += t[i] * t[i];
        sty += t[i] * y[i];
    }
    const double den = n * stt - st * st;
    LineFit f;
    if (den > 0.0) f.slope = (n * sty - st * sy) / den;
    f.intercept = (sy - f.slope * st) / n;
    return f;
}

}  // namespace

LineFit fit_growth(const TorusModeSolution& sol, double t0, double t1, int samples) {
    require(samples >= 2 && t1 > t0, ErrorKind::Validation, "need at least two samples on a nonempty interval");
    std::vector<double> t(samples), y(samples);
    parallel_for(static_cast<std::size_t>(samples), [&](std::size_t k) {
        t[k] = t0 + (t1 - t0) * static_cast<double>(k) / (samples - 1);
        y[k] = sol.evaluate(t[k]).max_norm();
    });
    return least_squares(t, y);
}

double sup_over_time(const TorusModeSolution& sol, double t1, int samples) {
    require(samples >= 2 && t1 > 0.0, ErrorKind::Validation, "need at least two samples on a nonempty interval");
    const auto vals = parallel_map<double>(static_cast<std::size_t>(samples), [&](std::size_t k) {
        return sol.evaluate(t1 * static_cast<double>(k) / (samples - 1)).max_norm();
    });
    return *std::max_element(vals.begin(), vals.end());
}

CrosscheckReport mode_numeric_crosscheck(const VectorField<TorusGrid>& v0, double omega, double c, double t_end,
                                         const CrosscheckOptions& opt) {
    require(t_end > 0.0, ErrorKind::Validation, "t_end must be positive");
    require(opt.samples >= 1, ErrorKind::Validation, "need at least one comparison time");
    const TorusModeSolution sol(v0, omega, c);
    const auto& g = v0.grid();
    const auto model = pressure::PressureModel::polytropic(0.5 * c * c, 2.0);
    auto bg = geodesic::steady_shear_torus(g, [omega](double) { return omega; });
    auto eta = geodesic::FlowMap<TorusGrid>::identity(bg.rho);

    double dt = opt.dt;
    if (dt <= 0.0) dt = 0.25 * geodesic::cfl_bound(bg, model);
    const long per_sample = std::max<long>(1, std::lround(std::ceil(t_end / opt.samples / dt)));
    const double h = t_end / opt.samples / static_cast<double>(per_sample);

    geodesic::StepOptions so;
    so.backend = opt.backend;
    auto js = jacobi::JacobiState<TorusGrid>::initial(v0);
    CrosscheckReport rep;
    rep.z_l2 = std::sqrt(integrate(dot(sol.z(), sol.z())));
    std::vector<double> norms;
    for (int s = 1; s <= opt.samples; ++s) {
        for (long k = 0; k < per_sample; ++k) jacobi::linearized_step(js, bg, eta, model, h, so);
        const double t = t_end * s / opt.samples;
        const auto ref = sol.evaluate(t);
        const auto d = js.j - ref;
        const double num = std::sqrt(integrate(dot(d, d)));
        const double den = std::sqrt(integrate(dot(ref, ref)));
        const double gap = den > 0.0 ? num / den : num;
        rep.t.push_back(t);
        rep.rel_gap.push_back(gap);
        rep.max_rel_gap = std::max(rep.max_rel_gap, gap);
        norms.push_back(std::sqrt(integrate(dot(js.j, js.j))));
    }
    if (rep.t.size() >= 2) rep.slope = least_squares(rep.t, norms).slope;
    return rep;
}

}  // namespace bflow::torus
