#include "bflow/disc_spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <Eigen/Dense>

#include "bflow/error.hpp"
#include "bflow/spectral.hpp"

namespace bflow::disc {

using std::numbers::pi;

DiscBackground::DiscBackground(double omega_, double c_, double rho0_) : omega(omega_), c(c_), rho0(rho0_) {
    require(std::isfinite(omega) && std::isfinite(c) && std::isfinite(rho0), ErrorKind::Validation,
            "disc parameters must be finite");
    require(c > 0.0, ErrorKind::Validation, "sound speed c must be positive");
    require(rho0 > omega * omega / (2.0 * c * c), ErrorKind::Vacuum,
            "rho0 must exceed omega^2 / (2 c^2) or the centre is vacuum");
}

double DiscBackground::density(double r) const noexcept {
    return rho0 - omega * omega * (1.0 - r * r) / (2.0 * c * c);
}

// Sturm-Liouville ------------------------------------------------------------

double RadialSpectrum::project(const std::vector<double>& f, int k) const { return project_any(f, k); }

namespace {

// Finite volumes on r_i = i h: flux a_{i+1/2} = r_{i+1/2} (rho_i + rho_{i+1}) / 2,
// cell areas r_i h (h^2 / 8 for the half cell at the origin). Dividing by h
// gives K z = lambda W z with K symmetric and W diagonal.
RadialSpectrum solve_radial(const DiscBackground& bg, int n, int nodes, bool vectors) {
    require(nodes >= 8, ErrorKind::Validation, "radial mesh needs at least 8 nodes");
    const int N = nodes;
    const double h = 1.0 / N;
    const int first = (n == 0) ? 0 : 1;
    const int m = N - first;
    const double n2 = static_cast<double>(n) * n;
    auto flux = [&](int i) {  // a_{i+1/2}
        return (i + 0.5) * h * 0.5 * (bg.density(i * h) + bg.density((i + 1) * h));
    };

    RadialSpectrum out;
    out.n = n;
    out.nodes = N;
    out.r.resize(m);
    out.weight.resize(m);
    Eigen::VectorXd diag(m), sub(std::max(m - 1, 1));
    std::vector<double> W(m);
    for (int idx = 0; idx < m; ++idx) {
        const int i = idx + first;
        const double r = i * h;
        out.r[idx] = r;
        double kii;
        if (i == 0) {
            kii = flux(0) / (h * h);
            W[idx] = h / 8.0;
        } else {
            kii = (flux(i) + flux(i - 1)) / (h * h) + n2 * bg.density(r) / r;
            W[idx] = r;
        }
        out.weight[idx] = W[idx] * h;
        diag(idx) = kii / W[idx];
    }
    for (int idx = 0; idx + 1 < m; ++idx)
        sub(idx) = -flux(idx + first) / (h * h) / std::sqrt(W[idx] * W[idx + 1]);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
    es.computeFromTridiagonal(diag, sub.head(m - 1), vectors ? Eigen::ComputeEigenvectors : Eigen::EigenvaluesOnly);
    require(es.info() == Eigen::Success, ErrorKind::Convergence, "tridiagonal eigensolve failed");
    out.lambda.assign(es.eigenvalues().data(), es.eigenvalues().data() + m);
    if (vectors) {
        out.zeta.assign(m, std::vector<double>(m));
        for (int k = 0; k < m; ++k) {
            auto& z = out.zeta[k];
            int big = 0;
            for (int i = 0; i < m; ++i) {
                // unit sum of squares in y = W^{1/2} z means unit weighted norm here
                z[i] = es.eigenvectors()(i, k) / std::sqrt(out.weight[i]);
                if (std::abs(z[i]) > std::abs(z[big])) big = i;
            }
            if (z[big] < 0.0)
                for (auto& v : z) v = -v;
        }
    }
    return out;
}

}  // namespace

RadialSpectrum radial_spectrum(const DiscBackground& bg, int n, int nodes) {
    return solve_radial(bg, std::abs(n), nodes, true);
}

std::vector<EigenPair> sturm_liouville_eigs(const DiscBackground& bg, int n, int k_max, int nodes) {
    require(nodes >= 200, ErrorKind::Precondition, "Sturm-Liouville solve needs at least 200 radial nodes");
    require(k_max >= 1, ErrorKind::Validation, "k_max must be positive");
    const auto s = radial_spectrum(bg, n, nodes);
    const int count = std::min<int>(k_max, static_cast<int>(s.lambda.size()));
    std::vector<EigenPair> out;
    for (int k = 0; k < count; ++k) {
        EigenPair e;
        e.n = n;
        e.k = k + 1;
        e.lambda = s.lambda[k];
        e.r = s.r;
        e.zeta = s.zeta[k];
        e.r.push_back(1.0);
        e.zeta.push_back(0.0);
        out.push_back(std::move(e));
    }
    return out;
}

// Characteristic cubic -------------------------------------------------------

std::array<double, 3> characteristic_roots(double lambda, int n, double omega, double c) {
    require(lambda > 0.0, ErrorKind::Domain, "eigenvalue must be positive");
    const double p = (c * c * lambda + 4.0 * omega * omega) / 3.0;
    const double q = n * omega * omega * omega;
    if (!(p > 0.0) || q * q >= p * p * p)
        fail(ErrorKind::Instability, "characteristic cubic lost three distinct real roots (q^2 >= p^3)");
    const double s = std::sqrt(p);
    const double phi = std::acos(std::clamp(q / (p * s), -1.0, 1.0)) / 3.0;
    std::array<double, 3> y{};
    for (int k = 0; k < 3; ++k) y[k] = 2.0 * s * std::cos(phi - 2.0 * pi * k / 3.0);
    if (n == 0) y[1] = 0.0;  // cos(pi / 2) is not exactly zero
    std::sort(y.begin(), y.end(), std::greater<>());
    return y;
}

CubicCheck check_roots(double lambda, int n, double omega, double c, const std::array<double, 3>& y) {
    CubicCheck k;
    k.p = (c * c * lambda + 4.0 * omega * omega) / 3.0;
    k.q = n * omega * omega * omega;
    k.margin = k.p * k.p * k.p - k.q * k.q;
    k.vieta_sum = std::abs(y[0] + y[1] + y[2]);
    k.vieta_pair = std::abs(y[0] * y[1] + y[0] * y[2] + y[1] * y[2] + 3.0 * k.p);
    k.min_gap = std::min({std::abs(y[0] - y[1]), std::abs(y[0] - y[2]), std::abs(y[1] - y[2])});
    return k;
}

// Bessel ---------------------------------------------------------------------

double bessel_j(int n, double x) {
    require(n >= 0, ErrorKind::Domain, "Bessel order must be nonnegative");
    // The terms grow to roughly e^x before they decay, so double precision
    // loses everything near the first zero for large n. Quad precision keeps
    // about 15 digits up to n = 64.
    using quad = __float128;
    const quad half = static_cast<quad>(x) / 2;
    quad term = 1;
    for (int k = 1; k <= n; ++k) term *= half / k;
    quad sum = term;
    const quad h2 = half * half;
    for (int m = 0; m < 10000; ++m) {
        term *= -h2 / ((m + 1) * static_cast<quad>(m + 1 + n));
        sum += term;
        const double a = std::abs(static_cast<double>(term));
        if (m > x && a < 1e-18) break;
    }
    return static_cast<double>(sum);
}

double bessel_first_root(int n) {
    require(n >= 0 && n <= 64, ErrorKind::Domain, "Bessel order must lie in [0, 64]");
    const double lo0 = std::max(n, 1);
    const double hi0 = n + 10.0;
    // walk the bracket until the first sign change so bisection lands on the first zero
    const double step = 0.05;
    double a = lo0, fa = bessel_j(n, a);
    double b = a;
    bool found = false;
    while (b < hi0) {
        b = std::min(a + step, hi0);
        const double fb = bessel_j(n, b);
        if ((fa > 0.0) != (fb > 0.0)) {
            found = true;
            break;
        }
        a = b;
        fa = fb;
    }
    require(found, ErrorKind::Convergence, "no sign change of J_n in [max(n,1), n+10]");
    for (int it = 0; it < 200 && b - a > 1e-15 * b; ++it) {
        const double m = 0.5 * (a + b);
        const double fm = bessel_j(n, m);
        if ((fm > 0.0) == (fa > 0.0)) {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
    }
    return 0.5 * (a + b);
}

// Rayleigh bound -------------------------------------------------------------

RayleighReport rayleigh_bound_check(const DiscBackground& bg, int n_max, int nodes, double tol) {
    require(n_max >= 0 && n_max <= 64, ErrorKind::Validation, "n_max must lie in [0, 64]");
    RayleighReport rep;
    rep.rows = parallel_map<RayleighRow>(static_cast<std::size_t>(n_max + 1), [&](std::size_t idx) {
        const int n = static_cast<int>(idx);
        RayleighRow row;
        row.n = n;
        row.lambda1 = solve_radial(bg, n, nodes, false).lambda.front();
        row.bessel_root = bessel_first_root(n);
        row.bound = bg.a() * row.bessel_root * row.bessel_root + bg.b() * (n * n + 1.0);
        row.margin = row.lambda1 - row.bound;
        const double n23 = std::cbrt(static_cast<double>(n) * n);
        row.downstream = bg.c * bg.c * row.lambda1 - bg.omega * bg.omega * (3.0 * n23 - 4.0);
        row.arithmetic = n * n + 7.0 - 6.0 * n23;
        return row;
    });
    for (const auto& row : rep.rows) {
        auto note = [&](const char* what, double v) {
            rep.falsifications.push_back("n=" + std::to_string(row.n) + ": " + what + " margin " + std::to_string(v));
        };
        if (row.margin < -tol) note("lambda_1n >= a c_n^2 + b(n^2+1)", row.margin);
        if (!(row.downstream > 0.0)) note("c^2 lambda_1n > omega^2 (3 n^{2/3} - 4)", row.downstream);
        if (!(row.arithmetic > 0.0)) note("n^2 + 7 > 6 n^{2/3}", row.arithmetic);
    }
    return rep;
}

// Mode system ----------------------------------------------------------------

ModeSystem::ModeSystem(double lambda, int n, double omega, double c)
    : lambda_(lambda), omega_(omega), c_(c), n_(n) {
    // our sign of the i n omega^2 sigma term flips q
    y_ = characteristic_roots(lambda, -n, omega, c);
    const double scale = std::sqrt(c * c * lambda + 4.0 * omega * omega);
    const auto chk = check_roots(lambda, -n, omega, c, y_);
    require(chk.min_gap > 1e-12 * scale, ErrorKind::Instability, "repeated frequencies make the mode system defective");
    // null vector of A - zI as the best-conditioned cross product of two rows
    const cplx in_w2{0.0, n * omega * omega};
    for (int m = 0; m < 3; ++m) {
        const cplx z{0.0, y_[m]};
        const std::array<std::array<cplx, 3>, 3> rows{{{-z, -1.0, 0.0},
                                                        {c * c * lambda, -z, -2.0 * omega},
                                                        {in_w2, 2.0 * omega, -z}}};
        double best = -1.0;
        for (int a = 0; a < 3; ++a)
            for (int b = a + 1; b < 3; ++b) {
                const auto& u = rows[a];
                const auto& v = rows[b];
                const std::array<cplx, 3> x{u[1] * v[2] - u[2] * v[1], u[2] * v[0] - u[0] * v[2],
                                            u[0] * v[1] - u[1] * v[0]};
                const double size = std::norm(x[0]) + std::norm(x[1]) + std::norm(x[2]);
                if (size > best) {
                    best = size;
                    vec_[m] = x;
                }
            }
        const double norm = std::sqrt(best);
        for (auto& e : vec_[m]) e /= norm;
    }
}

std::array<cplx, 3> ModeSystem::amplitudes(const ModeCoefficients& x0) const {
    Eigen::Matrix3cd V;
    for (int m = 0; m < 3; ++m)
        for (int i = 0; i < 3; ++i) V(i, m) = vec_[m][i];
    const Eigen::Vector3cd b(x0.sigma, x0.F, x0.G);
    const Eigen::Vector3cd a = V.fullPivLu().solve(b);
    return {a(0), a(1), a(2)};
}

ModeCoefficients ModeSystem::evolve(const ModeCoefficients& x0, double t) const {
    const auto a = amplitudes(x0);
    ModeCoefficients x;
    for (int m = 0; m < 3; ++m) {
        const cplx e = a[m] * std::polar(1.0, y_[m] * t);
        x.sigma += e * vec_[m][0];
        x.F += e * vec_[m][1];
        x.G += e * vec_[m][2];
    }
    return x;
}

ModeCoefficients ModeSystem::rate(const ModeCoefficients& x) const {
    const double w = omega_;
    return {-x.F, c_ * c_ * lambda_ * x.sigma - 2.0 * w * x.G, 2.0 * w * x.F + cplx{0.0, n_ * w * w} * x.sigma};
}

ModeCoefficients ModeSystem::evolve_rk4(const ModeCoefficients& x0, double t, int steps) const {
    require(steps >= 1, ErrorKind::Validation, "need at least one step");
    const double h = t / steps;
    auto add = [](const ModeCoefficients& x, double s, const ModeCoefficients& k) {
        return ModeCoefficients{x.sigma + s * k.sigma, x.F + s * k.F, x.G + s * k.G};
    };
    ModeCoefficients x = x0;
    for (int i = 0; i < steps; ++i) {
        const auto k1 = rate(x);
        const auto k2 = rate(add(x, h / 2, k1));
        const auto k3 = rate(add(x, h / 2, k2));
        const auto k4 = rate(add(x, h, k3));
        x.sigma += h / 6 * (k1.sigma + 2.0 * k2.sigma + 2.0 * k3.sigma + k4.sigma);
        x.F += h / 6 * (k1.F + 2.0 * k2.F + 2.0 * k3.F + k4.F);
        x.G += h / 6 * (k1.G + 2.0 * k2.G + 2.0 * k3.G + k4.G);
    }
    return x;
}

double ModeSystem::energy(const ModeCoefficients& x) const noexcept {
    const double s = c_ * c_ * lambda_ + 4.0 * omega_ * omega_;
    return std::norm(x.sigma) + (std::norm(x.F) + std::norm(x.G)) / s;
}

ModeCoefficients mode_evolution(const ModeCoefficients& x0, double lambda, int n, double omega, double c, double t) {
    return ModeSystem(lambda, n, omega, c).evolve(x0, t);
}

// Staggered radial layout -----------------------------------------------------
//
// Nodes s h (s = 0 .. N, s = N is r = 1) carry sigma and w_theta = rho v_theta;
// half nodes (k + 1/2) h carry w_r = rho v_r. Row s of a nodal array is ring
// s - 1 of the DiscGrid; row 0 is the origin and holds only the theta mean.
// The finite-volume divergence of rho grad sigma is then the Sturm-Liouville
// stencil row for row.

namespace {

using spectral::cplx;
using Rows = std::vector<double>;  // N rows of ntheta values

struct Layout {
    int N, M;
    double h;
    explicit Layout(const DiscGrid& g) : N(g.nr()), M(g.ntheta()), h(g.dr()) {}
    std::size_t at(int row, int j) const { return static_cast<std::size_t>(row) * M + j; }
    Rows zeros() const { return Rows(static_cast<std::size_t>(N) * M, 0.0); }
};

Rows dtheta(const Layout& L, const Rows& a, Backend backend) {
    Rows out(a.size(), 0.0);
    parallel_for(static_cast<std::size_t>(L.N), [&](std::size_t row) {
        std::vector<cplx> hat(L.M / 2 + 1);
        const std::span<const double> in(a.data() + row * L.M, L.M);
        spectral::forward(L.M, in, hat);
        for (int k = 0; k <= L.M / 2; ++k) hat[k] *= (2 * k == L.M) ? cplx{0.0} : cplx{0.0, static_cast<double>(k)};
        spectral::backward(L.M, hat, std::span<double>(out.data() + row * L.M, L.M));
    }, backend);
    return out;
}

// nodal rows 1 .. N-1 -> half rows 0 .. N-1
Rows to_half(const Layout& L, const Rows& f) {
    const int N = L.N;
    Rows out = L.zeros();
    auto F = [&](int s, int j) { return f[L.at(s, j)]; };
    for (int j = 0; j < L.M; ++j) {
        out[L.at(0, j)] = (15 * F(1, j) - 10 * F(2, j) + 3 * F(3, j)) / 8;
        out[L.at(1, j)] = (3 * F(1, j) + 6 * F(2, j) - F(3, j)) / 8;
        for (int k = 2; k <= N - 3; ++k)
            out[L.at(k, j)] = (-F(k - 1, j) + 9 * F(k, j) + 9 * F(k + 1, j) - F(k + 2, j)) / 16;
        out[L.at(N - 2, j)] = (-F(N - 3, j) + 6 * F(N - 2, j) + 3 * F(N - 1, j)) / 8;
        out[L.at(N - 1, j)] = (3 * F(N - 3, j) - 10 * F(N - 2, j) + 15 * F(N - 1, j)) / 8;
    }
    return out;
}

// half rows 0 .. N-1 -> nodal rows 1 .. N-1
Rows to_nodes(const Layout& L, const Rows& H) {
    const int N = L.N;
    Rows out = L.zeros();
    auto V = [&](int k, int j) { return H[L.at(k, j)]; };
    for (int j = 0; j < L.M; ++j) {
        out[L.at(1, j)] = (3 * V(0, j) + 6 * V(1, j) - V(2, j)) / 8;
        for (int s = 2; s <= N - 2; ++s)
            out[L.at(s, j)] = (-V(s - 2, j) + 9 * V(s - 1, j) + 9 * V(s, j) - V(s + 1, j)) / 16;
        out[L.at(N - 1, j)] = (-V(N - 3, j) + 6 * V(N - 2, j) + 3 * V(N - 1, j)) / 8;
    }
    return out;
}

// finite-volume divergence of (R on half rows, T on nodal rows) at nodal rows 0 .. N-1
Rows fv_divergence(const Layout& L, const Rows& R, const Rows& T, Backend backend) {
    const auto dT = dtheta(L, T, backend);
    Rows out = L.zeros();
    double mean = 0.0;
    for (int j = 0; j < L.M; ++j) mean += R[L.at(0, j)];
    mean /= L.M;
    for (int j = 0; j < L.M; ++j) out[L.at(0, j)] = 4.0 * mean / L.h;
    for (int s = 1; s < L.N; ++s) {
        const double r = s * L.h, ro = (s + 0.5) * L.h, ri = (s - 0.5) * L.h;
        for (int j = 0; j < L.M; ++j)
            out[L.at(s, j)] = (ro * R[L.at(s, j)] - ri * R[L.at(s - 1, j)]) / (r * L.h) + dT[L.at(s, j)] / r;
    }
    return out;
}

struct Momentum {
    Rows wr, wt;
};

Momentum momentum_from(const Layout& L, const DiscVector& v0, const DiscBackground& bg) {
    Rows wr_nodes = L.zeros(), wt = L.zeros();
    const auto& g = v0.grid();
    for (int s = 1; s < L.N; ++s) {
        const double rho = bg.density(s * L.h);
        for (int j = 0; j < L.M; ++j) {
            wr_nodes[L.at(s, j)] = rho * v0[0][g.index(s - 1, j)];
            wt[L.at(s, j)] = rho * v0[1][g.index(s - 1, j)];
        }
    }
    return {to_half(L, wr_nodes), std::move(wt)};
}

// F = div w and G = div(J w), J(a, b) = (-b, a)
std::pair<Rows, Rows> potentials(const Layout& L, const Momentum& w, Backend backend) {
    auto F = fv_divergence(L, w.wr, w.wt, backend);
    auto minus = to_half(L, w.wt);
    for (auto& x : minus) x = -x;
    auto G = fv_divergence(L, minus, to_nodes(L, w.wr), backend);
    return {std::move(F), std::move(G)};
}

std::vector<std::vector<cplx>> row_spectra(const Layout& L, const Rows& a) {
    std::vector<std::vector<cplx>> out(L.N, std::vector<cplx>(L.M / 2 + 1));
    for (int s = 0; s < L.N; ++s) {
        spectral::forward(L.M, std::span<const double>(a.data() + static_cast<std::size_t>(s) * L.M, L.M), out[s]);
        for (auto& c : out[s]) c /= L.M;
    }
    return out;
}

// profile of azimuthal number n on the unknowns of its radial spectrum
std::vector<cplx> profile(const std::vector<std::vector<cplx>>& hat, int n) {
    std::vector<cplx> out;
    for (std::size_t s = (n == 0 ? 0 : 1); s < hat.size(); ++s) out.push_back(hat[s][n]);
    return out;
}

DiscScalar from_ring_spectra(const DiscGrid& g, std::vector<std::vector<cplx>> hat) {
    const int nt = g.ntheta();
    DiscScalar out(g);
    for (int i = 0; i < g.nr(); ++i) {
        for (auto& c : hat[i]) c *= nt;
        spectral::backward(nt, hat[i], out.values().subspan(g.index(i, 0), nt));
    }
    return out;
}

DiscScalar density_field(const DiscGrid& g, const DiscBackground& bg) {
    return sample(g, [&](double r, double) { return bg.density(r); });
}

// nodal rows 1 .. N-1 onto the disc rings, zero on r = 1
DiscScalar rows_to_grid(const DiscGrid& g, const Layout& L, const Rows& a) {
    DiscScalar out(g);
    for (int s = 1; s < L.N; ++s)
        for (int j = 0; j < L.M; ++j) out[g.index(s - 1, j)] = a[L.at(s, j)];
    return out;
}

}  // namespace

// Synthesis ------------------------------------------------------------------

DiscModeSolution::DiscModeSolution(const DiscVector& v0, const DiscBackground& bg, const SynthesisOptions& opt)
    : grid_(v0.grid()), bg_(bg) {
    const int nr = grid_.nr();
    const int nt = grid_.ntheta();
    const int n_max = opt.n_max < 0 ? nt / 2 - 1 : opt.n_max;
    require(n_max < nt / 2, ErrorKind::Validation, "n_max must stay below ntheta / 2");
    require(nr >= 8, ErrorKind::Validation, "disc grid needs at least 8 rings");
    const Layout L(grid_);

    const auto [F0, G0] = potentials(L, momentum_from(L, v0, bg), default_backend());
    const auto Fh = row_spectra(L, F0);
    const auto Gh = row_spectra(L, G0);

    spectra_ = parallel_map<RadialSpectrum>(static_cast<std::size_t>(n_max + 1), [&](std::size_t n) {
        return radial_spectrum(bg, static_cast<int>(n), nr);
    });

    // Residual of the truncated expansion, by Parseval in theta, plus the
    // values of div and curl of rho v0 on r = 1 that no Dirichlet mode carries.
    double total = 0.0, missed = 0.0, scale = 0.0;
    for (int n = 0; n <= nt / 2; ++n) {
        const double mult = (n == 0 || 2 * n == nt) ? 1.0 : 2.0;
        const auto pf = profile(Fh, n), pg = profile(Gh, n);
        std::vector<cplx> recF(pf.size(), 0.0), recG(pg.size(), 0.0);
        if (n <= n_max) {
            const auto& s = spectra_[n];
            const int all = static_cast<int>(s.lambda.size());
            const int kcount = opt.k_max > 0 ? std::min(opt.k_max, all) : all;
            for (int k = 0; k < kcount; ++k) {
                const ModeCoefficients x0{0.0, s.project_any(pf, k), s.project_any(pg, k)};
                for (std::size_t i = 0; i < pf.size(); ++i) {
                    recF[i] += x0.F * s.zeta[k][i];
                    recG[i] += x0.G * s.zeta[k][i];
                }
                scale = std::max({scale, std::abs(x0.F), std::abs(x0.G)});
                modes_.push_back({n, k + 1, ModeSystem(s.lambda[k], n, bg.omega, bg.c), x0});
            }
        }
        const int first = (n == 0) ? 0 : 1;
        for (std::size_t i = 0; i < pf.size(); ++i) {
            const int s = static_cast<int>(i) + first;
            const double wq = mult * (s == 0 ? L.h * L.h / 8.0 : s * L.h * L.h);
            total += wq * (std::norm(pf[i]) + std::norm(pg[i]));
            missed += wq * (std::norm(pf[i] - recF[i]) + std::norm(pg[i] - recG[i]));
        }
    }
    const auto w = density_field(grid_, bg) * v0;
    const auto Fc = divergence(w), Cc = curl(w);
    double edge = 0.0;
    for (int j = 0; j < nt; ++j)
        edge += std::pow(Fc[grid_.index(nr - 1, j)], 2) + std::pow(Cc[grid_.index(nr - 1, j)], 2);
    const double wb = 0.5 * L.h * L.h * nt;  // half cell at r = 1, theta mean times ntheta
    total = total * nt + wb * edge / nt * nt;
    missed = missed * nt + wb * edge / nt * nt;
    cls_.projection_residual = total > 0.0 ? std::sqrt(missed / total) : 0.0;
    require(cls_.projection_residual <= opt.projection_tol, ErrorKind::Projection,
            "initial data not representable by the Dirichlet modes (relative residual " +
                std::to_string(cls_.projection_residual) + "); div and curl of rho v0 must vanish on r = 1");
    cls_.modes = static_cast<int>(modes_.size());

    // Jacobi criterion: theta-average of curl(rho v0) on every ring
    double mean_max = 0.0, curl_max = 0.0;
    for (int s = 0; s < L.N; ++s) mean_max = std::max(mean_max, std::abs(Gh[s][0]));
    for (double x : G0) curl_max = std::max(curl_max, std::abs(x));
    cls_.criterion = curl_max > 0.0 ? mean_max / curl_max : 0.0;

    // excited frequencies and the zero-frequency part
    const auto& s0 = spectra_[0];
    std::vector<double> Gs(s0.r.size(), 0.0);
    cls_.min_excited_frequency = std::numeric_limits<double>::infinity();
    for (const auto& m : modes_) {
        const auto a = m.sys.amplitudes(m.x0);
        for (int q = 0; q < 3; ++q) {
            const auto& e = m.sys.eigenvectors()[q];
            const double size = std::abs(a[q]) * std::sqrt(std::norm(e[1]) + std::norm(e[2]));
            if (size <= opt.amplitude_tol * std::max(scale, 1e-300)) continue;
            const double y = m.sys.frequencies()[q];
            cls_.min_excited_frequency = std::min(cls_.min_excited_frequency, std::abs(y));
            if (y == 0.0) {
                const double amp = (a[q] * e[2]).real();
                for (std::size_t i = 0; i < Gs.size(); ++i) Gs[i] += amp * s0.zeta[m.k - 1][i];
            }
        }
    }
    if (!std::isfinite(cls_.min_excited_frequency)) cls_.min_excited_frequency = 0.0;

    // rho v_s = sgrad g_s with Delta g_s = G_s: g_s'(r) = (1/r) int_0^r s G_s ds
    vs_.assign(nr, 0.0);
    double acc = 0.0;
    Gs.push_back(0.0);  // zeta(1) = 0
    for (int i = 1; i <= nr; ++i) {
        acc += 0.5 * L.h * ((i - 1) * L.h * Gs[i - 1] + i * L.h * Gs[i]);
        vs_[i - 1] = -acc / (i * L.h) / bg.density(i * L.h);
    }
    for (double v : vs_) cls_.growth_rate = std::max(cls_.growth_rate, std::abs(v));
    cls_.bounded = cls_.criterion <= opt.growth_tol;
}

DiscModeSolution::Fields DiscModeSolution::evaluate(double t) const {
    const int nr = grid_.nr();
    const int nt = grid_.ntheta();
    std::vector<std::vector<cplx>> sh(nr, std::vector<cplx>(nt / 2 + 1)), fh = sh, gh = sh;
    for (const auto& m : modes_) {
        const auto x = m.sys.evolve(m.x0, t);
        const cplx rot = std::polar(1.0, -m.n * bg_.omega * t);
        const auto& z = spectra_[m.n].zeta[m.k - 1];
        const int off = (m.n == 0) ? 1 : 0;
        for (int i = 0; i + 1 < nr; ++i) {
            sh[i][m.n] += rot * x.sigma * z[i + off];
            fh[i][m.n] += rot * x.F * z[i + off];
            gh[i][m.n] += rot * x.G * z[i + off];
        }
    }
    return {from_ring_spectra(grid_, std::move(sh)), from_ring_spectra(grid_, std::move(fh)),
            from_ring_spectra(grid_, std::move(gh))};
}

DiscClassification synthesize_and_classify(const DiscVector& v0, const DiscBackground& bg, int k_max, int n_max) {
    SynthesisOptions opt;
    opt.k_max = k_max;
    opt.n_max = n_max;
    return DiscModeSolution(v0, bg, opt).classification();
}

DiscVector gradient_example(const DiscGrid& g, const DiscBackground& bg, int n) {
    require(n >= 0, ErrorKind::Precondition, "gradient_example: n must be nonnegative");
    DiscVector w(g);
    for (int i = 0; i < g.nr(); ++i) {
        const double r = g.r(i), s = 1.0 - r * r, rho = bg.density(r);
        for (int j = 0; j < g.ntheta(); ++j) {
            const double th = g.theta(j);
            const double fr = n == 0 ? -6.0 * r * s * s
                                     : (n * std::pow(r, n - 1) * s * s * s - 6.0 * std::pow(r, n + 1) * s * s) *
                                           std::cos(n * th);
            const double ft = n == 0 ? 0.0 : -n * std::pow(r, n - 1) * s * s * s * std::sin(n * th);
            w[0][g.index(i, j)] = fr / rho;
            w[1][g.index(i, j)] = ft / rho;
        }
    }
    return w;
}

DiscVector swirl_example(const DiscGrid& g, const DiscBackground& bg, int m) {
    require(m >= 1, ErrorKind::Precondition, "swirl_example: m must be positive");
    DiscVector w(g);
    for (int i = 0; i < g.nr(); ++i) {
        const double r = g.r(i);
        const double gr = -2.0 * m * r * std::pow(1.0 - r * r, m - 1);
        for (int j = 0; j < g.ntheta(); ++j) w[1][g.index(i, j)] = -gr / bg.density(r);
    }
    return w;
}

// Direct integration ---------------------------------------------------------

DiscLinearState DiscLinearState::initial(const DiscVector& v0, const DiscBackground& bg) {
    const Layout L(v0.grid());
    auto w = momentum_from(L, v0, bg);
    return {v0.grid(), L.zeros(), std::move(w.wr), std::move(w.wt), L.zeros(), L.zeros(), 0.0};
}

namespace {

struct Rates {
    Rows sigma, wr, wt, jr, jt;
};

Rates linear_rates(const Layout& L, const DiscLinearState& s, const DiscBackground& bg, Backend backend) {
    const double w = bg.omega, c2 = bg.c * bg.c;
    const auto div = fv_divergence(L, s.wr, s.wt, backend);
    const auto ds = dtheta(L, s.sigma, backend);
    const auto dwr = dtheta(L, s.wr, backend), dwt = dtheta(L, s.wt, backend);
    const auto djr = dtheta(L, s.jr, backend), djt = dtheta(L, s.jt, backend);
    const auto wt_half = to_half(L, s.wt), wr_nodes = to_nodes(L, s.wr);
    Rates out{L.zeros(), L.zeros(), L.zeros(), L.zeros(), L.zeros()};
    for (int row = 0; row < L.N; ++row) {
        const double rn = row * L.h;                 // node radius
        const double rho_n = bg.density(rn);
        const double rho_h = 0.5 * (bg.density(rn) + bg.density(rn + L.h));
        for (int j = 0; j < L.M; ++j) {
            const auto i = L.at(row, j);
            out.sigma[i] = -w * ds[i] - div[i];
            const double outer = (row + 1 < L.N) ? s.sigma[L.at(row + 1, j)] : 0.0;
            out.wr[i] = -w * dwr[i] + 2.0 * w * wt_half[i] - c2 * rho_h * (outer - s.sigma[i]) / L.h;
            out.jr[i] = s.wr[i] / rho_h - w * djr[i];
            if (row == 0) continue;
            out.wt[i] = -w * dwt[i] - 2.0 * w * wr_nodes[i] - c2 * rho_n * ds[i] / rn;
            out.jt[i] = s.wt[i] / rho_n - w * djt[i];
        }
    }
    return out;
}

void add_scaled(DiscLinearState& s, double a, const Rates& k) {
    auto ax = [a](Rows& y, const Rows& x) {
        for (std::size_t i = 0; i < y.size(); ++i) y[i] += a * x[i];
    };
    ax(s.sigma, k.sigma);
    ax(s.wr, k.wr);
    ax(s.wt, k.wt);
    ax(s.jr, k.jr);
    ax(s.jt, k.jt);
}

}  // namespace

DiscScalar DiscLinearState::density() const { return rows_to_grid(grid, Layout(grid), sigma); }

DiscScalar DiscLinearState::mass_divergence(Backend backend) const {
    const Layout L(grid);
    return rows_to_grid(grid, L, fv_divergence(L, wr, wt, backend));
}

double DiscLinearState::j_l2() const {
    // sum over half rows for j_r and nodal rows for j_theta, weight r dr dtheta
    const Layout L(grid);
    double s2 = 0.0;
    for (int row = 0; row < L.N; ++row)
        for (int j = 0; j < L.M; ++j) {
            s2 += (row + 0.5) * L.h * std::pow(jr[L.at(row, j)], 2);
            if (row > 0) s2 += row * L.h * std::pow(jt[L.at(row, j)], 2);
        }
    return std::sqrt(s2 * L.h * grid.dtheta());
}

double disc_step_bound(const DiscGrid& g, const DiscBackground& bg) {
    const double rho_max = std::max(bg.density(0.0), bg.density(1.0));
    const double cs = bg.c * std::sqrt(rho_max);
    const double kmax = g.ntheta() / 2.0;
    const double rate = std::abs(bg.omega) * kmax + 2.0 * std::abs(bg.omega) + cs * (kmax / g.r(0) + 2.0 / g.dr());
    return 2.0 / rate;
}

void disc_linear_step(DiscLinearState& s, const DiscBackground& bg, double dt, Backend backend) {
    require(dt > 0.0 && dt <= disc_step_bound(s.grid, bg), ErrorKind::StepSize,
            "dt exceeds the explicit stability bound of the disc grid");
    const Layout L(s.grid);
    const auto k1 = linear_rates(L, s, bg, backend);
    auto tmp = s;
    add_scaled(tmp, 0.5 * dt, k1);
    const auto k2 = linear_rates(L, tmp, bg, backend);
    tmp = s;
    add_scaled(tmp, 0.5 * dt, k2);
    const auto k3 = linear_rates(L, tmp, bg, backend);
    tmp = s;
    add_scaled(tmp, dt, k3);
    const auto k4 = linear_rates(L, tmp, bg, backend);
    add_scaled(s, dt / 6, k1);
    add_scaled(s, dt / 3, k2);
    add_scaled(s, dt / 3, k3);
    add_scaled(s, dt / 6, k4);
    s.t += dt;
}

DiscCrosscheck disc_mode_crosscheck(const DiscVector& v0, const DiscBackground& bg, double t_end, double dt,
                                    Backend backend) {
    require(t_end > 0.0, ErrorKind::Validation, "t_end must be positive");
    const DiscModeSolution sol(v0, bg);
    const auto& g = v0.grid();
    if (dt <= 0.0) dt = 0.5 * disc_step_bound(g, bg);
    const long steps = std::max<long>(1, std::lround(std::ceil(t_end / dt)));
    const double h = t_end / static_cast<double>(steps);
    auto s = DiscLinearState::initial(v0, bg);
    for (long k = 0; k < steps; ++k) disc_linear_step(s, bg, h, backend);

    const auto ref = sol.evaluate(t_end);
    const auto sig = s.density();
    const auto F = s.mass_divergence(backend);
    const auto ds = sig - ref.sigma, dF = F - ref.F;
    const double diff = integrate(ds * ds) + integrate(dF * dF);
    const double base = integrate(ref.sigma * ref.sigma) + integrate(ref.F * ref.F);
    DiscCrosscheck out;
    out.t = t_end;
    out.rel_gap = base > 0.0 ? std::sqrt(diff / base) : std::sqrt(diff);
    out.j_l2 = s.j_l2();
    return out;
}

}  // namespace bflow::disc
