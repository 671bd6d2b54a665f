#pragma once

// Linear stability of the rigidly rotating disc u = omega d/dtheta with
// p = c^2 rho^2 / 2 and the free boundary rho(1) = rho0. Perturbations are
// written through sigma, F = div(rho v) and G = -curl(rho v) = Delta g, where
// rho v = grad f + sgrad g and sgrad g = (g_theta / r, -g_r) in physical
// components. Expanding in the Dirichlet eigenfunctions of
// Lambda s = div(rho grad s) and factoring e^{in(theta - omega t)} leaves
//   sigma' = -F,  F' = c^2 lambda sigma - 2 omega G,  G' = 2 omega F + i n omega^2 sigma.

#include <array>
#include <complex>
#include <string>
#include <vector>

#include "bflow/operators.hpp"
#include "bflow/parallel.hpp"

namespace bflow::disc {

using cplx = std::complex<double>;

struct DiscBackground {
    double omega = 0.0;
    double c = 1.0;
    double rho0 = 1.0;

    /// Throws Vacuum unless rho0 > omega^2 / (2 c^2).
    DiscBackground(double omega, double c, double rho0);

    /// rho0 - omega^2 (1 - r^2) / (2 c^2)
    double density(double r) const noexcept;
    double a() const noexcept { return rho0 - omega * omega / (2.0 * c * c); }
    double b() const noexcept { return omega * omega / (2.0 * c * c); }
};

/// All Dirichlet eigenpairs of -Lambda for one azimuthal number on the radial
/// mesh r_i = i / nodes. The unknowns are r_0 = 0 .. r_{N-1} for n = 0 and
/// r_1 .. r_{N-1} otherwise; zeta vanishes at r_N = 1.
struct RadialSpectrum {
    int n = 0;
    int nodes = 0;
    std::vector<double> r;               ///< unknown radii
    std::vector<double> weight;          ///< quadrature weights for int . r dr
    std::vector<double> lambda;          ///< ascending
    std::vector<std::vector<double>> zeta;  ///< zeta[k][i], unit weighted norm

    /// Weighted inner product of a profile sampled on r with mode k.
    double project(const std::vector<double>& f, int k) const;
    template <class T>
    T project_any(const std::vector<T>& f, int k) const {
        T s{};
        for (std::size_t i = 0; i < r.size(); ++i) s += weight[i] * zeta[k][i] * f[i];
        return s;
    }
};

RadialSpectrum radial_spectrum(const DiscBackground& bg, int n, int nodes = 400);

struct EigenPair {
    int n = 0;
    int k = 1;  ///< 1-based radial index
    double lambda = 0.0;
    std::vector<double> r;     ///< includes r = 1
    std::vector<double> zeta;  ///< zeta(1) = 0
};

/// Smallest k_max eigenpairs; throws Precondition for fewer than 200 nodes.
std::vector<EigenPair> sturm_liouville_eigs(const DiscBackground& bg, int n, int k_max, int nodes = 400);

/// Real roots of y^3 - 3 p y - 2 q = 0 with p = (c^2 lambda + 4 omega^2) / 3,
/// q = n omega^3, descending. Throws Instability if q^2 >= p^3.
std::array<double, 3> characteristic_roots(double lambda, int n, double omega, double c);

struct CubicCheck {
    double p = 0.0, q = 0.0;
    double margin = 0.0;     ///< p^3 - q^2
    double vieta_sum = 0.0;  ///< |y1 + y2 + y3|
    double vieta_pair = 0.0; ///< |y1 y2 + y1 y3 + y2 y3 + 3p|
    double min_gap = 0.0;
};

CubicCheck check_roots(double lambda, int n, double omega, double c, const std::array<double, 3>& y);

/// J_n(x) from the ascending series, summed in quad precision.
double bessel_j(int n, double x);
/// First positive zero of J_n, 0 <= n <= 64.
double bessel_first_root(int n);

struct RayleighRow {
    int n = 0;
    double lambda1 = 0.0;
    double bessel_root = 0.0;
    double bound = 0.0;        ///< a c_n^2 + b (n^2 + 1)
    double margin = 0.0;       ///< lambda1 - bound
    double downstream = 0.0;   ///< c^2 lambda1 - omega^2 (3 n^{2/3} - 4)
    double arithmetic = 0.0;   ///< n^2 + 7 - 6 n^{2/3}
};

struct RayleighReport {
    std::vector<RayleighRow> rows;
    std::vector<std::string> falsifications;
    bool holds() const noexcept { return falsifications.empty(); }
};

RayleighReport rayleigh_bound_check(const DiscBackground& bg, int n_max, int nodes = 400, double tol = 0.0);

struct ModeCoefficients {
    cplx sigma{}, F{}, G{};
};

/// The 3x3 system for one (lambda, n). Frequencies y solve the cubic with q = -n omega^3;
/// solutions are sums of e^{i y t} times eigenvectors.
class ModeSystem {
public:
    ModeSystem(double lambda, int n, double omega, double c);

    const std::array<double, 3>& frequencies() const noexcept { return y_; }
    /// Coordinates of x0 in the eigenvector basis.
    std::array<cplx, 3> amplitudes(const ModeCoefficients& x0) const;
    const std::array<std::array<cplx, 3>, 3>& eigenvectors() const noexcept { return vec_; }

    ModeCoefficients evolve(const ModeCoefficients& x0, double t) const;
    ModeCoefficients evolve_rk4(const ModeCoefficients& x0, double t, int steps) const;
    ModeCoefficients rate(const ModeCoefficients& x) const;

    /// |sigma|^2 + (|F|^2 + |G|^2) / (c^2 lambda + 4 omega^2)
    double energy(const ModeCoefficients& x) const noexcept;

private:
    double lambda_, omega_, c_;
    int n_;
    std::array<double, 3> y_{};
    std::array<std::array<cplx, 3>, 3> vec_{};  // vec_[m] is the m-th eigenvector
};

ModeCoefficients mode_evolution(const ModeCoefficients& x0, double lambda, int n, double omega, double c, double t);

struct SynthesisOptions {
    int k_max = 0;                  ///< 0 keeps every radial mode
    int n_max = -1;                 ///< -1 keeps every azimuthal number below ntheta / 2
    double projection_tol = 1e-2;
    double amplitude_tol = 1e-10;   ///< relative size below which a mode counts as absent
    double growth_tol = 1e-8;
};

struct DiscClassification {
    bool bounded = true;
    double criterion = 0.0;          ///< max_r |mean_theta curl(rho v0)| / max |curl(rho v0)|
    double growth_rate = 0.0;        ///< sup of the steady azimuthal velocity driving j
    double min_excited_frequency = 0.0;  ///< min |y| over modes with nonzero amplitude
    double projection_residual = 0.0;
    int modes = 0;
};

/// Projection of (sigma, F, G)(0) = (0, div(rho v0), -curl(rho v0)) onto the
/// eigenmodes on the grid of v0, with analytic time evolution.
class DiscModeSolution {
public:
    DiscModeSolution(const DiscVector& v0, const DiscBackground& bg, const SynthesisOptions& opt = {});

    const DiscGrid& grid() const noexcept { return grid_; }
    const DiscBackground& background() const noexcept { return bg_; }
    const DiscClassification& classification() const noexcept { return cls_; }

    struct Fields {
        DiscScalar sigma, F, G;
    };
    Fields evaluate(double t) const;
    /// Azimuthal velocity of the zero-frequency part; j grows like t times it.
    const std::vector<double>& steady_velocity() const noexcept { return vs_; }

private:
    struct Mode {
        int n, k;
        ModeSystem sys;
        ModeCoefficients x0;
    };
    DiscGrid grid_;
    DiscBackground bg_;
    std::vector<RadialSpectrum> spectra_;  // index n
    std::vector<Mode> modes_;
    std::vector<double> vs_;
    DiscClassification cls_;
};

/// v0 with rho v0 = grad f, f = r^n (1 - r^2)^3 cos(n theta); div(rho v0) vanishes on r = 1.
DiscVector gradient_example(const DiscGrid& g, const DiscBackground& bg, int n);
/// v0 with rho v0 = sgrad g, g = (1 - r^2)^m, purely azimuthal.
DiscVector swirl_example(const DiscGrid& g, const DiscBackground& bg, int m);

DiscClassification synthesize_and_classify(const DiscVector& v0, const DiscBackground& bg, int k_max, int n_max);

// Direct integration of the linearized equations in w = rho v,
//   sigma_t = -omega sigma_theta - div w
//   w_t = -omega w_theta - 2 omega J w - c^2 rho grad sigma,  J(a, b) = (-b, a)
//   j_t = w / rho - omega j_theta
// with sigma = 0 on r = 1, on a radially staggered grid: sigma and w_theta at
// r = s h, w_r at (s + 1/2) h, theta spectral. Row s is ring s - 1 of the disc
// grid and row 0 the origin. Only the Coriolis term needs interpolation
// between the two radial grids.
struct DiscLinearState {
    DiscGrid grid;
    std::vector<double> sigma, wr, wt, jr, jt;  ///< nr rows of ntheta values
    double t = 0.0;

    static DiscLinearState initial(const DiscVector& v0, const DiscBackground& bg);
    /// sigma on the disc rings (zero on r = 1)
    DiscScalar density() const;
    /// div w on the disc rings, the F of the mode picture
    DiscScalar mass_divergence(Backend backend = default_backend()) const;
    double j_l2() const;
};

void disc_linear_step(DiscLinearState& s, const DiscBackground& bg, double dt, Backend backend = default_backend());
/// Explicit RK4 step limit for the grid.
double disc_step_bound(const DiscGrid& g, const DiscBackground& bg);

struct DiscCrosscheck {
    double t = 0.0;
    double rel_gap = 0.0;  ///< relative L2 gap of (sigma, F) between modes and direct integration
    double j_l2 = 0.0;
};

DiscCrosscheck disc_mode_crosscheck(const DiscVector& v0, const DiscBackground& bg, double t_end, double dt = 0.0,
                                    Backend backend = default_backend());

}  // namespace bflow::disc
