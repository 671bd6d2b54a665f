#pragma once

#include <functional>
#include <optional>
#include <string>

namespace bflow::pressure {

/// Densities outside this range are rejected rather than extrapolated.
inline constexpr double rho_min = 1e-6;
inline constexpr double rho_max = 1e6;

/// Metric weight lambda(rho) together with everything derived from it:
///   phi = (lambda - rho lambda') / 2,   p = rho^2 phi / lambda^2,
///   psi' = p / rho^2,                   h' = p' / rho.
///
/// Power-law weights lambda = C rho^(2-gamma) (the polytropic family and the
/// fixed catalog) use closed forms throughout. A custom (lambda, lambda') pair
/// falls back to a centered difference for phi'.
class PressureModel {
public:
    using Fn = std::function<double(double)>;

    /// p = A rho^gamma, realized by lambda = ((gamma-1)/(2A)) rho^(2-gamma).
    static PressureModel polytropic(double A, double gamma);
    /// Catalog entries: "rho" (lambda = rho), "3/rho", "const" (lambda = 1/c^2).
    static PressureModel catalog(const std::string& name, double c = 1.0);
    static PressureModel custom(Fn lambda, Fn dlambda, std::string name = "custom");

    const std::string& name() const noexcept { return name_; }
    bool is_power_law() const noexcept { return power_law_; }
    /// Polytropic parameters; for lambda = rho these are A = 0, gamma = 1.
    std::optional<double> A() const noexcept;
    std::optional<double> gamma() const noexcept;

    double lambda(double rho) const;
    double dlambda(double rho) const;
    double phi(double rho) const;
    /// Analytic for power laws, centered difference with step 1e-6 rho otherwise.
    double dphi(double rho) const;
    double dphi_fd(double rho) const;
    double pressure(double rho) const;
    double dpressure(double rho) const;
    /// psi with psi' = p / rho^2, normalized so psi(rho) -> 0 as rho -> 0 when
    /// gamma > 1. Only available for power laws.
    double potential_density(double rho) const;
    /// h'(rho) = p'(rho) / rho
    double linearization_coefficient(double rho) const;
    /// x phi'(x) + phi(x)^2 / lambda(x)
    double curvature_coefficient(double x) const;
    double sound_speed(double rho) const;

private:
    PressureModel() = default;

    std::string name_;
    bool power_law_ = false;
    double C_ = 0.0;      // lambda = C rho^m
    double m_ = 0.0;
    Fn lambda_, dlambda_;
};

// Free-function spellings of the model queries.
double phi_from_lambda(const PressureModel& model, double rho);
double pressure_from_lambda(const PressureModel& model, double rho);
PressureModel lambda_for_polytropic(double A, double gamma);
double curvature_coefficient(const PressureModel& model, double x);
double potential_density(const PressureModel& model, double rho);
double linearization_coefficient(const PressureModel& model, double rho);

/// Entropy-separable pressure p(rho, s) = rho^2 phi(rho) zeta(s)^2 / lambda(rho)^2.
class EntropyPressure {
public:
    EntropyPressure(PressureModel base, PressureModel::Fn zeta)
        : base_(std::move(base)), zeta_(std::move(zeta)) {}

    const PressureModel& base() const noexcept { return base_; }
    double zeta(double s) const { return zeta_(s); }
    double pressure(double rho, double s) const;

private:
    PressureModel base_;
    PressureModel::Fn zeta_;
};

}  // namespace bflow::pressure
