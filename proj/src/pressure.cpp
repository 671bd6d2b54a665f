#include "bflow/pressure.hpp"

#include <cmath>

#include "bflow/error.hpp"

namespace bflow::pressure {
namespace {

void check_density(double rho) {
    if (!(rho > 0.0)) fail(ErrorKind::Domain, "density must be positive, got " + std::to_string(rho));
    if (rho < rho_min || rho > rho_max)
        fail(ErrorKind::Domain, "density " + std::to_string(rho) + " outside working range [1e-6, 1e6]");
}

}  // namespace

PressureModel PressureModel::polytropic(double A, double gamma) {
    require(A > 0.0, ErrorKind::Validation, "polytropic A must be positive");
    require(gamma > 1.0, ErrorKind::Unsupported, "polytropic gamma must exceed 1");
    PressureModel m;
    m.name_ = "polytropic";
    m.power_law_ = true;
    m.C_ = (gamma - 1.0) / (2.0 * A);
    m.m_ = 2.0 - gamma;
    return m;
}

PressureModel PressureModel::catalog(const std::string& name, double c) {
    PressureModel m;
    m.power_law_ = true;
    m.name_ = name;
    if (name == "rho") {
        m.C_ = 1.0;
        m.m_ = 1.0;
    } else if (name == "3/rho") {
        m.C_ = 3.0;
        m.m_ = -1.0;
    } else if (name == "const") {
        require(c > 0.0, ErrorKind::Validation, "sound speed c must be positive");
        m.C_ = 1.0 / (c * c);
        m.m_ = 0.0;
    } else {
        fail(ErrorKind::Unsupported, "unknown lambda catalog entry '" + name + "'");
    }
    return m;
}

PressureModel PressureModel::custom(Fn lambda, Fn dlambda, std::string name) {
    require(static_cast<bool>(lambda) && static_cast<bool>(dlambda), ErrorKind::Validation,
            "custom model needs lambda and lambda'");
    PressureModel m;
    m.name_ = std::move(name);
    m.lambda_ = std::move(lambda);
    m.dlambda_ = std::move(dlambda);
    return m;
}

std::optional<double> PressureModel::gamma() const noexcept {
    if (!power_law_) return std::nullopt;
    return 2.0 - m_;
}

std::optional<double> PressureModel::A() const noexcept {
    if (!power_law_) return std::nullopt;
    return (1.0 - m_) / (2.0 * C_);
}

double PressureModel::lambda(double rho) const {
    check_density(rho);
    const double v = power_law_ ? C_ * std::pow(rho, m_) : lambda_(rho);
    require(v > 0.0, ErrorKind::Domain, "lambda must be positive");
    return v;
}

double PressureModel::dlambda(double rho) const {
    check_density(rho);
    return power_law_ ? C_ * m_ * std::pow(rho, m_ - 1.0) : dlambda_(rho);
}

double PressureModel::phi(double rho) const {
    if (power_law_) {
        check_density(rho);
        return 0.5 * C_ * (1.0 - m_) * std::pow(rho, m_);
    }
    return 0.5 * (lambda(rho) - rho * dlambda(rho));
}

double PressureModel::dphi_fd(double rho) const {
    check_density(rho);
    const double h = 1e-6 * rho;
    return (phi(rho + h) - phi(rho - h)) / (2.0 * h);
}

double PressureModel::dphi(double rho) const {
    if (!power_law_) return dphi_fd(rho);
    check_density(rho);
    return 0.5 * C_ * (1.0 - m_) * m_ * std::pow(rho, m_ - 1.0);
}

double PressureModel::pressure(double rho) const {
    if (power_law_) {
        check_density(rho);
        return (1.0 - m_) / (2.0 * C_) * std::pow(rho, 2.0 - m_);
    }
    const double l = lambda(rho);
    return rho * rho * phi(rho) / (l * l);
}

double PressureModel::dpressure(double rho) const {
    if (power_law_) {
        check_density(rho);
        return (1.0 - m_) * (2.0 - m_) / (2.0 * C_) * std::pow(rho, 1.0 - m_);
    }
    const double l = lambda(rho);
    const double f = phi(rho);
    return (2.0 * rho * f + rho * rho * dphi(rho)) / (l * l) - 2.0 * rho * rho * f * dlambda(rho) / (l * l * l);
}

double PressureModel::potential_density(double rho) const {
    require(power_law_, ErrorKind::Unsupported, "potential density needs a power-law model");
    check_density(rho);
    const double a = *A();
    if (a == 0.0) return 0.0;
    const double g = 2.0 - m_;
    return a * std::pow(rho, g - 1.0) / (g - 1.0);
}

double PressureModel::linearization_coefficient(double rho) const {
    return dpressure(rho) / rho;
}

double PressureModel::curvature_coefficient(double x) const {
    if (power_law_) {
        check_density(x);
        // phi (3 - gamma)/2 with phi = C (gamma-1) x^(2-gamma) / 2; exact zero at gamma = 3
        const double g = 2.0 - m_;
        return 0.25 * C_ * (g - 1.0) * (3.0 - g) * std::pow(x, m_);
    }
    const double f = phi(x);
    return x * dphi(x) + f * f / lambda(x);
}

double PressureModel::sound_speed(double rho) const {
    return std::sqrt(std::max(0.0, dpressure(rho)));
}

double phi_from_lambda(const PressureModel& model, double rho) { return model.phi(rho); }
double pressure_from_lambda(const PressureModel& model, double rho) { return model.pressure(rho); }
PressureModel lambda_for_polytropic(double A, double gamma) { return PressureModel::polytropic(A, gamma); }
double curvature_coefficient(const PressureModel& model, double x) { return model.curvature_coefficient(x); }
double potential_density(const PressureModel& model, double rho) { return model.potential_density(rho); }
double linearization_coefficient(const PressureModel& model, double rho) {
    return model.linearization_coefficient(rho);
}

double EntropyPressure::pressure(double rho, double s) const {
    const double z = zeta_(s);
    return base_.pressure(rho) * z * z;
}

}  // namespace bflow::pressure
