#pragma once

#include <optional>
#include <string>

#include "levylab/errors.hpp"

#include "json.hpp"

namespace levylab {

// Negative compound-Poisson jump component. Magnitudes are drawn from the
// configured law and applied with a negative sign.
struct JumpComponent {
    enum class Law { exponential, fixed };
    double rate = 0.0;   // arrivals per unit time
    Law law = Law::exponential;
    double param = 1.0;  // mean magnitude (exponential) or fixed size

    double mean_magnitude() const {
        return param;  // both laws: Exp(mean param) and the atom at param
    }
};

// The law of the potential V: Gaussian coefficient Q, continuous drift -gamma,
// optional negative jumps. kappa and its companions are solved once at
// construction and cached. Immutable afterwards, safe to share across threads.
struct EnvironmentSpec {
    double gaussian_coeff = 1.0;  // Q > 0
    double drift_coeff = 0.0;     // gamma; the continuous drift of V is -gamma
    std::optional<JumpComponent> jumps;

    // derived cache
    double kappa = 0.0;
    double psi_prime_at_kappa = 0.0;
    double mean_slope = 0.0;  // psi'(0) < 0

    static EnvironmentSpec create(double Q, double gamma,
                                  std::optional<JumpComponent> jumps = std::nullopt,
                                  double tol = 1e-10);
    // "bm-kappa:<v>" gives Q=1, gamma=v/2, no jumps.
    static EnvironmentSpec preset(const std::string& name, double tol = 1e-10);

    static EnvironmentSpec from_json(const nlohmann::json& j, double tol = 1e-10);
    nlohmann::ordered_json to_json() const;
};

// Laplace exponent psi(lambda) = Q lambda^2 / 2 - gamma lambda + J(lambda),
// with the closed-form jump term of the configured family. Jumps are not
// compensated; gamma is the effective continuous drift.
double laplace_exponent(const EnvironmentSpec& spec, double lambda);

// Analytic derivative of the closed-form psi.
double psi_derivative(const EnvironmentSpec& spec, double lambda);

// Positive root of the convex psi by bracketing bisection. The lower bracket
// steps up from 0 until psi < 0, the upper doubles until psi > 0.
// Throws NoRootError if no sign change appears below lambda_max.
double find_kappa(double Q, double gamma, const std::optional<JumpComponent>& jumps,
                  double tol = 1e-10, double lambda_max = 64.0);
double find_kappa(const EnvironmentSpec& spec, double tol = 1e-10);

// m = -2 / psi(1); requires kappa > 1 so that psi(1) < 0.
double m_constant(const EnvironmentSpec& spec);

}  // namespace levylab
