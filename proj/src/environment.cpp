#include "levylab/environment.hpp"

#include <cmath>
#include <functional>

namespace levylab {

namespace {

double jump_term(const std::optional<JumpComponent>& jumps, double lambda) {
    if (!jumps) return 0.0;
    const double c = jumps->rate;
    if (jumps->law == JumpComponent::Law::exponential) {
        const double mu = jumps->param;
        return c * (1.0 / (1.0 + mu * lambda) - 1.0);
    }
    return c * (std::exp(-jumps->param * lambda) - 1.0);
}

double jump_term_derivative(const std::optional<JumpComponent>& jumps, double lambda) {
    if (!jumps) return 0.0;
    const double c = jumps->rate;
    if (jumps->law == JumpComponent::Law::exponential) {
        const double mu = jumps->param;
        const double d = 1.0 + mu * lambda;
        return -c * mu / (d * d);
    }
    const double s = jumps->param;
    return -c * s * std::exp(-s * lambda);
}

double psi_raw(double Q, double gamma, const std::optional<JumpComponent>& jumps,
               double lambda) {
    return 0.5 * Q * lambda * lambda - gamma * lambda + jump_term(jumps, lambda);
}

}  // namespace

double laplace_exponent(const EnvironmentSpec& spec, double lambda) {
    return psi_raw(spec.gaussian_coeff, spec.drift_coeff, spec.jumps, lambda);
}

double psi_derivative(const EnvironmentSpec& spec, double lambda) {
    return spec.gaussian_coeff * lambda - spec.drift_coeff +
           jump_term_derivative(spec.jumps, lambda);
}

double find_kappa(double Q, double gamma, const std::optional<JumpComponent>& jumps,
                  double tol, double lambda_max) {
    const auto psi = [&](double x) { return psi_raw(Q, gamma, jumps, x); };

    // Lower bracket: smallest step from 0 where psi is negative. psi'(0) < 0
    // for any valid drift condition, so a fine-enough step always finds one.
    double lo = 0.0;
    for (double step = 1.0 / 64.0; step > 1e-14; step *= 0.5) {
        if (psi(step) < 0.0) {
            lo = step;
            break;
        }
    }
    if (lo == 0.0) throw NoRootError("laplace exponent not negative near 0");

    double hi = lo;
    while (psi(hi) <= 0.0) {
        hi *= 2.0;
        if (hi > lambda_max) throw NoRootError("no sign change below lambda_max");
    }

    for (int i = 0; i < 200 && hi - lo > 1e-15 * hi; ++i) {
        const double mid = 0.5 * (lo + hi);
        (psi(mid) < 0.0 ? lo : hi) = mid;
    }
    const double root = 0.5 * (lo + hi);
    if (std::abs(psi(root)) > tol) throw NoRootError("root residual above tolerance");
    return root;
}

double find_kappa(const EnvironmentSpec& spec, double tol) {
    return find_kappa(spec.gaussian_coeff, spec.drift_coeff, spec.jumps, tol);
}

double m_constant(const EnvironmentSpec& spec) {
    if (spec.kappa <= 1.0)
        throw KappaNotAboveOneError("m requires kappa > 1");
    return -2.0 / laplace_exponent(spec, 1.0);
}

EnvironmentSpec EnvironmentSpec::create(double Q, double gamma,
                                        std::optional<JumpComponent> jumps, double tol) {
    if (!(Q > 0.0))
        throw ConfigError("gaussian coefficient must be positive");
    if (jumps) {
        if (!(jumps->rate > 0.0)) throw ConfigError("jump rate must be positive");
        if (!(jumps->param > 0.0)) throw ConfigError("jump magnitude must be positive");
    }
    EnvironmentSpec spec;
    spec.gaussian_coeff = Q;
    spec.drift_coeff = gamma;
    spec.jumps = jumps;
    spec.mean_slope = psi_derivative(spec, 0.0);
    if (!(spec.mean_slope < 0.0))
        throw ConfigError("potential must drift to -infinity (psi'(0) < 0)");
    spec.kappa = find_kappa(Q, gamma, jumps, tol);
    spec.psi_prime_at_kappa = psi_derivative(spec, spec.kappa);
    return spec;
}

EnvironmentSpec EnvironmentSpec::preset(const std::string& name, double tol) {
    const std::string prefix = "bm-kappa:";
    if (name.rfind(prefix, 0) == 0) {
        const double k = std::stod(name.substr(prefix.size()));
        if (!(k > 0.0)) throw ConfigError("preset kappa must be positive");
        return create(1.0, k / 2.0, std::nullopt, tol);
    }
    throw ConfigError("unknown environment preset: " + name);
}

EnvironmentSpec EnvironmentSpec::from_json(const nlohmann::json& j, double tol) {
    const double Q = j.at("Q").get<double>();
    const double gamma = j.at("gamma").get<double>();
    std::optional<JumpComponent> jumps;
    if (j.contains("jumps") && !j.at("jumps").is_null()) {
        const auto& jj = j.at("jumps");
        JumpComponent jc;
        jc.rate = jj.at("rate").get<double>();
        const std::string law = jj.at("law").get<std::string>();
        if (law == "exp") {
            jc.law = JumpComponent::Law::exponential;
        } else if (law == "fixed") {
            jc.law = JumpComponent::Law::fixed;
        } else {
            throw ConfigError("jump law must be \"exp\" or \"fixed\"");
        }
        jc.param = jj.at("param").get<double>();
        jumps = jc;
    }
    return create(Q, gamma, jumps, tol);
}

nlohmann::ordered_json EnvironmentSpec::to_json() const {
    nlohmann::ordered_json j;
    j["Q"] = gaussian_coeff;
    j["gamma"] = drift_coeff;
    if (jumps) {
        j["jumps"] = {
            {"rate", jumps->rate},
            {"law", jumps->law == JumpComponent::Law::exponential ? "exp" : "fixed"},
            {"param", jumps->param}};
    } else {
        j["jumps"] = nullptr;
    }
    return j;
}

}  // namespace levylab
