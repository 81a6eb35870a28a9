#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <utility>
#include <vector>

#include "levylab/environment.hpp"
#include "levylab/rng.hpp"

namespace levylab {

struct LimitConstants {
    double kappa = 0.0;
    double K = 0.0;
    double m = 0.0;  // defined only when kappa > 1
    double C = 0.0;        // K / psi'(kappa)
    double C_prime = 0.0;  // 2^kappa Gamma(kappa+1) C
};

LimitConstants make_constants(const EnvironmentSpec& spec, double K_hat);

// Frechet distribution function exp(-(s/t)^alpha) for t > 0, else 0.
double frechet_cdf(double alpha, double s, double t);

// Inverse transform s * (-log U)^(-1/alpha).
double sample_frechet(double alpha, double s, Rng& rng);

struct KEstimate {
    double value = 0.0;
    double se = 0.0;
};

struct KEstimateOptions {
    double step = 0.01;
    double depth = 0.0;  // 0: default 12/kappa
    unsigned workers = 1;
};

// Monte Carlo mean of I^(kappa-1) over truncated exponential functionals,
// one derived stream per replication.
KEstimate estimate_K(const EnvironmentSpec& spec, std::size_t n, std::uint64_t seed,
                     const KEstimateOptions& opts = {});

struct Theorem11Params {
    double alpha = 0.0;
    double s = 0.0;
};

// alpha = kappa, s = 2 (Gamma(kappa) kappa^2 K / m)^(1/kappa); kappa > 1.
Theorem11Params theorem11_params(const EnvironmentSpec& spec, double K_hat);

// Ordered jump list realizing the bivariate kappa-stable subordinator: each
// Y1 jump above the truncation is paired with an independent R copy to form
// the Y2 jump.
struct SubordinatorPath {
    std::vector<double> times;
    std::vector<double> dy1;
    std::vector<double> dy2;
    double truncation_eps = 0.0;
    double horizon = 0.0;
};

using RSampler = std::function<double(Rng&)>;

// Jumps of Y1 above eps arrive at Poisson rate C' eps^-kappa with Pareto
// sizes eps U^(-1/kappa); requires 0 < kappa < 1.
SubordinatorPath sample_bivariate_subordinator(const LimitConstants& constants,
                                               const RSampler& r_sampler, double horizon,
                                               double eps, Rng& rng);

// Truncation eps such that the neglected mean Y1 mass over the horizon,
// C' kappa/(1-kappa) eps^(1-kappa) * horizon, stays below `budget`.
double default_truncation_eps(const LimitConstants& constants, double horizon,
                              double budget = 1e-3);

struct I1I2 {
    double i1 = 0.0;
    double i2 = 0.0;
    double i = 0.0;  // max of the two
};

// I1: largest Y1 jump strictly before Y2 passes 1. I2: the remaining Y2
// headroom times the dy1/dy2 ratio of the passage jump. Throws
// HorizonTooShort when the path's Y2 mass never reaches 1.
I1I2 compute_I1_I2(const SubordinatorPath& path);

struct Triple {
    double e = 0.0;
    double S = 0.0;
    double R = 0.0;
};

struct RenewalStat {
    double max_before = 0.0;
    double last_term = 0.0;
    double statistic = 0.0;
    std::size_t n = 0;  // first index with running sum e S R > t(1-eta)
};

RenewalStat renewal_statistic(std::span<const Triple> triples, double t, double eta);

// (Y1,Y2)^t(s) = (1/t) sum_{j <= floor(s e^(kappa phi))} (e_j S_j, e_j S_j R_j)
// on the given s grid.
std::pair<std::vector<double>, std::vector<double>> partial_sum_process(
    std::span<const Triple> triples, double t, double kappa, double phi_of_t,
    std::span<const double> s_grid);

struct TailFit {
    double c_hat = 0.0;        // mean of x^kappa * survival over the window
    double window_slope = 0.0; // |d log S / d log x|, should be close to kappa
    double x_lo = 0.0;
    double x_hi = 0.0;
};

// Survival-function tail fit over a log-spaced window between the 90th and
// 99.9th percentiles; requires at least 1e4 samples.
TailFit tail_fit(std::vector<double> samples, double kappa);

struct ScenarioScales {
    double phi_t = 0.0;
    double h_t = 0.0;        // log t - phi(t)
    std::uint64_t n_t = 0;   // floor(exp(kappa (1+delta) phi(t)))
    double delta = 0.0;
};

// phi(t) = sqrt(log t * log log t); requires t > e^e.
ScenarioScales scenario_scales(double t, const EnvironmentSpec& spec, double delta);

}  // namespace levylab
