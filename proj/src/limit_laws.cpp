#include "levylab/limit_laws.hpp"

#include <algorithm>
#include <cmath>

#include "levylab/errors.hpp"
#include "levylab/parallel.hpp"
#include "levylab/sample_path.hpp"

namespace levylab {

LimitConstants make_constants(const EnvironmentSpec& spec, double K_hat) {
    LimitConstants c;
    c.kappa = spec.kappa;
    c.K = K_hat;
    c.m = spec.kappa > 1.0 ? m_constant(spec) : std::nan("");
    c.C = K_hat / spec.psi_prime_at_kappa;
    c.C_prime = std::pow(2.0, spec.kappa) * std::tgamma(spec.kappa + 1.0) * c.C;
    return c;
}

double frechet_cdf(double alpha, double s, double t) {
    if (t <= 0.0) return 0.0;
    return std::exp(-std::pow(s / t, alpha));
}

double sample_frechet(double alpha, double s, Rng& rng) {
    return s * std::pow(-std::log(rng.uniform()), -1.0 / alpha);
}

KEstimate estimate_K(const EnvironmentSpec& spec, std::size_t n, std::uint64_t seed,
                     const KEstimateOptions& opts) {
    const double depth = opts.depth > 0.0 ? opts.depth : 12.0 / spec.kappa;
    std::vector<double> powers(n);
    SimLimits limits;
    limits.max_steps = std::uint64_t{1} << 26;
    parallel_for(n, opts.workers, [&](std::size_t i) {
        Rng rng = derive_stream(seed, i);
        const double I =
            truncated_exponential_functional(spec, opts.step, depth, rng, limits);
        powers[i] = std::pow(I, spec.kappa - 1.0);
    });
    double sum = 0.0;
    for (const double p : powers) sum += p;
    const double mean = sum / static_cast<double>(n);
    double ss = 0.0;
    for (const double p : powers) ss += (p - mean) * (p - mean);
    const double se = std::sqrt(ss / (static_cast<double>(n) - 1.0)) /
                      std::sqrt(static_cast<double>(n));
    return {mean, se};
}

Theorem11Params theorem11_params(const EnvironmentSpec& spec, double K_hat) {
    if (!(spec.kappa > 1.0))
        throw KappaNotAboveOneError("theorem 1.1 parameters require kappa > 1");
    const double k = spec.kappa;
    const double m = m_constant(spec);
    return {k, 2.0 * std::pow(std::tgamma(k) * k * k * K_hat / m, 1.0 / k)};
}

double default_truncation_eps(const LimitConstants& c, double horizon, double budget) {
    const double k = c.kappa;
    return std::pow(budget * (1.0 - k) / (c.C_prime * k * horizon), 1.0 / (1.0 - k));
}

SubordinatorPath sample_bivariate_subordinator(const LimitConstants& c,
                                               const RSampler& r_sampler, double horizon,
                                               double eps, Rng& rng) {
    if (!(c.kappa > 0.0 && c.kappa < 1.0))
        throw InvalidKappaError("bivariate subordinator requires 0 < kappa < 1");
    if (!(eps > 0.0)) throw ConfigError("truncation eps must be positive");
    SubordinatorPath p;
    p.truncation_eps = eps;
    p.horizon = horizon;
    const double rate = c.C_prime * std::pow(eps, -c.kappa);
    double t = 0.0;
    for (;;) {
        t += rng.exponential(rate);
        if (t > horizon) break;
        const double jump = eps * std::pow(rng.uniform(), -1.0 / c.kappa);
        const double r = r_sampler(rng);
        p.times.push_back(t);
        p.dy1.push_back(jump);
        p.dy2.push_back(jump * r);
    }
    return p;
}

I1I2 compute_I1_I2(const SubordinatorPath& path) {
    double y2 = 0.0;
    double largest_before = 0.0;
    for (std::size_t k = 0; k < path.times.size(); ++k) {
        if (y2 + path.dy2[k] > 1.0) {
            I1I2 out;
            out.i1 = largest_before;
            out.i2 = (1.0 - y2) * (path.dy1[k] / path.dy2[k]);
            out.i = std::max(out.i1, out.i2);
            return out;
        }
        y2 += path.dy2[k];
        largest_before = std::max(largest_before, path.dy1[k]);
    }
    throw HorizonTooShort("Y2 never passed 1 within the horizon");
}

RenewalStat renewal_statistic(std::span<const Triple> triples, double t, double eta) {
    if (!(t > 0.0)) throw ConfigError("t must be positive");
    if (!(eta >= 0.0 && eta < 1.0)) throw ConfigError("eta must be in [0, 1)");
    const double target = t * (1.0 - eta);
    double sum = 0.0;
    double max_before = 0.0;
    for (std::size_t k = 0; k < triples.size(); ++k) {
        const double es = triples[k].e * triples[k].S;
        const double esr = es * triples[k].R;
        if (sum + esr > target) {
            RenewalStat out;
            out.n = k + 1;
            out.max_before = max_before / t;
            out.last_term = (1.0 - sum / t) / triples[k].R;
            out.statistic = std::max(out.max_before, out.last_term);
            return out;
        }
        sum += esr;
        max_before = std::max(max_before, es);
    }
    throw InsufficientTriples("running sum never passed t(1-eta)");
}

std::pair<std::vector<double>, std::vector<double>> partial_sum_process(
    std::span<const Triple> triples, double t, double kappa, double phi_of_t,
    std::span<const double> s_grid) {
    std::vector<double> y1(s_grid.size()), y2(s_grid.size());
    const double scale = std::exp(kappa * phi_of_t);
    double sum1 = 0.0, sum2 = 0.0;
    std::size_t used = 0;
    for (std::size_t g = 0; g < s_grid.size(); ++g) {
        const auto count = static_cast<std::size_t>(std::floor(s_grid[g] * scale));
        if (count > triples.size())
            throw InsufficientTriples("not enough triples for the requested s grid");
        while (used < count) {
            const double es = triples[used].e * triples[used].S;
            sum1 += es;
            sum2 += es * triples[used].R;
            ++used;
        }
        y1[g] = sum1 / t;
        y2[g] = sum2 / t;
    }
    return {std::move(y1), std::move(y2)};
}

TailFit tail_fit(std::vector<double> samples, double kappa) {
    if (samples.size() < 10000)
        throw ConfigError("tail fit needs at least 1e4 samples");
    std::sort(samples.begin(), samples.end());
    const std::size_t n = samples.size();
    const double x_lo = samples[static_cast<std::size_t>(0.90 * (n - 1))];
    const double x_hi = samples[static_cast<std::size_t>(0.999 * (n - 1))];

    TailFit fit;
    fit.x_lo = x_lo;
    fit.x_hi = x_hi;
    const int points = 25;
    double sum_c = 0.0;
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    for (int i = 0; i < points; ++i) {
        const double lx = std::log(x_lo) +
                          (std::log(x_hi) - std::log(x_lo)) * i / (points - 1.0);
        const double x = std::exp(lx);
        const auto above = samples.end() - std::upper_bound(samples.begin(), samples.end(), x);
        const double survival = static_cast<double>(above) / static_cast<double>(n);
        sum_c += std::pow(x, kappa) * survival;
        const double ly = std::log(survival);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    fit.c_hat = sum_c / points;
    const double slope = (points * sxy - sx * sy) / (points * sxx - sx * sx);
    fit.window_slope = -slope;
    return fit;
}

ScenarioScales scenario_scales(double t, const EnvironmentSpec& spec, double delta) {
    if (!(t > std::exp(std::exp(1.0))))
        throw ConfigError("scenario scales require t > e^e");
    ScenarioScales s;
    s.delta = delta;
    const double lt = std::log(t);
    s.phi_t = std::sqrt(lt * std::log(lt));
    s.h_t = lt - s.phi_t;
    s.n_t = static_cast<std::uint64_t>(
        std::floor(std::exp(spec.kappa * (1.0 + delta) * s.phi_t)));
    return s;
}

}  // namespace levylab
