#include "levylab/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "levylab/diffusion_direct.hpp"
#include "levylab/errors.hpp"
#include "levylab/parallel.hpp"
#include "levylab/sample_path.hpp"
#include "levylab/stats.hpp"
#include "levylab/valleys.hpp"
#include "levylab/z_process.hpp"

namespace levylab {

namespace {

constexpr std::uint64_t kSampleRowCap = 1000000;

nlohmann::ordered_json config_echo(const ExperimentConfig& c) {
    nlohmann::ordered_json j;
    j["scenario"] = c.scenario;
    j["env"] = c.env.to_json();
    j["env_label"] = c.env_label;
    j["seed"] = c.seed;
    j["reps"] = c.reps;
    if (c.r > 0.0) j["r"] = c.r;
    if (c.t > 0.0) j["t"] = c.t;
    if (c.h > 0.0) j["h"] = c.h;
    j["step"] = c.step;
    if (c.delta > 0.0) j["delta"] = c.delta;
    if (c.eps > 0.0) j["eps"] = c.eps;
    if (c.eta > 0.0) j["eta"] = c.eta;
    if (c.scenario == "crosscheck-direct") j["du"] = c.du;
    if (c.scenario == "decompose") j["count"] = c.count;
    if (c.within_path) j["within_path"] = true;
    return j;
}

nlohmann::ordered_json summary_json(const std::vector<double>& values,
                                    double ks, const std::string& target,
                                    double threshold, bool pass,
                                    const std::vector<std::string>& caveats) {
    nlohmann::ordered_json s;
    s["n"] = values.size();
    s["mean"] = mean(values);
    nlohmann::ordered_json q;
    for (const double p : {0.01, 0.05, 0.25, 0.50, 0.75, 0.95, 0.99}) {
        std::ostringstream key;
        key << "p" << static_cast<int>(std::lround(p * 100));
        q[key.str()] = quantile(values, p);
    }
    s["quantiles"] = q;
    if (ks >= 0.0) s["ks_distance"] = ks;
    s["target_law"] = target;
    if (threshold > 0.0) {
        s["threshold"] = threshold;
        s["pass"] = pass;
    }
    s["caveats"] = caveats;
    return s;
}

void write_samples_csv(const std::string& dir, const std::string& name,
                       const std::string& header,
                       const std::vector<std::vector<double>>& rows) {
    std::ofstream os(dir + "/" + name);
    os << header << "\n";
    std::uint64_t written = 0;
    for (std::size_t i = 0; i < rows.size() && written < kSampleRowCap; ++i, ++written) {
        os << i;
        for (const double v : rows[i]) os << ',' << v;
        os << "\n";
    }
}

SimLimits generous_limits() {
    SimLimits limits;
    limits.max_steps = std::uint64_t{1} << 28;
    return limits;
}

struct ZObservables {
    double m2, x_star, occupation;
};

std::vector<ZObservables> run_z_observables(const ExperimentConfig& c) {
    std::vector<ZObservables> out(c.reps);
    parallel_for(c.reps, c.workers, [&](std::size_t i) {
        Rng rng = derive_stream(c.seed, i);
        const SamplePath env = simulate(c.env, c.r, c.step, rng);
        const ZPath z = z_process(env, rng);
        const auto sup = sup_and_argmax(z);
        out[i] = {sup.m2, sup.x_star, z.occupation.back()};
    });
    return out;
}

double thm1_K(const ExperimentConfig& c) {
    // kappa = 2 makes K = m/2 exact; otherwise estimate it.
    if (std::abs(c.env.kappa - 2.0) < 1e-9) return 0.5 * m_constant(c.env);
    KEstimateOptions opts;
    opts.workers = c.workers;
    return estimate_K(c.env, 50000, c.seed ^ 0x9e3779b97f4a7c15ULL, opts).value;
}

ExperimentReport run_thm1(const ExperimentConfig& c) {
    const double m = m_constant(c.env);
    const double K = thm1_K(c);
    const auto params = theorem11_params(c.env, K);
    const auto obs = run_z_observables(c);
    const double norm = std::pow(m * c.r, 1.0 / c.env.kappa);
    std::vector<double> values(c.reps);
    for (std::size_t i = 0; i < obs.size(); ++i) values[i] = obs[i].m2 / norm;
    const double ks = ks_distance(
        values, [&](double x) { return frechet_cdf(params.alpha, params.s, x); });
    const double threshold = c.r >= 400.0 ? 0.05 : 0.08;

    ExperimentReport rep;
    rep.passed = ks <= threshold;
    rep.json = config_echo(c);
    std::ostringstream target;
    target << "Frechet(alpha=" << params.alpha << ", s=" << params.s
           << ") for sup Z / (m r)^(1/kappa)";
    rep.json["summary"] = summary_json(
        values, ks, target.str(), threshold, rep.passed,
        {"left-half local-time contribution neglected; the exact-supremum event "
         "probability tends to 1 with r"});
    rep.json["constants"] = {{"kappa", c.env.kappa}, {"m", m}, {"K", K}};

    if (!c.out_dir.empty() && c.dump_samples) {
        std::vector<std::vector<double>> rows(c.reps);
        for (std::size_t i = 0; i < obs.size(); ++i) rows[i] = {values[i]};
        write_samples_csv(c.out_dir, "samples.csv", "replication,value", rows);
        std::vector<std::vector<double>> orows(c.reps);
        for (std::size_t i = 0; i < obs.size(); ++i)
            orows[i] = {c.r, obs[i].m2, obs[i].x_star, obs[i].occupation};
        write_samples_csv(c.out_dir, "observables.csv",
                          "replication,r,M2,x_star,occupation", orows);
    }
    return rep;
}

ExperimentReport run_thm2(const ExperimentConfig& c) {
    const auto obs = run_z_observables(c);
    std::vector<double> values(c.reps);
    for (std::size_t i = 0; i < obs.size(); ++i) values[i] = obs[i].x_star / c.r;
    const double ks = ks_distance(values, [](double x) {
        return x <= 0.0 ? 0.0 : (x >= 1.0 ? 1.0 : x);
    });
    const double threshold = 0.06;
    ExperimentReport rep;
    rep.passed = ks <= threshold;
    rep.json = config_echo(c);
    rep.json["summary"] = summary_json(
        values, ks, "Uniform[0,1] for argmax Z / r", threshold, rep.passed,
        {"favorite-site observable uses the positive-side supremum only"});
    if (!c.out_dir.empty() && c.dump_samples) {
        std::vector<std::vector<double>> rows(c.reps);
        for (std::size_t i = 0; i < obs.size(); ++i) rows[i] = {values[i]};
        write_samples_csv(c.out_dir, "samples.csv", "replication,value", rows);
        std::vector<std::vector<double>> orows(c.reps);
        for (std::size_t i = 0; i < obs.size(); ++i)
            orows[i] = {c.r, obs[i].m2, obs[i].x_star, obs[i].occupation};
        write_samples_csv(c.out_dir, "observables.csv",
                          "replication,r,M2,x_star,occupation", orows);
    }
    return rep;
}

// Renewal statistic over freshly generated valley triples for one stream.
double renewal_statistic_sample(const EnvironmentSpec& spec, double h, double delta,
                                double t, double eta, double step, Rng& rng,
                                const SimLimits& limits) {
    ValleyScanner scanner(h, delta, spec.kappa);
    PathSimulator sim(spec, step, rng);
    std::vector<Triple> triples;
    const double target = t * (1.0 - eta);
    double sum = 0.0;
    std::uint64_t steps = 0;
    while (sum <= target) {
        const auto bp = sim.next();
        if (auto v = scanner.feed(bp.t, bp.left, bp.right, bp.jump)) {
            const auto f = valley_functionals(*v, h);
            const double e = rng.exponential(0.5);
            triples.push_back({e, f.S, f.R});
            sum += e * f.S * f.R;
            steps = 0;
        } else if (++steps > limits.max_steps) {
            throw HorizonCapExceeded("valley generation exceeded step budget");
        }
    }
    return renewal_statistic(triples, t, eta).statistic;
}

ExperimentReport run_thm3(const ExperimentConfig& c) {
    if (!(c.env.kappa < 1.0))
        throw ConfigError("thm3-kappa-lt-1 requires an environment with kappa < 1");
    const double delta = clamped_delta(c.env.kappa, c.delta > 0.0 ? c.delta : 0.25);
    const auto scales = scenario_scales(c.t, c.env, delta);
    const SimLimits limits = generous_limits();

    // pipeline A: renewal statistic over valley triples at scale (h_t, n_t)
    std::vector<double> stat_a(c.reps);
    parallel_for(c.reps, c.workers, [&](std::size_t i) {
        Rng rng = derive_stream(c.seed, i);
        stat_a[i] = renewal_statistic_sample(c.env, scales.h_t, delta, c.t, c.eta,
                                             c.step, rng, limits);
    });

    // pipeline B: direct I via the bivariate subordinator with R drawn from a
    // bank of valley-bottom functionals at the same height
    std::vector<double> bank(c.reps);
    parallel_for(c.reps, c.workers, [&](std::size_t i) {
        Rng rng = derive_stream(c.seed ^ 0x5bf03635ULL, i);
        bank[i] = sample_R(c.env, scales.h_t, c.step, rng, limits);
    });
    KEstimateOptions kopts;
    kopts.workers = c.workers;
    kopts.step = c.step;
    const auto K = estimate_K(c.env, 50000, c.seed ^ 0xa5a5a5a5ULL, kopts);
    const auto constants = make_constants(c.env, K.value);

    std::vector<double> stat_b(c.reps);
    parallel_for(c.reps, c.workers, [&](std::size_t i) {
        Rng rng = derive_stream(c.seed ^ 0x2c1b3c6dULL, i);
        const RSampler r_sampler = [&bank](Rng& r) {
            const std::size_t k = static_cast<std::size_t>(r.uniform() * bank.size());
            return bank[std::min(k, bank.size() - 1)];
        };
        double horizon = 1.0 / (constants.C_prime * std::tgamma(1.0 - constants.kappa));
        for (;;) {
            const double eps = c.eps > 0.0
                                   ? c.eps
                                   : default_truncation_eps(constants, horizon);
            const auto path =
                sample_bivariate_subordinator(constants, r_sampler, horizon, eps, rng);
            try {
                stat_b[i] = compute_I1_I2(path).i;
                break;
            } catch (const HorizonTooShort&) {
                horizon *= 2.0;
            }
        }
    });

    const double ks = ks_distance_two_sample(stat_a, stat_b);
    const double threshold = 0.10;
    ExperimentReport rep;
    rep.passed = ks <= threshold;
    rep.json = config_echo(c);
    rep.json["scales"] = {{"phi_t", scales.phi_t},
                          {"h_t", scales.h_t},
                          {"n_t", scales.n_t},
                          {"delta", delta}};
    rep.json["constants"] = {{"kappa", constants.kappa},
                             {"K_hat", constants.K},
                             {"K_se", K.se},
                             {"C_hat", constants.C},
                             {"C_prime_hat", constants.C_prime}};
    rep.json["summary"] = summary_json(
        stat_a, ks, "two-sample agreement: renewal statistic vs max(I1, I2)",
        threshold, rep.passed,
        {"finite-t consistency check between the two law-equivalent routes"});
    nlohmann::ordered_json b;
    b["n"] = stat_b.size();
    b["mean"] = mean(stat_b);
    rep.json["pipeline_b"] = b;
    if (!c.out_dir.empty() && c.dump_samples) {
        std::vector<std::vector<double>> rows(c.reps);
        for (std::size_t i = 0; i < c.reps; ++i) rows[i] = {stat_a[i], stat_b[i]};
        write_samples_csv(c.out_dir, "samples.csv", "replication,value,direct_i", rows);
    }
    return rep;
}

ExperimentReport run_thm4(const ExperimentConfig& c) {
    const SimLimits limits = generous_limits();
    const double scale = std::exp(-c.env.kappa * c.h);
    std::vector<double> values(c.reps);
    std::vector<std::string> caveats;
    if (c.within_path) {
        // consecutive standard-valley minima of a single path; asymptotically
        // iid spacings
        Rng rng = derive_stream(c.seed, 0);
        const double delta = clamped_delta(c.env.kappa, c.delta > 0.0 ? c.delta : 0.25);
        const auto valleys =
            build_standard_valleys(c.env, c.h, delta, static_cast<int>(c.reps) + 1,
                                   c.step, rng, limits);
        for (std::size_t i = 0; i + 1 < valleys.size(); ++i)
            values[i] = scale * (valleys[i + 1].m - valleys[i].m);
        caveats.push_back(
            "within-path spacings are iid only asymptotically; independent "
            "replications are the default mode");
    } else {
        parallel_for(c.reps, c.workers, [&](std::size_t i) {
            Rng rng = derive_stream(c.seed, i);
            values[i] = scale * first_ascend(c.env, c.h, c.step, rng, limits).m_star;
        });
    }

    double rate;
    std::string target;
    if (!c.env.jumps) {
        rate = 0.5 * c.env.kappa * c.env.kappa;
        std::ostringstream t;
        t << "Exp(rate " << rate << ") for exp(-kappa h) m*(h)";
        target = t.str();
    } else {
        rate = 1.0 / mean(values);
        target = "Exp(fitted rate): exponentiality-only check for jump environments";
        caveats.push_back("spacing rate is only asserted for Brownian presets");
    }
    const double ks =
        ks_distance(values, [rate](double x) { return x <= 0.0 ? 0.0 : 1.0 - std::exp(-rate * x); });
    const double threshold = c.h >= 7.0 ? 0.07 : (c.h >= 5.0 ? 0.08 : 0.10);
    ExperimentReport rep;
    rep.passed = ks <= threshold;
    rep.json = config_echo(c);
    rep.json["summary"] = summary_json(values, ks, target, threshold, rep.passed, caveats);
    if (!c.out_dir.empty() && c.dump_samples) {
        std::vector<std::vector<double>> rows(values.size());
        for (std::size_t i = 0; i < values.size(); ++i) rows[i] = {values[i]};
        write_samples_csv(c.out_dir, "samples.csv", "replication,value", rows);
    }
    return rep;
}

ExperimentReport run_tails(const ExperimentConfig& c) {
    const double depth = 12.0 / c.env.kappa;
    std::vector<double> samples(c.reps);
    const SimLimits limits = generous_limits();
    parallel_for(c.reps, c.workers, [&](std::size_t i) {
        Rng rng = derive_stream(c.seed, i);
        samples[i] = truncated_exponential_functional(c.env, c.step, depth, rng, limits);
    });
    const auto fit = tail_fit(samples, c.env.kappa);

    ExperimentReport rep;
    rep.json = config_echo(c);
    double target_c = 0.0;
    bool have_target = false;
    if (!c.env.jumps && c.env.gaussian_coeff == 1.0) {
        target_c = std::pow(2.0, c.env.kappa) / std::tgamma(c.env.kappa + 1.0);
        have_target = true;
        rep.passed = std::abs(fit.c_hat - target_c) <= 0.10 * target_c;
    }
    nlohmann::ordered_json t;
    t["C_hat"] = fit.c_hat;
    t["window_slope"] = fit.window_slope;
    t["x_lo"] = fit.x_lo;
    t["x_hi"] = fit.x_hi;
    if (have_target) {
        t["C_closed_form"] = target_c;
        t["threshold_rel"] = 0.10;
        t["pass"] = rep.passed;
    }
    rep.json["tail"] = t;
    rep.json["summary"] = summary_json(
        samples, -1.0, "power tail x^-kappa of the exponential functional", 0.0, true,
        {"survival-window estimate; slope diagnostic should sit near kappa"});
    if (!c.out_dir.empty() && c.dump_samples) {
        std::vector<std::vector<double>> rows(samples.size());
        for (std::size_t i = 0; i < samples.size(); ++i) rows[i] = {samples[i]};
        write_samples_csv(c.out_dir, "samples.csv", "replication,value", rows);
    }
    return rep;
}

ExperimentReport run_constants(const ExperimentConfig& c) {
    KEstimateOptions opts;
    opts.workers = c.workers;
    opts.step = c.step;
    const auto K = estimate_K(c.env, c.reps, c.seed, opts);
    const auto constants = make_constants(c.env, K.value);
    ExperimentReport rep;
    rep.json = config_echo(c);
    nlohmann::ordered_json j;
    j["kappa"] = constants.kappa;
    j["K_hat"] = K.value;
    j["K_se"] = K.se;
    if (c.env.kappa > 1.0) j["m"] = constants.m;
    j["C_hat"] = constants.C;
    j["C_prime_hat"] = constants.C_prime;
    rep.json["constants"] = j;
    return rep;
}

ExperimentReport run_decompose(const ExperimentConfig& c) {
    const double delta = clamped_delta(c.env.kappa, c.delta > 0.0 ? c.delta : 0.25);
    std::vector<StandardValley> valleys;
    if (!c.path_file.empty()) {
        std::ifstream is(c.path_file);
        if (!is) throw ConfigError("cannot open path file: " + c.path_file);
        const SamplePath path = SamplePath::from_csv(is);
        valleys = valleys_from_path(path, c.h, delta, c.env.kappa);
    } else {
        Rng rng = derive_stream(c.seed, 0);
        valleys = build_standard_valleys(c.env, c.h, delta, c.count, c.step, rng,
                                         generous_limits());
    }
    ExperimentReport rep;
    rep.json = config_echo(c);
    rep.json["valleys"] = valleys.size();
    std::vector<double> r_values;
    nlohmann::ordered_json lines = nlohmann::ordered_json::array();
    for (const auto& v : valleys) {
        const auto f = valley_functionals(v, c.h);
        r_values.push_back(f.R);
        nlohmann::ordered_json line;
        line["i"] = v.index;
        line["L_prev"] = v.L_prev;
        line["L_sharp"] = v.L_sharp;
        line["m"] = v.m;
        line["tau_h"] = v.tau_h;
        line["L"] = v.L;
        line["A"] = f.A_of_L;
        line["S"] = f.S;
        line["R"] = f.R;
        lines.push_back(line);
    }
    if (!r_values.empty()) {
        rep.json["summary"] =
            summary_json(r_values, -1.0, "bottom functional R per valley", 0.0, true, {});
    }
    if (!c.out_dir.empty()) {
        std::ofstream os(c.out_dir + "/valleys.jsonl");
        for (const auto& line : lines) os << line.dump() << "\n";
    }
    return rep;
}

ExperimentReport run_crosscheck(const ExperimentConfig& c) {
    const double m = m_constant(c.env);
    std::vector<double> values(c.reps);
    parallel_for(c.reps, c.workers, [&](std::size_t i) {
        Rng rng = derive_stream(c.seed, i);
        DirectOptions opts;
        opts.brownian_step = c.du;
        const SamplePath env =
            two_sided_environment(c.env, opts.back_window + 2.0, c.r + 1.0, c.step, rng);
        const auto trace =
            simulate_diffusion_direct(env, c.r, 1e18, rng, opts);
        values[i] = trace.hitting_time / (m * c.r);
    });
    const double avg = mean(values);
    const double threshold = 0.15;
    ExperimentReport rep;
    rep.passed = std::abs(avg - 1.0) <= threshold;
    rep.json = config_echo(c);
    rep.json["summary"] = summary_json(
        values, -1.0, "H(r)/(m r) should concentrate near 1", threshold, rep.passed,
        {"driving-motion construction restarted at hitting levels; quadrature "
         "refined by bridge bisection"});
    return rep;
}

void validate(const ExperimentConfig& c) {
    const auto& s = c.scenario;
    auto require = [&](bool ok, const std::string& msg) {
        if (!ok) throw ConfigError(s + ": " + msg);
    };
    if (s != "decompose") require(c.reps >= 1, "reps must be >= 1");
    require(c.step > 0.0, "step must be positive");
    if (s == "thm1-frechet" || s == "thm2-favorite-site")
        require(c.r > 0.0, "needs --r");
    if (s == "thm1-frechet") require(c.env.kappa > 1.0, "needs kappa > 1");
    if (s == "thm3-kappa-lt-1") {
        require(c.t > std::exp(std::exp(1.0)), "needs --t above e^e");
        require(c.env.kappa < 1.0, "needs kappa < 1");
    }
    if (s == "thm4-h-minima" || s == "decompose") require(c.h > 0.0, "needs --h");
    if (s == "tails") require(c.reps >= 10000, "tail fit needs >= 1e4 reps");
    if (s == "crosscheck-direct") {
        require(c.r > 0.0, "needs --r");
        require(c.env.kappa > 1.0, "needs kappa > 1 for the m-normalized check");
    }
}

}  // namespace

std::vector<std::string> known_scenarios() {
    return {"thm1-frechet", "thm2-favorite-site", "thm3-kappa-lt-1", "thm4-h-minima",
            "tails",        "constants",          "decompose",       "crosscheck-direct"};
}

ExperimentReport run(const ExperimentConfig& config) {
    const auto names = known_scenarios();
    if (std::find(names.begin(), names.end(), config.scenario) == names.end())
        throw ConfigError("unknown scenario: " + config.scenario);
    validate(config);
    if (!config.out_dir.empty())
        std::filesystem::create_directories(config.out_dir);

    ExperimentReport rep;
    try {
        if (config.scenario == "thm1-frechet") rep = run_thm1(config);
        else if (config.scenario == "thm2-favorite-site") rep = run_thm2(config);
        else if (config.scenario == "thm3-kappa-lt-1") rep = run_thm3(config);
        else if (config.scenario == "thm4-h-minima") rep = run_thm4(config);
        else if (config.scenario == "tails") rep = run_tails(config);
        else if (config.scenario == "constants") rep = run_constants(config);
        else if (config.scenario == "decompose") rep = run_decompose(config);
        else rep = run_crosscheck(config);
    } catch (const HorizonCapExceeded& e) {
        throw HorizonCapExceeded(std::string(e.what()) + " (scenario " +
                                 config.scenario + ")");
    }

    if (!config.out_dir.empty()) {
        std::ofstream os(config.out_dir + "/report.json");
        os << rep.json.dump(2) << "\n";
    }
    return rep;
}

}  // namespace levylab
