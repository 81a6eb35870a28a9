#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "doctest.h"

#include "levylab/limit_laws.hpp"
#include "levylab/stats.hpp"
#include "levylab/valleys.hpp"

using namespace levylab;

TEST_CASE("frechet cdf basics") {
    CHECK(frechet_cdf(2.0, 3.0, -1.0) == 0.0);
    CHECK(frechet_cdf(2.0, 3.0, 0.0) == 0.0);
    CHECK(frechet_cdf(2.0, 3.0, 3.0) == doctest::Approx(std::exp(-1.0)).epsilon(1e-14));
    CHECK(frechet_cdf(2.0, 3.0, 1e12) == doctest::Approx(1.0).epsilon(1e-9));
    // median of F(2, 2 sqrt 2): s / sqrt(log 2)
    const double s = 2.0 * std::sqrt(2.0);
    const double median = s / std::sqrt(std::log(2.0));
    CHECK(median == doctest::Approx(3.3972).epsilon(1e-4));
    CHECK(frechet_cdf(2.0, s, median) == doctest::Approx(0.5).epsilon(1e-12));
    // valid cdf: nondecreasing on a grid
    double prev = 0.0;
    for (double t = 0.05; t < 40.0; t += 0.05) {
        const double f = frechet_cdf(2.0, s, t);
        CHECK(f >= prev);
        prev = f;
    }
}

TEST_CASE("frechet sampler matches its own cdf and is monotone in U") {
    const double alpha = 1.7, s = 2.2;
    std::vector<double> xs(100000);
    Rng rng(900);
    for (auto& x : xs) x = sample_frechet(alpha, s, rng);
    CHECK(ks_distance(xs, [&](double t) { return frechet_cdf(alpha, s, t); }) <= 0.01);
    // inverse transform is monotone in the uniform draw
    CHECK(s * std::pow(-std::log(0.2), -1.0 / alpha) <
          s * std::pow(-std::log(0.8), -1.0 / alpha));
    // large alpha concentrates at s
    Rng rng2(901);
    for (int i = 0; i < 100; ++i)
        CHECK(std::abs(sample_frechet(400.0, s, rng2) - s) < 0.1);
}

TEST_CASE("K estimates for the drifted-Brownian family") {
    // K = 2^{kappa-1} / Gamma(kappa): 2.0 for both kappa = 2 and kappa = 3
    for (const char* preset : {"bm-kappa:2", "bm-kappa:3"}) {
        const auto env = EnvironmentSpec::preset(preset);
        KEstimateOptions opts;
        opts.workers = 2;
        const auto K = estimate_K(env, 20000, 111, opts);
        CHECK(std::abs(K.value - 2.0) <= 3.0 * K.se);
        CHECK(K.se < 0.2);
    }
}

TEST_CASE("theorem 1.1 parameters") {
    const auto w2 = EnvironmentSpec::preset("bm-kappa:2");
    const auto p = theorem11_params(w2, 2.0);  // exact K = m/2 = 2
    CHECK(p.alpha == doctest::Approx(2.0).epsilon(1e-9));
    CHECK(p.s == doctest::Approx(2.0 * std::sqrt(2.0)).epsilon(1e-9));

    // the drifted-Brownian closed form 4 (kappa^2 (kappa-1) / 8)^(1/kappa)
    const auto w3 = EnvironmentSpec::preset("bm-kappa:3");
    const double K3 = std::pow(2.0, 3.0 - 1.0) / std::tgamma(3.0);
    const auto p3 = theorem11_params(w3, K3);
    CHECK(p3.s ==
          doctest::Approx(4.0 * std::pow(9.0 * 2.0 / 8.0, 1.0 / 3.0)).epsilon(1e-9));

    // homogeneity: scaling K by 2^kappa scales s by 2
    const auto scaled = theorem11_params(w2, 2.0 * std::pow(2.0, 2.0));
    CHECK(scaled.s == doctest::Approx(2.0 * p.s).epsilon(1e-12));

    CHECK_THROWS_AS(theorem11_params(EnvironmentSpec::preset("bm-kappa:0.5"), 1.0),
                    KappaNotAboveOneError);
}

TEST_CASE("stable jump intensity integrates to the stable exponent") {
    // int_0^inf (1 - e^{-lambda x}) kappa x^{-kappa-1} dx = Gamma(1-kappa) lambda^kappa
    for (const double kappa : {0.3, 0.5, 0.7}) {
        for (const double lambda : {0.5, 1.0, 2.0}) {
            double acc = 0.0;
            const double lo = 1e-16, hi = 1e8;
            const int cells = 600000;
            const double lr = std::log(hi / lo) / cells;
            for (int i = 0; i < cells; ++i) {
                const double x0 = lo * std::exp(i * lr);
                const double x1 = lo * std::exp((i + 1) * lr);
                auto f = [&](double x) {
                    return (1.0 - std::exp(-lambda * x)) * kappa * std::pow(x, -kappa - 1.0);
                };
                acc += 0.5 * (f(x0) + f(x1)) * (x1 - x0);
            }
            const double target = std::tgamma(1.0 - kappa) * std::pow(lambda, kappa);
            CHECK(acc == doctest::Approx(target).epsilon(5e-3));
        }
    }
}

TEST_CASE("bivariate subordinator: counts, marginal and joint Laplace") {
    const auto env = EnvironmentSpec::preset("bm-kappa:0.5");
    LimitConstants c = make_constants(env, 1.0);  // C' = 2^k Gamma(k+1) K / psi'(k)
    REQUIRE(c.kappa == doctest::Approx(0.5).epsilon(1e-9));

    // deterministic R = 2 keeps every expectation in closed form
    const RSampler r2 = [](Rng&) { return 2.0; };
    const double horizon = 1.0;
    const double eps = 1e-6;
    const double expected_jumps = horizon * c.C_prime * std::pow(eps, -c.kappa);

    const std::size_t n = 20000;
    std::vector<double> counts(n), y1(n), joint(n);
    Rng rng(1000);
    for (std::size_t i = 0; i < n; ++i) {
        const auto path = sample_bivariate_subordinator(c, r2, horizon, eps, rng);
        counts[i] = static_cast<double>(path.times.size());
        double s1 = 0.0, s2 = 0.0;
        for (std::size_t k = 0; k < path.dy1.size(); ++k) {
            s1 += path.dy1[k];
            s2 += path.dy2[k];
        }
        y1[i] = std::exp(-s1);
        joint[i] = std::exp(-s1 - s2);
        if (i == 0) {
            for (std::size_t k = 0; k < path.dy1.size(); ++k) {
                CHECK(path.dy2[k] == doctest::Approx(2.0 * path.dy1[k]));
                CHECK(path.dy1[k] >= eps);
                if (k) CHECK(path.times[k] > path.times[k - 1]);
            }
        }
    }
    const double cse = sample_sd(counts) / std::sqrt(static_cast<double>(n));
    CHECK(std::abs(mean(counts) - expected_jumps) <= 3.0 * cse);

    const double trunc_bound =
        c.C_prime * c.kappa / (1.0 - c.kappa) * std::pow(eps, 1.0 - c.kappa) * horizon;
    const double target1 =
        std::exp(-c.C_prime * std::tgamma(0.5) * std::pow(1.0, c.kappa));
    CHECK(std::abs(mean(y1) - target1) <= 0.02 * target1 + trunc_bound);

    // E exp(-Y1 - Y2) = exp(-C' Gamma(1-k) E[(1+R)^k]) with R = 2
    const double target_joint =
        std::exp(-c.C_prime * std::tgamma(0.5) * std::pow(3.0, c.kappa));
    CHECK(std::abs(mean(joint) - target_joint) <= 0.02 * target_joint + trunc_bound);
}

TEST_CASE("truncation default keeps the neglected mass under budget") {
    const auto env = EnvironmentSpec::preset("bm-kappa:0.5");
    const auto c = make_constants(env, 1.6);
    const double eps = default_truncation_eps(c, 2.0, 1e-3);
    const double neglected =
        c.C_prime * c.kappa / (1.0 - c.kappa) * std::pow(eps, 1.0 - c.kappa) * 2.0;
    CHECK(neglected == doctest::Approx(1e-3).epsilon(1e-9));
    Rng rng(1);
    CHECK_THROWS_AS(
        sample_bivariate_subordinator(make_constants(EnvironmentSpec::preset("bm-kappa:2"), 1.0),
                                      [](Rng&) { return 1.0; }, 1.0, 1e-4, rng),
        InvalidKappaError);
}

TEST_CASE("I1 and I2 from explicit jump lists") {
    SubordinatorPath single;
    single.times = {0.3};
    single.dy1 = {5.0};
    single.dy2 = {2.0};
    const auto a = compute_I1_I2(single);
    CHECK(a.i1 == 0.0);
    CHECK(a.i2 == doctest::Approx(2.5).epsilon(1e-12));
    CHECK(a.i == doctest::Approx(2.5).epsilon(1e-12));

    SubordinatorPath two;
    two.times = {0.2, 0.5};
    two.dy1 = {1.0, 3.0};
    two.dy2 = {0.4, 1.5};
    const auto b = compute_I1_I2(two);
    CHECK(b.i1 == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(b.i2 == doctest::Approx(0.6 * 2.0).epsilon(1e-12));
    CHECK(b.i == doctest::Approx(1.2).epsilon(1e-12));

    SubordinatorPath short_path;
    short_path.times = {0.1};
    short_path.dy1 = {1.0};
    short_path.dy2 = {0.5};
    CHECK_THROWS_AS(compute_I1_I2(short_path), HorizonTooShort);
}

TEST_CASE("I1/I2 equals the step-function oracle on random jump lists") {
    Rng rng(1100);
    for (int trial = 0; trial < 10000; ++trial) {
        SubordinatorPath p;
        const int n = 1 + static_cast<int>(rng.uniform() * 20);
        double t = 0.0;
        for (int k = 0; k < n; ++k) {
            t += rng.exponential(1.0);
            const double j1 = std::pow(rng.uniform(), -1.2) * 0.05;
            const double r = 0.1 + 3.0 * rng.uniform();
            p.times.push_back(t);
            p.dy1.push_back(j1);
            p.dy2.push_back(j1 * r);
        }
        // oracle: materialize the step functions and apply the generalized
        // inverse definitions literally
        std::vector<double> cum1(p.dy1.size() + 1, 0.0), cum2(p.dy2.size() + 1, 0.0);
        for (std::size_t k = 0; k < p.dy1.size(); ++k) {
            cum1[k + 1] = cum1[k] + p.dy1[k];
            cum2[k + 1] = cum2[k] + p.dy2[k];
        }
        std::size_t pass = 0;
        while (pass < p.dy2.size() && cum2[pass + 1] <= 1.0) ++pass;
        if (pass == p.dy2.size()) {
            CHECK_THROWS_AS(compute_I1_I2(p), HorizonTooShort);
            continue;
        }
        double largest = 0.0;
        for (std::size_t k = 0; k < pass; ++k) largest = std::max(largest, p.dy1[k]);
        const double i2 = (1.0 - cum2[pass]) * p.dy1[pass] / p.dy2[pass];
        const auto got = compute_I1_I2(p);
        CHECK(got.i1 == largest);
        CHECK(got.i2 == doctest::Approx(i2).epsilon(1e-12));
        CHECK(got.i == std::max(got.i1, got.i2));

        // invariance: appending jumps after the passage changes nothing
        SubordinatorPath q = p;
        q.times.push_back(q.times.back() + 1.0);
        q.dy1.push_back(123.0);
        q.dy2.push_back(456.0);
        const auto got2 = compute_I1_I2(q);
        CHECK(got2.i1 == got.i1);
        CHECK(got2.i2 == got.i2);

        // scaling dy1 by lambda scales both components
        SubordinatorPath s = p;
        for (auto& v : s.dy1) v *= 3.0;
        const auto got3 = compute_I1_I2(s);
        CHECK(got3.i1 == doctest::Approx(3.0 * got.i1).epsilon(1e-12));
        CHECK(got3.i2 == doctest::Approx(3.0 * got.i2).epsilon(1e-12));
    }
}

TEST_CASE("renewal statistic: worked example and conventions") {
    // (eS, eSR) = (2,4), (1,3), (6,5) with t = 10, eta = 0
    const std::vector<Triple> triples = {
        {1.0, 2.0, 2.0}, {1.0, 1.0, 3.0}, {1.0, 6.0, 5.0 / 6.0}};
    const auto r = renewal_statistic(triples, 10.0, 0.0);
    CHECK(r.n == 3);
    CHECK(r.max_before == doctest::Approx(0.2).epsilon(1e-12));
    CHECK(r.last_term == doctest::Approx(0.36).epsilon(1e-12));
    CHECK(r.statistic == doctest::Approx(0.36).epsilon(1e-12));

    // eta putting the target below the first term: N = 1, empty max is 0
    const auto r1 = renewal_statistic(triples, 10.0, 1.0 - 4.0 / 10.0 + 1e-9);
    CHECK(r1.n == 1);
    CHECK(r1.max_before == 0.0);

    CHECK_THROWS_AS(renewal_statistic(triples, 1e9, 0.0), InsufficientTriples);
}

TEST_CASE("renewal statistic ignores triples past the passage index") {
    Rng rng(1200);
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<Triple> triples;
        for (int k = 0; k < 30; ++k)
            triples.push_back({rng.exponential(0.5), 1.0 + rng.uniform() * 4.0,
                               0.5 + rng.uniform()});
        const double t = 20.0;
        const auto base = renewal_statistic(triples, t, 0.0);
        auto shuffled = triples;
        // permute the tail beyond N
        std::reverse(shuffled.begin() + static_cast<std::ptrdiff_t>(base.n),
                     shuffled.end());
        const auto permuted = renewal_statistic(shuffled, t, 0.0);
        CHECK(permuted.statistic == base.statistic);
        CHECK(permuted.n == base.n);
    }
}

TEST_CASE("partial sums of triples") {
    const std::vector<Triple> triples = {
        {1.0, 2.0, 1.0}, {2.0, 1.0, 2.0}, {1.0, 3.0, 1.0}, {1.0, 1.0, 1.0}};
    const std::vector<double> grid = {0.0, 0.5, 1.0};
    // e^{kappa phi} = 4 with kappa = 1, phi = log 4
    const auto [y1, y2] =
        partial_sum_process(triples, 2.0, 1.0, std::log(4.0), grid);
    CHECK(y1[0] == 0.0);
    CHECK(y2[0] == 0.0);
    CHECK(y1[1] == doctest::Approx((2.0 + 2.0) / 2.0));
    CHECK(y2[1] == doctest::Approx((2.0 + 4.0) / 2.0));
    CHECK(y1[2] == doctest::Approx((2.0 + 2.0 + 3.0 + 1.0) / 2.0));
    for (std::size_t i = 1; i < y1.size(); ++i) {
        CHECK(y1[i] >= y1[i - 1]);
        CHECK(y2[i] >= y2[i - 1]);
    }
    const std::vector<double> too_far = {2.0};
    CHECK_THROWS_AS(
        partial_sum_process(triples, 2.0, 1.0, std::log(4.0), too_far),
        InsufficientTriples);
}

TEST_CASE("tail fit: exact Frechet samples recover the index and scale") {
    const double kappa = 0.8, s = 1.7;
    std::vector<double> xs(100000);
    Rng rng(1300);
    for (auto& x : xs) x = sample_frechet(kappa, s, rng);
    const auto fit = tail_fit(xs, kappa);
    // survival of Frechet is 1 - exp(-(s/x)^k) ~ s^k x^-k in the tail
    CHECK(fit.window_slope == doctest::Approx(kappa).epsilon(0.05));
    CHECK(fit.c_hat == doctest::Approx(std::pow(s, kappa)).epsilon(0.08));

    // homogeneity: scaling samples by lambda scales C by lambda^kappa
    std::vector<double> scaled = xs;
    for (auto& x : scaled) x *= 2.0;
    const auto fit2 = tail_fit(scaled, kappa);
    CHECK(fit2.c_hat == doctest::Approx(std::pow(2.0, kappa) * fit.c_hat).epsilon(0.02));

    std::vector<double> few(100, 1.0);
    CHECK_THROWS_AS(tail_fit(few, kappa), ConfigError);
}

TEST_CASE("scenario scales") {
    const auto env = EnvironmentSpec::preset("bm-kappa:0.5");
    const double delta = clamped_delta(env.kappa);
    // sandwich log log t << phi << log t over the working grid
    for (double t : {1e3, 1e4, 1e6, 1e9}) {
        const auto s = scenario_scales(t, env, delta);
        CHECK(s.phi_t > std::log(std::log(t)));
        CHECK(s.phi_t < std::log(t));
        CHECK(s.h_t > 0.0);
    }
    double prev = 0.0;
    for (double t : {1e3, 1e4, 1e5, 1e6, 1e7, 1e8, 1e9}) {
        const auto s = scenario_scales(t, env, delta);
        CHECK(s.h_t > prev);
        prev = s.h_t;
    }
    // pinned value: kappa = 1/2, clamped delta, t = 1e6
    const auto s6 = scenario_scales(1e6, env, delta);
    CHECK(s6.n_t == 40);
    CHECK_THROWS_AS(scenario_scales(2.0, env, delta), ConfigError);
}

TEST_CASE("limit constants bundle") {
    const auto env = EnvironmentSpec::preset("bm-kappa:0.5");
    const auto c = make_constants(env, 1.25);
    CHECK(c.C == doctest::Approx(1.25 / env.psi_prime_at_kappa));
    CHECK(c.C_prime ==
          doctest::Approx(std::pow(2.0, 0.5) * std::tgamma(1.5) * c.C).epsilon(1e-12));
    CHECK(c.C > 0.0);
    CHECK(std::isnan(c.m));
    const auto c2 = make_constants(EnvironmentSpec::preset("bm-kappa:2"), 2.0);
    CHECK(c2.m == 4.0);
}
