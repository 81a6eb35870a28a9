#include "levylab/z_process.hpp"

#include <cmath>

#include "levylab/errors.hpp"

namespace levylab {

std::vector<double> sample_besq2(const std::vector<double>& clock_times, double start,
                                 Rng& rng) {
    std::vector<double> out;
    out.reserve(clock_times.size());
    double x = start;
    double t = 0.0;
    for (const double u : clock_times) {
        const double d = u - t;
        if (d < 0.0) throw ConfigError("clock times must be nondecreasing");
        if (d > 0.0) {
            const double n1 = rng.normal();
            const double n2 = rng.normal();
            const double a = n1 + std::sqrt(x / d);
            x = d * (a * a + n2 * n2);
            t = u;
        }
        out.push_back(x);
    }
    return out;
}

ZPath z_process(const SamplePath& env, Rng& rng) {
    const std::size_t n = env.size();
    ZPath zp;
    zp.positions = env.times;
    zp.clock.resize(n);
    double u = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        if (i > 0) {
            const double dx = env.times[i] - env.times[i - 1];
            u += dx * 0.5 * (std::exp(-env.right[i - 1]) + std::exp(-env.left[i]));
        }
        zp.clock[i] = u;
    }
    const auto r = sample_besq2(zp.clock, 0.0, rng);
    zp.z_left.resize(n);
    zp.z.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        zp.z_left[i] = std::exp(env.left[i]) * r[i];
        zp.z[i] = std::exp(env.right[i]) * r[i];
    }
    zp.occupation.resize(n);
    double occ = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        if (i > 0) {
            const double dx = env.times[i] - env.times[i - 1];
            occ += dx * 0.5 * (zp.z[i - 1] + zp.z_left[i]);
        }
        zp.occupation[i] = occ;
    }
    return zp;
}

SupArgmax sup_and_argmax(const ZPath& z) {
    SupArgmax best{0.0, 0.0};
    if (z.size() == 0) return best;
    best.m2 = z.z[0];
    best.x_star = z.positions[0];
    for (std::size_t i = 0; i < z.size(); ++i) {
        if (z.z_left[i] > best.m2) {
            best.m2 = z.z_left[i];
            best.x_star = z.positions[i];
        }
        if (z.z[i] > best.m2) {
            best.m2 = z.z[i];
            best.x_star = z.positions[i];
        }
    }
    return best;
}

PeakDuration peak_and_duration_from_valley(const ValleyFunctionals& f, Rng& rng) {
    PeakDuration pd;
    pd.e = rng.exponential(0.5);
    pd.S = f.S;
    pd.R = f.R;
    pd.peak = pd.e * pd.S;
    pd.duration = pd.e * pd.S * pd.R;
    return pd;
}

}  // namespace levylab
