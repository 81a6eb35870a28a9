#include "levylab/diffusion_direct.hpp"

#include <algorithm>
#include <cmath>

#include "levylab/errors.hpp"

namespace levylab {

SamplePath two_sided_environment(const EnvironmentSpec& spec, double left_extent,
                                 double right_extent, double step, Rng& rng) {
    const SamplePath wing = simulate(spec, left_extent, step, rng);
    const SamplePath main = simulate(spec, right_extent, step, rng);
    SamplePath out;
    out.step = step;
    // left wing: V(-x) = -W(x), jump sides swapped so the result is cadlag
    for (std::size_t j = wing.size(); j-- > 1;) {
        if (wing.is_jump[j]) {
            out.push_jump(-wing.times[j], -wing.right[j], -wing.left[j]);
        } else {
            out.push_grid(-wing.times[j], -wing.right[j]);
        }
    }
    for (std::size_t i = 0; i < main.size(); ++i) {
        if (main.is_jump[i]) {
            out.push_jump(main.times[i], main.left[i], main.right[i]);
        } else {
            out.push_grid(main.times[i], main.right[i]);
        }
    }
    return out;
}

namespace {

// One leg of the construction: scale integral re-centered at x0, inverted by
// binary search, clock integrand evaluated through the inverse.
class Leg {
public:
    Leg(const SamplePath& env, double x0, double lo, double hi) {
        const double v0 = env.value_at(x0);
        append(env, lo, x0, v0);
        // index of x0 within the arrays
        origin_ = xs_.size() - 1;
        append(env, x0, hi, v0);
        const double a0 = as_[origin_];
        for (auto& a : as_) a -= a0;
    }

    double a_lo() const { return as_.front(); }
    double a_hi() const { return as_.back(); }

    double position_at(double a) const {
        const auto it = std::upper_bound(as_.begin(), as_.end(), a);
        std::size_t k = static_cast<std::size_t>(it - as_.begin());
        if (k == 0) return xs_.front();
        if (k >= as_.size()) return xs_.back();
        const double w = (a - as_[k - 1]) / (as_[k] - as_[k - 1]);
        return xs_[k - 1] + w * (xs_[k] - xs_[k - 1]);
    }

    // clock integrand exp(-2 V~(X(a))) via the local scale slope
    double g(double a) const {
        const auto it = std::upper_bound(as_.begin(), as_.end(), a);
        std::size_t k = static_cast<std::size_t>(it - as_.begin());
        if (k == 0) k = 1;
        if (k >= as_.size()) k = as_.size() - 1;
        const double w = (a - as_[k - 1]) / (as_[k] - as_[k - 1]);
        const double v = vs_[k - 1] + w * (vs_[k] - vs_[k - 1]);
        return std::exp(-2.0 * v);
    }

private:
    void append(const SamplePath& env, double from, double to, double v0) {
        if (xs_.empty()) {
            xs_.push_back(from);
            vs_.push_back(env.value_at(from) - v0);
            as_.push_back(0.0);
        }
        const auto begin = std::upper_bound(env.times.begin(), env.times.end(), from);
        const auto end = std::lower_bound(env.times.begin(), env.times.end(), to);
        for (auto it = begin; it != end; ++it) {
            const std::size_t i = static_cast<std::size_t>(it - env.times.begin());
            push_point(env.times[i], env.left[i] - v0, env.right[i] - v0);
        }
        push_point(to, env.value_at(to) - v0, env.value_at(to) - v0);
    }

    void push_point(double x, double vl, double vr) {
        const double dx = x - xs_.back();
        if (dx <= 0.0 && vl == vs_.back()) return;
        const double da = dx * 0.5 * (std::exp(vs_.back()) + std::exp(vl));
        as_.push_back(as_.back() + da);
        xs_.push_back(x);
        vs_.push_back(vr);
    }

    std::vector<double> xs_, vs_, as_;
    std::size_t origin_ = 0;
};

}  // namespace

DiffusionTrace simulate_diffusion_direct(const SamplePath& env, double target_r,
                                         double horizon, Rng& rng,
                                         const DirectOptions& opts) {
    if (env.times.front() > -opts.back_window || env.times.back() < target_r)
        throw ConfigError("environment does not cover the requested range");

    DiffusionTrace trace;
    double x0 = 0.0;
    double elapsed = 0.0;
    double next_trace = opts.trace_step > 0.0 ? opts.trace_step : horizon + 1.0;

    const double du = opts.brownian_step;

    while (elapsed < horizon) {
        const double hi = std::min(x0 + opts.leg_span, target_r);
        const double lo = std::max(x0 - opts.back_window, env.times.front());
        Leg leg(env, x0, lo, hi);
        const double a_hi = leg.a_hi();
        const double a_lo = leg.a_lo();

        double b = 0.0;
        bool leg_done = false;
        while (!leg_done && elapsed < horizon) {
            double b2 = b + std::sqrt(du) * rng.normal();
            double step_u = du;
            if (b2 < a_lo) b2 = 2.0 * a_lo - b2;  // reflecting floor
            if (b2 >= a_hi) {
                // pro-rate the step to the crossing
                step_u = du * (a_hi - b) / (b2 - b);
                b2 = a_hi;
                leg_done = true;
            }

            // bridge-refined trapezoid for the clock increment
            double dt = 0.0;
            struct Frame {
                double b1, b2, u;
                int depth;
            };
            std::vector<Frame> stack{{b, b2, step_u, 0}};
            while (!stack.empty()) {
                const Frame f = stack.back();
                stack.pop_back();
                const double g1 = leg.g(f.b1), g2 = leg.g(f.b2);
                const double ratio = g1 > g2 ? g1 / g2 : g2 / g1;
                if (ratio <= opts.refine_ratio || f.depth >= opts.max_refine_depth) {
                    dt += f.u * 0.5 * (g1 + g2);
                    continue;
                }
                double bm = 0.5 * (f.b1 + f.b2);
                if (!(f.b1 == f.b2)) bm += 0.5 * std::sqrt(f.u) * rng.normal();
                if (bm < a_lo) bm = 2.0 * a_lo - bm;
                if (bm > a_hi) bm = a_hi;
                stack.push_back({f.b1, bm, 0.5 * f.u, f.depth + 1});
                stack.push_back({bm, f.b2, 0.5 * f.u, f.depth + 1});
            }

            while (elapsed + dt >= next_trace && next_trace <= horizon) {
                trace.times.push_back(next_trace);
                trace.positions.push_back(leg.position_at(b2));
                next_trace += opts.trace_step;
            }
            elapsed += dt;
            b = b2;
        }

        if (leg_done) {
            x0 = hi;
            if (x0 >= target_r) {
                trace.hit_target = true;
                trace.hitting_time = elapsed;
                return trace;
            }
        }
    }
    return trace;
}

}  // namespace levylab
