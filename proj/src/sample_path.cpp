#include "levylab/sample_path.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

#include "levylab/errors.hpp"

namespace levylab {

double SamplePath::value_at(double t) const {
    const auto it = std::upper_bound(times.begin(), times.end(), t);
    if (it == times.begin()) return right.front();
    const std::size_t k = static_cast<std::size_t>(it - times.begin()) - 1;
    if (k + 1 >= times.size()) return right.back();
    const double t0 = times[k], t1 = times[k + 1];
    const double w = (t - t0) / (t1 - t0);
    return right[k] + w * (left[k + 1] - right[k]);
}

void SamplePath::to_csv(std::ostream& os) const {
    os << "t,v,is_jump\n";
    for (std::size_t i = 0; i < size(); ++i) {
        if (is_jump[i]) {
            os << times[i] << ',' << left[i] << ",1\n";
            os << times[i] << ',' << right[i] << ",1\n";
        } else {
            os << times[i] << ',' << right[i] << ",0\n";
        }
    }
}

SamplePath SamplePath::from_csv(std::istream& is) {
    SamplePath p;
    std::string line;
    std::getline(is, line);  // header
    double pending_t = 0.0, pending_v = 0.0;
    bool have_pending = false;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        std::istringstream row(line);
        std::string f0, f1, f2;
        std::getline(row, f0, ',');
        std::getline(row, f1, ',');
        std::getline(row, f2, ',');
        const double t = std::stod(f0);
        const double v = std::stod(f1);
        const bool jump = std::stoi(f2) != 0;
        if (jump) {
            if (have_pending && pending_t == t) {
                p.push_jump(t, pending_v, v);
                have_pending = false;
            } else {
                pending_t = t;
                pending_v = v;
                have_pending = true;
            }
        } else {
            p.push_grid(t, v);
        }
    }
    return p;
}

PathSimulator::PathSimulator(const EnvironmentSpec& spec, double step, Rng& rng)
    : spec_(&spec), dt_(step), rng_(&rng) {
    grid_drift_ = -spec.drift_coeff * step;
    grid_sigma_ = std::sqrt(spec.gaussian_coeff * step);
    sigma_ = std::sqrt(spec.gaussian_coeff);
    schedule_jump();
}

void PathSimulator::schedule_jump() {
    if (spec_->jumps) {
        next_jump_ = t_ + rng_->exponential(spec_->jumps->rate);
    } else {
        next_jump_ = std::numeric_limits<double>::infinity();
    }
}

double PathSimulator::draw_magnitude() {
    const auto& jc = *spec_->jumps;
    if (jc.law == JumpComponent::Law::exponential)
        return jc.param * (-std::log(rng_->uniform()));
    return jc.param;
}

PathSimulator::Breakpoint PathSimulator::next() {
    if (!origin_emitted_) {
        origin_emitted_ = true;
        return {0.0, 0.0, 0.0, false};
    }
    const double grid_t = static_cast<double>(grid_index_ + 1) * dt_;
    if (next_jump_ < grid_t) {
        const double dt = next_jump_ - t_;
        const double l =
            v_ - spec_->drift_coeff * dt + sigma_ * std::sqrt(dt) * rng_->normal();
        const double r = l - draw_magnitude();
        t_ = next_jump_;
        v_ = r;
        schedule_jump();
        return {t_, l, r, true};
    }
    double v;
    if (t_ == static_cast<double>(grid_index_) * dt_) {
        v = v_ + grid_drift_ + grid_sigma_ * rng_->normal();
    } else {
        const double dt = grid_t - t_;
        v = v_ - spec_->drift_coeff * dt + sigma_ * std::sqrt(dt) * rng_->normal();
    }
    t_ = grid_t;
    v_ = v;
    ++grid_index_;
    return {t_, v, v, false};
}

SamplePath simulate(const EnvironmentSpec& spec, double horizon, double step, Rng& rng) {
    if (!(step > 0.0) || step > horizon)
        throw ConfigError("need 0 < step <= horizon");
    SamplePath p;
    p.step = step;
    PathSimulator sim(spec, step, rng);
    for (;;) {
        const auto bp = sim.next();
        if (bp.jump) {
            p.push_jump(bp.t, bp.left, bp.right);
        } else {
            p.push_grid(bp.t, bp.right);
        }
        if (!bp.jump && bp.t >= horizon - 0.5 * step) break;
    }
    return p;
}

SamplePath running_infimum(const SamplePath& path) {
    SamplePath out;
    out.step = path.step;
    double inf = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < path.size(); ++i) {
        const double l = std::min(inf, path.left[i]);
        const double r = std::min(l, path.right[i]);
        inf = r;
        if (l != r) {
            out.push_jump(path.times[i], l, r);
        } else {
            out.push_grid(path.times[i], r);
        }
    }
    return out;
}

SamplePath reflected(const SamplePath& path) {
    SamplePath out;
    out.step = path.step;
    double inf = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < path.size(); ++i) {
        const double linf = std::min(inf, path.left[i]);
        const double rinf = std::min(linf, path.right[i]);
        inf = rinf;
        const double l = path.left[i] - linf;
        const double r = path.right[i] - rinf;
        if (path.is_jump[i]) {
            out.push_jump(path.times[i], l, r);
        } else {
            out.push_grid(path.times[i], r);
        }
    }
    return out;
}

std::optional<std::size_t> first_passage_below(const SamplePath& path, double y) {
    for (std::size_t i = 0; i < path.size(); ++i) {
        if (path.left[i] <= -y || path.right[i] <= -y) return i;
    }
    return std::nullopt;
}

double exp_integral(const SamplePath& path, double a, double b, double sign) {
    if (!(b > a)) return 0.0;
    const auto& t = path.times;
    // first breakpoint with time > a and last with time < b
    auto lo = std::upper_bound(t.begin(), t.end(), a);
    auto hi = std::lower_bound(t.begin(), t.end(), b);
    const std::size_t k0 = static_cast<std::size_t>(lo - t.begin());
    const std::size_t k1 = static_cast<std::size_t>(hi - t.begin());

    double acc = 0.0;
    double prev_t = a;
    double prev_v = path.value_at(a);
    for (std::size_t k = k0; k < k1; ++k) {
        acc += (t[k] - prev_t) * 0.5 *
               (std::exp(sign * prev_v) + std::exp(sign * path.left[k]));
        prev_t = t[k];
        prev_v = path.right[k];
    }
    double end_v;
    if (k1 < t.size() && t[k1] == b) {
        end_v = path.left[k1];
    } else {
        end_v = path.value_at(b);
    }
    acc += (b - prev_t) * 0.5 * (std::exp(sign * prev_v) + std::exp(sign * end_v));
    return acc;
}

double truncated_exponential_functional(const EnvironmentSpec& spec, double step,
                                        double depth, Rng& rng,
                                        const SimLimits& limits) {
    if (!(depth > 0.0)) throw ConfigError("depth must be positive");
    PathSimulator sim(spec, step, rng);
    auto bp = sim.next();
    double acc = 0.0;
    double prev_t = bp.t, prev_v = bp.right;
    for (std::uint64_t n = 0; n < limits.max_steps; ++n) {
        bp = sim.next();
        acc += (bp.t - prev_t) * 0.5 * (std::exp(prev_v) + std::exp(bp.left));
        if (bp.left <= -depth || bp.right <= -depth) return acc;
        prev_t = bp.t;
        prev_v = bp.right;
    }
    throw HorizonCapExceeded("no passage below -depth within step budget");
}

SamplePath time_reverse(const SamplePath& path) {
    SamplePath out;
    out.step = path.step;
    const std::size_t n = path.size();
    if (n == 0) return out;
    const double T = path.times.back();
    const double C = path.right.back();
    for (std::size_t j = 0; j < n; ++j) {
        const std::size_t i = n - 1 - j;
        const double t = T - path.times[i];
        const double l = path.right[i] - C;
        const double r = path.left[i] - C;
        if (path.is_jump[i]) {
            out.push_jump(t, l, r);
        } else {
            out.push_grid(t, r);
        }
    }
    return out;
}

}  // namespace levylab
