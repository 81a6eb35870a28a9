#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <vector>

#include "levylab/environment.hpp"
#include "levylab/rng.hpp"

namespace levylab {

// Discretized cadlag trajectory: uniform time grid plus exact jump events
// inserted as extra breakpoints. At a jump breakpoint `left` is the value an
// instant before the jump and `right` the value after; elsewhere they agree.
struct SamplePath {
    double step = 0.0;
    std::vector<double> times;
    std::vector<double> left;
    std::vector<double> right;
    std::vector<std::uint8_t> is_jump;

    std::size_t size() const { return times.size(); }
    void push_grid(double t, double v) {
        times.push_back(t);
        left.push_back(v);
        right.push_back(v);
        is_jump.push_back(0);
    }
    void push_jump(double t, double l, double r) {
        times.push_back(t);
        left.push_back(l);
        right.push_back(r);
        is_jump.push_back(1);
    }

    // Linear interpolation of the right-continuous value at time t.
    double value_at(double t) const;

    void to_csv(std::ostream& os) const;
    static SamplePath from_csv(std::istream& is);
};

struct SimLimits {
    // Step budget for stopping-time driven simulation; the window keeps
    // doubling until the event occurs or this many breakpoints were emitted.
    std::uint64_t max_steps = std::uint64_t{1} << 20;
};

// Incremental simulator of V: Gaussian increments with variance Q dt, drift
// -gamma dt, jump times as exact exponential inter-arrivals inserted between
// grid points. Emits breakpoints one at a time in time order.
class PathSimulator {
public:
    struct Breakpoint {
        double t;
        double left;
        double right;
        bool jump;
    };

    PathSimulator(const EnvironmentSpec& spec, double step, Rng& rng);

    // First call returns the origin (0, 0); subsequent calls advance.
    Breakpoint next();

    double current_time() const { return t_; }
    double current_value() const { return v_; }

private:
    const EnvironmentSpec* spec_;
    double dt_;
    Rng* rng_;
    double t_ = 0.0;
    double v_ = 0.0;
    std::uint64_t grid_index_ = 0;
    double next_jump_ = 0.0;
    bool origin_emitted_ = false;
    double grid_drift_ = 0.0;  // -gamma dt for a full cell
    double grid_sigma_ = 0.0;  // sqrt(Q dt) for a full cell
    double sigma_ = 0.0;

    void schedule_jump();
    double draw_magnitude();
};

SamplePath simulate(const EnvironmentSpec& spec, double horizon, double step, Rng& rng);

// Pointwise running minimum (jump left/right values included); nonincreasing.
SamplePath running_infimum(const SamplePath& path);

// V minus its running infimum; nonnegative, hits 0 at new-infimum breakpoints.
SamplePath reflected(const SamplePath& path);

// First breakpoint with value <= -y (left or right side); jumps may overshoot.
std::optional<std::size_t> first_passage_below(const SamplePath& path, double y);

// Trapezoidal integral of exp(sign * V) over [a, b], with V linear between
// breakpoints, both sides honored at jumps and interpolated partial end cells.
double exp_integral(const SamplePath& path, double a, double b, double sign);

// Trapezoidal integral of exp(V) up to the first passage of the running
// infimum below -depth; the simulation window auto-extends until passage.
double truncated_exponential_functional(const EnvironmentSpec& spec, double step,
                                        double depth, Rng& rng,
                                        const SimLimits& limits = {});

// Time reversal pivoted at the right endpoint, re-centered to start at 0:
// out(x) = V((T-x)-sided) - V(T), with jump sides swapped. Realizes dual
// slope segments; down jumps of the input become up jumps of the output.
SamplePath time_reverse(const SamplePath& path);

}  // namespace levylab
