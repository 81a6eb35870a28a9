#pragma once

#include <vector>

#include "levylab/sample_path.hpp"

namespace levylab {

// Cross-check simulator for the diffusion in potential V, built from the
// driving-Brownian-motion representation X = A^{-1}(B(T^{-1})), where A is
// the scale integral of exp(V) and T the clock integral of exp(-2V(X)).
//
// The construction restarts at intermediate hitting levels: A compresses
// exponentially to the right, so a single global inversion runs out of double
// precision after a few dozen units. Restarting at hitting times is exact in
// law (strong Markov) and keeps every leg well conditioned. Within a leg the
// clock quadrature refines Brownian steps by bridge bisection wherever the
// integrand moves by more than a fixed ratio, and the leg reflects the driving
// motion at a depth where the clock weight exp(-2V) is negligible.
struct DirectOptions {
    double brownian_step = 1e-3;
    double leg_span = 10.0;     // units of x per restart
    double back_window = 4.5;   // reflecting depth behind the leg start
    double refine_ratio = 2.0;  // bridge-refine when g varies more than this
    int max_refine_depth = 48;
    double trace_step = 0.0;    // 0: record no intermediate trace
};

struct DiffusionTrace {
    std::vector<double> times;
    std::vector<double> positions;
    double hitting_time = 0.0;  // time X first reaches target_r, when hit
    bool hit_target = false;
};

// env must cover [first leg start - back_window, target_r]; use
// two_sided_environment to build one with a left wing.
DiffusionTrace simulate_diffusion_direct(const SamplePath& env, double target_r,
                                         double horizon, Rng& rng,
                                         const DirectOptions& opts = {});

// Environment covering [-left_extent, right_extent]: the right wing is a
// fresh simulation of V, the left wing realizes the two-sided extension (an
// independent copy, time reversed and negated, so V tends to +infinity at
// -infinity).
SamplePath two_sided_environment(const EnvironmentSpec& spec, double left_extent,
                                 double right_extent, double step, Rng& rng);

}  // namespace levylab
