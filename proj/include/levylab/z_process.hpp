#pragma once

#include <vector>

#include "levylab/sample_path.hpp"
#include "levylab/valleys.hpp"

namespace levylab {

// Z(x) = exp(V(x)) * R(int_0^x exp(-V)), with R a squared Bessel process of
// dimension 2 started at 0. Sampled at the environment breakpoints; Z carries
// left/right values where V jumps (the clock is continuous across jumps).
struct ZPath {
    std::vector<double> positions;
    std::vector<double> clock;
    std::vector<double> z_left;
    std::vector<double> z;
    std::vector<double> occupation;  // int_0^x Z, trapezoid

    std::size_t size() const { return positions.size(); }
};

// Exact squared-Bessel(2) transition sampling at the given increasing times,
// from `start` at time 0: over an increment d from state x the next state is
// d * ((N1 + sqrt(x/d))^2 + N2^2).
std::vector<double> sample_besq2(const std::vector<double>& clock_times, double start,
                                 Rng& rng);

ZPath z_process(const SamplePath& env_path, Rng& rng);

struct SupArgmax {
    double m2 = 0.0;     // running maximum of Z over the window
    double x_star = 0.0; // smallest position attaining it
};

SupArgmax sup_and_argmax(const ZPath& z);

struct PeakDuration {
    double peak = 0.0;      // local-time peak at the valley bottom: e * S
    double duration = 0.0;  // time to cross the valley: e * S * R
    double e = 0.0;
    double S = 0.0;
    double R = 0.0;
};

// Draws e ~ Exp(rate 1/2) and forms the exact-model peak/duration pair for
// one valley; the triple feeds the renewal statistics.
PeakDuration peak_and_duration_from_valley(const ValleyFunctionals& f, Rng& rng);

}  // namespace levylab
