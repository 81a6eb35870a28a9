#pragma once

#include <cstdint>
#include <deque>
#include <optional>
#include <vector>

#include "levylab/sample_path.hpp"

namespace levylab {

struct HExtremum {
    enum class Kind { minimum, maximum };
    double position = 0.0;
    double value = 0.0;
    Kind kind = Kind::minimum;
};

// All h-minima and h-maxima of the path, ordered by position (a jump larger
// than 2h yields a maximum and a minimum at the same breakpoint, maximum
// first). Witness semantics at a jump breakpoint use min(left,right) for
// minima and max(left,right) for maxima; window boundaries may serve as
// witnesses but are never reported themselves.
std::vector<HExtremum> find_h_extrema(const SamplePath& path, double h);

// Quadratic-time witness-scan oracle for the same definition; the detector
// must agree with it exactly.
std::vector<HExtremum> find_h_extrema_oracle(const SamplePath& path, double h);

// One standard valley: the recursive stopping times L_prev, L_sharp, tau_h, L
// around the minimum m, plus the re-centered segment V - V(m). The stored
// segment starts at the last breakpoint at height >= h above the minimum
// (everything further left is never consumed by the valley functionals).
struct StandardValley {
    int index = 0;
    double L_prev = 0.0;
    double L_sharp = 0.0;
    double m = 0.0;
    double tau_h = 0.0;
    double L = 0.0;
    double value_at_m = 0.0;  // V at the minimum, before re-centering
    SamplePath segment;       // re-centered values, absolute positions
};

// delta default 0.25, clamped when kappa < 1 so kappa(1+3*delta) < 1.
double clamped_delta(double kappa, double requested = 0.25);

// Consumes breakpoints in time order and emits standard valleys as their
// closing time L is reached. Keeps only the breakpoints the valley record
// still needs (from the last crossing of current-minimum + h onward).
class ValleyScanner {
public:
    ValleyScanner(double h, double delta, double kappa);

    std::optional<StandardValley> feed(double t, double left, double right, bool jump);

private:
    struct Bp {
        double t;
        double left;
        double right;
        bool jump;
    };

    enum class Phase { seek_sharp, seek_ascend, seek_close };

    double h_;
    double drop_;  // exp((1-delta) kappa h)
    Phase phase_ = Phase::seek_sharp;
    int emitted_ = 0;

    std::vector<Bp> buffer_;
    std::uint64_t base_ = 0;  // global index of buffer_[0]

    struct Candidate {
        std::uint64_t idx;
        double value;  // max(left, right)
    };
    std::deque<Candidate> candidates_;  // decreasing values front to back
    std::size_t marker_ = 0;            // last candidate at or above min + h

    double valley_start_t_ = 0.0;
    double start_value_ = 0.0;
    double sharp_threshold_ = 0.0;
    double L_sharp_t_ = 0.0;
    double min_value_ = 0.0;
    double min_t_ = 0.0;
    double tau_t_ = 0.0;
    double close_threshold_ = 0.0;
    bool started_ = false;

    void push(double t, double l, double r, bool jump);
    void prune();
    StandardValley emit(double L_t);
    void begin_valley(const Bp& at);
};

// Simulates forward and returns `count` consecutive standard valleys.
// limits.max_steps bounds the breakpoints spent on any single valley.
std::vector<StandardValley> build_standard_valleys(const EnvironmentSpec& spec, double h,
                                                   double delta, int count, double step,
                                                   Rng& rng, const SimLimits& limits = {});

// Same scan applied to an already materialized path; returns the valleys that
// close within the path.
std::vector<StandardValley> valleys_from_path(const SamplePath& path, double h,
                                              double delta, double kappa);

// Last position left of m with re-centered value >= a (set-supremum
// semantics: a jump whose left side reaches a counts). a = 0 gives m.
double tau_minus(const StandardValley& valley, double a);

// First position right of m where the re-centered value equals a; ascents
// have no positive jumps, so the level is hit exactly (interpolated between
// breakpoints). a = 0 gives m, a = h gives tau_h.
double tau_plus(const StandardValley& valley, double a);

struct ValleyFunctionals {
    double A_of_L = 0.0;  // int_m^L exp(V~)
    double S = 0.0;       // int_{tau+(h/2)}^L exp(V~)
    double R = 0.0;       // int_{tau-(h/2)}^{tau+(h/2)} exp(-V~)
};

ValleyFunctionals valley_functionals(const StandardValley& valley, double h);

struct FirstAscend {
    double m_star = 0.0;
    double tau_star = 0.0;
};

// First time the reflected process V - inf V reaches h, and the position of
// the infimum before it. O(1) memory; the window extends until the event.
FirstAscend first_ascend(const EnvironmentSpec& spec, double h, double step, Rng& rng,
                         const SimLimits& limits = {});

// Ascending slope [m, tau_h] of a fresh standard valley, re-centered to start
// at 0; equal in law to V conditioned to stay positive, killed at h.
SamplePath sample_V_up_killed(const EnvironmentSpec& spec, double h, double step,
                              Rng& rng, const SimLimits& limits = {});

struct WeightedSlope {
    SamplePath path;
    double weight = 1.0;  // proportional to 1 - exp(-kappa * end value)
};

// Descending slope [tau_2^-(h), m_2] of the second standard valley, reversed
// and re-centered, with the self-normalizing importance weight that converts
// slope law into the law of the dual conditioned to stay positive.
WeightedSlope sample_V_hat_up_killed(const EnvironmentSpec& spec, double h, double step,
                                     Rng& rng, const SimLimits& limits = {});

// Exponential functional of the bottom of a fresh first standard valley:
// int exp(-V~) over [tau-(h/2), tau+(h/2)]. For large h this samples the
// limit variable R.
double sample_R(const EnvironmentSpec& spec, double h, double step, Rng& rng,
                const SimLimits& limits = {});

}  // namespace levylab
