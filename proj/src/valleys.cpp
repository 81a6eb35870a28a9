#include "levylab/valleys.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "levylab/errors.hpp"

namespace levylab {

namespace {

// Sample view: one entry per grid breakpoint, two per jump (the left limit
// first) so jump sides act as witnesses in position order.
struct SampleSeq {
    std::vector<double> values;
    std::vector<std::size_t> bp;
    std::vector<std::size_t> low_entry;   // entry holding min(l, r) of each bp
    std::vector<std::size_t> high_entry;  // entry holding max(l, r)

    explicit SampleSeq(const SamplePath& p) {
        for (std::size_t i = 0; i < p.size(); ++i) {
            const bool two = p.is_jump[i] && p.left[i] != p.right[i];
            if (two) {
                values.push_back(p.left[i]);
                bp.push_back(i);
            }
            values.push_back(p.right[i]);
            bp.push_back(i);
            const std::size_t r = values.size() - 1;
            const std::size_t l = two ? r - 1 : r;
            low_entry.push_back(p.left[i] < p.right[i] ? l : r);
            high_entry.push_back(p.left[i] > p.right[i] ? l : r);
        }
    }
};

}  // namespace

std::vector<HExtremum> find_h_extrema(const SamplePath& path, double h) {
    std::vector<HExtremum> out;
    if (path.size() < 2 || !(h > 0.0)) return out;
    const SampleSeq seq(path);
    const std::size_t first_bp = 0, last_bp = path.size() - 1;

    int dir = 0;
    double min_v = seq.values[0], max_v = seq.values[0];
    std::size_t min_bp = 0, max_bp = 0;

    auto record = [&](std::size_t b, double v, HExtremum::Kind kind) {
        if (b == first_bp || b == last_bp) return;
        out.push_back({path.times[b], v, kind});
    };

    for (std::size_t s = 1; s < seq.values.size(); ++s) {
        const double v = seq.values[s];
        const std::size_t b = seq.bp[s];
        if (dir == 0) {
            if (v > max_v) {
                max_v = v;
                max_bp = b;
            }
            if (v < min_v) {
                min_v = v;
                min_bp = b;
            }
            // The pending extremum of the first move has no far-side witness,
            // so the first confirmation only sets the direction.
            if (v - min_v >= h) {
                dir = 1;
                max_v = v;
                max_bp = b;
            } else if (max_v - v >= h) {
                dir = -1;
                min_v = v;
                min_bp = b;
            }
        } else if (dir > 0) {
            if (v > max_v) {
                max_v = v;
                max_bp = b;
            }
            if (max_v - v >= h) {
                record(max_bp, max_v, HExtremum::Kind::maximum);
                dir = -1;
                min_v = v;
                min_bp = b;
            }
        } else {
            if (v < min_v) {
                min_v = v;
                min_bp = b;
            }
            if (v - min_v >= h) {
                record(min_bp, min_v, HExtremum::Kind::minimum);
                dir = 1;
                max_v = v;
                max_bp = b;
            }
        }
    }
    return out;
}

std::vector<HExtremum> find_h_extrema_oracle(const SamplePath& path, double h) {
    std::vector<HExtremum> out;
    if (path.size() < 2 || !(h > 0.0)) return out;
    const SampleSeq seq(path);
    const std::size_t n = seq.values.size();

    // sign = +1 probes minima (candidate value min(l,r), witnesses above),
    // sign = -1 probes maxima on the mirrored path.
    auto qualifies = [&](std::size_t b, double sign) {
        const std::size_t cs = sign > 0 ? seq.low_entry[b] : seq.high_entry[b];
        const double vx = seq.values[cs];
        // left walk: interval must stay on the candidate's side of vx,
        // strictly until the witness (first-extremum tie rule); the witness
        // needs sign * (w - vx) >= h
        bool left_ok = false;
        for (std::size_t s = cs; s-- > 0;) {
            const double w = sign * seq.values[s];
            if (w >= sign * vx + h) {
                left_ok = true;
                break;
            }
            if (w <= sign * vx) return false;
        }
        if (!left_ok) return false;
        for (std::size_t s = cs + 1; s < n; ++s) {
            const double w = sign * seq.values[s];
            if (w >= sign * vx + h) return true;
            if (w < sign * vx) return false;
        }
        return false;
    };

    for (std::size_t b = 1; b + 1 < path.size(); ++b) {
        if (qualifies(b, -1.0)) {
            out.push_back({path.times[b], std::max(path.left[b], path.right[b]),
                           HExtremum::Kind::maximum});
        }
        if (qualifies(b, +1.0)) {
            out.push_back({path.times[b], std::min(path.left[b], path.right[b]),
                           HExtremum::Kind::minimum});
        }
    }
    return out;
}

double clamped_delta(double kappa, double requested) {
    if (kappa < 1.0)
        return 0.9 * std::min(requested, (1.0 / kappa - 1.0) / 3.0);
    return requested;
}

ValleyScanner::ValleyScanner(double h, double delta, double kappa) : h_(h) {
    if (!(h > 0.0)) throw ConfigError("valley height must be positive");
    if (!(delta > 0.0 && delta < 0.5)) throw ConfigError("delta must be in (0, 1/2)");
    drop_ = std::exp((1.0 - delta) * kappa * h);
    if (drop_ < h) throw ConfigError("need exp((1-delta) kappa h) >= h");
}

void ValleyScanner::push(double t, double l, double r, bool jump) {
    buffer_.push_back({t, l, r, jump});
    const double w = std::max(l, r);
    const std::uint64_t idx = base_ + buffer_.size() - 1;
    while (!candidates_.empty() && candidates_.back().value <= w)
        candidates_.pop_back();
    candidates_.push_back({idx, w});
    if (marker_ >= candidates_.size()) marker_ = candidates_.size() - 1;
}

void ValleyScanner::prune() {
    // Last breakpoint at height >= current minimum + h; everything before it
    // can never be needed again (the level only decreases with the minimum,
    // so the marker moves forward only).
    const double level = min_value_ + h_;
    while (marker_ + 1 < candidates_.size() && candidates_[marker_ + 1].value >= level)
        ++marker_;
    if (candidates_.empty() || candidates_[marker_].value < level) return;
    while (marker_ > 0) {
        candidates_.pop_front();
        --marker_;
    }
    const std::uint64_t first_needed = candidates_.front().idx;
    if (first_needed > base_ && first_needed - base_ > buffer_.size() / 2) {
        buffer_.erase(buffer_.begin(),
                      buffer_.begin() + static_cast<std::ptrdiff_t>(first_needed - base_));
        base_ = first_needed;
    }
}

void ValleyScanner::begin_valley(const Bp& at) {
    buffer_.clear();
    candidates_.clear();
    base_ = 0;
    marker_ = 0;
    buffer_.push_back(at);
    candidates_.push_back({0, std::max(at.left, at.right)});
    valley_start_t_ = at.t;
    start_value_ = at.right;
    sharp_threshold_ = at.right - drop_;
    min_value_ = at.right;
    min_t_ = at.t;
    phase_ = Phase::seek_sharp;
}

StandardValley ValleyScanner::emit(double L_t) {
    StandardValley v;
    v.index = ++emitted_;
    v.L_prev = valley_start_t_;
    v.L_sharp = L_sharp_t_;
    v.m = min_t_;
    v.tau_h = tau_t_;
    v.L = L_t;
    v.value_at_m = min_value_;
    v.segment.step = 0.0;
    v.segment.times.reserve(buffer_.size());
    for (const auto& bp : buffer_) {
        if (bp.jump) {
            v.segment.push_jump(bp.t, bp.left - min_value_, bp.right - min_value_);
        } else {
            v.segment.push_grid(bp.t, bp.right - min_value_);
        }
    }
    return v;
}

std::optional<StandardValley> ValleyScanner::feed(double t, double left, double right,
                                                  bool jump) {
    if (!started_) {
        started_ = true;
        begin_valley({t, left, right, jump});
        return std::nullopt;
    }

    if (phase_ == Phase::seek_ascend && left - min_value_ >= h_) {
        // Ascents are continuous (no positive jumps), so the level is hit
        // exactly; place the crossing breakpoint by linear interpolation.
        const Bp& prev = buffer_.back();
        const double target = min_value_ + h_;
        if (left == target && !jump) {
            push(t, left, right, jump);
            tau_t_ = t;
        } else if (t == prev.t) {
            tau_t_ = t;  // degenerate cell, keep previous breakpoint as tau
        } else {
            const double w = (target - prev.right) / (left - prev.right);
            const double ts = prev.t + w * (t - prev.t);
            if (ts < t) push(ts, target, target, false);
            push(t, left, right, jump);
            tau_t_ = ts < t ? ts : t;
        }
        close_threshold_ = min_value_ + 0.5 * h_;
        phase_ = Phase::seek_close;
        // fall through: the same breakpoint may already close the valley
        if (std::min(left, right) <= close_threshold_) {
            const auto valley = emit(t);
            begin_valley({t, left, right, jump});
            return valley;
        }
        return std::nullopt;
    }

    push(t, left, right, jump);

    switch (phase_) {
        case Phase::seek_sharp:
            if (right < min_value_) {
                min_value_ = right;
                min_t_ = t;
            }
            prune();
            if (std::min(left, right) <= sharp_threshold_) {
                L_sharp_t_ = t;
                phase_ = Phase::seek_ascend;
            }
            break;
        case Phase::seek_ascend:
            if (right < min_value_) {
                min_value_ = right;
                min_t_ = t;
            }
            prune();
            break;
        case Phase::seek_close:
            if (std::min(left, right) <= close_threshold_) {
                const auto valley = emit(t);
                begin_valley(buffer_.back());
                return valley;
            }
            break;
    }
    return std::nullopt;
}

std::vector<StandardValley> build_standard_valleys(const EnvironmentSpec& spec, double h,
                                                   double delta, int count, double step,
                                                   Rng& rng, const SimLimits& limits) {
    std::vector<StandardValley> out;
    out.reserve(static_cast<std::size_t>(count));
    ValleyScanner scanner(h, delta, spec.kappa);
    PathSimulator sim(spec, step, rng);
    std::uint64_t steps_this_valley = 0;
    while (out.size() < static_cast<std::size_t>(count)) {
        const auto bp = sim.next();
        if (auto v = scanner.feed(bp.t, bp.left, bp.right, bp.jump)) {
            out.push_back(std::move(*v));
            steps_this_valley = 0;
        } else if (++steps_this_valley > limits.max_steps) {
            throw HorizonCapExceeded("valley did not close within step budget");
        }
    }
    return out;
}

std::vector<StandardValley> valleys_from_path(const SamplePath& path, double h,
                                              double delta, double kappa) {
    std::vector<StandardValley> out;
    ValleyScanner scanner(h, delta, kappa);
    for (std::size_t i = 0; i < path.size(); ++i) {
        if (auto v = scanner.feed(path.times[i], path.left[i], path.right[i],
                                  path.is_jump[i] != 0)) {
            out.push_back(std::move(*v));
        }
    }
    return out;
}

double tau_minus(const StandardValley& valley, double a) {
    if (a <= 0.0) return valley.m;
    const auto& seg = valley.segment;
    const auto it = std::upper_bound(seg.times.begin(), seg.times.end(), valley.m);
    std::size_t k = static_cast<std::size_t>(it - seg.times.begin());
    while (k-- > 0) {
        if (seg.times[k] >= valley.m) continue;
        if (std::max(seg.left[k], seg.right[k]) >= a) return seg.times[k];
    }
    return seg.times.front();
}

double tau_plus(const StandardValley& valley, double a) {
    if (a <= 0.0) return valley.m;
    const auto& seg = valley.segment;
    auto it = std::lower_bound(seg.times.begin(), seg.times.end(), valley.m);
    std::size_t k = static_cast<std::size_t>(it - seg.times.begin());
    for (; k < seg.size(); ++k) {
        if (seg.times[k] <= valley.m) continue;
        if (seg.right[k - 1] <= a && a <= seg.left[k]) {
            if (seg.left[k] == seg.right[k - 1]) return seg.times[k];
            const double w = (a - seg.right[k - 1]) / (seg.left[k] - seg.right[k - 1]);
            return seg.times[k - 1] + w * (seg.times[k] - seg.times[k - 1]);
        }
        if (seg.right[k] == a) return seg.times[k];
        if (seg.times[k] >= valley.tau_h) break;
    }
    return valley.tau_h;
}

ValleyFunctionals valley_functionals(const StandardValley& valley, double h) {
    const double tp = tau_plus(valley, 0.5 * h);
    const double tm = tau_minus(valley, 0.5 * h);
    ValleyFunctionals f;
    const double bottom = exp_integral(valley.segment, valley.m, tp, +1.0);
    f.S = exp_integral(valley.segment, tp, valley.L, +1.0);
    f.A_of_L = bottom + f.S;
    f.R = exp_integral(valley.segment, tm, tp, -1.0);
    return f;
}

FirstAscend first_ascend(const EnvironmentSpec& spec, double h, double step, Rng& rng,
                         const SimLimits& limits) {
    if (!(h > 0.0)) throw ConfigError("h must be positive");
    PathSimulator sim(spec, step, rng);
    auto bp = sim.next();
    double min_v = bp.right, min_t = bp.t;
    double prev_t = bp.t, prev_r = bp.right;
    for (std::uint64_t n = 0; n < limits.max_steps; ++n) {
        bp = sim.next();
        if (bp.left - min_v >= h) {
            const double target = min_v + h;
            double ts = bp.t;
            if (bp.left > target && bp.t > prev_t) {
                const double w = (target - prev_r) / (bp.left - prev_r);
                ts = prev_t + w * (bp.t - prev_t);
            }
            return {min_t, ts};
        }
        if (bp.right < min_v) {
            min_v = bp.right;
            min_t = bp.t;
        }
        prev_t = bp.t;
        prev_r = bp.right;
    }
    throw HorizonCapExceeded("no ascend of h within step budget");
}

namespace {

// Copies segment breakpoints with positions in [a, b], shifting time to start
// at 0 and values by -offset.
SamplePath slice_segment(const SamplePath& seg, double a, double b, double offset) {
    SamplePath out;
    out.step = seg.step;
    for (std::size_t i = 0; i < seg.size(); ++i) {
        if (seg.times[i] < a || seg.times[i] > b) continue;
        if (seg.is_jump[i]) {
            out.push_jump(seg.times[i] - a, seg.left[i] - offset, seg.right[i] - offset);
        } else {
            out.push_grid(seg.times[i] - a, seg.right[i] - offset);
        }
    }
    return out;
}

}  // namespace

SamplePath sample_V_up_killed(const EnvironmentSpec& spec, double h, double step,
                              Rng& rng, const SimLimits& limits) {
    const double delta = clamped_delta(spec.kappa);
    const auto valleys = build_standard_valleys(spec, h, delta, 1, step, rng, limits);
    return slice_segment(valleys[0].segment, valleys[0].m, valleys[0].tau_h, 0.0);
}

WeightedSlope sample_V_hat_up_killed(const EnvironmentSpec& spec, double h, double step,
                                     Rng& rng, const SimLimits& limits) {
    const double delta = clamped_delta(spec.kappa);
    // The first descending slope may belong to the central slope; use the
    // second valley.
    const auto valleys = build_standard_valleys(spec, h, delta, 2, step, rng, limits);
    const auto& v = valleys[1];
    const double tm = tau_minus(v, h);
    WeightedSlope ws;
    ws.path = time_reverse(slice_segment(v.segment, tm, v.m, 0.0));
    const double end_value = ws.path.right.back();
    ws.weight = 1.0 - std::exp(-spec.kappa * end_value);
    return ws;
}

double sample_R(const EnvironmentSpec& spec, double h, double step, Rng& rng,
                const SimLimits& limits) {
    const double delta = clamped_delta(spec.kappa);
    const auto valleys = build_standard_valleys(spec, h, delta, 1, step, rng, limits);
    return valley_functionals(valleys[0], h).R;
}

}  // namespace levylab
