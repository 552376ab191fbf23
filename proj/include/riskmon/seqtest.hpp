#pragma once
// Sequential test for a harmful risk increase: a fixed-sample upper confidence
// bound on the source risk against a time-uniform lower confidence bound on
// the target risk. The monitor rejects at the first time the lower bound
// strictly exceeds the threshold; under the null the probability of ever
// rejecting is at most delta_s + delta_t.
//
// Threshold rules: absolute (U_S + eps_tol), relative ((1+eps_tol) U_S), or a
// fixed risk level r0 with the whole budget on the target side.

#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "riskmon/bounds.hpp"

namespace riskmon {

enum class TestMode { AbsoluteIncrease, RelativeIncrease, FixedThreshold };
enum class EvalCadence { PerLoss, BatchEnd };
enum class Decision { Continue, Reject };

struct TestSpec {
    TestMode mode = TestMode::AbsoluteIncrease;
    double eps_tol = 0.0;          // tolerance for Absolute/Relative modes
    double fixed_threshold = 0.0;  // r0 for FixedThreshold mode
    double delta = 0.05;
    double delta_s = 0.025;
    double delta_t = 0.025;
    BoundConfig source_bound;  // method/options; delta_s is applied at init
    BoundConfig target_bound;  // method/options; delta_t is applied at init
    std::size_t batch_size = 1;
    EvalCadence cadence = EvalCadence::PerLoss;
    // Full fidelity keeps the target bound value available after every
    // observation (needed for event logs and traces); the default lets the
    // betting monitor fall back to the single-grid-point capital tracker.
    bool record_bounds = false;
    std::size_t trace_capacity = 0;  // ring buffer of (t, lower) pairs when > 0

    static TestSpec absolute_increase(double eps_tol, double delta,
                                      BoundMethod source = BoundMethod::Betting,
                                      BoundMethod target = BoundMethod::Betting) {
        TestSpec s;
        s.mode = TestMode::AbsoluteIncrease;
        s.eps_tol = eps_tol;
        s.delta = delta;
        s.delta_s = delta / 2.0;
        s.delta_t = delta / 2.0;
        s.source_bound.method = source;
        s.target_bound.method = target;
        return s;
    }

    static TestSpec relative_increase(double eps_tol, double delta,
                                      BoundMethod source = BoundMethod::Betting,
                                      BoundMethod target = BoundMethod::Betting) {
        TestSpec s = absolute_increase(eps_tol, delta, source, target);
        s.mode = TestMode::RelativeIncrease;
        return s;
    }

    static TestSpec fixed_threshold_rule(double r0, double delta,
                                         BoundMethod target = BoundMethod::Betting) {
        TestSpec s;
        s.mode = TestMode::FixedThreshold;
        s.fixed_threshold = r0;
        s.delta = delta;
        s.delta_s = 0.0;
        s.delta_t = delta;
        s.target_bound.method = target;
        return s;
    }

    void validate() const {
        if (!(delta > 0.0 && delta < 1.0)) throw std::domain_error("TestSpec: delta outside (0,1)");
        if (mode == TestMode::FixedThreshold) {
            if (delta_s != 0.0 || delta_t != delta) {
                throw std::domain_error("TestSpec: FixedThreshold uses delta_t = delta, delta_s = 0");
            }
            if (!(fixed_threshold >= 0.0 && fixed_threshold <= 1.0)) {
                throw std::domain_error("TestSpec: r0 outside [0,1]");
            }
        } else {
            if (delta_s + delta_t != delta) throw std::domain_error("TestSpec: delta_s + delta_t must equal delta");
            if (!(delta_s > 0.0 && delta_t > 0.0)) throw std::domain_error("TestSpec: split must be positive");
            if (!(eps_tol >= 0.0)) throw std::domain_error("TestSpec: eps_tol < 0");
        }
        if (batch_size < 1) throw std::domain_error("TestSpec: batch_size < 1");
    }
};

struct StoppingTime {
    std::optional<std::size_t> n;  // empty = never crossed (infinity marker)
    bool is_finite() const { return n.has_value(); }
};

struct TracePoint {
    std::size_t t;
    double lower;
};

class Monitor {
public:
    static Monitor init(const TestSpec& spec, std::span<const double> source_losses) {
        spec.validate();
        if (spec.mode == TestMode::FixedThreshold) {
            return Monitor(spec, std::nullopt);
        }
        if (source_losses.empty()) {
            throw std::domain_error("Monitor: absolute/relative modes need a source sample");
        }
        BoundConfig src = spec.source_bound;
        src.delta = spec.delta_s;
        src.side = BoundSide::Upper;
        return Monitor(spec, source_upper_bound(source_losses, src));
    }

    // Reuses a precomputed source bound (changepoint detectors share one
    // source sample across every spawned test).
    static Monitor init_with_source(const TestSpec& spec, const SourceBound& bound) {
        spec.validate();
        if (spec.mode == TestMode::FixedThreshold) return Monitor(spec, std::nullopt);
        return Monitor(spec, bound);
    }

    Decision observe_one(double z) {
        if (decision_ == Decision::Reject) return decision_;  // idempotent no-op
        check_unit_loss(z);
        t_ += 1;
        feed(z);
        if (spec_.cadence == EvalCadence::PerLoss || t_ % spec_.batch_size == 0) {
            evaluate();
        }
        return decision_;
    }

    Decision observe(std::span<const double> batch) {
        for (double z : batch) observe_one(z);
        return decision_;
    }

    Decision decision() const { return decision_; }
    StoppingTime stopping_time() const { return {reject_time_}; }
    double threshold() const { return threshold_; }
    std::size_t t() const { return t_; }
    const TestSpec& spec() const { return spec_; }
    const std::optional<SourceBound>& source() const { return source_; }
    const std::vector<TracePoint>& trace() const { return trace_; }

    // Last computed target lower bound; NaN while the fast-path tracker is in
    // use (construct with record_bounds for reportable values).
    double last_lower() const { return last_lower_; }

    // Which null the monitor tests: the running-risk pair for CM-EB targets,
    // the fixed-risk pair (i.i.d. target assumption) otherwise.
    std::string hypothesis() const {
        return spec_.target_bound.method == BoundMethod::CMEB ? "running-risk" : "iid-target";
    }

    // Serialization hooks.
    using TargetState =
        std::variant<PmhState, PmebState, BettingState, BettingThresholdTracker, CmebState>;
    const TargetState& target_state() const { return target_; }
    TargetState& target_state() { return target_; }
    void restore(std::size_t t, Decision d, std::optional<std::size_t> reject_time) {
        t_ = t;
        decision_ = d;
        reject_time_ = reject_time;
    }

private:
    Monitor(const TestSpec& spec, std::optional<SourceBound> src) : spec_(spec), source_(std::move(src)) {
        switch (spec_.mode) {
            case TestMode::AbsoluteIncrease:
                threshold_ = source_->value + spec_.eps_tol;
                break;
            case TestMode::RelativeIncrease:
                threshold_ = (1.0 + spec_.eps_tol) * source_->value;
                break;
            case TestMode::FixedThreshold:
                threshold_ = spec_.fixed_threshold;
                break;
        }
        BoundConfig tgt = spec_.target_bound;
        tgt.delta = spec_.delta_t;
        tgt.side = BoundSide::Lower;
        switch (tgt.method) {
            case BoundMethod::PMHoeffding:
                target_ = PmhState{};
                break;
            case BoundMethod::PMEmpiricalBernstein:
                target_ = PmebState{};
                break;
            case BoundMethod::Betting:
                if (spec_.record_bounds || spec_.trace_capacity > 0) {
                    target_ = BettingState::make(tgt);
                } else {
                    target_ = BettingThresholdTracker::make(tgt, threshold_);
                }
                break;
            case BoundMethod::CMEB:
                target_ = CmebState::make(tgt);
                break;
            default:
                throw std::invalid_argument("Monitor: fixed-sample Hoeffding is not a target-side method");
        }
    }

    void feed(double z) {
        if (auto* st = std::get_if<PmhState>(&target_)) {
            last_lower_ = pmh_update(*st, z, spec_.delta_t).lower;
        } else if (auto* st = std::get_if<PmebState>(&target_)) {
            last_lower_ = pmeb_update(*st, z, spec_.delta_t, spec_.target_bound.c_cap,
                                      spec_.target_bound.horizon).lower;
        } else if (auto* st = std::get_if<BettingState>(&target_)) {
            last_lower_ = betting_update(*st, z, spec_.delta_t).lower;
        } else if (auto* st = std::get_if<BettingThresholdTracker>(&target_)) {
            st->observe(z);
            last_lower_ = std::numeric_limits<double>::quiet_NaN();
        } else {
            last_lower_ = cmeb_update(std::get<CmebState>(target_), z);
        }
    }

    void evaluate() {
        bool crossed;
        if (const auto* tracker = std::get_if<BettingThresholdTracker>(&target_)) {
            crossed = tracker->crossed;
        } else {
            crossed = last_lower_ > threshold_;
        }
        if (spec_.trace_capacity > 0) {
            if (trace_.size() == spec_.trace_capacity) trace_.erase(trace_.begin());
            trace_.push_back({t_, last_lower_});
        }
        if (crossed) {
            decision_ = Decision::Reject;
            reject_time_ = t_;
        }
    }

    TestSpec spec_;
    std::optional<SourceBound> source_;
    double threshold_ = 1.0;
    TargetState target_;
    std::size_t t_ = 0;
    Decision decision_ = Decision::Continue;
    std::optional<std::size_t> reject_time_;
    double last_lower_ = std::numeric_limits<double>::quiet_NaN();
    std::vector<TracePoint> trace_;
};

inline Monitor init_monitor(const TestSpec& spec, std::span<const double> source_losses) {
    return Monitor::init(spec, source_losses);
}

inline Decision observe(Monitor& monitor, std::span<const double> batch) {
    return monitor.observe(batch);
}

inline StoppingTime stopping_time(const Monitor& monitor) { return monitor.stopping_time(); }

}  // namespace riskmon
