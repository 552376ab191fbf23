#pragma once
// Changepoint detection from the sequential test: a fresh test is launched at
// every start offset (or every `spawn_stride`-th offset), each test sees only
// the losses from its start onward, and the detector alarms the first time
// any active test rejects: N* = inf_k (N_k + (k-1)). Lorden's bound gives
// E[N*] >= 1/delta under the null.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "riskmon/seqtest.hpp"
#include "riskmon/simgen.hpp"

namespace riskmon {

class ChangepointDetector {
public:
    // stride 0 means "never spawn beyond the first test", which reproduces a
    // single cold-start sequential test.
    static ChangepointDetector init(const TestSpec& spec, std::span<const double> source_losses,
                                    std::size_t spawn_stride = 1, bool enable_pruning = false,
                                    std::size_t prune_window = 50) {
        spec.validate();
        ChangepointDetector det;
        det.spec_ = spec;
        det.stride_ = spawn_stride;
        det.prune_ = enable_pruning && (spec.record_bounds || spec.trace_capacity > 0);
        det.prune_window_ = prune_window;
        if (spec.mode != TestMode::FixedThreshold) {
            BoundConfig src = spec.source_bound;
            src.delta = spec.delta_s;
            src.side = BoundSide::Upper;
            det.source_ = source_upper_bound(source_losses, src);
        }
        return det;
    }

    std::optional<std::size_t> alarm_time() const { return alarm_time_; }
    std::size_t t() const { return t_; }
    std::size_t active_tests() const { return tests_.size(); }

    // Feeds one loss; returns the alarm time N* once fired. After the alarm
    // the detector is frozen and further observations are no-ops.
    std::optional<std::size_t> observe(double z) {
        if (alarm_time_) return alarm_time_;
        check_unit_loss(z);
        t_ += 1;
        if (should_spawn()) {
            tests_.push_back(make_test());
            starts_.push_back(t_);
            dominated_for_.push_back(0);
        }
        for (std::size_t i = 0; i < tests_.size(); ++i) {
            if (tests_[i].observe_one(z) == Decision::Reject && !alarm_time_) {
                // test k started at starts_[i], so N_k + (k-1) equals the
                // current global index
                alarm_time_ = t_;
                alarm_start_ = starts_[i];
            }
        }
        if (alarm_time_) return alarm_time_;
        if (prune_) prune_dominated();
        return std::nullopt;
    }

    // Start offset of the test that fired (useful for localization reports).
    std::optional<std::size_t> alarm_start() const { return alarm_start_; }

private:
    bool should_spawn() const {
        if (tests_.empty()) return true;
        if (stride_ == 0) return false;
        return (t_ - 1) % stride_ == 0;
    }

    Monitor make_test() const {
        return spec_.mode == TestMode::FixedThreshold
                   ? Monitor::init_with_source(spec_, SourceBound{})
                   : Monitor::init_with_source(spec_, *source_);
    }

    // Heuristic (no guarantee carried over): drop a test whose lower bound has
    // been pointwise dominated by some other active test for `prune_window_`
    // consecutive steps. Only available when monitors record bound values.
    void prune_dominated() {
        if (tests_.size() < 2) return;
        double best = -1.0;
        for (const auto& m : tests_) best = std::max(best, m.last_lower());
        std::vector<std::size_t> keep;
        keep.reserve(tests_.size());
        for (std::size_t i = 0; i < tests_.size(); ++i) {
            if (tests_[i].last_lower() < best) {
                dominated_for_[i] += 1;
            } else {
                dominated_for_[i] = 0;
            }
            if (dominated_for_[i] < prune_window_) keep.push_back(i);
        }
        if (keep.size() == tests_.size()) return;
        std::vector<Monitor> kept_tests;
        std::vector<std::size_t> kept_starts;
        std::vector<std::size_t> kept_dom;
        for (std::size_t i : keep) {
            kept_tests.push_back(std::move(tests_[i]));
            kept_starts.push_back(starts_[i]);
            kept_dom.push_back(dominated_for_[i]);
        }
        tests_ = std::move(kept_tests);
        starts_ = std::move(kept_starts);
        dominated_for_ = std::move(kept_dom);
    }

    TestSpec spec_;
    std::optional<SourceBound> source_;
    std::size_t stride_ = 1;
    bool prune_ = false;
    std::size_t prune_window_ = 50;
    std::size_t t_ = 0;
    std::vector<Monitor> tests_;
    std::vector<std::size_t> starts_;
    std::vector<std::size_t> dominated_for_;
    std::optional<std::size_t> alarm_time_;
    std::optional<std::size_t> alarm_start_;
};

inline std::optional<std::size_t> cp_observe(ChangepointDetector& det, double z) {
    return det.observe(z);
}

// ---------------------------------------------------------------------------
// Monte-Carlo ARL/ADD estimates. Runs that never alarm are censored at the
// horizon and counted there, with the censoring tallied separately. The
// reported delay is the empirical mean of (N* - (m-1))+ per change location;
// the worst case over the supplied locations stands in for the essential
// supremum, which simulation cannot reach.

struct ArlAddReport {
    double mean_run_length_null = 0.0;
    std::size_t null_censored = 0;
    struct DelayEntry {
        std::size_t change_at = 1;
        double mean_delay = 0.0;
        std::size_t censored = 0;
    };
    std::vector<DelayEntry> delays;
    double worst_mean_delay = 0.0;
    std::size_t n_runs = 0;
    std::size_t horizon = 0;
};

// Per-run alarm times for a scenario; empty optional = censored at horizon.
inline std::vector<std::optional<std::size_t>> changepoint_alarm_times(
    const TestSpec& spec, const ScenarioConfig& scenario, std::size_t n_runs, std::size_t horizon,
    std::uint64_t seed, std::size_t stride = 1, std::size_t source_n = 1000) {
    std::vector<std::optional<std::size_t>> alarms(n_runs);
    for (std::size_t run = 0; run < n_runs; ++run) {
        GaussianLabelShiftConfig src_cfg = scenario.source;
        src_cfg.pi1_target = src_cfg.pi1_source;
        DriftSampler source_sampler(DriftSchedule::single(src_cfg.pi1_source, source_n), src_cfg,
                                    seed, 2 * run);
        std::vector<double> source_losses(source_n);
        for (auto& z : source_losses) z = source_sampler.next_loss();
        ChangepointDetector det = ChangepointDetector::init(spec, source_losses, stride);

        DriftSampler target = scenario.sampler(seed, 2 * run + 1);
        for (std::size_t t = 0; t < horizon && !target.exhausted(); ++t) {
            if (auto alarm = det.observe(target.next_loss())) {
                alarms[run] = alarm;
                break;
            }
        }
    }
    return alarms;
}

namespace detail {
inline std::pair<double, std::size_t> summarize_alarms(
    const std::vector<std::optional<std::size_t>>& alarms, std::size_t horizon,
    std::size_t change_at) {
    double sum_stat = 0.0;
    std::size_t censored = 0;
    for (const auto& alarm : alarms) {
        const std::size_t n_star = alarm.value_or(horizon);
        if (!alarm) censored += 1;
        const double delay =
            std::max(0.0, static_cast<double>(n_star) - (static_cast<double>(change_at) - 1.0));
        sum_stat += (change_at <= 1) ? static_cast<double>(n_star) : delay;
    }
    return {sum_stat / static_cast<double>(alarms.size()), censored};
}
}  // namespace detail

inline ArlAddReport estimate_arl_add(const TestSpec& spec, const ScenarioConfig& null_scenario,
                                     double pi1_shifted, std::span<const std::size_t> change_locations,
                                     std::size_t n_runs, std::size_t horizon, std::uint64_t seed,
                                     std::size_t stride = 1, std::size_t source_n = 1000) {
    if (n_runs < 1) throw std::domain_error("estimate_arl_add: n_runs must be >= 1");
    ArlAddReport report;
    report.n_runs = n_runs;
    report.horizon = horizon;

    const auto null_alarms =
        changepoint_alarm_times(spec, null_scenario, n_runs, horizon, seed, stride, source_n);
    std::tie(report.mean_run_length_null, report.null_censored) =
        detail::summarize_alarms(null_alarms, horizon, 1);

    for (std::size_t m : change_locations) {
        ScenarioConfig shifted =
            ScenarioConfig::change_at(null_scenario.source, pi1_shifted, m, horizon);
        const auto alarms = changepoint_alarm_times(spec, shifted, n_runs, horizon,
                                                    seed + 7919 * m, stride, source_n);
        auto [mean_delay, cens] = detail::summarize_alarms(alarms, horizon, m);
        report.delays.push_back({m, mean_delay, cens});
        report.worst_mean_delay = std::max(report.worst_mean_delay, mean_delay);
    }
    return report;
}

}  // namespace riskmon
