#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "riskmon/changepoint.hpp"
#include "riskmon/random.hpp"

using namespace riskmon;

namespace {
std::vector<double> harmful_after(std::size_t change_at, std::size_t n, double p0, double p1,
                                  std::uint64_t seed) {
    RandomStream rng(seed, 0);
    std::vector<double> out(n);
    for (std::size_t t = 0; t < n; ++t) {
        out[t] = rng.next_bernoulli(t + 1 >= change_at ? p1 : p0) ? 1.0 : 0.0;
    }
    return out;
}
}  // namespace

TEST_CASE("stride 0 reproduces the single sequential test", "[changepoint]") {
    TestSpec spec = TestSpec::fixed_threshold_rule(0.3, 0.05, BoundMethod::Betting);
    const std::vector<double> stream = harmful_after(1, 1500, 0.1, 0.6, 101);

    Monitor single = Monitor::init(spec, {});
    ChangepointDetector det = ChangepointDetector::init(spec, {}, /*spawn_stride=*/0);
    std::optional<std::size_t> alarm;
    for (double z : stream) {
        single.observe_one(z);
        if (!alarm) alarm = det.observe(z);
    }
    REQUIRE(single.decision() == Decision::Reject);
    REQUIRE(alarm.has_value());
    CHECK(*alarm == *single.stopping_time().n);
    CHECK(det.active_tests() == 1);
}

TEST_CASE("more tests can only alarm earlier", "[changepoint]") {
    TestSpec spec = TestSpec::fixed_threshold_rule(0.3, 0.05, BoundMethod::Betting);
    const std::vector<double> stream = harmful_after(400, 2500, 0.05, 0.55, 103);

    ChangepointDetector single = ChangepointDetector::init(spec, {}, 0);
    ChangepointDetector dense = ChangepointDetector::init(spec, {}, 1);
    std::optional<std::size_t> alarm_single, alarm_dense;
    for (double z : stream) {
        if (!alarm_single) alarm_single = single.observe(z);
        if (!alarm_dense) alarm_dense = dense.observe(z);
    }
    // the dense detector recovers quickly after the change; the cold-start
    // test first has to climb out of the capital it lost on the benign prefix
    REQUIRE(alarm_dense.has_value());
    if (alarm_single.has_value()) {
        CHECK(*alarm_dense <= *alarm_single);  // N* <= N_1
    }
    CHECK(*alarm_dense >= 400);
    CHECK(*alarm_dense < 2500);
}

TEST_CASE("active test count obeys the stride bound and alarms freeze", "[changepoint]") {
    TestSpec spec = TestSpec::fixed_threshold_rule(0.4, 0.05, BoundMethod::Betting);
    ChangepointDetector det = ChangepointDetector::init(spec, {}, 5);
    RandomStream rng(107, 0);
    for (int t = 0; t < 500; ++t) {
        det.observe(rng.next_bernoulli(0.1) ? 1.0 : 0.0);
        CHECK(det.active_tests() <= det.t() / 5 + 1);
    }
    CHECK_FALSE(det.alarm_time().has_value());

    // force an alarm, then confirm the detector is frozen
    for (int t = 0; t < 3000 && !det.alarm_time(); ++t) det.observe(1.0);
    REQUIRE(det.alarm_time().has_value());
    const std::size_t frozen_t = det.t();
    const std::size_t alarm = *det.alarm_time();
    det.observe(0.0);
    CHECK(det.t() == frozen_t);
    CHECK(*det.alarm_time() == alarm);
}

TEST_CASE("detectors are deterministic per seed", "[changepoint]") {
    GaussianLabelShiftConfig base;
    TestSpec spec = TestSpec::absolute_increase(0.05, 0.1);
    ScenarioConfig scenario = ScenarioConfig::change_at(base, 0.9, 100, 600);
    const auto a = changepoint_alarm_times(spec, scenario, 5, 600, 271, 4, 300);
    const auto b = changepoint_alarm_times(spec, scenario, 5, 600, 271, 4, 300);
    CHECK(a == b);
}

TEST_CASE("null scenario rarely alarms and shifted delays shrink with severity", "[changepoint]") {
    GaussianLabelShiftConfig base;
    TestSpec spec = TestSpec::absolute_increase(0.05, 0.1);
    ScenarioConfig null_scenario = ScenarioConfig::iid(base, 600);

    const std::size_t runs = 30;
    const auto null_alarms = changepoint_alarm_times(spec, null_scenario, runs, 600, 313, 10, 500);
    std::size_t alarms = 0;
    for (const auto& a : null_alarms) alarms += a.has_value() ? 1 : 0;
    const double frac = double(alarms) / double(runs);
    CHECK(frac <= 0.1 + 3.0 * std::sqrt(0.1 * 0.9 / double(runs)));

    // ADD nonincreasing in shift severity
    double prev = std::numeric_limits<double>::infinity();
    for (double pi : {0.7, 0.8, 0.9}) {
        const std::size_t change[] = {100};
        ArlAddReport rep = estimate_arl_add(spec, ScenarioConfig::iid(base, 1200), pi, change, 20,
                                            1200, 317, 10, 500);
        CHECK(rep.delays.size() == 1);
        CHECK(rep.delays[0].mean_delay <= prev);
        prev = rep.delays[0].mean_delay;
    }
}

TEST_CASE("change at the first index collapses ADD to the cold-start stopping time", "[changepoint]") {
    GaussianLabelShiftConfig base;
    TestSpec spec = TestSpec::absolute_increase(0.05, 0.1);
    const std::size_t change[] = {1};
    // stride 0: the detector is exactly one cold-start test, so N* = N_1 and
    // the delay at m = 1 is the stopping time itself
    ArlAddReport rep = estimate_arl_add(spec, ScenarioConfig::iid(base, 1500), 0.9, change, 10,
                                        1500, 331, 0, 500);
    ScenarioConfig shifted = ScenarioConfig::change_at(base, 0.9, 1, 1500);
    const auto alarms = changepoint_alarm_times(spec, shifted, 10, 1500, 331 + 7919, 0, 500);
    double mean_alarm = 0.0;
    for (const auto& a : alarms) mean_alarm += double(a.value_or(1500));
    mean_alarm /= 10.0;
    CHECK(std::fabs(rep.delays[0].mean_delay - mean_alarm) < 1e-12);
}
