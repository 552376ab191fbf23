#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "riskmon/experiments.hpp"
#include "riskmon/simgen.hpp"

using namespace riskmon;

TEST_CASE("bayes posterior at the midpoint equals the prior", "[simgen]") {
    GaussianLabelShiftConfig cfg;  // mu0 = (-1,0), mu1 = (1,0), pi1_source = 0.25
    CHECK(std::fabs(bayes_posterior({0.0, 0.0}, cfg) - 0.25) < 1e-12);
    CHECK(bayes_posterior({50.0, 0.0}, cfg) > 1.0 - 1e-9);   // likelihood ratio diverges
    CHECK(bayes_posterior({-50.0, 0.0}, cfg) < 1e-9);

    // density-quotient oracle at x = (0.5, 0)
    auto density = [](const std::array<double, 2>& x, const std::array<double, 2>& mu) {
        const double d0 = x[0] - mu[0], d1 = x[1] - mu[1];
        return std::exp(-0.5 * (d0 * d0 + d1 * d1));
    };
    const std::array<double, 2> x{0.5, 0.0};
    const double oracle = 0.25 * density(x, cfg.mu1) /
                          (0.75 * density(x, cfg.mu0) + 0.25 * density(x, cfg.mu1));
    CHECK(std::fabs(bayes_posterior(x, cfg) - oracle) < 1e-12);
    CHECK(std::fabs(oracle - 0.47536688641867175) < 1e-12);
}

TEST_CASE("analytic risk: symmetric case and affinity in the target marginal", "[simgen]") {
    GaussianLabelShiftConfig cfg;
    cfg.pi1_source = 0.5;
    for (double pi_t : {0.1, 0.5, 0.9}) {
        cfg.pi1_target = pi_t;
        CHECK(std::fabs(analytic_target_misclassification_risk(cfg) - 0.15865525393145707) < 1e-12);
    }

    cfg.pi1_source = 0.25;
    auto risk_at = [&](double pi) {
        cfg.pi1_target = pi;
        return analytic_target_misclassification_risk(cfg);
    };
    const double r2 = risk_at(0.2), r5 = risk_at(0.5), r8 = risk_at(0.8);
    CHECK(std::fabs((r5 - r2) - (r8 - r5)) < 1e-12);  // affine in pi1_target

    GaussianLabelShiftConfig degenerate;
    degenerate.mu1 = degenerate.mu0;
    CHECK_THROWS_AS(analytic_target_misclassification_risk(degenerate), std::domain_error);
}

TEST_CASE("analytic risk agrees with Monte Carlo", "[simgen]") {
    GaussianLabelShiftConfig cfg;
    cfg.pi1_source = 0.25;
    cfg.pi1_target = 0.7;
    const double analytic = analytic_target_misclassification_risk(cfg);
    const std::size_t n = 1000000;
    DriftSampler sampler(DriftSchedule::single(cfg.pi1_target, n), cfg, 404, 0);
    double err = 0.0;
    for (std::size_t i = 0; i < n; ++i) err += sampler.next_loss();
    CHECK(std::fabs(err / double(n) - analytic) < 0.002);
}

TEST_CASE("label shift sampler hits its marginals and class means", "[simgen]") {
    GaussianLabelShiftConfig cfg;
    cfg.pi1_target = 0.3;
    const std::size_t n = 100000;
    const auto sample = sample_label_shift(cfg, n, 77);
    double ones = 0.0;
    std::array<double, 2> sum1{0.0, 0.0};
    std::size_t n1 = 0;
    for (const auto& s : sample) {
        ones += s.y;
        if (s.y == 1) {
            sum1[0] += s.x[0];
            sum1[1] += s.x[1];
            n1 += 1;
        }
    }
    CHECK(std::fabs(ones / n - 0.3) < 3.0 * std::sqrt(0.3 * 0.7 / n));
    CHECK(std::fabs(sum1[0] / n1 - 1.0) < 3.0 / std::sqrt(double(n1)));
    CHECK(std::fabs(sum1[1] / n1 - 0.0) < 3.0 / std::sqrt(double(n1)));

    const auto again = sample_label_shift(cfg, 50, 77);
    for (int i = 0; i < 50; ++i) {
        CHECK(again[i].x == sample[i].x);
        CHECK(again[i].y == sample[i].y);
    }
}

TEST_CASE("drift schedule running risk and segment boundaries", "[simgen]") {
    GaussianLabelShiftConfig cfg;  // pi1_source = 0.25
    const DriftSchedule sched = DriftSchedule::staircase(0.25, 0.85, 0.1, 200);
    REQUIRE(sched.segments.size() == 7);
    CHECK(sched.total() == 1400);
    CHECK(sched.segments[1].pi1 == 0.35);

    const auto samples = sample_drift(sched, cfg, 505);
    // running risk is nondecreasing for this schedule and changes slope at 200
    for (std::size_t t = 1; t < samples.size(); ++t) {
        CHECK(samples[t].running_risk >= samples[t - 1].running_risk - 1e-12);
    }
    auto seg_risk = [&](double pi) {
        GaussianLabelShiftConfig c = cfg;
        c.pi1_target = pi;
        return analytic_target_misclassification_risk(c);
    };
    CHECK(std::fabs(samples[199].running_risk - seg_risk(0.25)) < 1e-12);
    const double expected_201 = (200.0 * seg_risk(0.25) + seg_risk(0.35)) / 201.0;
    CHECK(std::fabs(samples[200].running_risk - expected_201) < 1e-12);

    // a single-segment schedule is exactly sample_label_shift
    GaussianLabelShiftConfig iid_cfg = cfg;
    iid_cfg.pi1_target = 0.6;
    const auto a = sample_drift(DriftSchedule::single(0.6, 40), cfg, 606);
    const auto b = sample_label_shift(iid_cfg, 40, 606);
    for (int i = 0; i < 40; ++i) {
        CHECK(a[i].x == b[i].x);
        CHECK(a[i].y == b[i].y);
    }
}

TEST_CASE("circle generator labels by squared radius", "[simgen]") {
    CHECK(circle_label({0.0, 0.0}) == 0);
    CHECK(circle_label({1.0, 0.0}) == 1);
    CHECK(circle_label({0.5, 0.5}) == 1);  // 0.5 >= 1/2

    CircleShiftConfig cfg;
    const std::size_t n = 100000;
    const auto sample = sample_circle_shift(cfg, n, 808, false);
    std::size_t label_one = 0;
    for (const auto& s : sample) label_one += s.y;
    // half the mass sits on the circle; noise flips only a few labels
    CHECK(std::fabs(double(label_one) / n - 0.5) < 0.03);

    const auto target = sample_circle_shift(cfg, 1000, 808, true);
    double mean_x = 0.0;
    for (const auto& s : target) mean_x += s.x[0];
    // full-angle target arc centers near zero; source arc does not
    CHECK(std::fabs(mean_x / 1000.0) < 0.1);
}

TEST_CASE("condition number of a label shift", "[simgen]") {
    const std::vector<double> uniform{0.5, 0.5};
    CHECK(condition_number(uniform, uniform) == 1.0);
    CHECK(std::fabs(condition_number(uniform, std::vector<double>{0.25, 0.75}) - 3.0) < 1e-12);
    // zero source mass with positive target mass: unbounded weights
    CHECK(std::isinf(condition_number(std::vector<double>{0.0, 1.0}, std::vector<double>{0.5, 0.5})));
    // zero target mass is excluded from the infimum
    CHECK(std::fabs(condition_number(std::vector<double>{0.2, 0.3, 0.5},
                                     std::vector<double>{0.5, 0.5, 0.0}) -
                    1.5) < 1e-12);
    CHECK_THROWS_AS(condition_number(std::vector<double>{0.5, 0.6}, uniform), std::domain_error);
}

TEST_CASE("the analytic harm boundary lands within one grid step", "[simgen]") {
    GaussianLabelShiftConfig cfg;  // pi1_source = 0.25
    const double boundary = analytic_harm_boundary(cfg, 0.05);
    CHECK(std::fabs(boundary - 0.43836) < 1e-4);

    const double step = 0.8 / 19.0;
    double first_harmful = 1.0;
    for (int k = 0; k < 20; ++k) {
        const double pi = 0.1 + k * step;
        GaussianLabelShiftConfig c = cfg;
        c.pi1_target = pi;
        GaussianLabelShiftConfig src = cfg;
        src.pi1_target = cfg.pi1_source;
        if (analytic_target_misclassification_risk(c) >
            analytic_target_misclassification_risk(src) + 0.05) {
            first_harmful = pi;
            break;
        }
    }
    CHECK(std::fabs(first_harmful - boundary) <= step);
}

TEST_CASE("logistic scorer separates the source circle data", "[simgen]") {
    CircleShiftConfig cfg;
    const auto train = sample_circle_shift(cfg, 400, 909, false);
    const LinearScorer scorer = fit_logistic(train);
    std::size_t correct = 0;
    const auto eval = sample_circle_shift(cfg, 1000, 910, false);
    for (const auto& s : eval) correct += scorer.predict(s.x) == s.y ? 1 : 0;
    CHECK(double(correct) / 1000.0 > 0.9);
}
