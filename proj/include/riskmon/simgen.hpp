#pragma once
// Seeded synthetic data pipelines with analytic ground truth: Gaussian label
// shift (two classes, identity covariance), drift schedules over the class-1
// marginal, and the circle covariate-shift generator. The Bayes-optimal rule
// for the source marginals is available in closed form, as is its
// misclassification risk on any shifted target, so Monte-Carlo runs can be
// checked against exact values.
//
// Draw order per sample is fixed and documented on each generator, making
// streams reproducible from (seed, stream) across platforms.

#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <stdexcept>
#include <vector>

#include "riskmon/math.hpp"
#include "riskmon/random.hpp"

namespace riskmon {

struct GaussianLabelShiftConfig {
    std::array<double, 2> mu0{-1.0, 0.0};
    std::array<double, 2> mu1{1.0, 0.0};
    double pi1_source = 0.25;
    double pi1_target = 0.25;

    void validate() const {
        if (!(pi1_source > 0.0 && pi1_source < 1.0) || !(pi1_target > 0.0 && pi1_target < 1.0)) {
            throw std::domain_error("GaussianLabelShiftConfig: marginals must lie in (0,1)");
        }
    }
};

struct LabeledSample {
    std::array<double, 2> x{0.0, 0.0};
    int y = 0;
    // Analytic running risk of the source-optimal rule after this index;
    // NaN when the generator carries no risk annotation.
    double running_risk = std::numeric_limits<double>::quiet_NaN();
};

// P(Y=1 | X=x) under the source marginals, X|Y=y ~ N(mu_y, I2). Evaluated as
// a logistic in the log-likelihood ratio for stability.
inline double bayes_posterior(const std::array<double, 2>& x, const GaussianLabelShiftConfig& cfg) {
    cfg.validate();
    auto sq_dist = [&](const std::array<double, 2>& mu) {
        const double d0 = x[0] - mu[0];
        const double d1 = x[1] - mu[1];
        return d0 * d0 + d1 * d1;
    };
    const double logit = std::log(cfg.pi1_source / (1.0 - cfg.pi1_source)) +
                         0.5 * (sq_dist(cfg.mu0) - sq_dist(cfg.mu1));
    return 1.0 / (1.0 + std::exp(-logit));
}

inline int bayes_predict(const std::array<double, 2>& x, const GaussianLabelShiftConfig& cfg) {
    return bayes_posterior(x, cfg) >= 0.5 ? 1 : 0;
}

// Misclassification risk of the source-optimal rule under the target
// marginals. The rule thresholds x' (mu1 - mu0) at
// tau = log(pi0_S/pi1_S) + (||mu1||^2 - ||mu0||^2)/2, and the projection is
// Gaussian under each class, so the risk is a two-term normal-CDF expression
// (affine in pi1_target).
inline double analytic_target_misclassification_risk(const GaussianLabelShiftConfig& cfg) {
    cfg.validate();
    const double dx = cfg.mu1[0] - cfg.mu0[0];
    const double dy = cfg.mu1[1] - cfg.mu0[1];
    const double norm = std::sqrt(dx * dx + dy * dy);
    if (!(norm > 0.0)) throw std::domain_error("analytic risk: coincident class means");
    const double tau = std::log((1.0 - cfg.pi1_source) / cfg.pi1_source) +
                       0.5 * ((cfg.mu1[0] * cfg.mu1[0] + cfg.mu1[1] * cfg.mu1[1]) -
                              (cfg.mu0[0] * cfg.mu0[0] + cfg.mu0[1] * cfg.mu0[1]));
    const double proj1 = cfg.mu1[0] * dx + cfg.mu1[1] * dy;
    const double proj0 = cfg.mu0[0] * dx + cfg.mu0[1] * dy;
    const double err_given_1 = normal_cdf((tau - proj1) / norm);
    const double err_given_0 = 1.0 - normal_cdf((tau - proj0) / norm);
    return err_given_1 * cfg.pi1_target + err_given_0 * (1.0 - cfg.pi1_target);
}

// ---------------------------------------------------------------------------
// Drift schedules.

struct DriftSegment {
    double pi1 = 0.25;
    std::size_t count = 1;
};

struct DriftSchedule {
    std::vector<DriftSegment> segments;

    static DriftSchedule single(double pi1, std::size_t count) { return {{{pi1, count}}}; }

    // The drift pipeline used throughout: start at pi1_start, add `step` per
    // `segment_len` samples until pi1_end, then hold pi1_end for `tail` more.
    static DriftSchedule staircase(double pi1_start, double pi1_end, double step,
                                   std::size_t segment_len, std::size_t tail = 0) {
        DriftSchedule s;
        double pi = pi1_start;
        while (pi < pi1_end - 1e-12) {
            s.segments.push_back({pi, segment_len});
            pi += step;
        }
        s.segments.push_back({pi1_end, segment_len + tail});
        return s;
    }

    std::size_t total() const {
        std::size_t n = 0;
        for (const auto& seg : segments) n += seg.count;
        return n;
    }

    void validate() const {
        if (segments.empty()) throw std::domain_error("DriftSchedule: empty");
        for (const auto& seg : segments) {
            if (seg.count < 1) throw std::domain_error("DriftSchedule: segment count < 1");
            if (!(seg.pi1 > 0.0 && seg.pi1 < 1.0)) throw std::domain_error("DriftSchedule: marginal outside (0,1)");
        }
    }
};

// Streaming label-shift sampler over a drift schedule. Per sample the draw
// order is: label uniform, then two normal variates for the features. The
// source config fixes the Bayes rule and the per-segment analytic risk used
// for the running-risk annotation.
class DriftSampler {
public:
    DriftSampler(DriftSchedule schedule, GaussianLabelShiftConfig source_cfg, std::uint64_t seed,
                 std::uint64_t stream = 0)
        : schedule_(std::move(schedule)), cfg_(source_cfg), rng_(seed, stream) {
        schedule_.validate();
        cfg_.validate();
        segment_risk_.reserve(schedule_.segments.size());
        for (const auto& seg : schedule_.segments) {
            GaussianLabelShiftConfig c = cfg_;
            c.pi1_target = seg.pi1;
            segment_risk_.push_back(analytic_target_misclassification_risk(c));
        }
    }

    bool exhausted() const { return segment_ >= schedule_.segments.size(); }
    std::size_t emitted() const { return emitted_; }

    LabeledSample next() {
        if (exhausted()) throw std::out_of_range("DriftSampler: schedule exhausted");
        const double pi1 = schedule_.segments[segment_].pi1;
        LabeledSample s;
        s.y = rng_.next_unit() < pi1 ? 1 : 0;
        const auto& mu = s.y == 1 ? cfg_.mu1 : cfg_.mu0;
        s.x[0] = mu[0] + rng_.next_normal();
        s.x[1] = mu[1] + rng_.next_normal();
        risk_sum_ += segment_risk_[segment_];
        emitted_ += 1;
        s.running_risk = risk_sum_ / static_cast<double>(emitted_);
        in_segment_ += 1;
        if (in_segment_ >= schedule_.segments[segment_].count) {
            in_segment_ = 0;
            segment_ += 1;
        }
        return s;
    }

    // Misclassification loss of the source-optimal rule on the next sample.
    double next_loss() {
        const LabeledSample s = next();
        return bayes_predict(s.x, cfg_) != s.y ? 1.0 : 0.0;
    }

    double running_risk() const {
        return emitted_ == 0 ? std::numeric_limits<double>::quiet_NaN()
                             : risk_sum_ / static_cast<double>(emitted_);
    }

private:
    DriftSchedule schedule_;
    GaussianLabelShiftConfig cfg_;
    RandomStream rng_;
    std::vector<double> segment_risk_;
    std::size_t segment_ = 0;
    std::size_t in_segment_ = 0;
    std::size_t emitted_ = 0;
    double risk_sum_ = 0.0;
};

inline std::vector<LabeledSample> sample_label_shift(const GaussianLabelShiftConfig& cfg,
                                                     std::size_t n, std::uint64_t seed,
                                                     std::uint64_t stream = 0) {
    if (n < 1) throw std::domain_error("sample_label_shift: n must be >= 1");
    DriftSampler sampler(DriftSchedule::single(cfg.pi1_target, n), cfg, seed, stream);
    std::vector<LabeledSample> out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) out.push_back(sampler.next());
    return out;
}

inline std::vector<LabeledSample> sample_drift(const DriftSchedule& schedule,
                                               const GaussianLabelShiftConfig& source_cfg,
                                               std::uint64_t seed, std::uint64_t stream = 0) {
    DriftSampler sampler(schedule, source_cfg, seed, stream);
    std::vector<LabeledSample> out;
    out.reserve(schedule.total());
    while (!sampler.exhausted()) out.push_back(sampler.next());
    return out;
}

// ---------------------------------------------------------------------------
// Circle covariate shift. Each point goes to the origin cluster or to a unit
// circle arc with probability 1/2, gets N(0, noise_var I2) feature noise, and
// is labeled by the squared-radius rule 1{x1^2 + x2^2 >= 1/2}. Draw order per
// sample: assignment uniform, angle uniform (circle points only), two normals.

struct CircleShiftConfig {
    double angle_lo_source = -1.0471975511965976;  // -pi/3
    double angle_hi_source = 1.0471975511965976;   //  pi/3
    double angle_lo_target = 0.0;
    double angle_hi_target = 6.283185307179586;    //  2 pi
    double noise_var = 1.0 / 36.0;

    void validate() const {
        if (!(noise_var > 0.0)) throw std::domain_error("CircleShiftConfig: noise_var <= 0");
        if (angle_hi_source < angle_lo_source || angle_hi_target < angle_lo_target) {
            throw std::domain_error("CircleShiftConfig: empty arc");
        }
    }
};

inline int circle_label(const std::array<double, 2>& x) {
    return (x[0] * x[0] + x[1] * x[1] >= 0.5) ? 1 : 0;
}

inline std::vector<LabeledSample> sample_circle_shift(const CircleShiftConfig& cfg, std::size_t n,
                                                      std::uint64_t seed, bool target_domain,
                                                      std::uint64_t stream = 0) {
    cfg.validate();
    if (n < 1) throw std::domain_error("sample_circle_shift: n must be >= 1");
    const double lo = target_domain ? cfg.angle_lo_target : cfg.angle_lo_source;
    const double hi = target_domain ? cfg.angle_hi_target : cfg.angle_hi_source;
    const double sd = std::sqrt(cfg.noise_var);
    RandomStream rng(seed, stream);
    std::vector<LabeledSample> out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        LabeledSample s;
        const bool on_circle = rng.next_unit() < 0.5;
        double cx = 0.0, cy = 0.0;
        if (on_circle) {
            const double phi = rng.next_uniform(lo, hi);
            cx = std::cos(phi);
            cy = std::sin(phi);
        }
        s.x[0] = cx + sd * rng.next_normal();
        s.x[1] = cy + sd * rng.next_normal();
        s.y = circle_label(s.x);
        out.push_back(s);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Label-shift condition number: kappa = sup_y w_y / inf_{y: w_y != 0} w_y
// with importance weights w_y = pi_y^T / pi_y^S. Returns +inf when the target
// puts mass on a class the source never produces.

inline double condition_number(std::span<const double> pi_source, std::span<const double> pi_target) {
    if (pi_source.size() != pi_target.size() || pi_source.size() < 2) {
        throw std::domain_error("condition_number: need aligned simplex vectors with K >= 2");
    }
    auto check_simplex = [](std::span<const double> p) {
        double sum = 0.0;
        for (double v : p) {
            if (!(v >= 0.0 && v <= 1.0)) throw std::domain_error("condition_number: entry outside [0,1]");
            sum += v;
        }
        if (std::fabs(sum - 1.0) > 1e-9) throw std::domain_error("condition_number: entries do not sum to 1");
    };
    check_simplex(pi_source);
    check_simplex(pi_target);

    double sup_w = 0.0;
    double inf_w = std::numeric_limits<double>::infinity();
    for (std::size_t y = 0; y < pi_source.size(); ++y) {
        if (pi_source[y] == 0.0) {
            if (pi_target[y] > 0.0) return std::numeric_limits<double>::infinity();
            continue;  // class absent from both domains
        }
        const double w = pi_target[y] / pi_source[y];
        sup_w = std::max(sup_w, w);
        if (w > 0.0) inf_w = std::min(inf_w, w);
    }
    return sup_w / inf_w;
}

// ---------------------------------------------------------------------------
// Minimal logistic scorer for the covariate-shift experiment: full-batch
// gradient descent on the log loss, deterministic in its inputs.

struct LinearScorer {
    double w0 = 0.0;  // intercept
    double w1 = 0.0;
    double w2 = 0.0;

    double score(const std::array<double, 2>& x) const { return w0 + w1 * x[0] + w2 * x[1]; }
    int predict(const std::array<double, 2>& x) const { return score(x) >= 0.0 ? 1 : 0; }
};

inline LinearScorer fit_logistic(std::span<const LabeledSample> data, std::size_t iters = 500,
                                 double learning_rate = 0.5) {
    if (data.empty()) throw std::domain_error("fit_logistic: empty sample");
    LinearScorer w;
    const double n = static_cast<double>(data.size());
    for (std::size_t it = 0; it < iters; ++it) {
        double g0 = 0.0, g1 = 0.0, g2 = 0.0;
        for (const auto& s : data) {
            const double p = 1.0 / (1.0 + std::exp(-w.score(s.x)));
            const double err = p - static_cast<double>(s.y);
            g0 += err;
            g1 += err * s.x[0];
            g2 += err * s.x[1];
        }
        w.w0 -= learning_rate * g0 / n;
        w.w1 -= learning_rate * g1 / n;
        w.w2 -= learning_rate * g2 / n;
    }
    return w;
}

// Scenario descriptions shared by the simulation harness and the CLI: a
// source configuration plus a target drift schedule (a single segment is the
// i.i.d. case).
struct ScenarioConfig {
    GaussianLabelShiftConfig source;
    DriftSchedule target_schedule;

    static ScenarioConfig iid(const GaussianLabelShiftConfig& cfg, std::size_t horizon) {
        return {cfg, DriftSchedule::single(cfg.pi1_target, horizon)};
    }

    // Null prefix at the source marginal, then a shifted tail: the changepoint
    // harness's stream with a change at index `change_at` (1-based).
    static ScenarioConfig change_at(const GaussianLabelShiftConfig& cfg, double pi1_shifted,
                                    std::size_t change_index, std::size_t horizon) {
        if (change_index < 1 || change_index > horizon) {
            throw std::domain_error("ScenarioConfig: change index outside [1, horizon]");
        }
        DriftSchedule sched;
        if (change_index > 1) sched.segments.push_back({cfg.pi1_source, change_index - 1});
        sched.segments.push_back({pi1_shifted, horizon - change_index + 1});
        return {cfg, sched};
    }

    DriftSampler sampler(std::uint64_t seed, std::uint64_t stream = 0) const {
        return DriftSampler(target_schedule, source, seed, stream);
    }
};

}  // namespace riskmon
