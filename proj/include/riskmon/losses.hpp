#pragma once
// Bounded loss functions on (prediction, label) pairs, all mapping into [0,1],
// plus RCPS calibration of set-valued predictors on precomputed score vectors.
//
// Brier variants follow Brier (1950) and its multiclass generalizations;
// set calibration follows Bates et al. (2021), "Distribution-free,
// risk-controlling prediction sets".

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <variant>
#include <vector>

#include "riskmon/bounds.hpp"

namespace riskmon {

// Probability vector over K >= 2 classes. Entries must sum to 1 within 1e-9;
// out-of-tolerance vectors are rejected rather than renormalized so upstream
// bugs surface here.
struct LabelDistribution {
    std::vector<double> probs;

    static LabelDistribution make(std::vector<double> p) {
        if (p.size() < 2) throw std::domain_error("LabelDistribution: need at least 2 classes");
        double sum = 0.0;
        for (double v : p) {
            if (!(v >= 0.0 && v <= 1.0)) throw std::domain_error("LabelDistribution: entry outside [0,1]");
            sum += v;
        }
        if (std::fabs(sum - 1.0) > 1e-9) throw std::domain_error("LabelDistribution: entries do not sum to 1");
        return LabelDistribution{std::move(p)};
    }

    std::size_t num_classes() const { return probs.size(); }
};

// Ties broken toward the lowest class index.
inline int argmax_label(const LabelDistribution& f) {
    int best = 0;
    for (std::size_t k = 1; k < f.probs.size(); ++k) {
        if (f.probs[k] > f.probs[best]) best = static_cast<int>(k);
    }
    return best;
}

struct CostVector {
    std::vector<double> costs;
    double max_cost = 0.0;

    static CostVector make(std::vector<double> c) {
        if (c.empty()) throw std::domain_error("CostVector: empty");
        double mx = 0.0;
        for (double v : c) {
            if (!(v >= 0.0)) throw std::domain_error("CostVector: negative cost");
            mx = std::max(mx, v);
        }
        if (!(mx > 0.0)) throw std::domain_error("CostVector: all costs are zero");
        return CostVector{std::move(c), mx};
    }
};

inline void check_label(int y, std::size_t num_classes, const char* who) {
    if (y < 0 || static_cast<std::size_t>(y) >= num_classes) {
        throw std::domain_error(std::string(who) + ": class index out of range");
    }
}

inline double misclassification_loss(int pred, int y, std::size_t num_classes) {
    check_label(pred, num_classes, "misclassification_loss");
    check_label(y, num_classes, "misclassification_loss");
    return pred != y ? 1.0 : 0.0;
}

// ell_y * 1{pred != y} rescaled by L = max_k ell_k so the result lives in
// [0,1]; multiply by L to recover the unscaled risk.
inline double weighted_misclassification_loss(int pred, int y, const CostVector& costs) {
    check_label(pred, costs.costs.size(), "weighted_misclassification_loss");
    check_label(y, costs.costs.size(), "weighted_misclassification_loss");
    if (pred == y) return 0.0;
    return costs.costs[y] / costs.max_cost;
}

// 0.5 * ||f - onehot(y)||^2
inline double brier_loss(const LabelDistribution& f, int y) {
    check_label(y, f.num_classes(), "brier_loss");
    double acc = 0.0;
    for (std::size_t k = 0; k < f.probs.size(); ++k) {
        const double h = (static_cast<int>(k) == y) ? 1.0 : 0.0;
        acc += (f.probs[k] - h) * (f.probs[k] - h);
    }
    return 0.5 * acc;
}

// (f_top - 1{top = y})^2 with the lowest-index argmax.
inline double top_label_brier_loss(const LabelDistribution& f, int y) {
    check_label(y, f.num_classes(), "top_label_brier_loss");
    const int top = argmax_label(f);
    const double h = (top == y) ? 1.0 : 0.0;
    return (f.probs[top] - h) * (f.probs[top] - h);
}

// (f_y - 1)^2
inline double true_class_brier_loss(const LabelDistribution& f, int y) {
    check_label(y, f.num_classes(), "true_class_brier_loss");
    return (f.probs[y] - 1.0) * (f.probs[y] - 1.0);
}

// 1{y not in S}; the empty set is a legal prediction with loss 1.
inline double miscoverage_loss(std::span<const int> set, int y) {
    if (y < 0) throw std::domain_error("miscoverage_loss: negative class index");
    for (int s : set) {
        if (s == y) return 0.0;
    }
    return 1.0;
}

// rho_y(f) = estimated probability mass of labels strictly more likely than y.
inline double superlevel_mass(const LabelDistribution& f, int y) {
    check_label(y, f.num_classes(), "superlevel_mass");
    const double fy = f.probs[y];
    double mass = 0.0;
    for (double v : f.probs) {
        if (v > fy) mass += v;
    }
    return mass;
}

// S_lambda = {y : rho_y(f) <= lambda}; nested (monotone) in lambda.
inline std::vector<int> density_superlevel_set(const LabelDistribution& f, double lambda) {
    if (!(lambda >= 0.0 && lambda <= 1.0)) throw std::domain_error("density_superlevel_set: lambda outside [0,1]");
    std::vector<int> out;
    for (std::size_t y = 0; y < f.num_classes(); ++y) {
        if (superlevel_mass(f, static_cast<int>(y)) <= lambda) out.push_back(static_cast<int>(y));
    }
    return out;
}

// ---------------------------------------------------------------------------
// RCPS calibration.

struct SetPredictorFamily {
    std::vector<LabelDistribution> scores;  // one estimated class distribution per point
    std::vector<int> labels;

    static SetPredictorFamily make(std::vector<LabelDistribution> scores, std::vector<int> labels) {
        if (scores.empty() || scores.size() != labels.size()) {
            throw std::domain_error("SetPredictorFamily: scores and labels must be nonempty and aligned");
        }
        const std::size_t k = scores.front().num_classes();
        for (std::size_t i = 0; i < scores.size(); ++i) {
            if (scores[i].num_classes() != k) throw std::domain_error("SetPredictorFamily: ragged rows");
            check_label(labels[i], k, "SetPredictorFamily");
        }
        return SetPredictorFamily{std::move(scores), std::move(labels)};
    }
};

struct RcpsResult {
    double lambda_hat = 1.0;
    bool saturated = false;
};

// lambda_hat = inf{lambda in grid : Rhat+(lambda') < beta for all grid
// lambda' > lambda}, where Rhat+ is the chosen fixed-sample upper confidence
// bound at level gamma on the miscoverage risk of S_lambda. If even the full
// label set (lambda = 1) cannot be certified, returns lambda = 1 flagged as
// saturated.
inline RcpsResult rcps_calibrate(const SetPredictorFamily& family, double beta, double gamma,
                                 BoundMethod bound_method, std::size_t grid_points = 1001) {
    if (!(beta > 0.0 && beta <= 1.0)) throw std::domain_error("rcps_calibrate: beta outside (0,1]");
    if (!(gamma > 0.0 && gamma < 1.0)) throw std::domain_error("rcps_calibrate: gamma outside (0,1)");
    if (grid_points < 2) throw std::domain_error("rcps_calibrate: need at least 2 grid points");

    const std::size_t n = family.scores.size();
    std::vector<double> coverage_threshold(n);  // rho of the true label; covered iff rho <= lambda
    for (std::size_t i = 0; i < n; ++i) {
        coverage_threshold[i] = superlevel_mass(family.scores[i], family.labels[i]);
    }

    BoundConfig cfg;
    cfg.delta = gamma;
    cfg.method = bound_method;
    cfg.side = BoundSide::Upper;

    std::vector<double> losses(n);
    auto risk_ucb = [&](double lambda) {
        for (std::size_t i = 0; i < n; ++i) {
            losses[i] = coverage_threshold[i] > lambda ? 1.0 : 0.0;
        }
        return source_upper_bound(losses, cfg).value;
    };

    // Scan from the top of the grid; the first failing lambda' pins the answer.
    const double step = 1.0 / static_cast<double>(grid_points - 1);
    for (std::size_t j = grid_points; j-- > 0;) {
        const double lambda = std::min(1.0, static_cast<double>(j) * step);
        if (!(risk_ucb(lambda) < beta)) {
            return {lambda, j == grid_points - 1};
        }
    }
    return {0.0, false};
}

// ---------------------------------------------------------------------------
// Predictions as consumed by the CLI stream reader: a point label, a
// distribution over labels, or a label set.

enum class LossKind { Misclassification, Brier, TopLabelBrier, TrueClassBrier, Miscoverage };

struct PredictionRecord {
    std::variant<int, LabelDistribution, std::vector<int>> prediction;
    int true_label = 0;
};

inline double loss_of(const PredictionRecord& rec, LossKind kind, std::size_t num_classes) {
    switch (kind) {
        case LossKind::Misclassification:
            if (const int* p = std::get_if<int>(&rec.prediction)) {
                return misclassification_loss(*p, rec.true_label, num_classes);
            }
            if (const auto* f = std::get_if<LabelDistribution>(&rec.prediction)) {
                return misclassification_loss(argmax_label(*f), rec.true_label, f->num_classes());
            }
            throw std::domain_error("loss_of: misclassification needs a point label or a distribution");
        case LossKind::Brier:
        case LossKind::TopLabelBrier:
        case LossKind::TrueClassBrier: {
            const auto* f = std::get_if<LabelDistribution>(&rec.prediction);
            if (!f) throw std::domain_error("loss_of: Brier losses need a distribution prediction");
            if (kind == LossKind::Brier) return brier_loss(*f, rec.true_label);
            if (kind == LossKind::TopLabelBrier) return top_label_brier_loss(*f, rec.true_label);
            return true_class_brier_loss(*f, rec.true_label);
        }
        case LossKind::Miscoverage: {
            const auto* s = std::get_if<std::vector<int>>(&rec.prediction);
            if (!s) throw std::domain_error("loss_of: miscoverage needs a set prediction");
            return miscoverage_loss(*s, rec.true_label);
        }
    }
    throw std::domain_error("loss_of: unknown loss kind");
}

}  // namespace riskmon
