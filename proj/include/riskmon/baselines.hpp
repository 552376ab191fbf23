#pragma once
// Comparison methods: CLT-based lower bounds (optionally Bonferroni-corrected
// for continuous monitoring) and conformal test martingales driven by
// conformity scores, conformal p-values, and simple-bet / simple-mixture
// betting martingales (Vovk et al.). The conformal machinery detects
// deviations from exchangeability, not risk increases, which is exactly the
// contrast the experiments exercise.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <vector>

#include "riskmon/losses.hpp"
#include "riskmon/math.hpp"
#include "riskmon/random.hpp"

namespace riskmon {

// ---------------------------------------------------------------------------
// CLT lower bound: mean - z_{delta_eff} * sd / sqrt(t), a fixed-time bound
// with no time-uniform validity unless corrected.

enum class CltCorrection { None, PowerBonferroni, PolynomialBonferroni };

struct CltBoundState {
    double delta = 0.1;
    CltCorrection correction = CltCorrection::None;
    std::size_t t = 0;
    double mean = 0.0;
    double m2 = 0.0;  // Welford sum of squared deviations; exact 0 on constant streams
    std::size_t eval_count = 0;  // advances per evaluation, not per observation
};

inline void clt_observe(CltBoundState& state, double z) {
    check_unit_loss(z);
    state.t += 1;
    const double d = z - state.mean;
    state.mean += d / static_cast<double>(state.t);
    state.m2 += d * (z - state.mean);
}

inline double clt_evaluate(CltBoundState& state) {
    state.eval_count += 1;
    if (state.t < 2) return 0.0;  // degenerate variance: vacuous bound
    double delta_eff = state.delta;
    switch (state.correction) {
        case CltCorrection::None:
            break;
        case CltCorrection::PowerBonferroni:
            delta_eff = state.delta * std::pow(2.0, -static_cast<double>(state.eval_count));
            break;
        case CltCorrection::PolynomialBonferroni: {
            const double i = static_cast<double>(state.eval_count);
            delta_eff = (6.0 / (3.14159265358979323846 * 3.14159265358979323846)) * state.delta / (i * i);
            break;
        }
    }
    if (delta_eff < 1e-300) return 0.0;  // budget exhausted below double range
    const double n = static_cast<double>(state.t);
    const double var = std::max(0.0, state.m2 / (n - 1.0));
    return state.mean - normal_quantile(1.0 - delta_eff) * std::sqrt(var / n);
}

// Observe one value and re-evaluate (per-step monitoring).
inline double clt_lower(CltBoundState& state, double z) {
    clt_observe(state, z);
    return clt_evaluate(state);
}

// ---------------------------------------------------------------------------
// Conformity scores. Higher = more conforming.

inline double conformity_score_regression(double y, double y_hat) { return -std::fabs(y - y_hat); }

// 1 - (estimated mass of labels strictly more likely than the true one);
// equals 1 when the true label is top-ranked.
inline double conformity_score_classification(const LabelDistribution& f, int y) {
    return 1.0 - superlevel_mass(f, y);
}

// ---------------------------------------------------------------------------
// Conformal test martingale.

enum class MartingaleKind { SimpleBet, SimpleMixture };

struct ConformalMartingaleState {
    MartingaleKind kind = MartingaleKind::SimpleMixture;
    double epsilon = 0.1;  // SimpleBet exponent parameter
    std::vector<double> sorted_scores;
    std::size_t n = 0;        // scores observed
    std::size_t p_count = 0;  // p-values bet on
    double log_wealth = 0.0;
    double sum_log_p = 0.0;  // SimpleMixture sufficient statistic
    RandomStream rng{0, 0};  // seeded tie-break stream

    static ConformalMartingaleState simple_bet(double epsilon, std::uint64_t seed,
                                               std::uint64_t stream = 0) {
        if (!(epsilon > 0.0 && epsilon <= 1.0)) {
            throw std::domain_error("ConformalMartingaleState: epsilon outside (0,1]");
        }
        ConformalMartingaleState s;
        s.kind = MartingaleKind::SimpleBet;
        s.epsilon = epsilon;
        s.rng = RandomStream(seed, stream);
        return s;
    }

    static ConformalMartingaleState simple_mixture(std::uint64_t seed, std::uint64_t stream = 0) {
        ConformalMartingaleState s;
        s.kind = MartingaleKind::SimpleMixture;
        s.rng = RandomStream(seed, stream);
        return s;
    }

    double log_wealth_value() const { return log_wealth; }
};

// P_n = (#{i<=n: a_i < a_n} + u #{i<=n: a_i = a_n}) / n, the new score
// counting itself in the tie term; u is uniform from the state's stream.
inline double conformal_p_value(ConformalMartingaleState& state, double alpha_n) {
    auto lo = std::lower_bound(state.sorted_scores.begin(), state.sorted_scores.end(), alpha_n);
    auto hi = std::upper_bound(lo, state.sorted_scores.end(), alpha_n);
    const double count_less = static_cast<double>(lo - state.sorted_scores.begin());
    const double count_eq = static_cast<double>(hi - lo) + 1.0;  // self tie
    state.sorted_scores.insert(hi, alpha_n);
    state.n += 1;
    const double u = state.rng.next_unit();
    return (count_less + u * count_eq) / static_cast<double>(state.n);
}

// log integral_0^1 eps^n exp((eps-1) A) d eps with A = sum of log p-values,
// by 256-node Gauss-Legendre in log space; the integrand is analytic on
// [0,1] so the fixed rule is ample. The mixture wealth is a function of
// (n, A) only, which lets callers evaluate it lazily at checkpoints.
inline double simple_mixture_log_wealth(std::size_t n, double sum_log_p) {
    static const QuadratureRule rule = gauss_legendre_unit(256);
    const double nd = static_cast<double>(n);
    double max_term = -std::numeric_limits<double>::infinity();
    std::array<double, 256> terms{};
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
        const double eps = rule.nodes[i];
        terms[i] = std::log(rule.weights[i]) + nd * std::log(eps) + (eps - 1.0) * sum_log_p;
        max_term = std::max(max_term, terms[i]);
    }
    double acc = 0.0;
    for (double term : terms) acc += std::exp(term - max_term);
    return max_term + std::log(acc);
}

// Feeds one p-value; returns the martingale value S_n. SimpleBet multiplies
// by eps p^{eps-1}; SimpleMixture integrates the simple bet over eps in [0,1].
inline double martingale_update(ConformalMartingaleState& state, double p) {
    if (!(p > 0.0 && p <= 1.0)) throw std::domain_error("martingale_update: p outside (0,1]");
    state.p_count += 1;
    state.sum_log_p += std::log(p);
    if (state.kind == MartingaleKind::SimpleBet) {
        state.log_wealth += std::log(state.epsilon) + (state.epsilon - 1.0) * std::log(p);
    } else {
        state.log_wealth = simple_mixture_log_wealth(state.p_count, state.sum_log_p);
    }
    return std::exp(state.log_wealth);
}

// Convenience for streams fed by scores rather than precomputed p-values.
inline double martingale_observe_score(ConformalMartingaleState& state, double score) {
    return martingale_update(state, conformal_p_value(state, score));
}

}  // namespace riskmon
