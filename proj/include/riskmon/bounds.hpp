#pragma once
// Fixed-sample upper confidence bounds and time-uniform confidence sequences
// for means of [0,1]-bounded streams.
//
// Families:
//   - fixed-sample Hoeffding interval,
//   - predictably-mixed Hoeffding (PM-H) confidence sequence,
//   - predictably-mixed empirical-Bernstein (PM-EB) confidence sequence,
//   - betting (capital process) confidence sequence with grid search,
//   - conjugate-mixture empirical-Bernstein (CM-EB) via the gamma-exponential
//     mixture boundary, valid for running means under drift.
//
// References: Waudby-Smith & Ramdas (2020), "Estimating means of bounded
// random variables by betting"; Howard et al. (2021), "Time-uniform,
// nonparametric, nonasymptotic confidence sequences".

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <stdexcept>
#include <tuple>
#include <vector>

#include <boost/math/special_functions/gamma.hpp>

namespace riskmon {

enum class BoundMethod { FixedHoeffding, PMHoeffding, PMEmpiricalBernstein, Betting, CMEB };
enum class BoundSide { Lower, Upper, TwoSided };

struct BoundConfig {
    double delta = 0.05;                 // error budget in (0,1)
    BoundMethod method = BoundMethod::Betting;
    BoundSide side = BoundSide::TwoSided;
    double c_cap = 0.5;                  // truncation constant in (0,1)
    double grid_resolution = 1e-3;       // betting grid spacing
    double cmeb_v_opt = 100.0;           // intrinsic time the CM-EB boundary is tuned for
    std::optional<double> cmeb_rho;      // explicit mixture scale; computed from v_opt if absent
    std::optional<std::size_t> horizon;  // fixed-n schedule for PM-EB when declared

    void validate() const {
        if (!(delta > 0.0 && delta < 1.0)) throw std::domain_error("BoundConfig: delta outside (0,1)");
        if (!(c_cap > 0.0 && c_cap < 1.0)) throw std::domain_error("BoundConfig: c_cap outside (0,1)");
        if (!(grid_resolution > 0.0)) throw std::domain_error("BoundConfig: grid_resolution <= 0");
    }
};

struct Bounds {
    double lower = 0.0;
    double upper = 1.0;
};

inline void check_unit_loss(double z) {
    if (!(z >= 0.0 && z <= 1.0)) throw std::domain_error("loss outside [0,1]");
}

inline double clamp_unit(double x) { return std::min(1.0, std::max(0.0, x)); }

// ---------------------------------------------------------------------------
// Regularized running moments shared by PM-EB and the betting rate:
//   mu_t    = (1/2 + sum_{i<=t} Z_i) / (t+1)
//   sigma2_t = (1/4 + sum_{i<=t} (Z_i - mu_i)^2) / (t+1)
// with mu_0 = 1/2, sigma2_0 = 1/4.
struct RunningMoments {
    std::size_t t = 0;
    double sum_z = 0.0;
    double sum_sq_dev = 0.0;
    double mean = 0.5;
    double var = 0.25;

    void push(double z) {
        t += 1;
        sum_z += z;
        mean = (0.5 + sum_z) / static_cast<double>(t + 1);
        const double d = z - mean;
        sum_sq_dev += d * d;
        var = (0.25 + sum_sq_dev) / static_cast<double>(t + 1);
    }
};

// ---------------------------------------------------------------------------
// Fixed-sample Hoeffding upper bound.

struct SourceBound {
    double value = 1.0;      // upper confidence bound on the source risk
    double eps_appr = 1.0;   // value minus the empirical mean
    std::size_t n_source = 0;
    BoundMethod method = BoundMethod::FixedHoeffding;
    double delta_s = 0.0;
};

inline SourceBound hoeffding_fixed_upper(std::span<const double> losses, double delta) {
    if (losses.empty()) throw std::domain_error("hoeffding_fixed_upper: empty sample");
    if (!(delta > 0.0 && delta < 1.0)) throw std::domain_error("hoeffding_fixed_upper: delta outside (0,1)");
    double sum = 0.0;
    for (double z : losses) {
        check_unit_loss(z);
        sum += z;
    }
    const double n = static_cast<double>(losses.size());
    const double radius = std::sqrt(std::log(1.0 / delta) / (2.0 * n));
    SourceBound b;
    b.value = sum / n + radius;
    b.eps_appr = radius;
    b.n_source = losses.size();
    b.method = BoundMethod::FixedHoeffding;
    b.delta_s = delta;
    return b;
}

// ---------------------------------------------------------------------------
// PM-H confidence sequence.

// lambda_t = sqrt(8 log(1/delta) / (t log(t+1))) clipped at 1.
inline double pmh_lambda(std::size_t t, double delta) {
    if (t < 1) throw std::domain_error("pmh_lambda: t must be >= 1");
    const double td = static_cast<double>(t);
    const double raw = std::sqrt(8.0 * std::log(1.0 / delta) / (td * std::log(td + 1.0)));
    return std::min(raw, 1.0);
}

struct PmhState {
    std::size_t t = 0;
    double sum_lambda = 0.0;
    double sum_lambda_z = 0.0;
    double sum_psi = 0.0;
    double raw_lower = -std::numeric_limits<double>::infinity();
    double raw_upper = std::numeric_limits<double>::infinity();
};

inline Bounds pmh_update(PmhState& state, double z, double delta) {
    check_unit_loss(z);
    const double lam = pmh_lambda(state.t + 1, delta);
    state.t += 1;
    state.sum_lambda += lam;
    state.sum_lambda_z += lam * z;
    state.sum_psi += lam * lam / 8.0;
    const double center = state.sum_lambda_z / state.sum_lambda;
    const double radius = (std::log(1.0 / delta) + state.sum_psi) / state.sum_lambda;
    state.raw_lower = center - radius;
    state.raw_upper = center + radius;
    return {clamp_unit(state.raw_lower), clamp_unit(state.raw_upper)};
}

// ---------------------------------------------------------------------------
// PM-EB confidence sequence. psi_E(lambda) = (-log(1-lambda) - lambda) / 4.

inline double psi_e(double lam) {
    if (!(lam >= 0.0 && lam < 1.0)) throw std::domain_error("psi_e: lambda outside [0,1)");
    return (-std::log1p(-lam) - lam) / 4.0;
}

struct PmebState {
    std::size_t t = 0;
    double sum_lambda = 0.0;
    double sum_lambda_z = 0.0;
    double sum_v_psi = 0.0;
    RunningMoments moments;  // mu_hat / sigma2_hat of past observations
    double raw_lower = -std::numeric_limits<double>::infinity();
    double raw_upper = std::numeric_limits<double>::infinity();
};

// Streaming schedule by default; fixed-n schedule when `horizon` is declared.
inline double pmeb_lambda(const PmebState& state, double delta, double c_cap,
                          std::optional<std::size_t> horizon) {
    const double log1d = std::log(1.0 / delta);
    const double var_prev = state.moments.var;
    double raw;
    if (horizon) {
        raw = std::sqrt(2.0 * log1d / (static_cast<double>(*horizon) * var_prev));
    } else {
        const double td = static_cast<double>(state.t + 1);
        raw = std::sqrt(2.0 * log1d / (var_prev * td * std::log(1.0 + td)));
    }
    return std::min(raw, c_cap);
}

inline Bounds pmeb_update(PmebState& state, double z, double delta, double c_cap = 0.5,
                          std::optional<std::size_t> horizon = std::nullopt) {
    check_unit_loss(z);
    const double lam = pmeb_lambda(state, delta, c_cap, horizon);
    const double v = 4.0 * (z - state.moments.mean) * (z - state.moments.mean);
    state.t += 1;
    state.sum_lambda += lam;
    state.sum_lambda_z += lam * z;
    state.sum_v_psi += v * psi_e(lam);
    const double center = state.sum_lambda_z / state.sum_lambda;
    const double radius = (std::log(1.0 / delta) + state.sum_v_psi) / state.sum_lambda;
    state.raw_lower = center - radius;
    state.raw_upper = center + radius;
    state.moments.push(z);
    return {clamp_unit(state.raw_lower), clamp_unit(state.raw_upper)};
}

// ---------------------------------------------------------------------------
// Betting confidence sequence. Capital per candidate mean m:
//   K_t^+(m) = prod (1 + lambda_i^+(m) (Z_i - m)),  lambda^+(m) = min(|ldot|, c/m)
//   K_t^-(m) = prod (1 - lambda_i^-(m) (Z_i - m)),  lambda^-(m) = min(|ldot|, c/(1-m))
// with the shared predictable rate ldot_t = sqrt(2 log(1/delta) / (sigma2_{t-1} t log(1+t))).
// K^+ is nonincreasing in m and K^- nondecreasing, so the rejection boundary is
// located by binary search over the grid. All capital arithmetic is in log space.

struct BettingState {
    double delta = 0.05;
    double c_cap = 0.5;
    double resolution = 1e-3;
    bool track_lower = true;
    bool track_upper = true;
    std::optional<std::size_t> horizon;  // fixed-n rate when declared (fixed-sample bounds)
    std::size_t t = 0;
    RunningMoments moments;
    std::vector<double> log_capital_plus;   // per grid point, empty if !track_lower
    std::vector<double> log_capital_minus;  // per grid point, empty if !track_upper
    double best_lower = 0.0;  // running max of inf B_t^+
    double best_upper = 1.0;  // running min of sup B_t^-
    double last_lower = 0.0;
    double last_upper = 1.0;

    static BettingState make(const BoundConfig& cfg) {
        cfg.validate();
        BettingState s;
        s.delta = cfg.delta;
        s.c_cap = cfg.c_cap;
        s.resolution = cfg.grid_resolution;
        s.track_lower = cfg.side != BoundSide::Upper;
        s.track_upper = cfg.side != BoundSide::Lower;
        s.horizon = cfg.horizon;
        const std::size_t points = s.grid_size();
        if (s.track_lower) s.log_capital_plus.assign(points, 0.0);
        if (s.track_upper) s.log_capital_minus.assign(points, 0.0);
        return s;
    }

    std::size_t grid_size() const {
        return static_cast<std::size_t>(std::ceil(1.0 / resolution)) + 1;
    }
    double grid_point(std::size_t j) const {
        return std::min(1.0, static_cast<double>(j) * resolution);
    }
};

inline double betting_lambda_dot(const RunningMoments& m, std::size_t next_t, double delta,
                                 std::optional<std::size_t> horizon = std::nullopt) {
    if (horizon) {
        return std::sqrt(2.0 * std::log(1.0 / delta) / (m.var * static_cast<double>(*horizon)));
    }
    const double td = static_cast<double>(next_t);
    return std::sqrt(2.0 * std::log(1.0 / delta) / (m.var * td * std::log(1.0 + td)));
}

inline Bounds betting_update(BettingState& state, double z, double delta) {
    check_unit_loss(z);
    if (delta != state.delta) throw std::invalid_argument("betting_update: delta differs from state config");
    const double ldot = betting_lambda_dot(state.moments, state.t + 1, state.delta, state.horizon);
    const std::size_t points = state.grid_size();
    const double log_threshold = std::log(1.0 / state.delta);
    const double inf = std::numeric_limits<double>::infinity();

    if (state.track_lower) {
        for (std::size_t j = 0; j < points; ++j) {
            const double m = state.grid_point(j);
            const double cap = (m > 0.0) ? state.c_cap / m : inf;
            const double lam = std::min(ldot, cap);
            state.log_capital_plus[j] += std::log1p(lam * (z - m));
        }
        // first grid index whose capital dropped below 1/delta
        auto it = std::partition_point(state.log_capital_plus.begin(), state.log_capital_plus.end(),
                                       [&](double lk) { return lk >= log_threshold; });
        const std::size_t jf = static_cast<std::size_t>(it - state.log_capital_plus.begin());
        state.last_lower = (jf < points) ? state.grid_point(jf) : 1.0;
        state.best_lower = std::max(state.best_lower, state.last_lower);
    }
    if (state.track_upper) {
        for (std::size_t j = 0; j < points; ++j) {
            const double m = state.grid_point(j);
            const double cap = (m < 1.0) ? state.c_cap / (1.0 - m) : inf;
            const double lam = std::min(ldot, cap);
            state.log_capital_minus[j] += std::log1p(-lam * (z - m));
        }
        // last grid index whose capital is still below 1/delta
        auto it = std::partition_point(state.log_capital_minus.begin(), state.log_capital_minus.end(),
                                       [&](double lk) { return lk < log_threshold; });
        const std::size_t jf = static_cast<std::size_t>(it - state.log_capital_minus.begin());
        state.last_upper = (jf > 0) ? state.grid_point(jf - 1) : 0.0;
        state.best_upper = std::min(state.best_upper, state.last_upper);
    }
    state.t += 1;
    state.moments.push(z);
    return {state.best_lower, state.best_upper};
}

// Single-grid-point capital tracker. For a monitor with a fixed rejection
// threshold, "lower bound > threshold" is equivalent to the capital at the
// largest grid point <= threshold reaching 1/delta (K^+ is nonincreasing in
// m), so only that one coordinate needs updating. Decisions and stopping
// times match the full-grid state exactly.
struct BettingThresholdTracker {
    double delta = 0.05;
    double c_cap = 0.5;
    double probe_m = 0.0;
    bool reachable = true;  // false when threshold >= 1: the bound can never exceed it
    std::optional<std::size_t> horizon;
    std::size_t t = 0;
    RunningMoments moments;
    double log_capital = 0.0;
    bool crossed = false;

    static BettingThresholdTracker make(const BoundConfig& cfg, double threshold) {
        cfg.validate();
        BettingThresholdTracker s;
        s.delta = cfg.delta;
        s.c_cap = cfg.c_cap;
        s.horizon = cfg.horizon;
        if (threshold >= 1.0) {
            s.reachable = false;
            return s;
        }
        // largest grid point <= threshold, matching full-grid comparison semantics
        const double res = cfg.grid_resolution;
        const std::size_t points = static_cast<std::size_t>(std::ceil(1.0 / res)) + 1;
        std::size_t j = std::min<std::size_t>(
            points - 1, static_cast<std::size_t>(std::max(0.0, std::floor(threshold / res))));
        auto grid_point = [&](std::size_t k) { return std::min(1.0, static_cast<double>(k) * res); };
        while (j + 1 < points && grid_point(j + 1) <= threshold) ++j;
        while (j > 0 && grid_point(j) > threshold) --j;
        if (grid_point(j) > threshold) {
            s.reachable = false;  // threshold below the whole grid; cannot exceed strictly
            return s;
        }
        s.probe_m = grid_point(j);
        return s;
    }

    // Returns true once the lower bound has ever exceeded the threshold.
    bool observe(double z) {
        check_unit_loss(z);
        if (!reachable) {
            t += 1;
            moments.push(z);
            return crossed;
        }
        const double ldot = betting_lambda_dot(moments, t + 1, delta, horizon);
        const double inf = std::numeric_limits<double>::infinity();
        const double cap = (probe_m > 0.0) ? c_cap / probe_m : inf;
        const double lam = std::min(ldot, cap);
        log_capital += std::log1p(lam * (z - probe_m));
        t += 1;
        moments.push(z);
        if (log_capital >= std::log(1.0 / delta)) crossed = true;
        return crossed;
    }
};

// ---------------------------------------------------------------------------
// CM-EB: gamma-exponential conjugate mixture boundary for sub-exponential
// processes with scale c (here c = 1 for unit-range losses).
//
// With a = rho/c^2, the mixing distribution places Gamma(a, a) restricted to
// (0,1] on x = 1 - c*lambda. The mixture
//   m(s,v) = int exp(lambda s - psi_E(lambda) v) dF(lambda)
// then has the closed form (A = (v+rho)/c^2, B = (cs+v+rho)/c^2):
//   log m = a log a - lgamma(a) - log P(a,a) + (B-a) + lgamma(A) + log P(A,B) - A log B,
// where P is the regularized lower incomplete gamma function.

inline double gamma_exponential_log_mixture(double s, double v, double rho, double c = 1.0) {
    if (!(rho > 0.0) || !(c > 0.0) || !(v >= 0.0)) {
        throw std::domain_error("gamma_exponential_log_mixture: invalid parameters");
    }
    const double c_sq = c * c;
    const double a = rho / c_sq;
    const double A = (v + rho) / c_sq;
    const double B = (c * s + v + rho) / c_sq;
    if (!(B > 0.0)) throw std::domain_error("gamma_exponential_log_mixture: c*s + v + rho must be positive");
    return a * std::log(a) - std::lgamma(a) - std::log(boost::math::gamma_p(a, a)) + (B - a) +
           std::lgamma(A) + std::log(boost::math::gamma_p(A, B)) - A * std::log(B);
}

// Boundary u with m(u, v) = 1/alpha, by bisection in s (m is increasing in s).
inline double cmeb_boundary(double v, double alpha, double rho, double c = 1.0) {
    if (!(v >= 0.0)) throw std::domain_error("cmeb_boundary: v must be >= 0");
    if (!(alpha > 0.0 && alpha < 1.0)) throw std::domain_error("cmeb_boundary: alpha outside (0,1)");
    const double target = std::log(1.0 / alpha);
    double lo = 0.0;
    double hi = 1.0;
    int expansions = 0;
    while (gamma_exponential_log_mixture(hi, v, rho, c) < target) {
        hi *= 2.0;
        if (++expansions > 200) throw std::runtime_error("cmeb_boundary: bracket expansion failed");
    }
    for (int iter = 0; iter < 200; ++iter) {
        const double mid = 0.5 * (lo + hi);
        if (gamma_exponential_log_mixture(mid, v, rho, c) < target) {
            lo = mid;
        } else {
            hi = mid;
        }
        if (hi - lo <= 1e-10 * std::max(1.0, hi)) return 0.5 * (lo + hi);
    }
    throw std::runtime_error("cmeb_boundary: bisection did not converge in 200 iterations");
}

// Mixture scale minimizing the boundary at intrinsic time v_opt
// (golden-section search on log rho).
inline double cmeb_best_rho(double alpha, double v_opt, double c = 1.0) {
    const double gr = 0.6180339887498949;
    double lo = std::log(1e-2);
    double hi = std::log(1e6);
    double x1 = hi - gr * (hi - lo);
    double x2 = lo + gr * (hi - lo);
    double f1 = cmeb_boundary(v_opt, alpha, std::exp(x1), c);
    double f2 = cmeb_boundary(v_opt, alpha, std::exp(x2), c);
    for (int iter = 0; iter < 80; ++iter) {
        if (f1 < f2) {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - gr * (hi - lo);
            f1 = cmeb_boundary(v_opt, alpha, std::exp(x1), c);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + gr * (hi - lo);
            f2 = cmeb_boundary(v_opt, alpha, std::exp(x2), c);
        }
    }
    return std::exp(0.5 * (lo + hi));
}

// Precomputed u(v) on a geometric grid; linear interpolation keeps the
// per-update cost of long Monte-Carlo streams flat. Values outside the table
// fall back to the exact solve.
class CmebBoundaryTable {
public:
    CmebBoundaryTable(double alpha, double rho, double c = 1.0)
        : alpha_(alpha), rho_(rho), c_(c) {
        const double ratio = 1.005;
        double v = v_min_;
        while (v <= v_max_ * ratio) {
            grid_v_.push_back(v);
            grid_u_.push_back(cmeb_boundary(v, alpha_, rho_, c_));
            v *= ratio;
        }
        log_ratio_ = std::log(ratio);
    }

    double lookup(double v) const {
        if (v <= v_min_) return grid_u_.front();
        if (v >= grid_v_.back()) return cmeb_boundary(v, alpha_, rho_, c_);
        const double pos = std::log(v / v_min_) / log_ratio_;
        std::size_t k = std::min(grid_v_.size() - 2, static_cast<std::size_t>(pos));
        while (k + 1 < grid_v_.size() - 1 && grid_v_[k + 1] <= v) ++k;
        while (k > 0 && grid_v_[k] > v) --k;
        const double w = (v - grid_v_[k]) / (grid_v_[k + 1] - grid_v_[k]);
        return grid_u_[k] + w * (grid_u_[k + 1] - grid_u_[k]);
    }

private:
    double alpha_;
    double rho_;
    double c_;
    double v_min_ = 1e-8;
    double v_max_ = 1e8;
    double log_ratio_ = 0.0;
    std::vector<double> grid_v_;
    std::vector<double> grid_u_;
};

// Shared registry so the thousands of monitors in a replication grid reuse
// one table per (alpha, rho, c).
inline std::shared_ptr<const CmebBoundaryTable> cmeb_boundary_table(double alpha, double rho,
                                                                    double c = 1.0) {
    static std::mutex mu;
    static std::map<std::tuple<double, double, double>, std::shared_ptr<const CmebBoundaryTable>> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto key = std::make_tuple(alpha, rho, c);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
    auto table = std::make_shared<const CmebBoundaryTable>(alpha, rho, c);
    cache.emplace(key, table);
    return table;
}

inline double resolve_cmeb_rho(const BoundConfig& cfg) {
    if (cfg.cmeb_rho) return *cfg.cmeb_rho;
    static std::mutex mu;
    static std::map<std::pair<double, double>, double> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto key = std::make_pair(cfg.delta, cfg.cmeb_v_opt);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
    const double rho = cmeb_best_rho(cfg.delta, cfg.cmeb_v_opt);
    cache.emplace(key, rho);
    return rho;
}

// Lower confidence sequence for the running mean mu_t = t^{-1} sum E_{i-1} Z_i,
// valid without an i.i.d. assumption. Predictable center Zhat_t is the mean of
// the first t-1 observations (Zhat_1 = 1/2).
struct CmebState {
    double alpha = 0.025;
    double rho = 0.0;
    std::size_t t = 0;
    double sum_z = 0.0;
    double v_total = 0.0;
    double raw_lower = -std::numeric_limits<double>::infinity();
    std::shared_ptr<const CmebBoundaryTable> table;  // optional fast path

    static CmebState make(const BoundConfig& cfg, bool use_table = true) {
        cfg.validate();
        CmebState s;
        s.alpha = cfg.delta;
        s.rho = resolve_cmeb_rho(cfg);
        if (use_table) s.table = cmeb_boundary_table(s.alpha, s.rho);
        return s;
    }

    double boundary(double v) const {
        return table ? table->lookup(v) : cmeb_boundary(v, alpha, rho);
    }
};

inline double cmeb_update(CmebState& state, double z) {
    check_unit_loss(z);
    const double z_hat = (state.t == 0) ? 0.5 : state.sum_z / static_cast<double>(state.t);
    state.v_total += (z - z_hat) * (z - z_hat);
    state.t += 1;
    state.sum_z += z;
    const double td = static_cast<double>(state.t);
    state.raw_lower = state.sum_z / td - state.boundary(state.v_total) / td;
    return clamp_unit(state.raw_lower);
}

// ---------------------------------------------------------------------------
// Fixed-sample upper confidence bound on a source sample with the configured
// method. Time-uniform families use their running intersection over the
// sample; the reported value is floored at the empirical mean.

inline SourceBound source_upper_bound(std::span<const double> losses, const BoundConfig& cfg) {
    cfg.validate();
    if (losses.empty()) throw std::domain_error("source_upper_bound: empty sample");
    if (cfg.method == BoundMethod::FixedHoeffding) return hoeffding_fixed_upper(losses, cfg.delta);

    double sum = 0.0;
    for (double z : losses) {
        check_unit_loss(z);
        sum += z;
    }
    const double mean = sum / static_cast<double>(losses.size());
    double best = std::numeric_limits<double>::infinity();

    switch (cfg.method) {
        case BoundMethod::PMHoeffding: {
            PmhState st;
            for (double z : losses) {
                pmh_update(st, z, cfg.delta);
                best = std::min(best, st.raw_upper);
            }
            break;
        }
        case BoundMethod::PMEmpiricalBernstein: {
            PmebState st;
            for (double z : losses) {
                pmeb_update(st, z, cfg.delta, cfg.c_cap, losses.size());
                best = std::min(best, st.raw_upper);
            }
            break;
        }
        case BoundMethod::Betting: {
            BoundConfig upper_cfg = cfg;
            upper_cfg.side = BoundSide::Upper;
            upper_cfg.horizon = losses.size();  // fixed-n rate, like the PM-EB CI schedule
            BettingState st = BettingState::make(upper_cfg);
            for (double z : losses) {
                const Bounds b = betting_update(st, z, cfg.delta);
                best = b.upper;  // already running-intersected
            }
            break;
        }
        default:
            throw std::invalid_argument("source_upper_bound: CM-EB is a target-side method");
    }

    SourceBound b;
    b.value = std::max(best, mean);
    b.eps_appr = b.value - mean;
    b.n_source = losses.size();
    b.method = cfg.method;
    b.delta_s = cfg.delta;
    return b;
}

}  // namespace riskmon
