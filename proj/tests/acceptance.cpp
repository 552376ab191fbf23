// Acceptance suite: end-to-end statistical checks of the monitoring
// framework on the synthetic pipelines, one pass/fail line per criterion.
//
//  1  anytime type-I control per target method on benign streams
//  2  rejection-curve shape over the label-shift grid (betting)
//  3  mean stopping-time ordering betting <= PM-EB <= PM-H on harmful points
//  4  betting source-bound eps_appr at n=1000 lands in [0.015, 0.035]
//  5  CLT vs betting miscoverage under fixed-time and continuous monitoring
//  6  CM-EB drift monitor: power within the schedule and running-risk coverage
//  7  conformal-martingale contrast on a cold-start harmful shift
//  8  oracle equivalences (analytic risk MC, Brier collapse, p-value
//     uniformity, martingale mean wealth)
//  9  changepoint null run length consistent with E[N*] >= 1/delta
// 10  circle covariate shift detected quickly by the CM-EB monitor
//
// Usage: riskmon_acceptance [--criterion N] [--all]; exit code = #failures.

#include <cmath>
#include <cstdio>
#include <cstring>
#include <string>
#include <vector>

#include "riskmon/baselines.hpp"
#include "riskmon/changepoint.hpp"
#include "riskmon/experiments.hpp"
#include "riskmon/losses.hpp"
#include "riskmon/parallel.hpp"

using namespace riskmon;

namespace {

int failures = 0;

void report(int criterion, bool pass, const std::string& detail) {
    std::printf("[%s] criterion %d: %s\n", pass ? "PASS" : "FAIL", criterion, detail.c_str());
    std::fflush(stdout);
    if (!pass) failures += 1;
}

std::string fp(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.4f", x);
    return buf;
}

GaussianLabelShiftConfig paper_config() {
    GaussianLabelShiftConfig cfg;  // mu0=(-1,0), mu1=(1,0)
    cfg.pi1_source = 0.25;
    cfg.pi1_target = 0.25;
    return cfg;
}

// 1 ------------------------------------------------------------------------
void criterion_1() {
    TypeOneConfig cfg;
    cfg.base = paper_config();
    cfg.pi1_benign = 0.40;  // analytically benign (boundary at 0.4384)
    cfg.runs = 1000;
    cfg.horizon = 10000;
    cfg.delta = 0.05;
    cfg.eps_tol = 0.05;
    cfg.seed = 2001;
    const std::vector<BoundMethod> methods{BoundMethod::PMHoeffding,
                                           BoundMethod::PMEmpiricalBernstein, BoundMethod::Betting,
                                           BoundMethod::CMEB};
    const auto results = type_one_error_multi(cfg, methods);
    const double cap = cfg.delta + 3.0 * mc_standard_error(cfg.delta, cfg.runs);
    bool pass = true;
    std::string detail = "ever-reject fraction by t=1e4 (cap " + fp(cap) + "):";
    const char* names[] = {"pm-h", "pm-eb", "betting", "cm-eb"};
    for (std::size_t i = 0; i < methods.size(); ++i) {
        pass = pass && results[i].rejection_fraction <= cap;
        detail += std::string(" ") + names[i] + "=" + fp(results[i].rejection_fraction);
    }
    report(1, pass, detail);
}

// 2 ------------------------------------------------------------------------
void criterion_2() {
    PowerGridConfig cfg;
    cfg.base = paper_config();
    cfg.target_methods = {BoundMethod::Betting};
    cfg.reps = 250;
    cfg.seed = 2002;
    const PowerGridResult res = label_shift_power_grid(cfg);

    bool benign_ok = true;
    double at_09 = 0.0;
    for (const auto& cell : res.cells) {
        if (!cell.harmful && cell.rejection_proportion > 0.1) benign_ok = false;
        if (cell.pi1_target == res.grid.back()) at_09 = cell.rejection_proportion;
    }
    const double step = res.grid[1] - res.grid[0];
    double first_harmful = 1.0;
    for (const auto& cell : res.cells) {
        if (cell.harmful) {
            first_harmful = cell.pi1_target;
            break;
        }
    }
    const bool transition_ok = std::fabs(first_harmful - res.analytic_harm_boundary) <= step;
    const bool pass = benign_ok && at_09 >= 0.9 && transition_ok;
    report(2, pass,
           "benign region max<=0.1: " + std::string(benign_ok ? "yes" : "no") +
               ", rejection at pi1=0.9: " + fp(at_09) + ", grid transition " + fp(first_harmful) +
               " vs analytic boundary " + fp(res.analytic_harm_boundary) + " (step " + fp(step) + ")");
}

// 3 ------------------------------------------------------------------------
void criterion_3() {
    PowerGridConfig cfg;
    cfg.base = paper_config();
    cfg.target_methods = {BoundMethod::Betting, BoundMethod::PMEmpiricalBernstein,
                          BoundMethod::PMHoeffding};
    cfg.reps = 250;
    cfg.seed = 2003;
    const PowerGridResult res = label_shift_power_grid(cfg);

    // paired comparison per harmful grid point: mean(N_a - N_b) must not
    // exceed 3 paired standard errors (Monte-Carlo allowance as elsewhere)
    auto ordered = [&](std::size_t g, std::size_t a, std::size_t b) {
        const double* na = &res.stop_times[(g * 3 + a) * res.reps];
        const double* nb = &res.stop_times[(g * 3 + b) * res.reps];
        double sum = 0.0, sum_sq = 0.0;
        for (std::size_t r = 0; r < res.reps; ++r) {
            const double d = na[r] - nb[r];
            sum += d;
            sum_sq += d * d;
        }
        const double n = static_cast<double>(res.reps);
        const double mean = sum / n;
        const double se = std::sqrt(std::max(0.0, sum_sq / n - mean * mean) / n);
        return mean <= 3.0 * se + 1e-9;
    };

    bool pass = true;
    std::size_t harmful_points = 0;
    std::string worst;
    for (std::size_t g = 0; g < res.grid.size(); ++g) {
        const PowerCell& bet = res.cells[g * 3 + 0];
        const PowerCell& pmeb = res.cells[g * 3 + 1];
        const PowerCell& pmh = res.cells[g * 3 + 2];
        if (!bet.harmful) continue;
        harmful_points += 1;
        if (!(ordered(g, 0, 1) && ordered(g, 1, 2))) {
            pass = false;
            worst = " violated at pi1=" + fp(bet.pi1_target) + " (" + fp(bet.mean_stopping_time) +
                    ", " + fp(pmeb.mean_stopping_time) + ", " + fp(pmh.mean_stopping_time) + ")";
        }
    }
    report(3, pass,
           "betting <= pm-eb <= pm-h mean stopping time on " + std::to_string(harmful_points) +
               " harmful grid points (paired seeds, 3 SE allowance)" + worst);
}

// 4 ------------------------------------------------------------------------
void criterion_4() {
    const WidthTable table =
        bounds_width_table(paper_config(), {1000}, {BoundMethod::Betting}, 200, 0.025, 2004);
    const double eps = table.cells.front().mean_eps_appr;
    const bool pass = eps >= 0.015 && eps <= 0.035;
    report(4, pass, "betting mean eps_appr at n=1000: " + fp(eps) + " (target [0.015, 0.035])");
}

// 5 ------------------------------------------------------------------------
void criterion_5() {
    CltVsBettingConfig cfg;
    cfg.seed = 2005;
    const CltVsBettingResult res = clt_vs_betting_experiment(cfg);

    const double fixed_cap = 0.1 + 3.0 * mc_standard_error(0.1, cfg.fixed_runs);
    double clt_fixed_max = 0.0, bet_fixed_max = 0.0;
    for (std::size_t i = 0; i < res.sizes.size(); ++i) {
        clt_fixed_max = std::max(clt_fixed_max, res.clt_fixed[i]);
        bet_fixed_max = std::max(bet_fixed_max, res.betting_fixed[i]);
    }
    bool clt_crosses = false;
    for (std::size_t i = 0; i < res.sizes.size(); ++i) {
        if (res.sizes[i] <= 1000 && res.clt_cumulative[i] > 0.1) clt_crosses = true;
    }
    const double bet_cum_cap = 0.1 + 3.0 * mc_standard_error(0.1, cfg.cumulative_runs);
    const double bet_cum_final = res.betting_cumulative.back();
    const bool pass = clt_fixed_max <= fixed_cap && bet_fixed_max <= fixed_cap && clt_crosses &&
                      bet_cum_final <= bet_cum_cap;
    report(5, pass,
           "fixed-time max miscoverage clt=" + fp(clt_fixed_max) + " betting=" + fp(bet_fixed_max) +
               " (cap " + fp(fixed_cap) + "); CLT cumulative crosses 0.1: " +
               (clt_crosses ? "yes" : "no") + "; betting cumulative at t=1000: " +
               fp(bet_cum_final) + " (cap " + fp(bet_cum_cap) + ")");
}

// 6 ------------------------------------------------------------------------
void criterion_6() {
    DriftMonitorConfig cfg = DriftMonitorConfig::standard();
    cfg.runs = 200;
    cfg.seed = 2006;
    const DriftMonitorResult res = drift_cmeb_experiment(cfg);
    const double uc_cap = 0.025 + 3.0 * mc_standard_error(0.025, cfg.runs);
    const bool pass = res.reject_fraction >= 0.95 && res.undercover_fraction <= uc_cap;
    report(6, pass,
           "drift rejects within horizon " + std::to_string(res.horizon) + ": " +
               fp(res.reject_fraction) + " (>=0.95); running-risk undercoverage " +
               fp(res.undercover_fraction) + " (cap " + fp(uc_cap) + ")");
}

// 7 ------------------------------------------------------------------------
void criterion_7() {
    GaussianLabelShiftConfig base = paper_config();
    const ConformalScenarioResult res = conformal_scenario_experiment(
        base, ConformalScenario::ColdStartHarmful, 200, 2000, 0.05, 0.05, 1000, 2007);
    const bool pass =
        res.martingale_crossing_fraction < 0.5 && res.seqtest_reject_fraction > 0.95;
    report(7, pass,
           "cold-start pi1=0.75: simple-mixture martingale crossed in " +
               fp(res.martingale_crossing_fraction) + " (<0.5), betting seqtest rejected in " +
               fp(res.seqtest_reject_fraction) + " (>0.95)");
}

// 8 ------------------------------------------------------------------------
void criterion_8() {
    // (a) analytic risk vs 1e6-sample Monte Carlo on 5 random configs
    bool risk_ok = true;
    double worst_gap = 0.0;
    RandomStream cfg_rng(2008, 0);
    for (int k = 0; k < 5; ++k) {
        GaussianLabelShiftConfig cfg;
        cfg.mu0 = {cfg_rng.next_uniform(-2.0, 0.0), cfg_rng.next_uniform(-1.0, 1.0)};
        cfg.mu1 = {cfg_rng.next_uniform(0.5, 2.5), cfg_rng.next_uniform(-1.0, 1.0)};
        cfg.pi1_source = cfg_rng.next_uniform(0.15, 0.85);
        cfg.pi1_target = cfg_rng.next_uniform(0.15, 0.85);
        const double analytic = analytic_target_misclassification_risk(cfg);
        const std::size_t n = 1000000;
        DriftSampler sampler(DriftSchedule::single(cfg.pi1_target, n), cfg, 2008, 100 + k);
        double err = 0.0;
        for (std::size_t i = 0; i < n; ++i) err += sampler.next_loss();
        const double gap = std::fabs(err / double(n) - analytic);
        worst_gap = std::max(worst_gap, gap);
        risk_ok = risk_ok && gap < 0.002;
    }

    // (b) binary Brier collapse on 1e4 fuzzed inputs
    bool collapse_ok = true;
    RandomStream fuzz(2008, 7);
    for (int i = 0; i < 10000; ++i) {
        const double p = fuzz.next_unit();
        const LabelDistribution f = LabelDistribution::make({p, 1.0 - p});
        const int y = fuzz.next_bernoulli(0.5) ? 1 : 0;
        const double b = brier_loss(f, y);
        collapse_ok = collapse_ok && std::fabs(b - top_label_brier_loss(f, y)) < 1e-12 &&
                      std::fabs(b - true_class_brier_loss(f, y)) < 1e-12;
    }

    // (c) conformal p-value uniformity (KS at the 1% level)
    ConformalMartingaleState st = ConformalMartingaleState::simple_mixture(2008, 9);
    RandomStream score_rng(2008, 11);
    const std::size_t n_ks = 10000;
    std::vector<double> ps;
    ps.reserve(n_ks);
    for (std::size_t i = 0; i < n_ks; ++i) {
        ps.push_back(conformal_p_value(st, score_rng.next_normal()));
    }
    std::sort(ps.begin(), ps.end());
    double ks = 0.0;
    for (std::size_t i = 0; i < n_ks; ++i) {
        ks = std::max({ks, double(i + 1) / n_ks - ps[i], ps[i] - double(i) / n_ks});
    }
    const bool ks_ok = ks < 1.63 / std::sqrt(double(n_ks));

    // (d) mixture martingale mean wealth <= 1 + 3 SE at fixed checkpoints,
    // 1e4 runs of direct uniform p-values
    bool wealth_ok = true;
    std::string wealth_detail;
    for (std::size_t t_check : {10, 100, 1000}) {
        const std::size_t runs = 10000;
        std::vector<double> wealth(runs);
        parallel_for(runs, [&](std::size_t r) {
            RandomStream rng(2008, 1000000 + r);
            double sum_log_p = 0.0;
            for (std::size_t t = 0; t < t_check; ++t) sum_log_p += std::log(rng.next_unit());
            wealth[r] = std::exp(simple_mixture_log_wealth(t_check, sum_log_p));
        });
        double sum = 0.0, sum_sq = 0.0;
        for (double w : wealth) {
            sum += w;
            sum_sq += w * w;
        }
        const double mean = sum / double(runs);
        const double se =
            std::sqrt(std::max(0.0, sum_sq / runs - mean * mean) / double(runs));
        wealth_ok = wealth_ok && mean <= 1.0 + 3.0 * se;
        wealth_detail += " t=" + std::to_string(t_check) + ":" + fp(mean);
    }

    const bool pass = risk_ok && collapse_ok && ks_ok && wealth_ok;
    report(8, pass,
           "analytic-vs-MC worst gap " + fp(worst_gap) + " (<0.002); Brier collapse: " +
               (collapse_ok ? "yes" : "no") + "; p-value KS " + fp(ks) + " (<" +
               fp(1.63 / std::sqrt(double(n_ks))) + "); mean mixture wealth" + wealth_detail);
}

// 9 ------------------------------------------------------------------------
void criterion_9() {
    GaussianLabelShiftConfig base = paper_config();
    TestSpec spec = TestSpec::absolute_increase(0.05, 0.1);
    ScenarioConfig null_scenario = ScenarioConfig::iid(base, 2000);
    const std::size_t runs = 500, horizon = 2000;
    std::vector<std::optional<std::size_t>> alarms(runs);
    // runs are independent; parallelize by splitting into per-thread chunks
    const unsigned workers = worker_count();
    parallel_for(workers, [&](std::size_t w) {
        const std::size_t lo = runs * w / workers;
        const std::size_t hi = runs * (w + 1) / workers;
        for (std::size_t r = lo; r < hi; ++r) {
            const auto single =
                changepoint_alarm_times(spec, null_scenario, 1, horizon, 2009 + r, 1, 1000);
            alarms[r] = single[0];
        }
    });
    double mean_alarm = 0.0;
    std::size_t censored = 0;
    for (const auto& a : alarms) {
        mean_alarm += double(a.value_or(horizon));
        censored += a.has_value() ? 0 : 1;
    }
    mean_alarm /= double(runs);
    const bool pass = mean_alarm >= 10.0;
    report(9, pass,
           "null mean alarm time (censored at " + std::to_string(horizon) + "): " + fp(mean_alarm) +
               " >= 10 = 1/delta; censored runs " + std::to_string(censored) + "/" +
               std::to_string(runs));
}

// 10 -----------------------------------------------------------------------
void criterion_10() {
    CircleExperimentConfig cfg;
    cfg.seed = 2010;
    const CircleExperimentResult res = circle_shift_experiment(cfg);
    const bool pass = res.median_stopping_time < 500.0;
    report(10, pass,
           "circle covariate shift: median stopping time " + fp(res.median_stopping_time) +
               " (<500) over " + std::to_string(res.runs) + " runs, reject fraction " +
               fp(res.reject_fraction));
}

}  // namespace

int main(int argc, char** argv) {
    int which = 0;  // 0 = all
    for (int i = 1; i < argc; ++i) {
        if (std::strcmp(argv[i], "--criterion") == 0 && i + 1 < argc) {
            which = std::atoi(argv[i + 1]);
            i += 1;
        } else if (std::strcmp(argv[i], "--all") == 0) {
            which = 0;
        } else {
            std::fprintf(stderr, "usage: %s [--criterion N | --all]\n", argv[0]);
            return 1;
        }
    }
    void (*criteria[])() = {criterion_1, criterion_2, criterion_3, criterion_4, criterion_5,
                            criterion_6, criterion_7, criterion_8, criterion_9, criterion_10};
    if (which == 0) {
        for (auto* fn : criteria) fn();
    } else if (which >= 1 && which <= 10) {
        criteria[which - 1]();
    } else {
        std::fprintf(stderr, "criterion must be 1..10\n");
        return 1;
    }
    return failures;
}
