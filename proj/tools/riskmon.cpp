// riskmon: sequential monitoring of bounded loss streams for harmful
// distribution shift, plus the synthetic experiment pipelines.
//
// Subcommands: monitor, simulate, bounds-compare, baseline, changepoint.
// Every output file starts with a manifest comment carrying the subcommand,
// seed, and a hash of the full configuration, so outputs are re-derivable.
// Exit codes: 0 = completed without alarm, 2 = alarm fired, 1 = error.

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "riskmon/baselines.hpp"
#include "riskmon/changepoint.hpp"
#include "riskmon/experiments.hpp"
#include "riskmon/losses.hpp"
#include "riskmon/serialize.hpp"

namespace {

using riskmon::json;

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitAlarm = 2;

std::string resolve_out_path(const std::string& requested, const std::string& fallback_name) {
    std::string path = requested;
    if (path.empty()) {
        const char* dir = std::getenv("RISKMON_OUT_DIR");
        path = dir && *dir ? std::string(dir) + "/" + fallback_name : fallback_name;
    }
    return path;
}

std::ofstream open_output(const std::string& path, const std::string& cmd,
                          std::uint64_t seed, const std::string& config_repr) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open output file '" + path + "'");
    char hash[32];
    std::snprintf(hash, sizeof(hash), "%016llx",
                  static_cast<unsigned long long>(riskmon::fnv1a_hash(config_repr)));
    out << "# riskmon v1 cmd=" << cmd << " seed=" << seed << " config_hash=" << hash << "\n";
    return out;
}

std::string fmt(double x) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.10g", x);
    return buf;
}

riskmon::LossKind loss_kind_from_string(const std::string& s) {
    if (s == "misclassification") return riskmon::LossKind::Misclassification;
    if (s == "brier") return riskmon::LossKind::Brier;
    if (s == "top_label_brier") return riskmon::LossKind::TopLabelBrier;
    if (s == "true_class_brier") return riskmon::LossKind::TrueClassBrier;
    if (s == "miscoverage") return riskmon::LossKind::Miscoverage;
    throw std::invalid_argument("unknown loss_kind '" + s + "'");
}

// One JSONL record: either a precomputed loss or a (pred, label) pair.
double loss_from_record(const json& rec, const std::optional<std::string>& default_kind,
                        std::size_t num_classes) {
    if (rec.contains("loss")) {
        const double z = rec.at("loss").get<double>();
        riskmon::check_unit_loss(z);
        return z;
    }
    if (!rec.contains("pred") || !rec.contains("label")) {
        throw std::invalid_argument("record needs either 'loss' or 'pred'+'label'");
    }
    std::string kind_name;
    if (rec.contains("loss_kind")) {
        kind_name = rec.at("loss_kind").get<std::string>();
    } else if (default_kind) {
        kind_name = *default_kind;
    } else {
        throw std::invalid_argument("record lacks 'loss_kind' and no --loss-kind default was given");
    }
    const riskmon::LossKind kind = loss_kind_from_string(kind_name);

    riskmon::PredictionRecord pr;
    pr.true_label = rec.at("label").get<int>();
    const json& pred = rec.at("pred");
    std::size_t k = num_classes;
    if (pred.is_number_integer()) {
        pr.prediction = pred.get<int>();
        if (k == 0) throw std::invalid_argument("point-label prediction needs --num-classes");
    } else if (pred.is_array()) {
        std::vector<double> probs;
        for (const auto& v : pred) probs.push_back(v.get<double>());
        pr.prediction = riskmon::LabelDistribution::make(std::move(probs));
        k = std::get<riskmon::LabelDistribution>(pr.prediction).num_classes();
    } else if (pred.is_object() && pred.contains("set")) {
        std::vector<int> set;
        for (const auto& v : pred.at("set")) set.push_back(v.get<int>());
        pr.prediction = std::move(set);
        if (k == 0) k = static_cast<std::size_t>(pr.true_label) + 1;
    } else {
        throw std::invalid_argument("'pred' must be an integer, an array of probabilities, or {\"set\": [...]}");
    }
    return riskmon::loss_of(pr, kind, k);
}

std::vector<double> read_loss_file(const std::string& path, const std::optional<std::string>& kind,
                                   std::size_t num_classes) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open '" + path + "'");
    std::vector<double> losses;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        lineno += 1;
        if (line.empty() || line[0] == '#') continue;
        try {
            losses.push_back(loss_from_record(json::parse(line), kind, num_classes));
        } catch (const std::exception& e) {
            throw std::runtime_error(path + ":" + std::to_string(lineno) + ": " + e.what());
        }
    }
    return losses;
}

std::vector<riskmon::BoundMethod> parse_methods(const std::string& csv) {
    std::vector<riskmon::BoundMethod> methods;
    std::stringstream ss(csv);
    std::string token;
    while (std::getline(ss, token, ',')) {
        if (!token.empty()) methods.push_back(riskmon::bound_method_from_string(token));
    }
    if (methods.empty()) throw std::invalid_argument("no methods given");
    return methods;
}

// ---------------------------------------------------------------------------

struct MonitorOptions {
    std::string input;
    std::string source_path;
    std::string mode = "abs";
    double r0 = 0.8;
    double delta = 0.05;
    double eps_tol = 0.05;
    std::string source_method = "betting";
    std::string target_method = "betting";
    std::size_t batch_size = 1;
    bool batch_end_eval = false;
    std::string loss_kind;
    std::size_t num_classes = 0;
    std::string checkpoint;
    bool resume = false;
    std::string out;
    std::uint64_t seed = 0;  // unused (monitoring is deterministic) but kept in the manifest
};

int run_monitor(const MonitorOptions& opt) {
    using namespace riskmon;
    const std::optional<std::string> kind =
        opt.loss_kind.empty() ? std::nullopt : std::optional<std::string>(opt.loss_kind);

    std::optional<Monitor> monitor;
    if (opt.resume) {
        if (opt.checkpoint.empty()) throw std::runtime_error("--resume needs --checkpoint");
        std::ifstream ck(opt.checkpoint);
        if (!ck) throw std::runtime_error("cannot open checkpoint '" + opt.checkpoint + "'");
        json doc = json::parse(ck);
        monitor = monitor_from_json(doc);
    } else {
        TestSpec spec;
        const TestMode mode = test_mode_from_string(opt.mode);
        if (mode == TestMode::FixedThreshold) {
            spec = TestSpec::fixed_threshold_rule(opt.r0, opt.delta,
                                                  bound_method_from_string(opt.target_method));
        } else {
            spec = TestSpec::absolute_increase(opt.eps_tol, opt.delta,
                                               bound_method_from_string(opt.source_method),
                                               bound_method_from_string(opt.target_method));
            spec.mode = mode;
        }
        spec.batch_size = opt.batch_size;
        spec.cadence = opt.batch_end_eval ? EvalCadence::BatchEnd : EvalCadence::PerLoss;
        spec.record_bounds = true;
        if (mode == TestMode::FixedThreshold) {
            monitor = Monitor::init(spec, {});
        } else {
            if (opt.source_path.empty()) {
                throw std::runtime_error("abs/rel modes need --source (or use --mode fixed)");
            }
            const std::vector<double> src = read_loss_file(opt.source_path, kind, opt.num_classes);
            monitor = Monitor::init(spec, src);
        }
    }

    std::ostringstream cfg_repr;
    cfg_repr << "monitor mode=" << opt.mode << " delta=" << opt.delta << " eps=" << opt.eps_tol
             << " src=" << opt.source_method << " tgt=" << opt.target_method
             << " batch=" << opt.batch_size;
    const std::string out_path = resolve_out_path(opt.out, "monitor_events.csv");
    std::ofstream out = open_output(out_path, "monitor", opt.seed, cfg_repr.str());
    out << "t,L_target,threshold,decision\n";

    std::ifstream file_in;
    std::istream* in = &std::cin;
    if (opt.input != "-") {
        file_in.open(opt.input);
        if (!file_in) throw std::runtime_error("cannot open input '" + opt.input + "'");
        in = &file_in;
    }

    auto save_checkpoint = [&]() {
        if (opt.checkpoint.empty()) return;
        std::ofstream ck(opt.checkpoint);
        if (!ck) throw std::runtime_error("cannot write checkpoint '" + opt.checkpoint + "'");
        ck << to_json(*monitor).dump(2) << "\n";
    };

    std::string line;
    std::size_t lineno = 0;
    while (std::getline(*in, line)) {
        lineno += 1;
        if (line.empty() || line[0] == '#') continue;
        double z;
        try {
            z = loss_from_record(json::parse(line), kind, opt.num_classes);
        } catch (const std::exception& e) {
            std::cerr << opt.input << ":" << lineno << ": " << e.what() << "\n";
            return kExitError;
        }
        monitor->observe_one(z);
        const bool evaluated = monitor->spec().cadence == EvalCadence::PerLoss ||
                               monitor->t() % monitor->spec().batch_size == 0 ||
                               monitor->decision() == Decision::Reject;
        if (evaluated) {
            out << monitor->t() << "," << fmt(monitor->last_lower()) << ","
                << fmt(monitor->threshold()) << ","
                << (monitor->decision() == Decision::Reject ? "reject" : "continue") << "\n";
        }
        if (monitor->decision() == Decision::Reject) {
            save_checkpoint();
            std::cout << "alarm: harmful shift detected, stopping time N="
                      << *monitor->stopping_time().n << " (hypothesis " << monitor->hypothesis()
                      << ", threshold " << fmt(monitor->threshold()) << ")\n";
            return kExitAlarm;
        }
    }
    save_checkpoint();
    std::cout << "no alarm after " << monitor->t() << " losses (threshold "
              << fmt(monitor->threshold()) << ")\n";
    return kExitOk;
}

// ---------------------------------------------------------------------------

struct SimulateOptions {
    std::string scenario = "grid";
    double pi1_source = 0.25;
    std::size_t reps = 250;
    std::size_t grid_points = 20;
    double pi_lo = 0.1;
    double pi_hi = 0.9;
    std::size_t max_samples = 2000;
    std::size_t batch_size = 50;
    std::size_t n_source = 1000;
    double eps_tol = 0.05;
    double delta = 0.05;
    std::string target_methods = "betting,pm-eb,pm-hoeffding";
    std::string source_method = "betting";
    std::uint64_t seed = 1;
    std::string out;
    unsigned threads = 0;
};

int run_simulate(const SimulateOptions& opt) {
    using namespace riskmon;
    std::ostringstream cfg_repr;
    cfg_repr << "simulate scenario=" << opt.scenario << " pi1S=" << opt.pi1_source
             << " reps=" << opt.reps << " eps=" << opt.eps_tol << " delta=" << opt.delta
             << " methods=" << opt.target_methods;

    if (opt.scenario == "grid") {
        PowerGridConfig cfg;
        cfg.base.pi1_source = opt.pi1_source;
        cfg.base.pi1_target = opt.pi1_source;
        cfg.target_methods = parse_methods(opt.target_methods);
        cfg.source_method = bound_method_from_string(opt.source_method);
        cfg.grid_points = opt.grid_points;
        cfg.pi_lo = opt.pi_lo;
        cfg.pi_hi = opt.pi_hi;
        cfg.reps = opt.reps;
        cfg.max_samples = opt.max_samples;
        cfg.batch_size = opt.batch_size;
        cfg.n_source = opt.n_source;
        cfg.eps_tol = opt.eps_tol;
        cfg.delta = opt.delta;
        cfg.seed = opt.seed;
        const PowerGridResult result = label_shift_power_grid(cfg, opt.threads);
        std::ofstream out = open_output(resolve_out_path(opt.out, "power_grid.csv"), "simulate",
                                        opt.seed, cfg_repr.str());
        out << "pi1_target,method,harmful,rejection_proportion,mean_stopping_time\n";
        for (const auto& cell : result.cells) {
            out << fmt(cell.pi1_target) << "," << to_string(cell.method) << ","
                << (cell.harmful ? 1 : 0) << "," << fmt(cell.rejection_proportion) << ","
                << fmt(cell.mean_stopping_time) << "\n";
        }
        std::cout << "analytic source risk " << fmt(result.source_risk)
                  << ", harm boundary pi1_target=" << fmt(result.analytic_harm_boundary) << "\n";
        return kExitOk;
    }
    if (opt.scenario == "drift") {
        DriftMonitorConfig cfg = DriftMonitorConfig::standard();
        cfg.base.pi1_source = opt.pi1_source;
        cfg.runs = opt.reps;
        cfg.n_source = opt.n_source;
        cfg.eps_tol = opt.eps_tol;
        cfg.delta = opt.delta;
        cfg.seed = opt.seed;
        const DriftMonitorResult result = drift_cmeb_experiment(cfg, opt.threads);
        std::ofstream out = open_output(resolve_out_path(opt.out, "drift_runs.csv"), "simulate",
                                        opt.seed, cfg_repr.str());
        out << "run,rejected,stopping_time,undercovered\n";
        for (std::size_t r = 0; r < result.runs; ++r) {
            out << r << "," << int(result.rejected_runs[r]) << "," << fmt(result.stopping_times[r])
                << "," << int(result.undercovered_runs[r]) << "\n";
        }
        std::cout << "drift horizon " << result.horizon << ": reject fraction "
                  << fmt(result.reject_fraction) << ", undercoverage fraction "
                  << fmt(result.undercover_fraction) << ", mean stopping time "
                  << fmt(result.mean_stopping_time) << "\n";
        return kExitOk;
    }
    throw std::runtime_error("unknown scenario '" + opt.scenario + "' (grid|drift)");
}

// ---------------------------------------------------------------------------

struct BoundsCompareOptions {
    std::string sizes = "100,250,500,1000,2000";
    std::size_t reps = 1000;
    double delta = 0.025;
    double pi1_source = 0.25;
    std::string methods = "betting,pm-eb,fixed-hoeffding";
    std::uint64_t seed = 3;
    std::string out;
    unsigned threads = 0;
};

int run_bounds_compare(const BoundsCompareOptions& opt) {
    using namespace riskmon;
    std::vector<std::size_t> sizes;
    {
        std::stringstream ss(opt.sizes);
        std::string token;
        while (std::getline(ss, token, ',')) {
            if (!token.empty()) sizes.push_back(static_cast<std::size_t>(std::stoull(token)));
        }
    }
    GaussianLabelShiftConfig base;
    base.pi1_source = opt.pi1_source;
    base.pi1_target = opt.pi1_source;
    std::ostringstream cfg_repr;
    cfg_repr << "bounds-compare sizes=" << opt.sizes << " reps=" << opt.reps
             << " delta=" << opt.delta << " methods=" << opt.methods;
    const WidthTable table = bounds_width_table(base, sizes, parse_methods(opt.methods), opt.reps,
                                                opt.delta, opt.seed, opt.threads);
    std::ofstream out = open_output(resolve_out_path(opt.out, "bound_widths.csv"), "bounds-compare",
                                    opt.seed, cfg_repr.str());
    out << "n,method,mean_upper,mean_eps_appr\n";
    for (const auto& cell : table.cells) {
        out << cell.n << "," << to_string(cell.method) << "," << fmt(cell.mean_upper) << ","
            << fmt(cell.mean_eps_appr) << "\n";
    }
    std::cout << "wrote " << table.cells.size() << " rows (" << opt.reps << " draws each)\n";
    return kExitOk;
}

// ---------------------------------------------------------------------------

struct BaselineOptions {
    std::string which = "clt";
    std::string scenario = "cold";
    double p = 0.6;
    double delta = 0.1;
    std::size_t runs = 50;
    std::size_t horizon = 2000;
    double eps_tol = 0.05;
    std::size_t n_source = 1000;
    std::uint64_t seed = 7;
    std::string out;
    unsigned threads = 0;
};

int run_baseline(const BaselineOptions& opt) {
    using namespace riskmon;
    std::ostringstream cfg_repr;
    cfg_repr << "baseline which=" << opt.which << " scenario=" << opt.scenario << " p=" << opt.p
             << " delta=" << opt.delta << " runs=" << opt.runs;

    if (opt.which == "clt") {
        CltVsBettingConfig cfg;
        cfg.p = opt.p;
        cfg.delta = opt.delta;
        cfg.seed = opt.seed;
        const CltVsBettingResult result = clt_vs_betting_experiment(cfg, opt.threads);
        std::ofstream out = open_output(resolve_out_path(opt.out, "clt_vs_betting.csv"), "baseline",
                                        opt.seed, cfg_repr.str());
        out << "size,clt_fixed_miscoverage,betting_fixed_miscoverage,"
               "clt_cumulative_miscoverage,betting_cumulative_miscoverage\n";
        for (std::size_t i = 0; i < result.sizes.size(); ++i) {
            out << result.sizes[i] << "," << fmt(result.clt_fixed[i]) << ","
                << fmt(result.betting_fixed[i]) << "," << fmt(result.clt_cumulative[i]) << ","
                << fmt(result.betting_cumulative[i]) << "\n";
        }
        std::cout << "CLT cumulative miscoverage at t=" << result.sizes.back() << ": "
                  << fmt(result.clt_cumulative.back()) << "; betting: "
                  << fmt(result.betting_cumulative.back()) << "\n";
        return kExitOk;
    }
    if (opt.which == "conformal") {
        ConformalScenario scen;
        if (opt.scenario == "cold") scen = ConformalScenario::ColdStartHarmful;
        else if (opt.scenario == "warm") scen = ConformalScenario::WarmStartHarmful;
        else if (opt.scenario == "slow-benign") scen = ConformalScenario::SlowBenignDrift;
        else if (opt.scenario == "slow-harmful") scen = ConformalScenario::SlowHarmfulDrift;
        else if (opt.scenario == "sharp") scen = ConformalScenario::SharpHarmfulDrift;
        else throw std::runtime_error("unknown conformal scenario '" + opt.scenario + "'");
        GaussianLabelShiftConfig base;
        ConformalScenarioResult result = conformal_scenario_experiment(
            base, scen, opt.runs, opt.horizon, opt.delta, opt.eps_tol, opt.n_source, opt.seed,
            opt.threads, /*record_paths=*/true);
        std::ofstream out = open_output(resolve_out_path(opt.out, "conformal_wealth.csv"),
                                        "baseline", opt.seed, cfg_repr.str());
        out << "run,t,log_wealth\n";
        for (std::size_t r = 0; r < result.log_wealth_paths.size(); ++r) {
            const auto& path = result.log_wealth_paths[r];
            for (std::size_t t = 0; t < path.size(); ++t) {
                out << r << "," << (t + 1) << "," << fmt(path[t]) << "\n";
            }
        }
        std::cout << "martingale crossed 1/delta in " << fmt(result.martingale_crossing_fraction)
                  << " of runs; betting sequential test rejected in "
                  << fmt(result.seqtest_reject_fraction) << "\n";
        return kExitOk;
    }
    throw std::runtime_error("unknown baseline '" + opt.which + "' (clt|conformal)");
}

// ---------------------------------------------------------------------------

struct ChangepointOptions {
    double delta = 0.1;
    double eps_tol = 0.05;
    std::size_t horizon = 2000;
    std::size_t reps = 500;
    std::size_t stride = 1;
    std::size_t change_at = 0;  // 0 = pure null run
    double pi1_source = 0.25;
    double pi1_shifted = 0.9;
    std::size_t n_source = 1000;
    std::uint64_t seed = 13;
    std::string out;
    std::string summary;
};

int run_changepoint(const ChangepointOptions& opt) {
    using namespace riskmon;
    GaussianLabelShiftConfig base;
    base.pi1_source = opt.pi1_source;
    base.pi1_target = opt.pi1_source;
    TestSpec spec = TestSpec::absolute_increase(opt.eps_tol, opt.delta);
    ScenarioConfig scenario =
        opt.change_at == 0
            ? ScenarioConfig::iid(base, opt.horizon)
            : ScenarioConfig::change_at(base, opt.pi1_shifted, opt.change_at, opt.horizon);

    std::ostringstream cfg_repr;
    cfg_repr << "changepoint delta=" << opt.delta << " horizon=" << opt.horizon
             << " reps=" << opt.reps << " stride=" << opt.stride << " change_at=" << opt.change_at;
    const auto alarms = changepoint_alarm_times(spec, scenario, opt.reps, opt.horizon, opt.seed,
                                                opt.stride, opt.n_source);
    std::ofstream out = open_output(resolve_out_path(opt.out, "changepoint_runs.csv"),
                                    "changepoint", opt.seed, cfg_repr.str());
    out << "run,alarm_time,censored\n";
    double mean_alarm = 0.0;
    std::size_t censored = 0;
    for (std::size_t r = 0; r < alarms.size(); ++r) {
        const bool cens = !alarms[r].has_value();
        const std::size_t n_star = alarms[r].value_or(opt.horizon);
        censored += cens ? 1 : 0;
        mean_alarm += static_cast<double>(n_star);
        out << r << "," << n_star << "," << (cens ? 1 : 0) << "\n";
    }
    mean_alarm /= static_cast<double>(alarms.size());

    json summary{{"format", "riskmon.changepoint-summary"},
                 {"version", 1},
                 {"n_runs", opt.reps},
                 {"horizon", opt.horizon},
                 {"change_at", opt.change_at},
                 {"mean_alarm_time_censored", mean_alarm},
                 {"censored_runs", censored}};
    if (!opt.summary.empty()) {
        std::ofstream sf(opt.summary);
        if (!sf) throw std::runtime_error("cannot open summary file '" + opt.summary + "'");
        sf << summary.dump(2) << "\n";
    }
    std::cout << summary.dump() << "\n";
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"sequential risk monitoring for harmful distribution shift"};
    app.require_subcommand(1);

    MonitorOptions mon;
    CLI::App* monitor = app.add_subcommand("monitor", "monitor a JSONL loss stream");
    monitor->add_option("--input", mon.input, "JSONL stream path, or - for stdin")->required();
    monitor->add_option("--source", mon.source_path, "JSONL source holdout sample");
    monitor->add_option("--mode", mon.mode, "abs|rel|fixed (default abs)");
    monitor->add_option("--fixed-threshold", mon.r0, "risk threshold r0 for --mode fixed");
    monitor->add_option("--delta", mon.delta, "total error budget");
    monitor->add_option("--eps-tol", mon.eps_tol, "tolerated risk increase");
    monitor->add_option("--source-method", mon.source_method, "fixed-hoeffding|pm-hoeffding|pm-eb|betting");
    monitor->add_option("--target-method", mon.target_method, "pm-hoeffding|pm-eb|betting|cm-eb");
    monitor->add_option("--batch-size", mon.batch_size, "minibatch size m");
    monitor->add_flag("--batch-end-eval", mon.batch_end_eval, "check threshold at batch ends only");
    monitor->add_option("--loss-kind", mon.loss_kind, "default loss kind for pred/label records");
    monitor->add_option("--num-classes", mon.num_classes, "classes for point-label predictions");
    monitor->add_option("--checkpoint", mon.checkpoint, "checkpoint file to save (and resume from)");
    monitor->add_flag("--resume", mon.resume, "resume from --checkpoint");
    monitor->add_option("--out", mon.out, "event log CSV path");
    monitor->add_option("--seed", mon.seed, "recorded in the manifest");

    SimulateOptions sim;
    CLI::App* simulate = app.add_subcommand("simulate", "label-shift replication grids");
    simulate->add_option("--scenario", sim.scenario, "grid|drift");
    simulate->add_option("--pi1-source", sim.pi1_source, "source class-1 marginal");
    simulate->add_option("--reps", sim.reps, "replications per setting");
    simulate->add_option("--grid-points", sim.grid_points, "target marginals in [pi-lo, pi-hi]");
    simulate->add_option("--pi-lo", sim.pi_lo, "grid lower end");
    simulate->add_option("--pi-hi", sim.pi_hi, "grid upper end");
    simulate->add_option("--max-samples", sim.max_samples, "target samples per run");
    simulate->add_option("--batch-size", sim.batch_size, "minibatch size");
    simulate->add_option("--n-source", sim.n_source, "source holdout size");
    simulate->add_option("--eps-tol", sim.eps_tol, "tolerated risk increase");
    simulate->add_option("--delta", sim.delta, "total error budget");
    simulate->add_option("--target-method", sim.target_methods, "comma-separated methods");
    simulate->add_option("--source-method", sim.source_method, "source bound method");
    simulate->add_option("--seed", sim.seed, "base seed")->required();
    simulate->add_option("--out", sim.out, "CSV path");
    simulate->add_option("--threads", sim.threads, "worker threads (0 = all)");

    BoundsCompareOptions bc;
    CLI::App* bounds_cmp = app.add_subcommand("bounds-compare", "upper-bound width table");
    bounds_cmp->add_option("--sizes", bc.sizes, "comma-separated holdout sizes");
    bounds_cmp->add_option("--reps", bc.reps, "draws per size");
    bounds_cmp->add_option("--delta", bc.delta, "bound level");
    bounds_cmp->add_option("--pi1-source", bc.pi1_source, "source class-1 marginal");
    bounds_cmp->add_option("--methods", bc.methods, "comma-separated methods");
    bounds_cmp->add_option("--seed", bc.seed, "base seed")->required();
    bounds_cmp->add_option("--out", bc.out, "CSV path");
    bounds_cmp->add_option("--threads", bc.threads, "worker threads (0 = all)");

    BaselineOptions bl;
    CLI::App* baseline = app.add_subcommand("baseline", "CLT and conformal-martingale baselines");
    baseline->add_option("--which", bl.which, "clt|conformal");
    baseline->add_option("--scenario", bl.scenario, "cold|warm|slow-benign|slow-harmful|sharp");
    baseline->add_option("--p", bl.p, "Bernoulli mean for the CLT study");
    baseline->add_option("--delta", bl.delta, "error budget");
    baseline->add_option("--reps", bl.runs, "number of runs");
    baseline->add_option("--horizon", bl.horizon, "stream length");
    baseline->add_option("--eps-tol", bl.eps_tol, "tolerance for the contrast seqtest");
    baseline->add_option("--n-source", bl.n_source, "source holdout for the contrast seqtest");
    baseline->add_option("--seed", bl.seed, "base seed")->required();
    baseline->add_option("--out", bl.out, "CSV path");
    baseline->add_option("--threads", bl.threads, "worker threads (0 = all)");

    ChangepointOptions cp;
    CLI::App* changepoint = app.add_subcommand("changepoint", "changepoint detector simulations");
    changepoint->add_option("--delta", cp.delta, "error budget per test");
    changepoint->add_option("--eps-tol", cp.eps_tol, "tolerated risk increase");
    changepoint->add_option("--horizon", cp.horizon, "stream length (censoring point)");
    changepoint->add_option("--reps", cp.reps, "number of runs");
    changepoint->add_option("--stride", cp.stride, "spawn stride (0 = single test)");
    changepoint->add_option("--change-at", cp.change_at, "change index (0 = pure null)");
    changepoint->add_option("--pi1-source", cp.pi1_source, "source class-1 marginal");
    changepoint->add_option("--pi1-shifted", cp.pi1_shifted, "post-change marginal");
    changepoint->add_option("--n-source", cp.n_source, "source holdout size");
    changepoint->add_option("--seed", cp.seed, "base seed")->required();
    changepoint->add_option("--out", cp.out, "per-run CSV path");
    changepoint->add_option("--summary", cp.summary, "summary JSON path");

    CLI11_PARSE(app, argc, argv);

    try {
        if (monitor->parsed()) return run_monitor(mon);
        if (simulate->parsed()) return run_simulate(sim);
        if (bounds_cmp->parsed()) return run_bounds_compare(bc);
        if (baseline->parsed()) return run_baseline(bl);
        if (changepoint->parsed()) return run_changepoint(cp);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitError;
    }
    return kExitError;
}
