#pragma once
// Versioned, self-describing checkpoint documents for every streaming state
// and for composed monitors. Accumulators are encoded as C99 hex-float
// strings so a round trip restores them bitwise; plain JSON numbers are also
// accepted on read for hand-written configs.

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "riskmon/bounds.hpp"
#include "riskmon/seqtest.hpp"

namespace riskmon {

using json = nlohmann::json;

inline json jd(double x) { return encode_double(x); }

inline double dj(const json& j) {
    if (j.is_number()) return j.get<double>();
    return decode_double(j.get<std::string>());
}

// ---- enum names -----------------------------------------------------------

inline std::string to_string(BoundMethod m) {
    switch (m) {
        case BoundMethod::FixedHoeffding: return "fixed-hoeffding";
        case BoundMethod::PMHoeffding: return "pm-hoeffding";
        case BoundMethod::PMEmpiricalBernstein: return "pm-eb";
        case BoundMethod::Betting: return "betting";
        case BoundMethod::CMEB: return "cm-eb";
    }
    return "unknown";
}

inline BoundMethod bound_method_from_string(const std::string& s) {
    if (s == "fixed-hoeffding" || s == "hoeffding") return BoundMethod::FixedHoeffding;
    if (s == "pm-hoeffding" || s == "pmh") return BoundMethod::PMHoeffding;
    if (s == "pm-eb" || s == "pmeb") return BoundMethod::PMEmpiricalBernstein;
    if (s == "betting") return BoundMethod::Betting;
    if (s == "cm-eb" || s == "cmeb") return BoundMethod::CMEB;
    throw std::invalid_argument("unknown bound method '" + s + "'");
}

inline std::string to_string(TestMode m) {
    switch (m) {
        case TestMode::AbsoluteIncrease: return "abs";
        case TestMode::RelativeIncrease: return "rel";
        case TestMode::FixedThreshold: return "fixed";
    }
    return "unknown";
}

inline TestMode test_mode_from_string(const std::string& s) {
    if (s == "abs") return TestMode::AbsoluteIncrease;
    if (s == "rel") return TestMode::RelativeIncrease;
    if (s == "fixed") return TestMode::FixedThreshold;
    throw std::invalid_argument("unknown test mode '" + s + "'");
}

// ---- bound configs and states ---------------------------------------------

inline json to_json(const BoundConfig& c) {
    json j{{"delta", jd(c.delta)},
           {"method", to_string(c.method)},
           {"c_cap", jd(c.c_cap)},
           {"grid_resolution", jd(c.grid_resolution)},
           {"cmeb_v_opt", jd(c.cmeb_v_opt)}};
    if (c.cmeb_rho) j["cmeb_rho"] = jd(*c.cmeb_rho);
    if (c.horizon) j["horizon"] = *c.horizon;
    return j;
}

inline BoundConfig bound_config_from_json(const json& j) {
    BoundConfig c;
    c.delta = dj(j.at("delta"));
    c.method = bound_method_from_string(j.at("method").get<std::string>());
    c.c_cap = dj(j.at("c_cap"));
    c.grid_resolution = dj(j.at("grid_resolution"));
    c.cmeb_v_opt = dj(j.at("cmeb_v_opt"));
    if (j.contains("cmeb_rho")) c.cmeb_rho = dj(j.at("cmeb_rho"));
    if (j.contains("horizon")) c.horizon = j.at("horizon").get<std::size_t>();
    return c;
}

inline json to_json(const RunningMoments& m) {
    return {{"t", m.t}, {"sum_z", jd(m.sum_z)}, {"sum_sq_dev", jd(m.sum_sq_dev)},
            {"mean", jd(m.mean)}, {"var", jd(m.var)}};
}

inline RunningMoments running_moments_from_json(const json& j) {
    RunningMoments m;
    m.t = j.at("t").get<std::size_t>();
    m.sum_z = dj(j.at("sum_z"));
    m.sum_sq_dev = dj(j.at("sum_sq_dev"));
    m.mean = dj(j.at("mean"));
    m.var = dj(j.at("var"));
    return m;
}

inline json to_json(const PmhState& s) {
    return {{"format", "riskmon.pmh"}, {"version", 1},
            {"t", s.t}, {"sum_lambda", jd(s.sum_lambda)}, {"sum_lambda_z", jd(s.sum_lambda_z)},
            {"sum_psi", jd(s.sum_psi)}, {"raw_lower", jd(s.raw_lower)}, {"raw_upper", jd(s.raw_upper)}};
}

inline PmhState pmh_from_json(const json& j) {
    PmhState s;
    s.t = j.at("t").get<std::size_t>();
    s.sum_lambda = dj(j.at("sum_lambda"));
    s.sum_lambda_z = dj(j.at("sum_lambda_z"));
    s.sum_psi = dj(j.at("sum_psi"));
    s.raw_lower = dj(j.at("raw_lower"));
    s.raw_upper = dj(j.at("raw_upper"));
    return s;
}

inline json to_json(const PmebState& s) {
    return {{"format", "riskmon.pmeb"}, {"version", 1},
            {"t", s.t}, {"sum_lambda", jd(s.sum_lambda)}, {"sum_lambda_z", jd(s.sum_lambda_z)},
            {"sum_v_psi", jd(s.sum_v_psi)}, {"moments", to_json(s.moments)},
            {"raw_lower", jd(s.raw_lower)}, {"raw_upper", jd(s.raw_upper)}};
}

inline PmebState pmeb_from_json(const json& j) {
    PmebState s;
    s.t = j.at("t").get<std::size_t>();
    s.sum_lambda = dj(j.at("sum_lambda"));
    s.sum_lambda_z = dj(j.at("sum_lambda_z"));
    s.sum_v_psi = dj(j.at("sum_v_psi"));
    s.moments = running_moments_from_json(j.at("moments"));
    s.raw_lower = dj(j.at("raw_lower"));
    s.raw_upper = dj(j.at("raw_upper"));
    return s;
}

inline json to_json(const BettingState& s) {
    json plus = json::array();
    for (double v : s.log_capital_plus) plus.push_back(jd(v));
    json minus = json::array();
    for (double v : s.log_capital_minus) minus.push_back(jd(v));
    json j{{"format", "riskmon.betting"}, {"version", 1},
           {"delta", jd(s.delta)}, {"c_cap", jd(s.c_cap)}, {"resolution", jd(s.resolution)},
           {"track_lower", s.track_lower}, {"track_upper", s.track_upper},
           {"t", s.t}, {"moments", to_json(s.moments)},
           {"log_capital_plus", plus}, {"log_capital_minus", minus},
           {"best_lower", jd(s.best_lower)}, {"best_upper", jd(s.best_upper)},
           {"last_lower", jd(s.last_lower)}, {"last_upper", jd(s.last_upper)}};
    if (s.horizon) j["horizon"] = *s.horizon;
    return j;
}

inline BettingState betting_from_json(const json& j) {
    BettingState s;
    s.delta = dj(j.at("delta"));
    s.c_cap = dj(j.at("c_cap"));
    s.resolution = dj(j.at("resolution"));
    s.track_lower = j.at("track_lower").get<bool>();
    s.track_upper = j.at("track_upper").get<bool>();
    if (j.contains("horizon")) s.horizon = j.at("horizon").get<std::size_t>();
    s.t = j.at("t").get<std::size_t>();
    s.moments = running_moments_from_json(j.at("moments"));
    for (const auto& v : j.at("log_capital_plus")) s.log_capital_plus.push_back(dj(v));
    for (const auto& v : j.at("log_capital_minus")) s.log_capital_minus.push_back(dj(v));
    s.best_lower = dj(j.at("best_lower"));
    s.best_upper = dj(j.at("best_upper"));
    s.last_lower = dj(j.at("last_lower"));
    s.last_upper = dj(j.at("last_upper"));
    return s;
}

inline json to_json(const BettingThresholdTracker& s) {
    json j{{"format", "riskmon.betting-tracker"}, {"version", 1},
           {"delta", jd(s.delta)}, {"c_cap", jd(s.c_cap)}, {"probe_m", jd(s.probe_m)},
           {"reachable", s.reachable}, {"t", s.t}, {"moments", to_json(s.moments)},
           {"log_capital", jd(s.log_capital)}, {"crossed", s.crossed}};
    if (s.horizon) j["horizon"] = *s.horizon;
    return j;
}

inline BettingThresholdTracker betting_tracker_from_json(const json& j) {
    BettingThresholdTracker s;
    s.delta = dj(j.at("delta"));
    s.c_cap = dj(j.at("c_cap"));
    s.probe_m = dj(j.at("probe_m"));
    if (j.contains("horizon")) s.horizon = j.at("horizon").get<std::size_t>();
    s.reachable = j.at("reachable").get<bool>();
    s.t = j.at("t").get<std::size_t>();
    s.moments = running_moments_from_json(j.at("moments"));
    s.log_capital = dj(j.at("log_capital"));
    s.crossed = j.at("crossed").get<bool>();
    return s;
}

inline json to_json(const CmebState& s) {
    return {{"format", "riskmon.cmeb"}, {"version", 1},
            {"alpha", jd(s.alpha)}, {"rho", jd(s.rho)}, {"t", s.t},
            {"sum_z", jd(s.sum_z)}, {"v_total", jd(s.v_total)},
            {"raw_lower", jd(s.raw_lower)}, {"uses_table", s.table != nullptr}};
}

inline CmebState cmeb_from_json(const json& j) {
    CmebState s;
    s.alpha = dj(j.at("alpha"));
    s.rho = dj(j.at("rho"));
    s.t = j.at("t").get<std::size_t>();
    s.sum_z = dj(j.at("sum_z"));
    s.v_total = dj(j.at("v_total"));
    s.raw_lower = dj(j.at("raw_lower"));
    if (j.at("uses_table").get<bool>()) s.table = cmeb_boundary_table(s.alpha, s.rho);
    return s;
}

inline json to_json(const SourceBound& b) {
    return {{"format", "riskmon.source-bound"}, {"version", 1},
            {"value", jd(b.value)}, {"eps_appr", jd(b.eps_appr)}, {"n_source", b.n_source},
            {"method", to_string(b.method)}, {"delta_s", jd(b.delta_s)}};
}

inline SourceBound source_bound_from_json(const json& j) {
    SourceBound b;
    b.value = dj(j.at("value"));
    b.eps_appr = dj(j.at("eps_appr"));
    b.n_source = j.at("n_source").get<std::size_t>();
    b.method = bound_method_from_string(j.at("method").get<std::string>());
    b.delta_s = dj(j.at("delta_s"));
    return b;
}

// ---- monitor checkpoints ----------------------------------------------------

inline json to_json(const TestSpec& s) {
    return {{"mode", to_string(s.mode)}, {"eps_tol", jd(s.eps_tol)},
            {"fixed_threshold", jd(s.fixed_threshold)},
            {"delta", jd(s.delta)}, {"delta_s", jd(s.delta_s)}, {"delta_t", jd(s.delta_t)},
            {"source_bound", to_json(s.source_bound)}, {"target_bound", to_json(s.target_bound)},
            {"batch_size", s.batch_size},
            {"cadence", s.cadence == EvalCadence::PerLoss ? "per-loss" : "batch-end"},
            {"record_bounds", s.record_bounds}, {"trace_capacity", s.trace_capacity}};
}

inline TestSpec test_spec_from_json(const json& j) {
    TestSpec s;
    s.mode = test_mode_from_string(j.at("mode").get<std::string>());
    s.eps_tol = dj(j.at("eps_tol"));
    s.fixed_threshold = dj(j.at("fixed_threshold"));
    s.delta = dj(j.at("delta"));
    s.delta_s = dj(j.at("delta_s"));
    s.delta_t = dj(j.at("delta_t"));
    s.source_bound = bound_config_from_json(j.at("source_bound"));
    s.target_bound = bound_config_from_json(j.at("target_bound"));
    s.batch_size = j.at("batch_size").get<std::size_t>();
    s.cadence = j.at("cadence").get<std::string>() == "per-loss" ? EvalCadence::PerLoss
                                                                 : EvalCadence::BatchEnd;
    s.record_bounds = j.at("record_bounds").get<bool>();
    s.trace_capacity = j.at("trace_capacity").get<std::size_t>();
    return s;
}

inline json to_json(const Monitor& m) {
    json j{{"format", "riskmon.monitor"},
           {"version", 1},
           {"spec", to_json(m.spec())},
           {"hypothesis", m.hypothesis()},
           {"t", m.t()},
           {"decision", m.decision() == Decision::Reject ? "reject" : "continue"}};
    if (m.source()) j["source_bound"] = to_json(*m.source());
    if (m.stopping_time().is_finite()) j["reject_time"] = *m.stopping_time().n;
    std::visit([&](const auto& st) { j["target_state"] = to_json(st); }, m.target_state());
    return j;
}

inline Monitor monitor_from_json(const json& j) {
    if (j.at("format").get<std::string>() != "riskmon.monitor") {
        throw std::invalid_argument("monitor_from_json: not a monitor checkpoint");
    }
    const TestSpec spec = test_spec_from_json(j.at("spec"));
    Monitor m = j.contains("source_bound")
                    ? Monitor::init_with_source(spec, source_bound_from_json(j.at("source_bound")))
                    : Monitor::init_with_source(spec, SourceBound{});
    const json& ts = j.at("target_state");
    const std::string fmt = ts.at("format").get<std::string>();
    if (fmt == "riskmon.pmh") {
        m.target_state() = pmh_from_json(ts);
    } else if (fmt == "riskmon.pmeb") {
        m.target_state() = pmeb_from_json(ts);
    } else if (fmt == "riskmon.betting") {
        m.target_state() = betting_from_json(ts);
    } else if (fmt == "riskmon.betting-tracker") {
        m.target_state() = betting_tracker_from_json(ts);
    } else if (fmt == "riskmon.cmeb") {
        m.target_state() = cmeb_from_json(ts);
    } else {
        throw std::invalid_argument("monitor_from_json: unknown target state '" + fmt + "'");
    }
    std::optional<std::size_t> reject_time;
    if (j.contains("reject_time")) reject_time = j.at("reject_time").get<std::size_t>();
    m.restore(j.at("t").get<std::size_t>(),
              j.at("decision").get<std::string>() == "reject" ? Decision::Reject : Decision::Continue,
              reject_time);
    return m;
}

}  // namespace riskmon
