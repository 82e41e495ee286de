#pragma once

// The evaluation protocol: run the six pinned initial states, record the true
// pointing-error trace at control cadence, aggregate duty cycle / RMS /
// extremes, average across states. Per-state runs are independent, so they
// parallelize; aggregation is a fold in index order either way.

#include <atomic>
#include <cmath>
#include <functional>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "satrl/csv.hpp"
#include "satrl/env.hpp"
#include "satrl/metrics.hpp"

namespace satrl {

using ActFn = std::function<Vec3(const Observation&)>;
using ActFactory = std::function<ActFn(int init_index)>;
using EnvFactory = std::function<AttitudeEnv()>;

struct StateEval {
    int init_index = 0;
    bool failed = false;  // simulation fault; metrics absent
    std::string error;
    bool terminated_early = false;
    double elapsed_seconds = 0;
    double duty = 0, rms = 0, max = 0, min = 0;
};

struct EvalReport {
    int experiment = 0;
    std::string agent_kind;
    double horizon_seconds = 0;
    std::vector<StateEval> per_state;
    double avg_duty = 0, avg_rms = 0, avg_max = 0, avg_min = 0;
    int states_evaluated = 0;
};

struct TraceRow {
    double t = 0;
    double phi_true_deg = 0, phi_obs_deg = 0;
    Quat q;          // true attitude
    Vec3 w;          // true rate, rad/s
    Vec3 action;     // commanded torque, N m
    Vec3 m_applied;  // delivered torque, N m
    double reward = 0;
    bool terminated = false;
};

struct StateRollout {
    StateEval summary;
    AngleTrace trace;
    std::vector<TraceRow> rows;
};

inline StateRollout rollout_state(AttitudeEnv env, const ActFn& act, int init_index,
                                  const std::optional<AttitudeState>& init_override = std::nullopt,
                                  bool collect_rows = true) {
    StateRollout out;
    out.summary.init_index = init_index;
    out.trace.dt = env.sim_config().control_dt();
    try {
        if (init_override) {
            env.reset_to(*init_override, kEvalSeeds[static_cast<size_t>(init_index)]);
        } else {
            env.reset_eval(init_index);
        }
        while (env.active()) {
            out.trace.theta_deg.push_back(rad2deg(env.phi_true()));
            const Transition tr = env.step({act(env.obs())});
            if (collect_rows) {
                TraceRow row;
                row.t = env.state().t;
                row.phi_true_deg = tr.info.phi_true_deg;
                row.phi_obs_deg = tr.info.phi_obs_deg;
                row.q = env.state().q;
                row.w = env.state().w;
                row.action = tr.action;
                row.m_applied = tr.info.m_applied;
                row.reward = tr.reward.total;
                row.terminated = tr.terminated;
                out.rows.push_back(row);
            }
            if (tr.terminated) out.summary.terminated_early = true;
        }
        out.summary.elapsed_seconds = env.state().t;
        out.summary.duty = duty_cycle(out.trace);
        out.summary.rms = rms_error(out.trace);
        const auto [mx, mn] = extreme_errors(out.trace);
        out.summary.max = mx;
        out.summary.min = mn;
    } catch (const SimFault& f) {
        out.summary.failed = true;
        out.summary.error = f.what();
    }
    return out;
}

// Evaluate the six pinned states. init_overrides is a test hook for oracle
// scenarios that need a hand-picked initial state per index.
inline EvalReport evaluate_agent(const EnvFactory& make_env, const ActFactory& act_factory, int experiment,
                                 const std::string& agent_kind, int workers = 1,
                                 std::vector<StateRollout>* rollouts_out = nullptr,
                                 const std::optional<std::array<AttitudeState, 6>>& init_overrides = std::nullopt,
                                 bool collect_rows = true) {
    const int n_states = 6;
    std::vector<StateRollout> rollouts(n_states);

    const auto work = [&](int k) {
        std::optional<AttitudeState> override;
        if (init_overrides) override = (*init_overrides)[static_cast<size_t>(k)];
        rollouts[static_cast<size_t>(k)] = rollout_state(make_env(), act_factory(k), k, override, collect_rows);
    };

    if (workers <= 1) {
        for (int k = 0; k < n_states; ++k) work(k);
    } else {
        std::atomic<int> next{0};
        std::vector<std::thread> pool;
        const int nthreads = std::min(workers, n_states);
        pool.reserve(static_cast<size_t>(nthreads));
        for (int t = 0; t < nthreads; ++t)
            pool.emplace_back([&] {
                for (int k = next.fetch_add(1); k < n_states; k = next.fetch_add(1)) work(k);
            });
        for (auto& th : pool) th.join();
    }

    EvalReport report;
    report.experiment = experiment;
    report.agent_kind = agent_kind;
    report.horizon_seconds = 0;
    for (int k = 0; k < n_states; ++k) {
        const auto& r = rollouts[static_cast<size_t>(k)];
        report.per_state.push_back(r.summary);
        report.horizon_seconds = std::max(report.horizon_seconds, r.trace.duration());
        if (!r.summary.failed) {
            report.avg_duty += r.summary.duty;
            report.avg_rms += r.summary.rms;
            report.avg_max += r.summary.max;
            report.avg_min += r.summary.min;
            ++report.states_evaluated;
        }
    }
    if (report.states_evaluated > 0) {
        report.avg_duty /= report.states_evaluated;
        report.avg_rms /= report.states_evaluated;
        report.avg_max /= report.states_evaluated;
        report.avg_min /= report.states_evaluated;
    }
    if (rollouts_out) *rollouts_out = std::move(rollouts);
    return report;
}

inline nlohmann::json report_to_json(const EvalReport& r) {
    nlohmann::json j;
    j["experiment"] = r.experiment;
    j["agent_kind"] = r.agent_kind;
    j["T"] = r.horizon_seconds;
    j["per_state"] = nlohmann::json::array();
    for (const auto& s : r.per_state) {
        nlohmann::json e;
        e["init_index"] = s.init_index;
        e["failed"] = s.failed;
        if (s.failed) e["error"] = s.error;
        e["terminated_early"] = s.terminated_early;
        e["elapsed_seconds"] = s.elapsed_seconds;
        e["duty"] = s.duty;
        e["rms"] = s.rms;
        e["max"] = s.max;
        e["min"] = s.min;
        j["per_state"].push_back(e);
    }
    j["average"] = {{"rms", r.avg_rms}, {"duty", r.avg_duty}, {"max", r.avg_max}, {"min", r.avg_min}};
    j["states_evaluated"] = r.states_evaluated;
    return j;
}

inline EvalReport report_from_json(const nlohmann::json& j) {
    EvalReport r;
    r.experiment = j.at("experiment").get<int>();
    r.agent_kind = j.at("agent_kind").get<std::string>();
    r.horizon_seconds = j.at("T").get<double>();
    for (const auto& e : j.at("per_state")) {
        StateEval s;
        s.init_index = e.at("init_index").get<int>();
        s.failed = e.at("failed").get<bool>();
        if (e.contains("error")) s.error = e.at("error").get<std::string>();
        s.terminated_early = e.at("terminated_early").get<bool>();
        s.elapsed_seconds = e.at("elapsed_seconds").get<double>();
        s.duty = e.at("duty").get<double>();
        s.rms = e.at("rms").get<double>();
        s.max = e.at("max").get<double>();
        s.min = e.at("min").get<double>();
        r.per_state.push_back(s);
    }
    r.avg_rms = j.at("average").at("rms").get<double>();
    r.avg_duty = j.at("average").at("duty").get<double>();
    r.avg_max = j.at("average").at("max").get<double>();
    r.avg_min = j.at("average").at("min").get<double>();
    r.states_evaluated = j.at("states_evaluated").get<int>();
    return r;
}

inline void write_trace_csv(const std::string& path, const std::vector<TraceRow>& rows) {
    CsvWriter csv(path);
    csv.header({"t", "phi_true_deg", "phi_obs_deg", "q1", "q2", "q3", "q4", "wx", "wy", "wz", "ax", "ay", "az",
                "Mx_applied", "My_applied", "Mz_applied", "reward", "terminated"});
    for (const auto& r : rows) {
        csv.line({csv_double(r.t), csv_double(r.phi_true_deg), csv_double(r.phi_obs_deg), csv_double(r.q.x),
                  csv_double(r.q.y), csv_double(r.q.z), csv_double(r.q.w), csv_double(r.w.x), csv_double(r.w.y),
                  csv_double(r.w.z), csv_double(r.action.x), csv_double(r.action.y), csv_double(r.action.z),
                  csv_double(r.m_applied.x), csv_double(r.m_applied.y), csv_double(r.m_applied.z),
                  csv_double(r.reward), r.terminated ? "1" : "0"});
    }
}

// The Learner/Expert comparison layout used by the per-experiment tables.
inline std::string format_comparison_table(const std::vector<EvalReport>& reports) {
    std::string out;
    out += "| Agent | RMS | Duty Cycle | Max (deg) | Min (deg) |\n";
    out += "|---|---|---|---|---|\n";
    char buf[160];
    for (const auto& r : reports) {
        std::snprintf(buf, sizeof buf, "| %s | %.4f | %.4f | %.4f | %.4f |\n", r.agent_kind.c_str(), r.avg_rms,
                      r.avg_duty, r.avg_max, r.avg_min);
        out += buf;
    }
    return out;
}

}  // namespace satrl
