#pragma once

// The episodic pointing task.
//
// One control step = clamp the commanded torque, push it through the actuator
// fault model, hold it for substeps_per_control RK4 substeps, then hand the
// agent a possibly-misaligned attitude and a possibly-corrupted rate reading.
// The reward is computed from the TRUE pointing error: the agent has to infer
// faults from their consequences, but the training signal reflects ground
// truth, otherwise pointing through a misalignment would be unlearnable.
//
// Observation vector: (q_obs, w_meas), 7 values. No fault indicators.

#include <array>
#include <cstdint>
#include <stdexcept>

#include "satrl/dynamics.hpp"
#include "satrl/faults.hpp"
#include "satrl/rng.hpp"
#include "satrl/so3.hpp"

namespace satrl {

// Episode seeds for the six fixed evaluation initial states. Every agent
// evaluated with init index k sees the same true initial state and the same
// fault realizations. Arbitrary but frozen; changing them invalidates all
// recorded reports.
inline constexpr std::array<uint64_t, 6> kEvalSeeds = {101, 223, 347, 431, 557, 619};

struct Observation {
    Quat q_obs;   // what the attitude sensor reports
    Vec3 w_meas;  // rad/s, what the gyro reports

    std::array<double, 7> as_array() const {
        return {q_obs.x, q_obs.y, q_obs.z, q_obs.w, w_meas.x, w_meas.y, w_meas.z};
    }
};

struct ActionCmd {
    Vec3 m;  // N m per axis, clamped by the environment

    static ActionCmd clamped(const Vec3& m, double limit) {
        const auto c = [limit](double v) { return v < -limit ? -limit : (v > limit ? limit : v); };
        return {{c(m.x), c(m.y), c(m.z)}};
    }
};

struct RewardBreakdown {
    double attitude = 0.0;
    double control = 0.0;
    double worse_penalty = 0.0;
    double stay_bonus = 0.0;
    double oob_penalty = 0.0;
    double total = 0.0;
};

struct EnvConfig {
    double s1 = 1.0;    // attitude reward scaler
    double s2 = 0.5;    // control reward scaler
    double s3 = 1.0;    // worse penalty scaler
    double s4 = 9.0;    // stay bonus scaler
    double s5 = 500.0;  // out-of-bound penalty scaler
    double stay_threshold_deg = 5.0;
    double oob_omega_dps = 10.0;     // episode ends when |w_true| exceeds this
    double episode_seconds = 2500.0;
    Vec3 antenna_axis_body = {1, 0, 0};
    Vec3 target_dir_inertial = {0, 0, 1};

    void validate() const {
        if (s1 < 0 || s2 < 0 || s3 < 0 || s4 < 0 || s5 < 0)
            throw std::invalid_argument("EnvConfig: scalers must be >= 0");
        if (!(stay_threshold_deg > 0) || !(oob_omega_dps > 0) || !(episode_seconds > 0))
            throw std::invalid_argument("EnvConfig: thresholds and episode length must be positive");
        if (!(norm(antenna_axis_body) > 0) || !(norm(target_dir_inertial) > 0))
            throw std::invalid_argument("EnvConfig: antenna axis and target direction must be nonzero");
    }
};

struct StepInfo {
    double phi_true_deg = 0.0;
    double phi_obs_deg = 0.0;
    Vec3 m_applied;  // post-fault torque actually delivered
};

struct Transition {
    Observation obs;
    Vec3 action;  // clamped command, N m
    RewardBreakdown reward;
    Observation next_obs;
    bool terminated = false;  // safety abort, |w| past the limit
    bool truncated = false;   // episode clock ran out
    StepInfo info;
};

// Angle between the antenna axis mapped to the inertial frame and the target
// direction.
inline double pointing_error(const Quat& q_true, const EnvConfig& cfg) {
    return angle_between(rotate_vec(q_true, cfg.antenna_axis_body), cfg.target_dir_inertial);
}

// The five-term shaped reward. phi values in radians; the attitude term's
// decay constant 0.14 * 2pi (about 50.4 deg) reads phi in radians. The worse
// penalty fires on strict increase only; the stay bonus includes the 5 deg
// boundary.
inline RewardBreakdown reward(double phi_t, double phi_prev, const Vec3& m_cmd, bool terminated,
                              const EnvConfig& cfg, double torque_limit = 0.1) {
    RewardBreakdown r;
    r.attitude = std::exp(-phi_t / (0.14 * 2.0 * kPi)) * cfg.s1;
    const Vec3 m_max{torque_limit, torque_limit, torque_limit};
    r.control = -(norm(m_cmd) / norm(m_max)) * cfg.s2;
    if (phi_t > phi_prev) r.worse_penalty = -cfg.s3;
    if (phi_t <= deg2rad(cfg.stay_threshold_deg)) r.stay_bonus = cfg.s4;
    if (terminated) r.oob_penalty = -cfg.s5;
    r.total = r.attitude + r.control + r.worse_penalty + r.stay_bonus + r.oob_penalty;
    return r;
}

inline Quat uniform_unit_quat(Rng& rng) {
    for (;;) {
        const Quat q{rng.normal(), rng.normal(), rng.normal(), rng.normal()};
        const double n = norm(q);
        if (n > 1e-6) return {q.x / n, q.y / n, q.z / n, q.w / n};
    }
}

class AttitudeEnv {
public:
    AttitudeEnv(SimConfig sim, EnvConfig cfg, PerturbationSuite suite)
        : sim_(sim), cfg_(cfg), suite_(suite) {
        sim_.validate();
        cfg_.validate();
        steps_per_episode_ = static_cast<long>(cfg_.episode_seconds / sim_.control_dt() + 0.5);
    }

    // Start an episode. The seed fixes the initial state and every fault
    // realization; per-episode variety is the caller's job (derive a fresh
    // seed per episode from a master seed).
    Observation reset(uint64_t episode_seed) {
        Rng init = Rng::stream(episode_seed, "init");
        AttitudeState s;
        s.q = uniform_unit_quat(init);
        const double w0 = deg2rad(3.0);
        s.w = {init.uniform(-w0, w0), init.uniform(-w0, w0), init.uniform(-w0, w0)};
        s.t = 0.0;
        return reset_to(s, episode_seed);
    }

    // One of the six pinned evaluation states.
    Observation reset_eval(int init_index) {
        if (init_index < 0 || init_index >= static_cast<int>(kEvalSeeds.size()))
            throw std::invalid_argument("reset_eval: init_index must be in 0..5");
        return reset(kEvalSeeds[static_cast<size_t>(init_index)]);
    }

    // Start from an explicit true state (trajectory replay, oracle tests).
    Observation reset_to(const AttitudeState& s, uint64_t episode_seed) {
        state_ = s;
        state_.q = normalize(state_.q);
        suite_.begin_episode(episode_seed);
        phi_prev_ = pointing_error(state_.q, cfg_);
        steps_ = 0;
        active_ = true;
        obs_ = observe(/*elapse_gyro=*/false);
        return obs_;
    }

    Transition step(const ActionCmd& a) {
        if (!active_) throw std::logic_error("AttitudeEnv::step called after episode end");

        Transition tr;
        tr.obs = obs_;
        const ActionCmd cmd = ActionCmd::clamped(a.m, sim_.torque_limit);
        tr.action = cmd.m;

        const Vec3 m_applied = apply_torque_faults(cmd.m, suite_.torque, suite_.torque_rng);
        state_ = advance_control_period(state_, m_applied, sim_);
        ++steps_;

        const double phi = pointing_error(state_.q, cfg_);
        tr.terminated = norm(state_.w) > deg2rad(cfg_.oob_omega_dps);
        tr.truncated = !tr.terminated && steps_ >= steps_per_episode_;
        tr.reward = reward(phi, phi_prev_, cmd.m, tr.terminated, cfg_, sim_.torque_limit);
        phi_prev_ = phi;

        obs_ = observe(/*elapse_gyro=*/true);
        tr.next_obs = obs_;
        tr.info.phi_true_deg = rad2deg(phi);
        tr.info.phi_obs_deg = rad2deg(pointing_error(obs_.q_obs, cfg_));
        tr.info.m_applied = m_applied;

        active_ = !(tr.terminated || tr.truncated);
        return tr;
    }

    bool active() const { return active_; }
    long steps() const { return steps_; }
    long steps_per_episode() const { return steps_per_episode_; }
    const AttitudeState& state() const { return state_; }
    const Observation& obs() const { return obs_; }
    const SimConfig& sim_config() const { return sim_; }
    const EnvConfig& env_config() const { return cfg_; }
    double phi_true() const { return pointing_error(state_.q, cfg_); }
    double phi_obs() const { return pointing_error(obs_.q_obs, cfg_); }

private:
    Observation observe(bool elapse_gyro) {
        Observation o;
        o.q_obs = observe_attitude(state_.q, suite_.misalign);
        o.w_meas = measure_gyro(suite_.gyro, state_.w, sim_.control_dt(), suite_.gyro_rng, elapse_gyro);
        return o;
    }

    SimConfig sim_;
    EnvConfig cfg_;
    PerturbationSuite suite_;
    AttitudeState state_;
    Observation obs_;
    double phi_prev_ = 0.0;
    long steps_ = 0;
    long steps_per_episode_ = 0;
    bool active_ = false;
};

}  // namespace satrl
