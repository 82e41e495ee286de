#pragma once

// Sensor / actuator fault models and the 14-row experiment matrix.
//
// Units: fault magnitudes are configured in deg/s (the natural gyro datasheet
// unit) and converted to rad/s exactly once, in the factory functions here.
// Everything downstream is rad/s.

#include <array>
#include <stdexcept>
#include <string>

#include "satrl/rng.hpp"
#include "satrl/so3.hpp"

namespace satrl {

enum class GyroKind { none, white_noise, constant_bias, drift };

struct GyroModel {
    GyroKind kind = GyroKind::none;
    // white_noise: stddev of the per-call noise, rad/s.
    // constant_bias: stddev of the per-episode bias draw, rad/s.
    // drift: random-walk intensity, rad/s per sqrt(s).
    double sigma = 0.0;
    Vec3 episode_bias;  // constant_bias: fixed for the episode
    Vec3 drift_state;   // drift: random-walk accumulator, b(0) = 0

    void validate() const {
        if (sigma < 0.0) throw std::invalid_argument("GyroModel: sigma must be >= 0");
    }
};

// Per-episode re-initialization: constant_bias resamples, drift zeroes.
inline GyroModel reset_gyro(const GyroModel& model, Rng& rng) {
    GyroModel out = model;
    out.drift_state = {0, 0, 0};
    out.episode_bias = {0, 0, 0};
    if (model.kind == GyroKind::constant_bias)
        out.episode_bias = {rng.normal(0, model.sigma), rng.normal(0, model.sigma), rng.normal(0, model.sigma)};
    return out;
}

// One gyro reading. For the drift kind the bias random walk advances by
// sigma * N(0, control_dt) per component before it is applied: the walk moves
// at the agent's sampling cadence, so the t = 0 sample (taken at reset, when
// no control period has elapsed) must be requested with elapse = false and
// reads b(0) = 0.
inline Vec3 measure_gyro(GyroModel& model, const Vec3& w_true, double control_dt, Rng& rng, bool elapse = true) {
    switch (model.kind) {
        case GyroKind::none:
            return w_true;
        case GyroKind::white_noise:
            return w_true + Vec3{rng.normal(0, model.sigma), rng.normal(0, model.sigma), rng.normal(0, model.sigma)};
        case GyroKind::constant_bias:
            return w_true + model.episode_bias;
        case GyroKind::drift: {
            if (elapse) {
                const double step_sd = model.sigma * std::sqrt(control_dt);
                model.drift_state = model.drift_state +
                    Vec3{rng.normal(0, step_sd), rng.normal(0, step_sd), rng.normal(0, step_sd)};
            }
            return w_true + model.drift_state;
        }
    }
    return w_true;
}

enum class TorqueKind { none, axis_fail, axis_noise };

struct TorqueModel {
    TorqueKind kind = TorqueKind::none;
    std::array<bool, 3> failed_axes = {false, false, false};
    std::array<bool, 3> noisy_axes = {false, false, false};
    double gamma = 0.5;  // reliable fraction; noise factor xi ~ U[gamma, 1]

    void validate() const {
        if (!(gamma > 0.0 && gamma < 1.0)) throw std::invalid_argument("TorqueModel: gamma must be in (0, 1)");
        for (int i = 0; i < 3; ++i)
            if (failed_axes[i] && noisy_axes[i])
                throw std::invalid_argument("TorqueModel: an axis cannot be both failed and noisy");
    }
};

// Degrade an already-clamped torque command. Failed axes deliver nothing;
// noisy axes deliver xi * M with a fresh xi ~ U[gamma, 1] per axis per call.
// Never flips a sign, never amplifies.
inline Vec3 apply_torque_faults(const Vec3& m_cmd, const TorqueModel& model, Rng& rng) {
    if (model.kind == TorqueKind::none) return m_cmd;
    Vec3 out = m_cmd;
    for (int i = 0; i < 3; ++i) {
        if (model.kind == TorqueKind::axis_fail && model.failed_axes[i]) out[i] = 0.0;
        if (model.kind == TorqueKind::axis_noise && model.noisy_axes[i]) out[i] *= rng.uniform(model.gamma, 1.0);
    }
    return out;
}

struct MisalignModel {
    bool enabled = false;
    Quat delta_q;  // unit; left-multiplied onto the true attitude

    static MisalignModel from_euler_deg(const Vec3& euler_deg) {
        MisalignModel m;
        m.enabled = true;
        m.delta_q = euler321_to_quat({deg2rad(euler_deg.x), deg2rad(euler_deg.y), deg2rad(euler_deg.z)});
        return m;
    }
};

// What the attitude sensor reports: delta_q (x) q_true when misaligned.
inline Quat observe_attitude(const Quat& q_true, const MisalignModel& model) {
    if (!model.enabled) return q_true;
    return normalize(quat_mul(model.delta_q, q_true));
}

// Fault magnitudes shared by the experiment table. The torque-noise gamma has
// no published value; 0.5 keeps the actuator degraded but survivable and is
// exposed in configuration.
struct FaultParams {
    double gyro_white_sigma_dps = 0.1;    // deg/s
    double gyro_bias_sigma_dps = 0.1;     // deg/s
    double gyro_drift_sigma_dps = 0.0001; // deg/s per sqrt(s); the level the task stays controllable at
    double torque_gamma = 0.5;
    Vec3 misalign_euler_deg = {15.0, 18.0, 21.0};  // roll, pitch, yaw
};

// One experiment's fault configuration plus its episode-scoped random state.
// A suite belongs to exactly one environment instance.
struct PerturbationSuite {
    GyroModel gyro;
    TorqueModel torque;
    MisalignModel misalign;
    Rng gyro_rng;
    Rng torque_rng;

    // Re-derives both fault streams from the episode seed and re-initializes
    // episode-scoped state. Same seed, same realizations.
    void begin_episode(uint64_t episode_seed) {
        gyro_rng = Rng::stream(episode_seed, "gyro");
        torque_rng = Rng::stream(episode_seed, "torque");
        gyro = reset_gyro(gyro, gyro_rng);
    }
};

inline std::string experiment_name(int index) {
    static const char* names[] = {
        "no_control_error + no_misalignment + no_gyro_error",
        "x_fail + no_misalignment + no_gyro_error",
        "y_fail + no_misalignment + no_gyro_error",
        "z_fail + no_misalignment + no_gyro_error",
        "x_fail + misalignment + no_gyro_error",
        "y_fail + misalignment + no_gyro_error",
        "z_fail + misalignment + no_gyro_error",
        "xyz_noise + misalignment + no_gyro_error",
        "no_control_error + no_misalignment + gyro_constant",
        "no_control_error + no_misalignment + gyro_noise",
        "no_control_error + no_misalignment + gyro_drift",
        "xy_fail + no_misalignment + no_gyro_error",
        "yz_fail + no_misalignment + no_gyro_error",
        "xz_fail + no_misalignment + no_gyro_error",
    };
    if (index < 1 || index > 14) throw std::invalid_argument("experiment index must be in 1..14");
    return names[index - 1];
}

// The experiment matrix, rows 1..14.
inline PerturbationSuite suite_for_experiment(int index, const FaultParams& p = {}) {
    if (index < 1 || index > 14) throw std::invalid_argument("experiment index must be in 1..14");

    PerturbationSuite s;
    const auto fail = [&](bool x, bool y, bool z) {
        s.torque.kind = TorqueKind::axis_fail;
        s.torque.failed_axes = {x, y, z};
    };
    const auto misalign = [&] { s.misalign = MisalignModel::from_euler_deg(p.misalign_euler_deg); };
    const auto gyro = [&](GyroKind kind, double sigma_dps) {
        s.gyro.kind = kind;
        s.gyro.sigma = deg2rad(sigma_dps);
    };

    switch (index) {
        case 1: break;
        case 2: fail(true, false, false); break;
        case 3: fail(false, true, false); break;
        case 4: fail(false, false, true); break;
        case 5: fail(true, false, false); misalign(); break;
        case 6: fail(false, true, false); misalign(); break;
        case 7: fail(false, false, true); misalign(); break;
        case 8:
            s.torque.kind = TorqueKind::axis_noise;
            s.torque.noisy_axes = {true, true, true};
            s.torque.gamma = p.torque_gamma;
            misalign();
            break;
        case 9: gyro(GyroKind::constant_bias, p.gyro_bias_sigma_dps); break;
        case 10: gyro(GyroKind::white_noise, p.gyro_white_sigma_dps); break;
        case 11: gyro(GyroKind::drift, p.gyro_drift_sigma_dps); break;
        case 12: fail(true, true, false); break;
        case 13: fail(false, true, true); break;
        case 14: fail(true, false, true); break;
    }
    s.gyro.validate();
    s.torque.validate();
    return s;
}

}  // namespace satrl
