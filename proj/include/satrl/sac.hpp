#pragma once

// Soft Actor-Critic: twin critics with soft-updated targets, tanh-gaussian
// policy, auto-tuned entropy temperature.
//
// Network inputs use a fixed codec: quaternion components raw, angular rates
// divided by the 10 deg/s safety limit so every input lives in O(1) range.
// Actions are normalized to [-1, 1]^3 inside the agent and scaled to torque
// at the environment boundary; replay entries and the GAIL discriminator see
// normalized actions.

#include <array>
#include <cmath>
#include <functional>
#include <span>
#include <vector>

#include "satrl/env.hpp"
#include "satrl/net.hpp"
#include "satrl/replay.hpp"
#include "satrl/rng.hpp"

namespace satrl {

inline constexpr double kOmegaScale = 0.17453292519943295;  // 10 deg/s in rad/s

inline std::array<double, 7> net_obs(const Observation& o) {
    return {o.q_obs.x, o.q_obs.y, o.q_obs.z, o.q_obs.w,
            o.w_meas.x / kOmegaScale, o.w_meas.y / kOmegaScale, o.w_meas.z / kOmegaScale};
}

inline Vec3 scale_action(const std::array<double, 3>& a_norm, double torque_limit) {
    return {a_norm[0] * torque_limit, a_norm[1] * torque_limit, a_norm[2] * torque_limit};
}

inline std::array<double, 3> normalize_action(const Vec3& m, double torque_limit) {
    return {m.x / torque_limit, m.y / torque_limit, m.z / torque_limit};
}

struct SacConfig {
    int batch_size = 64;
    size_t buffer_capacity = 1000000;
    long learning_starts = 1000;
    int train_freq = 1;      // env steps per update round
    int gradient_steps = 1;  // updates per round
    double lr_start = 1e-3;  // linear decay lr_start -> lr_end over total steps
    double lr_end = 1e-4;
    double discount = 0.99;
    double tau = 0.005;
    double entropy_target = -3.0;  // -action_dim
    bool auto_alpha = true;
    double fixed_alpha = 0.2;  // used only when auto_alpha is off
    std::vector<int> hidden = {256, 256};
    long checkpoint_every = 50000;

    void validate() const {
        if (batch_size < 1 || static_cast<size_t>(batch_size) > buffer_capacity)
            throw std::invalid_argument("SacConfig: batch_size must be in [1, buffer_capacity]");
        if (!(tau > 0.0 && tau <= 1.0)) throw std::invalid_argument("SacConfig: tau must be in (0, 1]");
        if (!(discount > 0.0 && discount < 1.0)) throw std::invalid_argument("SacConfig: discount must be in (0, 1)");
        if (learning_starts < 0 || train_freq < 1 || gradient_steps < 1)
            throw std::invalid_argument("SacConfig: invalid cadence values");
        if (hidden.empty()) throw std::invalid_argument("SacConfig: need at least one hidden layer");
        if (!(lr_start > 0.0) || !(lr_end > 0.0)) throw std::invalid_argument("SacConfig: learning rates must be positive");
        if (fixed_alpha < 0.0) throw std::invalid_argument("SacConfig: fixed_alpha must be >= 0");
    }

    double lr_at(long step, long total_steps) const {
        if (total_steps <= 1) return lr_start;
        const double f = static_cast<double>(step) / static_cast<double>(total_steps);
        return lr_start + (lr_end - lr_start) * (f < 0.0 ? 0.0 : (f > 1.0 ? 1.0 : f));
    }
};

struct SacLosses {
    double critic1 = 0, critic2 = 0, policy = 0, temperature = 0;
    double mean_q = 0, alpha = 0, mean_log_prob = 0;
};

class SacAgent {
public:
    SacConfig cfg;
    double torque_limit = 0.1;
    MlpNet policy;            // 7 -> hidden -> 6, gaussian head (3 means, 3 log-stds)
    MlpNet q1, q2, tq1, tq2;  // 10 -> hidden -> 1, linear head
    double log_alpha = 0.0;
    AdamState policy_opt, q1_opt, q2_opt;
    ScalarAdam alpha_opt;
    Rng act_rng;     // exploration noise
    Rng update_rng;  // batch sampling + reparameterization noise

    static constexpr int kObsDim = 7;
    static constexpr int kActDim = 3;

    static SacAgent make(const SacConfig& cfg, uint64_t seed, double torque_limit = 0.1) {
        cfg.validate();
        SacAgent a;
        a.cfg = cfg;
        a.torque_limit = torque_limit;
        std::vector<int> pdims{kObsDim};
        std::vector<int> qdims{kObsDim + kActDim};
        for (int h : cfg.hidden) {
            pdims.push_back(h);
            qdims.push_back(h);
        }
        pdims.push_back(2 * kActDim);
        qdims.push_back(1);

        Rng pinit = Rng::stream(seed, "net_init:policy");
        Rng q1init = Rng::stream(seed, "net_init:q1");
        Rng q2init = Rng::stream(seed, "net_init:q2");
        a.policy = MlpNet::make(pdims, Activation::relu, Head::gaussian, pinit);
        a.q1 = MlpNet::make(qdims, Activation::relu, Head::linear, q1init);
        a.q2 = MlpNet::make(qdims, Activation::relu, Head::linear, q2init);
        a.tq1 = a.q1;  // targets start equal to the critics
        a.tq2 = a.q2;
        a.policy_opt = AdamState::for_net(a.policy);
        a.q1_opt = AdamState::for_net(a.q1);
        a.q2_opt = AdamState::for_net(a.q2);
        a.act_rng = Rng::stream(seed, "act");
        a.update_rng = Rng::stream(seed, "update");
        return a;
    }

    double alpha() const { return cfg.auto_alpha ? std::exp(log_alpha) : cfg.fixed_alpha; }

    // tanh(mean): no randomness, safe to call concurrently on a snapshot.
    std::array<double, 3> act_mean(const Observation& obs) const {
        const auto raw = policy.forward(net_obs(obs));
        std::array<double, 3> out{};
        for (int i = 0; i < kActDim; ++i) out[i] = std::tanh(raw[static_cast<size_t>(i)]);
        return out;
    }

    std::array<double, 3> act_normalized(const Observation& obs, bool deterministic) {
        if (deterministic) return act_mean(obs);
        const auto raw = policy.forward(net_obs(obs));
        const std::span<const double> mean(raw.data(), kActDim), ls(raw.data() + kActDim, kActDim);
        const auto s = gaussian_head_sample(mean, ls, act_rng);
        return {s.action[0], s.action[1], s.action[2]};
    }

    Vec3 act(const Observation& obs, bool deterministic) {
        return scale_action(act_normalized(obs, deterministic), torque_limit);
    }

    // One gradient step each for the critics, the policy, and the
    // temperature, then a soft target update. Throws on non-finite losses.
    SacLosses update(const ReplayBuffer& buffer, double lr) {
        const auto idx = buffer.sample_indices(static_cast<size_t>(cfg.batch_size), update_rng);
        return update_on(buffer, idx, lr);
    }

    SacLosses update_on(const ReplayBuffer& buffer, std::span<const size_t> idx, double lr) {
        const size_t B = idx.size();
        const double a = alpha();
        SacLosses out;
        out.alpha = a;

        // --- critic targets
        std::vector<double> targets(B);
        for (size_t j = 0; j < B; ++j) {
            const BufferEntry& e = buffer[idx[j]];
            const auto raw = policy.forward(e.next_obs);
            const std::span<const double> mean(raw.data(), kActDim), ls(raw.data() + kActDim, kActDim);
            const auto s = gaussian_head_sample(mean, ls, update_rng);
            std::array<double, 10> qin{};
            for (int i = 0; i < 7; ++i) qin[i] = e.next_obs[i];
            for (int i = 0; i < 3; ++i) qin[7 + i] = s.action[i];
            const double qmin = std::min(tq1.forward(qin)[0], tq2.forward(qin)[0]);
            targets[j] = e.reward + (e.terminated ? 0.0 : cfg.discount * (qmin - a * s.log_prob));
        }

        // --- critic regression
        const auto fit_critic = [&](MlpNet& q, AdamState& opt, double& loss_out) {
            NetGrad g = q.zero_grad();
            double loss = 0.0;
            MlpNet::Cache cache;
            for (size_t j = 0; j < B; ++j) {
                const BufferEntry& e = buffer[idx[j]];
                std::array<double, 10> qin{};
                for (int i = 0; i < 7; ++i) qin[i] = e.obs[i];
                for (int i = 0; i < 3; ++i) qin[7 + i] = e.action[i];
                const double qv = q.forward(qin, cache)[0];
                const double err = qv - targets[j];
                loss += err * err / B;
                const std::array<double, 1> upstream{2.0 * err / B};
                q.backward(cache, upstream, g);
            }
            if (!std::isfinite(loss)) throw std::runtime_error("SAC: non-finite critic loss");
            adam_step(opt, q, g, lr);
            loss_out = loss;
        };
        fit_critic(q1, q1_opt, out.critic1);
        fit_critic(q2, q2_opt, out.critic2);

        // --- policy step: minimize E[alpha*logpi(a~|s) - min Q(s, a~)]
        NetGrad pg = policy.zero_grad();
        double ploss = 0.0, logp_sum = 0.0, q_sum = 0.0;
        MlpNet::Cache pc, c1, c2;
        NetGrad scratch1 = q1.zero_grad(), scratch2 = q2.zero_grad();  // discarded; only input grads wanted
        for (size_t j = 0; j < B; ++j) {
            const BufferEntry& e = buffer[idx[j]];
            const auto raw = policy.forward(e.obs, pc);
            const std::span<const double> mean(raw.data(), kActDim), ls(raw.data() + kActDim, kActDim);
            const auto s = gaussian_head_sample(mean, ls, update_rng);

            std::array<double, 10> qin{};
            for (int i = 0; i < 7; ++i) qin[i] = e.obs[i];
            for (int i = 0; i < 3; ++i) qin[7 + i] = s.action[i];
            const double v1 = q1.forward(qin, c1)[0];
            const double v2 = q2.forward(qin, c2)[0];
            const bool use1 = v1 <= v2;
            const double qmin = use1 ? v1 : v2;

            ploss += (a * s.log_prob - qmin) / B;
            logp_sum += s.log_prob;
            q_sum += qmin;

            std::vector<double> dq_dinput;
            const std::array<double, 1> downstream{-1.0 / static_cast<double>(B)};  // d(-qmin/B)/dq
            if (use1) {
                q1.backward(c1, downstream, scratch1, &dq_dinput);
            } else {
                q2.backward(c2, downstream, scratch2, &dq_dinput);
            }

            const SquashGrads sg = squash_grads(s, ls);
            std::vector<double> upstream(2 * kActDim);
            for (int i = 0; i < kActDim; ++i) {
                const double dl_da = dq_dinput[7 + i];
                upstream[i] = (a / B) * sg.dlogp_dmean[i] + dl_da * sg.daction_dmean[i];
                upstream[kActDim + i] = (a / B) * sg.dlogp_dlogstd[i] + dl_da * sg.daction_dlogstd[i];
            }
            policy.backward(pc, upstream, pg);
        }
        if (!std::isfinite(ploss)) throw std::runtime_error("SAC: non-finite policy loss");
        adam_step(policy_opt, policy, pg, lr);
        out.policy = ploss;
        out.mean_q = q_sum / B;
        out.mean_log_prob = logp_sum / B;

        // --- temperature: L = -log_alpha * mean(logpi + target); entropy above
        // target pushes alpha down, below target pushes it up.
        if (cfg.auto_alpha) {
            const double drive = logp_sum / B + cfg.entropy_target;
            out.temperature = -log_alpha * drive;
            alpha_opt.step(log_alpha, -drive, lr);
        }

        // --- soft target update
        soft_update(tq1, q1, cfg.tau);
        soft_update(tq2, q2, cfg.tau);
        return out;
    }

    static void soft_update(MlpNet& target, const MlpNet& online, double tau) {
        for (size_t l = 0; l < target.layers.size(); ++l) {
            auto merge = [tau](std::vector<double>& t, const std::vector<double>& o) {
                for (size_t i = 0; i < t.size(); ++i) t[i] = tau * o[i] + (1 - tau) * t[i];
            };
            merge(target.layers[l].w, online.layers[l].w);
            merge(target.layers[l].b, online.layers[l].b);
        }
    }
};

// One row per finished episode in the training log.
struct SacLogRow {
    long step = 0;
    long episode = 0;
    double episode_reward = 0;
    double critic1_loss = 0, critic2_loss = 0, policy_loss = 0, alpha = 0;
};

struct SacTrainResult {
    std::vector<SacLogRow> log;
    long steps_done = 0;
    long episodes = 0;
};

// Off-policy training loop: act (uniform random before learning_starts), push
// the transition, update every train_freq steps. Episode seeds come off a
// dedicated stream, so the trajectory is a pure function of (seed, config).
template <typename EnvFactory>
SacTrainResult train_sac(SacAgent& agent, EnvFactory&& make_env, long total_steps, uint64_t seed,
                         const std::function<void(long, const SacAgent&)>& checkpoint_hook = {}) {
    ReplayBuffer buffer(agent.cfg.buffer_capacity);
    Rng episode_seeds = Rng::stream(seed, "episodes");
    Rng explore = Rng::stream(seed, "explore");

    SacTrainResult result;
    AttitudeEnv env = make_env();
    Observation obs = env.reset(episode_seeds.next_u64());
    double episode_reward = 0.0;
    SacLosses last{};
    last.alpha = agent.alpha();

    for (long step = 1; step <= total_steps; ++step) {
        std::array<double, 3> a_norm;
        if (step <= agent.cfg.learning_starts) {
            a_norm = {explore.uniform(-1, 1), explore.uniform(-1, 1), explore.uniform(-1, 1)};
        } else {
            a_norm = agent.act_normalized(obs, /*deterministic=*/false);
        }

        const Transition tr = env.step({scale_action(a_norm, agent.torque_limit)});
        BufferEntry e;
        e.obs = net_obs(obs);
        e.action = a_norm;
        e.reward = tr.reward.total;
        e.next_obs = net_obs(tr.next_obs);
        e.terminated = tr.terminated;
        buffer.push(e);
        episode_reward += tr.reward.total;
        obs = tr.next_obs;

        if (step > agent.cfg.learning_starts && step % agent.cfg.train_freq == 0 &&
            buffer.size() >= static_cast<size_t>(agent.cfg.batch_size)) {
            for (int gstep = 0; gstep < agent.cfg.gradient_steps; ++gstep)
                last = agent.update(buffer, agent.cfg.lr_at(step, total_steps));
        }

        if (tr.terminated || tr.truncated) {
            ++result.episodes;
            result.log.push_back({step, result.episodes, episode_reward, last.critic1, last.critic2, last.policy,
                                  last.alpha});
            episode_reward = 0.0;
            obs = env.reset(episode_seeds.next_u64());
        }

        if (checkpoint_hook && agent.cfg.checkpoint_every > 0 && step % agent.cfg.checkpoint_every == 0)
            checkpoint_hook(step, agent);
    }
    result.steps_done = total_steps;
    return result;
}

}  // namespace satrl
