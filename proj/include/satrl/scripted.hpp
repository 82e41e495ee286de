#pragma once

// Non-learning policies: a quaternion-feedback pointing controller (the
// stand-in expert for imitation tests) and a uniform random policy (the
// do-nothing-useful baseline).

#include "satrl/env.hpp"
#include "satrl/rng.hpp"
#include "satrl/so3.hpp"

namespace satrl {

// Pointing-error feedback with rate damping: torque along the (body-frame)
// axis that swings the antenna toward the target, minus kd * measured rate.
// Acts on observations only, like any other agent.
struct ScriptedController {
    double kp = 0.02;
    double kd = 0.3;
    Vec3 antenna_body{1, 0, 0};
    Vec3 target_inertial{0, 0, 1};
    double torque_limit = 0.1;

    Vec3 act(const Observation& o) const {
        const Vec3 a_inertial = rotate_vec(o.q_obs, antenna_body);
        Vec3 axis = cross(a_inertial, target_inertial);
        if (norm(axis) < 1e-9 && dot(a_inertial, target_inertial) < 0.0) {
            // antiparallel: any axis orthogonal to the antenna breaks the tie
            const Vec3 helper = std::abs(a_inertial.x) < 0.9 ? Vec3{1, 0, 0} : Vec3{0, 1, 0};
            axis = cross(a_inertial, helper);
        }
        const Vec3 axis_body = rotate_vec(conj(o.q_obs), axis);
        const Vec3 m = kp * axis_body - kd * o.w_meas;
        return ActionCmd::clamped(m, torque_limit).m;
    }
};

struct RandomPolicy {
    Rng rng;
    double torque_limit = 0.1;

    explicit RandomPolicy(uint64_t seed) : rng(Rng::stream(seed, "random_policy")) {}

    Vec3 act(const Observation&) {
        return {rng.uniform(-torque_limit, torque_limit), rng.uniform(-torque_limit, torque_limit),
                rng.uniform(-torque_limit, torque_limit)};
    }
};

}  // namespace satrl
