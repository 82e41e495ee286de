#pragma once

// Rigid-body attitude propagation.
//
// State is (q, w): body->inertial attitude quaternion and angular velocity in
// the body principal frame. Kinematics:
//
//   q_dot = 1/2 [[-[w x], w], [-w^T, 0]] q        (scalar-last block form)
//   w_dot = J^-1 (-w x (J w) + M)
//
// integrated with classical RK4 on the coupled 7-dimensional system and a
// quaternion renormalization after each step. The integrator accepts any
// finite torque; actuator limits are the environment's business.

#include <stdexcept>
#include <string>

#include "satrl/so3.hpp"

namespace satrl {

// Integrator blow-up or other non-recoverable simulation failure.
struct SimFault : std::runtime_error {
    explicit SimFault(const std::string& what) : std::runtime_error(what) {}
};

// Principal-axis diagonal inertia, kg m^2.
struct Inertia {
    double jx = 0.482;
    double jy = 1.094;
    double jz = 1.100;

    void validate() const {
        if (!(jx > 0.0 && jy > 0.0 && jz > 0.0))
            throw std::invalid_argument("Inertia: principal moments must be positive");
        // Triangle inequalities hold for any physical rigid body.
        if (jx + jy < jz || jy + jz < jx || jz + jx < jy)
            throw std::invalid_argument("Inertia: violates rigid-body triangle inequality");
    }
};

struct AttitudeState {
    Quat q;          // body -> inertial
    Vec3 w;          // rad/s, body principal frame
    double t = 0.0;  // s
};

struct SimConfig {
    double dt = 0.01;              // integrator step, s
    int substeps_per_control = 10; // control period = dt * substeps
    Inertia inertia;
    double torque_limit = 0.1;     // N m per axis

    double control_dt() const { return dt * substeps_per_control; }

    void validate() const {
        if (!(dt > 0.0)) throw std::invalid_argument("SimConfig: dt must be positive");
        if (substeps_per_control < 1) throw std::invalid_argument("SimConfig: substeps_per_control must be >= 1");
        if (!(torque_limit > 0.0)) throw std::invalid_argument("SimConfig: torque_limit must be positive");
        inertia.validate();
    }
};

// Quaternion derivative for body rate w. Returned as a (non-unit) Quat used
// only as a 4-vector of derivatives.
inline Quat q_dot(const Quat& q, const Vec3& w) {
    const Vec3 qv{q.x, q.y, q.z};
    const Vec3 dv = 0.5 * (q.w * w - cross(w, qv));
    return {dv.x, dv.y, dv.z, -0.5 * dot(w, qv)};
}

// Euler's equation in the principal frame: J w_dot = -w x (J w) + M.
inline Vec3 w_dot(const Vec3& w, const Vec3& m_applied, const Inertia& j) {
    const Vec3 jw{j.jx * w.x, j.jy * w.y, j.jz * w.z};
    const Vec3 g = cross(w, jw);
    return {(m_applied.x - g.x) / j.jx, (m_applied.y - g.y) / j.jy, (m_applied.z - g.z) / j.jz};
}

namespace detail {
struct Deriv {
    Quat dq;
    Vec3 dw;
};
inline Deriv deriv(const Quat& q, const Vec3& w, const Vec3& m, const Inertia& j) {
    return {q_dot(q, w), w_dot(w, m, j)};
}
}  // namespace detail

// One classical RK4 step with the torque held constant, then renormalize q.
inline AttitudeState rk4_step(const AttitudeState& s, const Vec3& m_applied, double dt, const Inertia& inertia) {
    using detail::deriv;
    const auto k1 = deriv(s.q, s.w, m_applied, inertia);
    const auto at = [&](const detail::Deriv& k, double h) {
        const Quat q{s.q.x + h * k.dq.x, s.q.y + h * k.dq.y, s.q.z + h * k.dq.z, s.q.w + h * k.dq.w};
        const Vec3 w = s.w + h * k.dw;
        return deriv(q, w, m_applied, inertia);
    };
    const auto k2 = at(k1, dt / 2);
    const auto k3 = at(k2, dt / 2);
    const auto k4 = at(k3, dt);

    const double c = dt / 6.0;
    Quat q{s.q.x + c * (k1.dq.x + 2 * k2.dq.x + 2 * k3.dq.x + k4.dq.x),
           s.q.y + c * (k1.dq.y + 2 * k2.dq.y + 2 * k3.dq.y + k4.dq.y),
           s.q.z + c * (k1.dq.z + 2 * k2.dq.z + 2 * k3.dq.z + k4.dq.z),
           s.q.w + c * (k1.dq.w + 2 * k2.dq.w + 2 * k3.dq.w + k4.dq.w)};
    const Vec3 w = s.w + c * (k1.dw + 2.0 * k2.dw + 2.0 * k3.dw + k4.dw);

    const double n = norm(q);
    if (!std::isfinite(n) || !(n > 0.0) || !finite(w))
        throw SimFault("rk4_step: state became non-finite (dt=" + std::to_string(dt) + ")");
    q = {q.x / n, q.y / n, q.z / n, q.w / n};
    return {q, w, s.t + dt};
}

// Advance one control period: substeps_per_control RK4 steps under a
// zero-order-hold torque.
inline AttitudeState advance_control_period(const AttitudeState& s, const Vec3& m_applied, const SimConfig& cfg) {
    AttitudeState out = s;
    for (int i = 0; i < cfg.substeps_per_control; ++i) out = rk4_step(out, m_applied, cfg.dt, cfg.inertia);
    return out;
}

// Angular momentum in the inertial frame, R(q) J w. Conserved torque-free;
// the dynamics tests lean on this.
inline Vec3 inertial_angular_momentum(const AttitudeState& s, const Inertia& j) {
    return rotate_vec(s.q, {j.jx * s.w.x, j.jy * s.w.y, j.jz * s.w.z});
}

// Rotational kinetic energy 1/2 w^T J w.
inline double rotational_energy(const AttitudeState& s, const Inertia& j) {
    return 0.5 * (j.jx * s.w.x * s.w.x + j.jy * s.w.y * s.w.y + j.jz * s.w.z * s.w.z);
}

}  // namespace satrl
