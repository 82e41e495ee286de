#pragma once

// Quaternion / 3-vector algebra for attitude work.
//
// Quaternion layout is SCALAR-LAST: q = (x, y, z, w) with (x, y, z) the
// vector part. This matches the block-matrix kinematics used by the
// simulator. Mixing scalar-first and scalar-last conventions is the classic
// failure mode in attitude code, so every function in this header assumes
// scalar-last and nothing else in the library converts.
//
// q and -q encode the same rotation. Rotations are therefore never compared
// componentwise; use rotated vectors or geodesic_angle().

#include <cmath>
#include <stdexcept>

namespace satrl {

inline constexpr double kPi = 3.14159265358979323846;

constexpr double deg2rad(double d) { return d * kPi / 180.0; }
constexpr double rad2deg(double r) { return r * 180.0 / kPi; }

struct Vec3 {
    double x = 0.0, y = 0.0, z = 0.0;

    Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
    Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
    Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
    Vec3 operator-() const { return {-x, -y, -z}; }
    double& operator[](int i) { return i == 0 ? x : (i == 1 ? y : z); }
    double operator[](int i) const { return i == 0 ? x : (i == 1 ? y : z); }
    bool operator==(const Vec3&) const = default;
};

inline Vec3 operator*(double s, const Vec3& v) { return v * s; }

inline double dot(const Vec3& a, const Vec3& b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
inline Vec3 cross(const Vec3& a, const Vec3& b) {
    return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}
inline double norm(const Vec3& v) { return std::sqrt(dot(v, v)); }

inline bool finite(const Vec3& v) {
    return std::isfinite(v.x) && std::isfinite(v.y) && std::isfinite(v.z);
}

// Row-major 3x3 matrix; just enough for skew() and the tests' oracles.
struct Mat3 {
    double m[9] = {0, 0, 0, 0, 0, 0, 0, 0, 0};

    double operator()(int r, int c) const { return m[3 * r + c]; }
    double& operator()(int r, int c) { return m[3 * r + c]; }

    Vec3 operator*(const Vec3& v) const {
        return {m[0] * v.x + m[1] * v.y + m[2] * v.z,
                m[3] * v.x + m[4] * v.y + m[5] * v.z,
                m[6] * v.x + m[7] * v.y + m[8] * v.z};
    }
    Mat3 operator*(const Mat3& o) const {
        Mat3 r;
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) {
                double s = 0.0;
                for (int k = 0; k < 3; ++k) s += (*this)(i, k) * o(k, j);
                r(i, j) = s;
            }
        return r;
    }
    Mat3 transpose() const {
        Mat3 r;
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) r(i, j) = (*this)(j, i);
        return r;
    }
};

// skew(w) * v == w x v; skew(w)^T == -skew(w).
inline Mat3 skew(const Vec3& w) {
    Mat3 s;
    s(0, 1) = -w.z; s(0, 2) =  w.y;
    s(1, 0) =  w.z; s(1, 2) = -w.x;
    s(2, 0) = -w.y; s(2, 1) =  w.x;
    return s;
}

struct Quat {
    double x = 0.0, y = 0.0, z = 0.0, w = 1.0;  // scalar-last; identity by default

    bool operator==(const Quat&) const = default;
};

inline double norm(const Quat& q) {
    return std::sqrt(q.x * q.x + q.y * q.y + q.z * q.z + q.w * q.w);
}

inline Quat normalize(const Quat& q) {
    const double n = norm(q);
    if (!(n > 0.0) || !std::isfinite(n)) throw std::invalid_argument("normalize: quaternion has no direction");
    return {q.x / n, q.y / n, q.z / n, q.w / n};
}

inline Quat conj(const Quat& q) { return {-q.x, -q.y, -q.z, q.w}; }

// Hamilton product under the scalar-last layout.
inline Quat quat_mul(const Quat& a, const Quat& b) {
    return {
        a.w * b.x + b.w * a.x + (a.y * b.z - a.z * b.y),
        a.w * b.y + b.w * a.y + (a.z * b.x - a.x * b.z),
        a.w * b.z + b.w * a.z + (a.x * b.y - a.y * b.x),
        a.w * b.w - (a.x * b.x + a.y * b.y + a.z * b.z),
    };
}

// Rotation about a single body axis; angle in radians.
inline Quat quat_about_x(double a) { return {std::sin(a / 2), 0, 0, std::cos(a / 2)}; }
inline Quat quat_about_y(double a) { return {0, std::sin(a / 2), 0, std::cos(a / 2)}; }
inline Quat quat_about_z(double a) { return {0, 0, std::sin(a / 2), std::cos(a / 2)}; }

struct Euler321 {
    double roll_phi = 0.0;   // rad, about x, applied last
    double pitch_theta = 0.0; // rad, about y
    double yaw_psi = 0.0;     // rad, about z, applied first
};

// 3-2-1 sequence: rotate about z (yaw), then y (pitch), then x (roll).
// Equivalent to quat_about_x(roll) * quat_about_y(pitch) * quat_about_z(yaw).
inline Quat euler321_to_quat(const Euler321& e) {
    const double cr = std::cos(e.roll_phi / 2), sr = std::sin(e.roll_phi / 2);
    const double cp = std::cos(e.pitch_theta / 2), sp = std::sin(e.pitch_theta / 2);
    const double cy = std::cos(e.yaw_psi / 2), sy = std::sin(e.yaw_psi / 2);
    return {
        sr * cp * cy + cr * sp * sy,
        cr * sp * cy - sr * cp * sy,
        cr * cp * sy + sr * sp * cy,
        cr * cp * cy - sr * sp * sy,
    };
}

// Rotate v by unit quaternion q (body -> inertial for an attitude quaternion).
// Refuses quaternions more than 1e-6 away from unit norm: that always means a
// normalization step was skipped upstream.
inline Vec3 rotate_vec(const Quat& q, const Vec3& v) {
    if (std::abs(norm(q) - 1.0) > 1e-6) throw std::invalid_argument("rotate_vec: quaternion not unit-norm");
    const Vec3 u{q.x, q.y, q.z};
    const Vec3 t = cross(u, v);
    return v + 2.0 * q.w * t + 2.0 * cross(u, t);
}

// Angle between two nonzero vectors, in [0, pi]. atan2 of cross/dot keeps
// full precision near 0 and pi where acos(dot) loses digits.
inline double angle_between(const Vec3& u, const Vec3& v) {
    const double nu = norm(u), nv = norm(v);
    if (!(nu > 0.0) || !(nv > 0.0)) throw std::invalid_argument("angle_between: zero-length input");
    return std::atan2(norm(cross(u, v)), dot(u, v));
}

// Geodesic angle of the rotation carried by unit quaternion q, in [0, pi].
inline double rotation_angle(const Quat& q) {
    const Vec3 v{q.x, q.y, q.z};
    return 2.0 * std::atan2(norm(v), std::abs(q.w));
}

// Geodesic distance between two rotations (insensitive to the q/-q ambiguity).
inline double geodesic_angle(const Quat& a, const Quat& b) {
    return rotation_angle(quat_mul(conj(a), b));
}

}  // namespace satrl
