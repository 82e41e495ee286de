#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <vector>

#include "satrl/faults.hpp"

using namespace satrl;

namespace {

double normal_cdf(double x, double sd) { return 0.5 * std::erfc(-x / (sd * std::sqrt(2.0))); }

// Two-sided Kolmogorov-Smirnov distance against N(0, sd^2).
double ks_distance(std::vector<double> xs, double sd) {
    std::sort(xs.begin(), xs.end());
    const double n = static_cast<double>(xs.size());
    double d = 0.0;
    for (size_t i = 0; i < xs.size(); ++i) {
        const double f = normal_cdf(xs[i], sd);
        d = std::max(d, std::abs((i + 1) / n - f));
        d = std::max(d, std::abs(f - i / n));
    }
    return d;
}

}  // namespace

TEST_CASE("measure_gyro: kind none is the identity") {
    GyroModel m;
    Rng rng(21);
    const Vec3 w{0.01, -0.02, 0.03};
    const Vec3 out = measure_gyro(m, w, 0.1, rng);
    REQUIRE(out == w);
}

TEST_CASE("measure_gyro white noise: empirical std matches 0.1 deg/s within 5%") {
    GyroModel m;
    m.kind = GyroKind::white_noise;
    m.sigma = deg2rad(0.1);
    Rng rng(22);
    const Vec3 w{0.005, 0.0, -0.004};
    const int n = 100000;
    Vec3 sum{}, sumsq{};
    for (int i = 0; i < n; ++i) {
        const Vec3 e = measure_gyro(m, w, 0.1, rng) - w;
        sum = sum + e;
        sumsq = sumsq + Vec3{e.x * e.x, e.y * e.y, e.z * e.z};
    }
    for (int c = 0; c < 3; ++c) {
        const double mean = sum[c] / n;
        const double sd = std::sqrt(sumsq[c] / n - mean * mean);
        REQUIRE(sd == Catch::Approx(deg2rad(0.1)).epsilon(0.05));
        REQUIRE(std::abs(mean) < deg2rad(0.01));
    }
}

TEST_CASE("constant bias: fixed within an episode, resampled between episodes") {
    GyroModel base;
    base.kind = GyroKind::constant_bias;
    base.sigma = deg2rad(0.1);
    Rng rng(23);

    GyroModel ep1 = reset_gyro(base, rng);
    const Vec3 w{0.02, 0.01, -0.03};
    const Vec3 bias = measure_gyro(ep1, w, 0.1, rng) - w;
    for (int i = 0; i < 1000; ++i) {
        // same reading twice: bit-identical
        REQUIRE(measure_gyro(ep1, w, 0.1, rng) == measure_gyro(ep1, w, 0.1, rng));
        // different true rates: the recovered bias matches up to subtraction roundoff
        const Vec3 wt{0.1 * i, -0.05 * i, 0.02 * i};
        const Vec3 again = measure_gyro(ep1, wt, 0.1, rng) - wt;
        REQUIRE(std::abs(again.x - bias.x) < 1e-12);
        REQUIRE(std::abs(again.y - bias.y) < 1e-12);
        REQUIRE(std::abs(again.z - bias.z) < 1e-12);
    }

    GyroModel ep2 = reset_gyro(base, rng);
    REQUIRE(ep2.episode_bias != ep1.episode_bias);
}

TEST_CASE("drift: reset zeroes the accumulator and the t=0 sample reads b(0)=0") {
    GyroModel m;
    m.kind = GyroKind::drift;
    m.sigma = deg2rad(0.01);
    m.drift_state = {1, 2, 3};
    Rng rng(24);
    m = reset_gyro(m, rng);
    REQUIRE(m.drift_state == Vec3{0, 0, 0});
    const Vec3 w{0.01, 0.02, 0.03};
    REQUIRE(measure_gyro(m, w, 0.1, rng, /*elapse=*/false) == w);
    // stepping afterwards moves the bias
    measure_gyro(m, w, 0.1, rng);
    REQUIRE(m.drift_state != Vec3{0, 0, 0});
}

TEST_CASE("drift: ensemble variance at t=100 s equals sigma^2 * t within 10%") {
    const double sigma = deg2rad(0.01);
    const double dt = 0.1;
    const int episodes = 1000, steps = 1000;  // 1000 x 0.1 s = 100 s
    Rng rng(25);
    Vec3 sumsq{};
    for (int e = 0; e < episodes; ++e) {
        GyroModel m;
        m.kind = GyroKind::drift;
        m.sigma = sigma;
        m = reset_gyro(m, rng);
        for (int s = 0; s < steps; ++s) measure_gyro(m, {0, 0, 0}, dt, rng);
        sumsq = sumsq + Vec3{m.drift_state.x * m.drift_state.x, m.drift_state.y * m.drift_state.y,
                             m.drift_state.z * m.drift_state.z};
    }
    const double want = sigma * sigma * 100.0;  // Wiener process: Var[b(t)] = sigma^2 t
    for (int c = 0; c < 3; ++c) REQUIRE(sumsq[c] / episodes == Catch::Approx(want).epsilon(0.10));
}

TEST_CASE("drift increments are iid N(0, sigma^2 dt): KS test at the 1% level") {
    const double sigma = deg2rad(0.01);
    const double dt = 0.1;
    GyroModel m;
    m.kind = GyroKind::drift;
    m.sigma = sigma;
    Rng rng(26);
    m = reset_gyro(m, rng);
    std::vector<double> increments;
    Vec3 prev{};
    for (int i = 0; i < 10000; ++i) {
        measure_gyro(m, {0, 0, 0}, dt, rng);
        increments.push_back(m.drift_state.x - prev.x);
        prev = m.drift_state;
    }
    const double crit = 1.6276 / std::sqrt(10000.0);  // alpha = 0.01
    REQUIRE(ks_distance(std::move(increments), sigma * std::sqrt(dt)) < crit);
}

TEST_CASE("apply_torque_faults: complete x failure zeroes exactly the x component") {
    TorqueModel m;
    m.kind = TorqueKind::axis_fail;
    m.failed_axes = {true, false, false};
    Rng rng(27);
    const Vec3 out = apply_torque_faults({0.1, 0.05, -0.02}, m, rng);
    REQUIRE(out.x == 0.0);
    REQUIRE(out.y == 0.05);
    REQUIRE(out.z == -0.02);
}

TEST_CASE("apply_torque_faults: xyz noise respects the [gamma*M, M] envelope per sample") {
    TorqueModel m;
    m.kind = TorqueKind::axis_noise;
    m.noisy_axes = {true, true, true};
    m.gamma = 0.5;
    Rng rng(28);
    for (int i = 0; i < 20000; ++i) {
        const Vec3 cmd{rng.uniform(-0.1, 0.1), rng.uniform(-0.1, 0.1), rng.uniform(-0.1, 0.1)};
        const Vec3 out = apply_torque_faults(cmd, m, rng);
        for (int c = 0; c < 3; ++c) {
            // sign-respecting: out between gamma*cmd and cmd
            const double lo = std::min(m.gamma * cmd[c], cmd[c]);
            const double hi = std::max(m.gamma * cmd[c], cmd[c]);
            REQUIRE(out[c] >= lo);
            REQUIRE(out[c] <= hi);
            REQUIRE(std::abs(out[c]) <= std::abs(cmd[c]));
            REQUIRE(out[c] * cmd[c] >= 0.0);
        }
    }
}

TEST_CASE("apply_torque_faults: kind none is the identity and validation catches overlap") {
    TorqueModel none;
    Rng rng(29);
    const Vec3 cmd{0.03, -0.07, 0.1};
    REQUIRE(apply_torque_faults(cmd, none, rng) == cmd);

    TorqueModel bad;
    bad.failed_axes = {true, false, false};
    bad.noisy_axes = {true, false, false};
    REQUIRE_THROWS_AS(bad.validate(), std::invalid_argument);
    TorqueModel badgamma;
    badgamma.gamma = 1.0;
    REQUIRE_THROWS_AS(badgamma.validate(), std::invalid_argument);
}

TEST_CASE("observe_attitude: disabled and identity-delta cases pass q through") {
    Rng rng(30);
    const Quat q = normalize(Quat{0.3, -0.2, 0.1, 0.95});
    MisalignModel off;
    REQUIRE(observe_attitude(q, off) == q);

    MisalignModel ident;
    ident.enabled = true;
    const Quat out = observe_attitude(q, ident);
    REQUIRE(geodesic_angle(out, q) < 1e-12);
}

TEST_CASE("observe_attitude: the observed/true geodesic gap equals the misalignment angle") {
    const MisalignModel m = MisalignModel::from_euler_deg({15, 18, 21});
    Rng rng(31);
    const double delta_angle = rotation_angle(m.delta_q);
    for (int i = 0; i < 100; ++i) {
        const Quat q = normalize(Quat{rng.normal(), rng.normal(), rng.normal(), rng.normal()});
        const Quat qp = observe_attitude(q, m);
        REQUIRE(geodesic_angle(qp, q) == Catch::Approx(delta_angle).margin(1e-10));
    }
}

TEST_CASE("suite_for_experiment covers the whole experiment matrix") {
    const auto s1 = suite_for_experiment(1);
    REQUIRE(s1.gyro.kind == GyroKind::none);
    REQUIRE(s1.torque.kind == TorqueKind::none);
    REQUIRE_FALSE(s1.misalign.enabled);

    const auto s2 = suite_for_experiment(2);
    REQUIRE(s2.torque.failed_axes == std::array<bool, 3>{true, false, false});
    REQUIRE(suite_for_experiment(3).torque.failed_axes == std::array<bool, 3>{false, true, false});
    REQUIRE(suite_for_experiment(4).torque.failed_axes == std::array<bool, 3>{false, false, true});

    for (int i = 5; i <= 7; ++i) {
        const auto s = suite_for_experiment(i);
        REQUIRE(s.misalign.enabled);
        REQUIRE(s.torque.kind == TorqueKind::axis_fail);
        REQUIRE(s.gyro.kind == GyroKind::none);
    }

    const auto s8 = suite_for_experiment(8);
    REQUIRE(s8.torque.kind == TorqueKind::axis_noise);
    REQUIRE(s8.torque.noisy_axes == std::array<bool, 3>{true, true, true});
    REQUIRE(s8.misalign.enabled);
    REQUIRE(s8.gyro.kind == GyroKind::none);

    REQUIRE(suite_for_experiment(9).gyro.kind == GyroKind::constant_bias);
    REQUIRE(suite_for_experiment(10).gyro.kind == GyroKind::white_noise);
    REQUIRE(suite_for_experiment(10).gyro.sigma == Catch::Approx(deg2rad(0.1)));
    REQUIRE(suite_for_experiment(11).gyro.kind == GyroKind::drift);

    REQUIRE(suite_for_experiment(12).torque.failed_axes == std::array<bool, 3>{true, true, false});
    REQUIRE(suite_for_experiment(13).torque.failed_axes == std::array<bool, 3>{false, true, true});
    REQUIRE(suite_for_experiment(14).torque.failed_axes == std::array<bool, 3>{true, false, true});

    REQUIRE_THROWS_AS(suite_for_experiment(0), std::invalid_argument);
    REQUIRE_THROWS_AS(suite_for_experiment(15), std::invalid_argument);
    REQUIRE_THROWS_AS(experiment_name(15), std::invalid_argument);
    REQUIRE(experiment_name(13) == "yz_fail + no_misalignment + no_gyro_error");
}

TEST_CASE("fault streams replay identically from the same episode seed") {
    auto run = [](uint64_t seed) {
        PerturbationSuite s = suite_for_experiment(8);
        s.gyro.kind = GyroKind::white_noise;  // exercise both streams
        s.gyro.sigma = deg2rad(0.1);
        s.begin_episode(seed);
        std::vector<double> trace;
        for (int i = 0; i < 200; ++i) {
            const Vec3 m = apply_torque_faults({0.1, -0.1, 0.05}, s.torque, s.torque_rng);
            const Vec3 g = measure_gyro(s.gyro, {0.01, 0.02, 0.03}, 0.1, s.gyro_rng);
            trace.insert(trace.end(), {m.x, m.y, m.z, g.x, g.y, g.z});
        }
        return trace;
    };
    REQUIRE(run(777) == run(777));
    REQUIRE(run(777) != run(778));
}
