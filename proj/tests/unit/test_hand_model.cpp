#include <doctest.h>

#include <array>
#include <stdexcept>
#include <cmath>
#include <random>
#include <vector>

#include "tag/hand_model.hpp"

using namespace tag;

namespace {

// Independent FK oracle: straightforward 4x4 homogeneous-matrix composition
// with Rodrigues rotations, no quaternions.
struct M4 {
    std::array<double, 16> m{1, 0, 0, 0, 0, 1, 0, 0, 0, 0, 1, 0, 0, 0, 0, 1};

    static M4 mul(const M4& a, const M4& b) {
        M4 r;
        for (int i = 0; i < 4; ++i) {
            for (int j = 0; j < 4; ++j) {
                double s = 0.0;
                for (int k = 0; k < 4; ++k) s += a.m[4 * i + k] * b.m[4 * k + j];
                r.m[4 * i + j] = s;
            }
        }
        return r;
    }
};

M4 oracle_rot(const Vec3& axis, double angle) {
    const double c = std::cos(angle), s = std::sin(angle), t = 1.0 - c;
    const double x = axis.x, y = axis.y, z = axis.z;
    M4 r;
    r.m = {t * x * x + c,     t * x * y - s * z, t * x * z + s * y, 0,
           t * x * y + s * z, t * y * y + c,     t * y * z - s * x, 0,
           t * x * z - s * y, t * y * z + s * x, t * z * z + c,     0,
           0,                 0,                 0,                 1};
    return r;
}

M4 oracle_quat(const Quat& q) {
    const double angle = 2.0 * std::atan2(
        std::sqrt(q.x * q.x + q.y * q.y + q.z * q.z), q.w);
    if (angle < 1e-14) return M4{};
    const double s = std::sin(angle / 2.0);
    return oracle_rot({q.x / s, q.y / s, q.z / s}, angle);
}

M4 oracle_transform(const Transform& t) {
    M4 r = oracle_quat(t.q);
    r.m[3] = t.t.x;
    r.m[7] = t.t.y;
    r.m[11] = t.t.z;
    return r;
}

M4 oracle_chain(const HandModel& model, int finger,
                std::span<const double> theta) {
    M4 t;
    for (int j : model.fingers[finger]) {
        t = M4::mul(t, oracle_transform(model.rest[j]));
        t = M4::mul(t, oracle_rot(model.joints[j].axis, theta[j]));
    }
    return M4::mul(t, oracle_transform(model.tips[finger]));
}

std::vector<double> random_theta(const HandModel& m, std::mt19937_64& rng) {
    std::vector<double> theta(m.joints.size());
    for (std::size_t j = 0; j < theta.size(); ++j) {
        const auto& s = m.joints[j];
        const double u = static_cast<double>(rng() >> 11) * 0x1p-53;
        theta[j] = s.limit_min + u * (s.limit_max - s.limit_min);
    }
    return theta;
}

}  // namespace

TEST_SUITE_BEGIN("hand_model");

TEST_CASE("default model validates with 5 chains of the right lengths") {
    const HandModel m = default_hand_model();
    CHECK(m.joints.size() == 21);
    CHECK(m.fingers[0].size() == 5);
    for (int f = 1; f < 5; ++f) CHECK(m.fingers[f].size() == 4);
}

TEST_CASE("validation errors name the offending joint") {
    HandModel m = default_hand_model();
    m.joints.pop_back();
    m.rest.pop_back();
    CHECK_THROWS_WITH_AS(validate_model(m), "expected 21 joints, got 20",
                         std::invalid_argument);

    HandModel m2 = default_hand_model();
    std::swap(m2.joints[7].limit_min, m2.joints[7].limit_max);
    CHECK_THROWS_WITH_AS(validate_model(m2), "joint 7: limit_min >= limit_max",
                         std::invalid_argument);

    HandModel m3 = default_hand_model();
    m3.joints[4].axis = {0.5, 0.5, 0.5};
    CHECK_THROWS_WITH_AS(validate_model(m3), "joint 4: axis is not a unit vector",
                         std::invalid_argument);
}

TEST_CASE("fk at zero equals the cumulative rest transform product") {
    const HandModel m = default_hand_model();
    const std::vector<double> zeros(21, 0.0);
    const auto tips = forward_kinematics(m, zeros);
    for (int f = 0; f < 5; ++f) {
        Transform t = Transform::identity();
        for (int j : m.fingers[f]) t = t * m.rest[j];
        t = t * m.tips[f];
        CHECK(tips[f].position.x == doctest::Approx(t.t.x).epsilon(1e-15));
        CHECK(tips[f].position.y == doctest::Approx(t.t.y).epsilon(1e-15));
        CHECK(tips[f].position.z == doctest::Approx(t.t.z).epsilon(1e-15));
        CHECK(tips[f].finger_id == f);
    }
}

TEST_CASE("planar 2-link chain: 90 degrees at the base swings the tip") {
    const double l1 = 0.11, l2 = 0.07;
    ArmModel arm;
    arm.joints = {{{0, 0, 1}, -3.0, 3.0, -1, "j0"}, {{0, 0, 1}, -3.0, 3.0, 0, "j1"}};
    arm.rest = {Transform::identity(), Transform{Quat{}, {l1, 0, 0}}};
    arm.tip = Transform{Quat{}, {l2, 0, 0}};
    arm = validate_arm(arm);

    const std::vector<double> theta{kPi / 2.0, 0.0};
    const Pose p = arm_fk(arm, theta);
    CHECK(std::abs(p.p.x) <= 1e-15);
    CHECK(p.p.y == doctest::Approx(l1 + l2).epsilon(1e-15));
    // Orientation: 90 degrees about +Z relative to rest.
    const Vec3 ex = p.q.rotate({1, 0, 0});
    CHECK(std::abs(ex.x) <= 1e-15);
    CHECK(ex.y == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("fk matches the 4x4 matrix oracle on random poses") {
    const HandModel m = default_hand_model();
    std::mt19937_64 rng(77);
    for (int trial = 0; trial < 200; ++trial) {
        const auto theta = random_theta(m, rng);
        const auto tips = forward_kinematics(m, theta);
        for (int f = 0; f < 5; ++f) {
            const M4 o = oracle_chain(m, f, theta);
            CHECK(std::abs(tips[f].position.x - o.m[3]) <= 1e-10);
            CHECK(std::abs(tips[f].position.y - o.m[7]) <= 1e-10);
            CHECK(std::abs(tips[f].position.z - o.m[11]) <= 1e-10);
            const Mat3 r = tips[f].orientation.to_mat3();
            for (int i = 0; i < 3; ++i) {
                for (int j = 0; j < 3; ++j) {
                    CHECK(std::abs(r(i, j) - o.m[4 * i + j]) <= 1e-10);
                }
            }
        }
    }
}

TEST_CASE("fk orientation quaternions stay unit") {
    const HandModel m = default_hand_model();
    std::mt19937_64 rng(78);
    for (int trial = 0; trial < 100; ++trial) {
        const auto tips = forward_kinematics(m, random_theta(m, rng));
        for (const auto& tip : tips) {
            CHECK(std::abs(tip.orientation.norm() - 1.0) <= 1e-9);
        }
    }
}

TEST_CASE("single-joint perturbation moves the tip at most radius * delta") {
    const HandModel m = default_hand_model();
    std::mt19937_64 rng(79);
    std::array<JointState, 21> states;
    for (int trial = 0; trial < 50; ++trial) {
        auto theta = random_theta(m, rng);
        const auto tips = forward_kinematics(m, theta, states);
        for (int f = 0; f < 5; ++f) {
            for (int j : m.fingers[f]) {
                const double delta = 0.05;
                auto theta2 = theta;
                theta2[j] += delta;
                const auto tips2 = forward_kinematics(m, theta2);
                const double moved = (tips2[f].position - tips[f].position).norm();
                const double radius = (tips[f].position - states[j].origin).norm();
                CHECK(moved <= radius * delta + 1e-12);
            }
        }
    }
}

TEST_CASE("distances along a rigid link are invariant under theta") {
    const HandModel m = default_hand_model();
    std::mt19937_64 rng(80);
    std::array<JointState, 21> states;
    // Distal joint origin to fingertip spans one rigid link per finger.
    std::array<double, 5> ref{};
    {
        const std::vector<double> zeros(21, 0.0);
        const auto tips = forward_kinematics(m, zeros, states);
        for (int f = 0; f < 5; ++f) {
            const int last = m.fingers[f].back();
            ref[f] = (tips[f].position - states[last].origin).norm();
        }
    }
    for (int trial = 0; trial < 100; ++trial) {
        const auto tips = forward_kinematics(m, random_theta(m, rng), states);
        for (int f = 0; f < 5; ++f) {
            const int last = m.fingers[f].back();
            const double d = (tips[f].position - states[last].origin).norm();
            CHECK(d == doctest::Approx(ref[f]).epsilon(1e-12));
        }
    }
}

TEST_CASE("scale_targets scales positions only") {
    const HandModel m = default_hand_model();
    std::mt19937_64 rng(81);
    const auto tips = forward_kinematics(m, random_theta(m, rng));

    const auto same = scale_targets(tips, {1, 1, 1, 1, 1});
    for (int f = 0; f < 5; ++f) {
        CHECK(same[f].position.x == tips[f].position.x);
        CHECK(same[f].position.y == tips[f].position.y);
        CHECK(same[f].position.z == tips[f].position.z);
    }

    auto one = tips;
    one[2].position = {0.01, 0.02, 0.03};
    const auto doubled = scale_targets(one, {2, 2, 2, 2, 2});
    CHECK(doubled[2].position.x == doctest::Approx(0.02).epsilon(1e-15));
    CHECK(doubled[2].position.y == doctest::Approx(0.04).epsilon(1e-15));
    CHECK(doubled[2].position.z == doctest::Approx(0.06).epsilon(1e-15));

    // Orientations are bit-identical for arbitrary scales.
    const auto scaled = scale_targets(tips, {0.5, 1.3, 2.0, 0.9, 1.1});
    for (int f = 0; f < 5; ++f) {
        CHECK(scaled[f].orientation.w == tips[f].orientation.w);
        CHECK(scaled[f].orientation.x == tips[f].orientation.x);
        CHECK(scaled[f].orientation.y == tips[f].orientation.y);
        CHECK(scaled[f].orientation.z == tips[f].orientation.z);
    }

    CHECK_THROWS_AS(scale_targets(tips, {1, 1, 0.0, 1, 1}), std::invalid_argument);
    CHECK_THROWS_AS(scale_targets(tips, {1, 1, -2.0, 1, 1}), std::invalid_argument);
}

TEST_CASE("check_limits flags out-of-range joints") {
    const HandModel m = default_hand_model();
    std::vector<double> theta(21, 0.0);
    CHECK(check_limits(m, theta).empty());
    theta[7] = m.joints[7].limit_max + 0.1;
    const auto flagged = check_limits(m, theta);
    REQUIRE(flagged.size() == 1);
    CHECK(flagged[0] == 7);
}

TEST_SUITE_END();
