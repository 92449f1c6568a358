#include "tag/hand_model.hpp"

#include <cmath>
#include <stdexcept>

namespace tag {

namespace {

constexpr double kUnitTol = 1e-9;

void walk_chain(std::span<const int> chain, const std::vector<Transform>& rest,
                const std::vector<JointSpec>& joints,
                std::span<const double> theta, Transform& out,
                std::span<JointState> states) {
    Transform t = Transform::identity();
    for (int j : chain) {
        t = t * rest[j];
        t.q = t.q * Quat::from_axis_angle(joints[j].axis, theta[j]);
        if (!states.empty()) {
            states[j] = {t.t, t.q.rotate(joints[j].axis)};
        }
    }
    out = t;
}

[[noreturn]] void fail_joint(int j, const std::string& what) {
    throw std::invalid_argument("joint " + std::to_string(j) + ": " + what);
}

void validate_joints(std::vector<JointSpec>& joints,
                     std::vector<Transform>& rest) {
    for (std::size_t j = 0; j < joints.size(); ++j) {
        JointSpec& spec = joints[j];
        const double an = spec.axis.norm();
        if (std::abs(an - 1.0) > kUnitTol) {
            fail_joint(static_cast<int>(j), "axis is not a unit vector");
        }
        spec.axis = spec.axis.normalized();
        if (!(spec.limit_min < spec.limit_max)) {
            fail_joint(static_cast<int>(j), "limit_min >= limit_max");
        }
        if (spec.limit_min < -kPi || spec.limit_max > kPi) {
            fail_joint(static_cast<int>(j), "limits outside [-pi, pi]");
        }
        if (std::abs(rest[j].q.norm() - 1.0) > kUnitTol) {
            fail_joint(static_cast<int>(j), "rest rotation is not unit");
        }
        rest[j].q = rest[j].q.normalized();
    }
}

}  // namespace

HandModel validate_model(HandModel model) {
    if (model.joints.size() != HandModel::kJointCount) {
        throw std::invalid_argument(
            "expected 21 joints, got " + std::to_string(model.joints.size()));
    }
    if (model.rest.size() != model.joints.size()) {
        throw std::invalid_argument("rest transform count mismatch");
    }

    const std::array<std::size_t, 5> expect_len{5, 4, 4, 4, 4};
    std::array<bool, HandModel::kJointCount> seen{};
    for (int f = 0; f < 5; ++f) {
        const auto& chain = model.fingers[f];
        if (chain.size() != expect_len[f]) {
            throw std::invalid_argument(
                "finger " + std::to_string(f) + ": expected " +
                std::to_string(expect_len[f]) + " joints, got " +
                std::to_string(chain.size()));
        }
        int parent = -1;
        for (int j : chain) {
            if (j < 0 || j >= HandModel::kJointCount || seen[j]) {
                throw std::invalid_argument("finger " + std::to_string(f) +
                                            ": bad joint index");
            }
            seen[j] = true;
            if (model.joints[j].parent != parent) {
                fail_joint(j, "parent does not match chain order");
            }
            parent = j;
        }
    }
    for (int j = 0; j < HandModel::kJointCount; ++j) {
        if (!seen[j]) fail_joint(j, "not assigned to any finger");
    }

    validate_joints(model.joints, model.rest);

    for (int f = 0; f < 5; ++f) {
        if (!(model.lambda_f[f] > 0.0)) {
            throw std::invalid_argument("finger " + std::to_string(f) +
                                        ": lambda_f must be positive");
        }
        if (std::abs(model.tips[f].q.norm() - 1.0) > kUnitTol) {
            throw std::invalid_argument("finger " + std::to_string(f) +
                                        ": tip rotation is not unit");
        }
        model.tips[f].q = model.tips[f].q.normalized();
    }
    return model;
}

std::array<FingertipPose, 5> forward_kinematics(const HandModel& model,
                                                std::span<const double> theta,
                                                std::span<JointState> states) {
    if (theta.size() != model.joints.size()) {
        throw std::invalid_argument("theta size mismatch");
    }
    std::array<FingertipPose, 5> out;
    for (int f = 0; f < 5; ++f) {
        Transform t;
        walk_chain(model.fingers[f], model.rest, model.joints, theta, t, states);
        t = t * model.tips[f];
        out[f] = {t.t, t.q, f};
    }
    return out;
}

std::array<FingertipPose, 5> forward_kinematics(const HandModel& model,
                                                std::span<const double> theta) {
    return forward_kinematics(model, theta, {});
}

std::vector<int> check_limits(const HandModel& model,
                              std::span<const double> theta) {
    std::vector<int> violated;
    for (std::size_t j = 0; j < model.joints.size() && j < theta.size(); ++j) {
        if (theta[j] < model.joints[j].limit_min ||
            theta[j] > model.joints[j].limit_max) {
            violated.push_back(static_cast<int>(j));
        }
    }
    return violated;
}

std::array<FingertipPose, 5> scale_targets(
    const std::array<FingertipPose, 5>& poses,
    const std::array<double, 5>& lambda_f) {
    std::array<FingertipPose, 5> out = poses;
    for (int f = 0; f < 5; ++f) {
        if (!(lambda_f[f] > 0.0)) {
            throw std::invalid_argument("finger " + std::to_string(f) +
                                        ": scale must be positive");
        }
        out[f].position = poses[f].position * lambda_f[f];
    }
    return out;
}

ArmModel validate_arm(ArmModel model) {
    if (model.joints.empty()) throw std::invalid_argument("arm has no joints");
    if (model.rest.size() != model.joints.size()) {
        throw std::invalid_argument("rest transform count mismatch");
    }
    int parent = -1;
    for (std::size_t j = 0; j < model.joints.size(); ++j) {
        if (model.joints[j].parent != parent) {
            fail_joint(static_cast<int>(j), "parent does not match chain order");
        }
        parent = static_cast<int>(j);
    }
    validate_joints(model.joints, model.rest);
    if (std::abs(model.tip.q.norm() - 1.0) > kUnitTol) {
        throw std::invalid_argument("tip rotation is not unit");
    }
    model.tip.q = model.tip.q.normalized();
    return model;
}

Pose arm_fk(const ArmModel& model, std::span<const double> theta,
            std::span<JointState> states) {
    if (theta.size() != model.joints.size()) {
        throw std::invalid_argument("theta size mismatch");
    }
    std::vector<int> chain(model.joints.size());
    for (std::size_t j = 0; j < chain.size(); ++j) chain[j] = static_cast<int>(j);
    Transform t;
    walk_chain(chain, model.rest, model.joints, theta, t, states);
    t = t * model.tip;
    return {t.t, t.q};
}

namespace {

Transform offset(double x, double y, double z) {
    return {Quat{}, Vec3{x, y, z}};
}

Quat rot_z(double a) { return Quat::from_axis_angle({0, 0, 1}, a); }
Quat rot_y(double a) { return Quat::from_axis_angle({0, 1, 0}, a); }

}  // namespace

// Wrist frame: +Y distal (toward the fingers), +X radial (toward the thumb),
// +Z palmar. Flexion about +X, abduction about +Z.
HandModel default_hand_model() {
    HandModel m;
    m.joints.resize(21);
    m.rest.resize(21);

    const Vec3 flex{1, 0, 0};
    const Vec3 abd{0, 0, 1};
    const Vec3 axial{0, 1, 0};

    // Thumb: TM abduction, TM flexion, TM axial, MCP, IP (indices 0..4).
    const Quat thumb_base = (rot_z(-1.0) * rot_y(0.5)).normalized();
    m.fingers[0] = {0, 1, 2, 3, 4};
    m.joints[0] = {abd, -0.60, 1.00, -1, "thumb_tm_abd"};
    m.joints[1] = {flex, -0.40, 1.20, 0, "thumb_tm_flex"};
    m.joints[2] = {axial, -0.70, 0.70, 1, "thumb_tm_axial"};
    m.joints[3] = {flex, -0.30, 1.20, 2, "thumb_mcp"};
    m.joints[4] = {flex, -0.30, 1.40, 3, "thumb_ip"};
    m.rest[0] = {thumb_base, {0.035, 0.030, 0.010}};
    m.rest[1] = Transform::identity();
    m.rest[2] = Transform::identity();
    m.rest[3] = offset(0, 0.045, 0);
    m.rest[4] = offset(0, 0.030, 0);
    m.tips[0] = offset(0, 0.028, 0);

    // Index, middle, ring, pinky: MCP abduction, MCP flexion, PIP, DIP.
    struct FingerGeom {
        const char* name;
        Vec3 base;
        double scale;
    };
    const FingerGeom geom[4] = {
        {"index", {0.030, 0.085, 0.0}, 1.00},
        {"middle", {0.010, 0.090, 0.0}, 1.08},
        {"ring", {-0.010, 0.088, 0.0}, 1.00},
        {"pinky", {-0.030, 0.082, 0.0}, 0.82},
    };
    for (int f = 0; f < 4; ++f) {
        const int base_idx = 5 + 4 * f;
        const double s = geom[f].scale;
        m.fingers[f + 1] = {base_idx, base_idx + 1, base_idx + 2, base_idx + 3};
        const std::string fn = geom[f].name;
        m.joints[base_idx] = {abd, -0.35, 0.35, -1, fn + "_mcp_abd"};
        m.joints[base_idx + 1] = {flex, -0.26, 1.60, base_idx, fn + "_mcp_flex"};
        m.joints[base_idx + 2] = {flex, -0.05, 1.92, base_idx + 1, fn + "_pip"};
        m.joints[base_idx + 3] = {flex, -0.05, 1.40, base_idx + 2, fn + "_dip"};
        m.rest[base_idx] = offset(geom[f].base.x, geom[f].base.y, geom[f].base.z);
        m.rest[base_idx + 1] = Transform::identity();
        m.rest[base_idx + 2] = offset(0, 0.045 * s, 0);
        m.rest[base_idx + 3] = offset(0, 0.025 * s, 0);
        m.tips[f + 1] = offset(0, 0.020 * s, 0);
    }

    return validate_model(std::move(m));
}

// Roughly elbow-manipulator proportions; axes alternate like a 6R arm.
ArmModel default_arm_model() {
    ArmModel a;
    a.joints.resize(6);
    a.rest.resize(6);
    const Vec3 z{0, 0, 1};
    const Vec3 y{0, 1, 0};
    const double lim = 2.9;
    const char* names[6] = {"base", "shoulder", "elbow", "wrist1", "wrist2", "wrist3"};
    const Vec3 axes[6] = {z, y, y, y, z, y};
    const Transform rests[6] = {
        offset(0, 0, 0.089),  offset(0, 0, 0.000),  offset(0.425, 0, 0),
        offset(0.392, 0, 0),  offset(0, 0, 0.109),  offset(0, 0.095, 0),
    };
    for (int j = 0; j < 6; ++j) {
        a.joints[j] = {axes[j], -lim, lim, j - 1, names[j]};
        a.rest[j] = rests[j];
    }
    a.tip = offset(0, 0.082, 0);
    return validate_arm(std::move(a));
}

}  // namespace tag
