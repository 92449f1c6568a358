#pragma once

#include <array>
#include <span>
#include <string>
#include <vector>

#include "tag/geometry.hpp"

// 21-DoF glove kinematics: five serial chains rooted at the wrist. The thumb
// carries five joints (three at the trapeziometacarpal complex, then MCP and
// IP); each other finger carries four (MCP abduction, MCP flexion, PIP, DIP,
// in that order). Fingertip poses are expressed in the wrist frame.

namespace tag {

struct JointSpec {
    Vec3 axis;               // unit rotation axis in the joint's local frame
    double limit_min = 0.0;  // radians
    double limit_max = 0.0;
    int parent = -1;         // joint index, -1 = wrist root
    std::string name;
};

struct HandModel {
    std::vector<JointSpec> joints;              // exactly 21
    std::array<std::vector<int>, 5> fingers;    // thumb, index, middle, ring, pinky
    std::vector<Transform> rest;                // parent frame -> joint frame, per joint
    std::array<Transform, 5> tips;              // last joint frame -> fingertip frame
    std::array<double, 5> lambda_f{1, 1, 1, 1, 1};

    static constexpr int kJointCount = 21;
};

struct FingertipPose {
    Vec3 position;      // meters, wrist frame
    Quat orientation;   // unit, wrist frame
    int finger_id = 0;  // 0 = thumb .. 4 = pinky
};

// World-frame rotation axis and origin of each joint at a given pose;
// feeds the analytic Jacobians used by the retargeting costs.
struct JointState {
    Vec3 origin;
    Vec3 axis_world;
};

// Validates and returns the model; throws std::invalid_argument with a
// message naming the offending joint on bad axes, inverted limits, wrong
// joint counts, or malformed chains.
HandModel validate_model(HandModel model);

// The bundled default model: anthropometric average link lengths
// (index proximal/middle/distal 45/25/20 mm, scaled per finger).
HandModel default_hand_model();

// Fingertip poses for a 21-vector of joint angles. Pure; does not enforce
// limits (raw glove data may graze them) -- use check_limits for warnings.
std::array<FingertipPose, 5> forward_kinematics(const HandModel& model,
                                                std::span<const double> theta);

// As above, also filling per-joint world axes/origins (indexed 0..20).
std::array<FingertipPose, 5> forward_kinematics(const HandModel& model,
                                                std::span<const double> theta,
                                                std::span<JointState> states);

// Indices of joints whose angle lies outside [limit_min, limit_max].
std::vector<int> check_limits(const HandModel& model,
                              std::span<const double> theta);

// Positions scaled per finger, orientations bit-identical.
// Throws std::invalid_argument on a non-positive scale.
std::array<FingertipPose, 5> scale_targets(
    const std::array<FingertipPose, 5>& poses,
    const std::array<double, 5>& lambda_f);

// A serial-chain arm (any DoF) sharing the joint conventions above.
struct ArmModel {
    std::vector<JointSpec> joints;
    std::vector<Transform> rest;
    Transform tip;
};

ArmModel validate_arm(ArmModel model);

// The bundled 6-DoF arm used by the benchmarks.
ArmModel default_arm_model();

struct Pose {
    Vec3 p;
    Quat q;
};

Pose arm_fk(const ArmModel& model, std::span<const double> theta,
            std::span<JointState> states = {});

}  // namespace tag
