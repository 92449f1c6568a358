#pragma once

#include <array>
#include <functional>
#include <span>
#include <vector>

#include "tag/hand_model.hpp"

// Hand retargeting solves, per frame and warm-started at the previous
// solution,
//
//   min_theta  w1*sum_i ||p_i(theta) - p_gt,i||^2
//            + w2*sum_i ||R_i(theta) - R_gt,i||_F^2
//            + alpha*||theta - theta_last||^2
//            + sum_j weight_j * (d_thumb,j(theta) - d_thumb,j^gt)^2
//   s.t.      limit_min_k <= theta_k <= limit_max_k,
//
// where weight_j is a piecewise ramp of the current thumb-to-finger distance
// (w_max at and below d_min, 0 at and above d_max, linear in between) that is
// treated as a constant when differentiating.
//
// Arm IK minimizes w1*||p - p_rt||^2 + w2*||R - R_rt||_F (unsquared, with an
// epsilon-regularized square root) + alpha*||theta - theta_last||^2 under the
// same box limits.

namespace tag {

struct RetargetConfig {
    double w1 = 1.0;       // fingertip position weight
    double w2 = 0.05;      // fingertip orientation weight
    double alpha = 0.01;   // regularization toward the previous solution
    double d_min = 0.005;  // opposition ramp lower threshold, meters
    double d_max = 0.030;  // opposition ramp upper threshold, meters
    double w_max = 10.0;   // opposition weight cap
    double tol = 1e-8;
    int max_iters = 100;
};

struct RetargetResult {
    std::vector<double> theta;
    double cost = 0.0;
    int iterations = 0;
    bool converged = false;
};

struct WristDelta {
    Vec3 dp;
    Quat dq;
    double lambda = 1.0;
};

// 0 for d >= d_max, w_max for d <= d_min, linear ramp in between.
double opposition_weight(double d, const RetargetConfig& cfg);

// Thumb-to-fingertip distances, index..pinky order.
std::array<double, 4> opposition_distances(
    const std::array<FingertipPose, 5>& poses);

// Full objective value and (frozen-weight) analytic gradient. An empty grad
// span skips gradient work.
double hand_cost(const HandModel& model, std::span<const double> theta,
                 const std::array<FingertipPose, 5>& targets,
                 std::span<const double> theta_last,
                 const std::array<double, 4>& opposition_targets,
                 const RetargetConfig& cfg, std::span<double> grad = {});

// Same objective with the opposition weights pinned by the caller; this is
// the function the finite-difference gradient oracle differentiates.
double hand_cost_frozen(const HandModel& model, std::span<const double> theta,
                        const std::array<FingertipPose, 5>& targets,
                        std::span<const double> theta_last,
                        const std::array<double, 4>& opposition_targets,
                        const std::array<double, 4>& weights,
                        const RetargetConfig& cfg, std::span<double> grad = {});

RetargetResult solve_hand_retarget(const HandModel& model,
                                   const std::array<FingertipPose, 5>& targets,
                                   std::span<const double> theta_last,
                                   const std::array<double, 4>& opposition_targets,
                                   const RetargetConfig& cfg);

// Incremental wrist motion with scaled translation. The rotational delta
// composes in the world frame: dq = q_now * q_init^-1, target orientation
// dq * q_robot_init.
WristDelta wrist_delta(const Pose& now, const Pose& init, double lambda);
Pose apply_wrist_delta(const WristDelta& delta, const Pose& robot_init);
Pose wrist_target(const Pose& now, const Pose& init, const Pose& robot_init,
                  double lambda);

double arm_cost(const ArmModel& model, std::span<const double> theta,
                const Pose& target, std::span<const double> theta_last,
                const RetargetConfig& cfg, std::span<double> grad = {});

RetargetResult solve_arm_ik(const ArmModel& model, const Pose& target,
                            std::span<const double> theta_last,
                            const RetargetConfig& cfg);

// Monotone projected-gradient minimizer with Barzilai-Borwein steps and
// Armijo backtracking; the engine behind both solvers, exposed for tests.
// The objective fills grad when the span is non-empty and returns f.
using BoxObjective =
    std::function<double(std::span<const double>, std::span<double>)>;

RetargetResult minimize_box(const BoxObjective& objective,
                            std::span<const double> lower,
                            std::span<const double> upper,
                            std::span<const double> x0, double tol,
                            int max_iters);

}  // namespace tag
