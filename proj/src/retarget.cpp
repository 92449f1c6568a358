#include "tag/retarget.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace tag {

namespace {

constexpr double kFrobEps = 1e-9;   // regularizes the unsquared Frobenius term
constexpr double kArmijo = 1e-4;
constexpr int kMaxBacktracks = 60;

// Shared state for one hand solve: targets materialized once, fixed-size
// workspace reused across objective evaluations.
struct HandProblem {
    const HandModel& model;
    const std::array<FingertipPose, 5>& targets;
    std::span<const double> theta_last;
    const std::array<double, 4>& opp_targets;
    const RetargetConfig& cfg;

    std::array<Mat3, 5> target_rot;
    std::array<JointState, HandModel::kJointCount> states;

    HandProblem(const HandModel& m, const std::array<FingertipPose, 5>& t,
                std::span<const double> last, const std::array<double, 4>& opp,
                const RetargetConfig& c)
        : model(m), targets(t), theta_last(last), opp_targets(opp), cfg(c) {
        for (int f = 0; f < 5; ++f) target_rot[f] = t[f].orientation.to_mat3();
    }

    // weights == nullptr: evaluate the ramp at the current distances.
    double eval(std::span<const double> theta,
                const std::array<double, 4>* frozen_weights,
                std::span<double> grad) {
        const bool want_grad = !grad.empty();
        if (want_grad) std::fill(grad.begin(), grad.end(), 0.0);

        const auto tips = forward_kinematics(model, theta, states);

        double cost = 0.0;
        std::array<Mat3, 5> rot;
        for (int f = 0; f < 5; ++f) {
            rot[f] = tips[f].orientation.to_mat3();
            const Vec3 dp = tips[f].position - targets[f].position;
            cost += cfg.w1 * dp.norm_sq();
            const Mat3 dr = rot[f] - target_rot[f];
            cost += cfg.w2 * dr.frobenius_sq();
            if (want_grad) {
                for (int j : model.fingers[f]) {
                    const JointState& st = states[j];
                    const Vec3 dpdt = st.axis_world.cross(tips[f].position - st.origin);
                    double g = 2.0 * cfg.w1 * dp.dot(dpdt);
                    g += 2.0 * cfg.w2 * dr.fdot(skew_mul(st.axis_world, rot[f]));
                    grad[j] += g;
                }
            }
        }

        for (std::size_t k = 0; k < theta.size(); ++k) {
            const double d = theta[k] - theta_last[k];
            cost += cfg.alpha * d * d;
            if (want_grad) grad[k] += 2.0 * cfg.alpha * d;
        }

        const Vec3 p_thumb = tips[0].position;
        for (int j = 0; j < 4; ++j) {
            const Vec3 dvec = p_thumb - tips[j + 1].position;
            const double dist = dvec.norm();
            const double w = frozen_weights ? (*frozen_weights)[j]
                                            : opposition_weight(dist, cfg);
            if (w == 0.0) continue;
            const double resid = dist - opp_targets[j];
            cost += w * resid * resid;
            if (want_grad && dist > 0.0) {
                const Vec3 dir = dvec * (1.0 / dist);
                const double scale = 2.0 * w * resid;
                for (int k : model.fingers[0]) {
                    const JointState& st = states[k];
                    grad[k] += scale * dir.dot(st.axis_world.cross(p_thumb - st.origin));
                }
                for (int k : model.fingers[j + 1]) {
                    const JointState& st = states[k];
                    grad[k] -= scale *
                               dir.dot(st.axis_world.cross(tips[j + 1].position - st.origin));
                }
            }
        }
        return cost;
    }
};

struct ArmProblem {
    const ArmModel& model;
    Pose target;
    std::span<const double> theta_last;
    const RetargetConfig& cfg;
    Mat3 target_rot;
    std::vector<JointState> states;

    ArmProblem(const ArmModel& m, const Pose& t, std::span<const double> last,
               const RetargetConfig& c)
        : model(m), target(t), theta_last(last), cfg(c),
          target_rot(t.q.to_mat3()), states(m.joints.size()) {}

    double eval(std::span<const double> theta, std::span<double> grad) {
        const bool want_grad = !grad.empty();
        const Pose ee = arm_fk(model, theta, states);
        const Mat3 rot = ee.q.to_mat3();
        const Vec3 dp = ee.p - target.p;
        const Mat3 dr = rot - target_rot;
        const double fro = std::sqrt(dr.frobenius_sq() + kFrobEps * kFrobEps);

        double cost = cfg.w1 * dp.norm_sq() + cfg.w2 * fro;
        for (std::size_t k = 0; k < theta.size(); ++k) {
            const double d = theta[k] - theta_last[k];
            cost += cfg.alpha * d * d;
            if (want_grad) grad[k] = 2.0 * cfg.alpha * d;
        }
        if (want_grad) {
            for (std::size_t k = 0; k < theta.size(); ++k) {
                const JointState& st = states[k];
                const Vec3 dpdt = st.axis_world.cross(ee.p - st.origin);
                grad[k] += 2.0 * cfg.w1 * dp.dot(dpdt);
                grad[k] += cfg.w2 * dr.fdot(skew_mul(st.axis_world, rot)) / fro;
            }
        }
        return cost;
    }
};

void validate_config(const RetargetConfig& cfg) {
    if (cfg.w1 < 0 || cfg.w2 < 0 || cfg.alpha < 0 || cfg.w_max < 0) {
        throw std::invalid_argument("retarget weights must be non-negative");
    }
    if (!(cfg.d_min > 0.0) || !(cfg.d_max > cfg.d_min)) {
        throw std::invalid_argument("require 0 < d_min < d_max");
    }
    if (!(cfg.tol > 0.0)) throw std::invalid_argument("tol must be positive");
}

}  // namespace

double opposition_weight(double d, const RetargetConfig& cfg) {
    if (d >= cfg.d_max) return 0.0;
    if (d <= cfg.d_min) return cfg.w_max;
    return cfg.w_max * (cfg.d_max - d) / (cfg.d_max - cfg.d_min);
}

std::array<double, 4> opposition_distances(
    const std::array<FingertipPose, 5>& poses) {
    std::array<double, 4> d;
    for (int j = 0; j < 4; ++j) {
        d[j] = (poses[0].position - poses[j + 1].position).norm();
    }
    return d;
}

double hand_cost(const HandModel& model, std::span<const double> theta,
                 const std::array<FingertipPose, 5>& targets,
                 std::span<const double> theta_last,
                 const std::array<double, 4>& opposition_targets,
                 const RetargetConfig& cfg, std::span<double> grad) {
    HandProblem p(model, targets, theta_last, opposition_targets, cfg);
    return p.eval(theta, nullptr, grad);
}

double hand_cost_frozen(const HandModel& model, std::span<const double> theta,
                        const std::array<FingertipPose, 5>& targets,
                        std::span<const double> theta_last,
                        const std::array<double, 4>& opposition_targets,
                        const std::array<double, 4>& weights,
                        const RetargetConfig& cfg, std::span<double> grad) {
    HandProblem p(model, targets, theta_last, opposition_targets, cfg);
    return p.eval(theta, &weights, grad);
}

RetargetResult minimize_box(const BoxObjective& objective,
                            std::span<const double> lower,
                            std::span<const double> upper,
                            std::span<const double> x0, double tol,
                            int max_iters) {
    const std::size_t n = x0.size();
    std::vector<double> x(n), g(n), xn(n), gn(n), dx(n), trial(n);

    auto project = [&](std::span<const double> from, std::span<double> to) {
        for (std::size_t i = 0; i < n; ++i) {
            to[i] = std::clamp(from[i], lower[i], upper[i]);
        }
    };

    project(x0, x);
    double f = objective(x, g);
    int iters = 0;
    bool converged = false;

    double step = 0.0;
    {
        double gmax = 0.0;
        for (double v : g) gmax = std::max(gmax, std::abs(v));
        step = gmax > 0.0 ? 1.0 / gmax : 1.0;
    }

    for (; iters < max_iters; ++iters) {
        // Stationarity: projected gradient step of unit length.
        double pg_inf = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double moved = std::clamp(x[i] - g[i], lower[i], upper[i]) - x[i];
            pg_inf = std::max(pg_inf, std::abs(moved));
        }
        if (pg_inf <= tol) {
            converged = true;
            break;
        }

        // Backtracking along the projection arc; accept only true descent.
        bool accepted = false;
        double s = step;
        double fn = f;
        for (int bt = 0; bt < kMaxBacktracks; ++bt) {
            for (std::size_t i = 0; i < n; ++i) {
                trial[i] = std::clamp(x[i] - s * g[i], lower[i], upper[i]);
            }
            double dx2 = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                dx[i] = trial[i] - x[i];
                dx2 += dx[i] * dx[i];
            }
            if (dx2 == 0.0) break;  // cannot move at this scale
            fn = objective(trial, {});
            if (fn <= f - kArmijo * dx2 / s) {
                accepted = true;
                break;
            }
            s *= 0.5;
        }
        if (!accepted) {
            // No descent available along the arc: numerically stationary.
            converged = true;
            break;
        }

        for (std::size_t i = 0; i < n; ++i) xn[i] = trial[i];
        const double f_new = objective(xn, gn);

        // Barzilai-Borwein step for the next iteration.
        double num = 0.0, den = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double dgi = gn[i] - g[i];
            num += dx[i] * dx[i];
            den += dx[i] * dgi;
        }
        step = den > 0.0 ? num / den : s * 2.0;

        const double decrease = f - f_new;
        x.swap(xn);
        g.swap(gn);
        f = f_new;
        if (decrease <= tol * std::max(1.0, std::abs(f))) {
            ++iters;
            converged = true;
            break;
        }
    }

    RetargetResult r;
    r.theta = std::move(x);
    r.cost = f;
    r.iterations = iters;
    r.converged = converged;
    return r;
}

RetargetResult solve_hand_retarget(const HandModel& model,
                                   const std::array<FingertipPose, 5>& targets,
                                   std::span<const double> theta_last,
                                   const std::array<double, 4>& opposition_targets,
                                   const RetargetConfig& cfg) {
    validate_config(cfg);
    HandProblem p(model, targets, theta_last, opposition_targets, cfg);
    std::vector<double> lo(model.joints.size()), hi(model.joints.size());
    for (std::size_t j = 0; j < model.joints.size(); ++j) {
        lo[j] = model.joints[j].limit_min;
        hi[j] = model.joints[j].limit_max;
    }
    return minimize_box(
        [&p](std::span<const double> x, std::span<double> grad) {
            return p.eval(x, nullptr, grad);
        },
        lo, hi, theta_last, cfg.tol, cfg.max_iters);
}

WristDelta wrist_delta(const Pose& now, const Pose& init, double lambda) {
    if (!(lambda > 0.0)) throw std::invalid_argument("lambda must be positive");
    return {now.p - init.p, (now.q * init.q.conjugate()).normalized(), lambda};
}

Pose apply_wrist_delta(const WristDelta& delta, const Pose& robot_init) {
    return {robot_init.p + delta.dp * delta.lambda,
            (delta.dq * robot_init.q).normalized()};
}

Pose wrist_target(const Pose& now, const Pose& init, const Pose& robot_init,
                  double lambda) {
    return apply_wrist_delta(wrist_delta(now, init, lambda), robot_init);
}

double arm_cost(const ArmModel& model, std::span<const double> theta,
                const Pose& target, std::span<const double> theta_last,
                const RetargetConfig& cfg, std::span<double> grad) {
    ArmProblem p(model, target, theta_last, cfg);
    return p.eval(theta, grad);
}

RetargetResult solve_arm_ik(const ArmModel& model, const Pose& target,
                            std::span<const double> theta_last,
                            const RetargetConfig& cfg) {
    validate_config(cfg);
    ArmProblem p(model, target, theta_last, cfg);
    std::vector<double> lo(model.joints.size()), hi(model.joints.size());
    for (std::size_t j = 0; j < model.joints.size(); ++j) {
        lo[j] = model.joints[j].limit_min;
        hi[j] = model.joints[j].limit_max;
    }
    return minimize_box(
        [&p](std::span<const double> x, std::span<double> grad) {
            return p.eval(x, grad);
        },
        lo, hi, theta_last, cfg.tol, cfg.max_iters);
}

}  // namespace tag
