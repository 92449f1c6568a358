#include "tag/mag_encoder.hpp"

#include <cmath>
#include <stdexcept>

#include "tag/geometry.hpp"

namespace tag {

CalibrationState calibrate(std::span<const MagSample> sweep,
                           const MagParams& params) {
    if (sweep.empty()) throw std::invalid_argument("empty calibration sweep");

    CalibrationState c;
    c.bx_min = c.bx_max = sweep[0].bx;
    c.by_min = c.by_max = sweep[0].by;
    for (const MagSample& s : sweep) {
        c.bx_min = std::min(c.bx_min, s.bx);
        c.bx_max = std::max(c.bx_max, s.bx);
        c.by_min = std::min(c.by_min, s.by);
        c.by_max = std::max(c.by_max, s.by);
    }
    c.ox = 0.5 * (c.bx_max + c.bx_min);
    c.oy = 0.5 * (c.by_max + c.by_min);
    const double half_x = 0.5 * (c.bx_max - c.bx_min);
    const double half_y = 0.5 * (c.by_max - c.by_min);
    c.b0 = 0.5 * (half_x + half_y);

    const double min_range = params.coverage_epsilon_rel * c.b0;
    if (c.b0 <= 0.0 || (c.bx_max - c.bx_min) <= min_range ||
        (c.by_max - c.by_min) <= min_range) {
        throw std::runtime_error("insufficient angular coverage");
    }
    return c;
}

JointAngle decode_angle(const MagSample& sample, const CalibrationState& calib,
                        int joint_id, const MagParams& params) {
    const double dx = sample.bx - calib.ox;
    const double dy = sample.by - calib.oy;
    if (!std::isfinite(dx) || !std::isfinite(dy)) {
        throw std::invalid_argument("non-finite field sample");
    }
    const double eps = params.magnitude_epsilon_rel * calib.b0;
    if (std::abs(dx) < eps && std::abs(dy) < eps) {
        throw std::runtime_error("field magnitude too small");
    }
    double theta = std::atan2(dy, dx);
    if (theta <= -kPi) theta = kPi;  // map the -pi edge onto (-pi, pi]
    return {theta, joint_id};
}

std::vector<double> decode_angles(std::span<const MagSample> samples,
                                  const CalibrationState& calib,
                                  const MagParams& params,
                                  std::vector<std::size_t>* faults,
                                  kernels::Backend backend) {
    const std::size_t n = samples.size();
    std::vector<double> bx(n), by(n), theta(n), r2(n);
    for (std::size_t i = 0; i < n; ++i) {
        bx[i] = samples[i].bx;
        by[i] = samples[i].by;
    }
    kernels::decode_angles(bx.data(), by.data(), n, calib.ox, calib.oy,
                           theta.data(), r2.data(), backend);

    // Fault rule matches decode_angle: non-finite components, or both below
    // epsilon. r2 alone cannot distinguish the latter, so check components.
    const double eps = params.magnitude_epsilon_rel * calib.b0;
    for (std::size_t i = 0; i < n; ++i) {
        const double dx = bx[i] - calib.ox;
        const double dy = by[i] - calib.oy;
        const bool bad = !std::isfinite(dx) || !std::isfinite(dy) ||
                         (std::abs(dx) < eps && std::abs(dy) < eps);
        if (bad) {
            theta[i] = 0.0;
            if (faults) faults->push_back(i);
        } else if (theta[i] <= -kPi) {
            theta[i] = kPi;
        }
    }
    return theta;
}

FieldSimulator::FieldSimulator(double b0, double ox, double oy,
                               double noise_sigma, int quantization_bits,
                               std::uint64_t seed)
    : b0_(b0), ox_(ox), oy_(oy), sigma_(noise_sigma),
      bits_(quantization_bits), rng_(seed) {
    if (b0 <= 0.0) throw std::invalid_argument("b0 must be positive");
    if (quantization_bits < 0 || quantization_bits > 24) {
        throw std::invalid_argument("quantization_bits must be in [0, 24]");
    }
    if (noise_sigma < 0.0) throw std::invalid_argument("noise_sigma must be >= 0");
}

double FieldSimulator::gaussian() {
    // Box-Muller on raw engine output; avoids the implementation-defined
    // std::normal_distribution so streams are identical everywhere.
    const double u1 = (static_cast<double>(rng_() >> 11) + 1.0) * 0x1p-53;  // (0, 1]
    const double u2 = static_cast<double>(rng_() >> 11) * 0x1p-53;          // [0, 1)
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(kTwoPi * u2);
}

MagSample FieldSimulator::sample(double theta, double timestamp) {
    double bx = b0_ * std::cos(theta) + ox_;
    double by = b0_ * std::sin(theta) + oy_;
    if (sigma_ > 0.0) {
        bx += sigma_ * gaussian();
        by += sigma_ * gaussian();
    }
    if (bits_ > 0) {
        // Mid-tread quantizer over the full-scale range of +/- 2*b0; codes
        // saturate at the rails like a real ADC.
        const double step = 4.0 * b0_ / static_cast<double>(1 << bits_);
        const double lo = -(1 << (bits_ - 1));
        const double hi = (1 << (bits_ - 1)) - 1;
        bx = std::clamp(std::round(bx / step), lo, hi) * step;
        by = std::clamp(std::round(by / step), lo, hi) * step;
    }
    return {bx, by, timestamp};
}

MagSample simulate_field(double theta, double b0, double ox, double oy,
                         double noise_sigma, int quantization_bits,
                         std::uint64_t seed) {
    FieldSimulator sim(b0, ox, oy, noise_sigma, quantization_bits, seed);
    return sim.sample(theta);
}

std::vector<double> unwrap_stream(std::span<const double> wrapped) {
    std::vector<double> out;
    out.reserve(wrapped.size());
    if (wrapped.empty()) return out;
    out.push_back(wrapped[0]);
    // Track the revolution count as an integer so each output stays an exact
    // 2*pi multiple away from its input instead of accumulating step error.
    double revs = 0.0;
    for (std::size_t i = 1; i < wrapped.size(); ++i) {
        revs += std::round((out.back() - (wrapped[i] + kTwoPi * revs)) / kTwoPi);
        out.push_back(wrapped[i] + kTwoPi * revs);
    }
    return out;
}

}  // namespace tag
