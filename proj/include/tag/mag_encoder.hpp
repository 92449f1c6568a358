#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "tag/kernels.hpp"

// Magnetic joint-angle decoding. A diametrically magnetized ring magnet over
// a two-axis sensor produces
//     bx = b0*cos(theta) + ox,   by = b0*sin(theta) + oy,
// so after offset calibration the joint angle is recovered with a
// four-quadrant arctangent. Because the angle depends only on the ratio of
// the offset-corrected components, common-mode gain errors cancel.

namespace tag {

struct MagSample {
    double bx = 0.0;
    double by = 0.0;
    double timestamp = 0.0;
};

struct CalibrationState {
    double ox = 0.0;
    double oy = 0.0;
    double b0 = 0.0;
    double bx_min = 0.0, bx_max = 0.0;
    double by_min = 0.0, by_max = 0.0;
};

struct JointAngle {
    double theta = 0.0;  // radians in (-pi, pi]
    int joint_id = 0;
};

struct MagParams {
    // Fault trip point for the offset-corrected components, relative to b0.
    double magnitude_epsilon_rel = 0.1;
    // Minimum per-axis sweep range for calibration, relative to the
    // estimated b0. Guards against calibrating on a nearly static joint.
    double coverage_epsilon_rel = 0.5;
};

// Offsets from the midpoint of the per-axis extrema observed over a sweep
// covering the joint's full range; b0 is the mean of the two half-ranges.
// Throws std::invalid_argument on an empty sweep and std::runtime_error on
// insufficient angular coverage.
CalibrationState calibrate(std::span<const MagSample> sweep,
                           const MagParams& params = {});

// Throws std::runtime_error "field magnitude too small" when both
// offset-corrected components are below magnitude_epsilon_rel * b0
// (magnet missing or sensor fault).
JointAngle decode_angle(const MagSample& sample, const CalibrationState& calib,
                        int joint_id = 0, const MagParams& params = {});

// Batch decode through the dispatched kernels. Faulted samples get
// theta = 0 and their indices appended to *faults (if non-null).
std::vector<double> decode_angles(std::span<const MagSample> samples,
                                  const CalibrationState& calib,
                                  const MagParams& params = {},
                                  std::vector<std::size_t>* faults = nullptr,
                                  kernels::Backend backend = kernels::active_backend());

// Deterministic synthetic field generator; the forward model used as the
// testing oracle. Gaussian noise comes from a seeded Box-Muller transform
// over std::mt19937_64 so streams are reproducible across platforms.
// quantization_bits in [1, 24] snaps both axes to a uniform grid over the
// full-scale range of +/- 2*b0 (values outside saturate); 0 disables it.
class FieldSimulator {
public:
    FieldSimulator(double b0, double ox, double oy, double noise_sigma,
                   int quantization_bits, std::uint64_t seed);

    MagSample sample(double theta, double timestamp = 0.0);

private:
    double gaussian();

    double b0_, ox_, oy_, sigma_;
    int bits_;
    std::mt19937_64 rng_;
};

// One-shot convenience wrapper: first draw of a fresh simulator.
MagSample simulate_field(double theta, double b0, double ox, double oy,
                         double noise_sigma, int quantization_bits,
                         std::uint64_t seed);

// Removes +/- pi discontinuities; output differs from input by integer
// multiples of 2*pi and consecutive differences stay below pi in magnitude.
std::vector<double> unwrap_stream(std::span<const double> wrapped);

}  // namespace tag
