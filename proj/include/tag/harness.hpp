#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "tag/config.hpp"

// Replay engine and evaluation statistics. Replay wires the stage chain
// decode -> fk -> retarget -> map -> encode over JSONL logs, deterministically:
// identical inputs produce bit-identical outputs. Schema violations abort
// with the offending line number; per-record stage errors skip the record
// and are counted.

namespace tag {

struct ErrorStats {
    double mean = 0.0;         // degrees
    double sigma = 0.0;        // population standard deviation, degrees
    double gauss_mu = 0.0;     // maximum-likelihood Gaussian fit
    double gauss_sigma = 0.0;
    double max_abs = 0.0;
    std::size_t n = 0;
};

// Throws std::invalid_argument on empty input.
ErrorStats error_stats(std::span<const double> errors_deg);

// |mean of first window - mean of last window| in degrees, after aligning
// the last window by the peak of the zero-normalized cross-correlation
// against the first. Input stream is unwrapped radians at a fixed rate.
// Throws std::invalid_argument when the stream is shorter than two windows.
double drift_report(std::span<const double> unwrapped_rad,
                    double window_seconds, double sample_rate_hz);

struct StageStats {
    std::string name;
    std::size_t in = 0;
    std::size_t out = 0;
    std::size_t skipped = 0;
    double wall_ms = 0.0;
};

struct ReplayStats {
    std::vector<StageStats> stages;
    std::size_t limit_warnings = 0;  // joint-limit grazes seen by fk
};

struct ReplaySession {
    // Stream name -> log path. Stages consume: decode reads "mag" and
    // "calibration"; fk reads decode output or a "joints" log; map reads
    // "tactile"; the arm path (when a "wrist" source is present) reads poses.
    std::map<std::string, std::string> sources;
    Config config;
    // Stage -> sink path. Recognized keys: decode (per-sample angles),
    // joints (grouped vectors), fk, retarget, map (patterns), encode (TAGF),
    // arm (arm IK results).
    std::map<std::string, std::string> outputs;
    std::uint64_t seed = 0;
    ReplayStats stats;
};

// Runs the configured stage chain; returns the session with outputs written
// and stats filled.
ReplaySession replay(ReplaySession session);

struct BenchReport {
    std::string workload;
    std::size_t count = 0;
    double per_second = 0.0;
    double median_us = 0.0;
    double p99_us = 0.0;
    std::uint64_t payload_hash = 0;  // digest of result payloads (not timings)
};

// Workloads: "hand_retarget", "arm_ik", "full_chain". Unknown names raise
// std::invalid_argument listing the available ones.
BenchReport bench(const Config& config, const std::string& workload,
                  std::uint64_t seed = 0);

std::vector<std::string> bench_workloads();

// FNV-1a over raw double bits; the digest used for payload determinism.
std::uint64_t hash_doubles(std::span<const double> values);

}  // namespace tag
