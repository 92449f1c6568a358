#include "tag/harness.hpp"

#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <stdexcept>

#include "tag/actuator_encode.hpp"
#include "tag/jsonl.hpp"
#include "tag/mag_encoder.hpp"
#include "tag/retarget.hpp"

namespace tag {

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t0) {
    return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

constexpr double kRadToDeg = 180.0 / kPi;

// ---- replay stage cores (file-free, reused by bench) ----------------------

struct DecodeOut {
    std::vector<AngleRecord> angles;
    std::size_t skipped = 0;
};

// Per-joint batch decode through the dispatched kernels, results restored to
// input record order. Samples violating per-stream timestamp monotonicity
// are skipped like any other bad record.
DecodeOut run_decode(const std::vector<MagRecord>& mag,
                     const std::map<int, CalibrationState>& calibs,
                     const MagParams& params) {
    DecodeOut out;
    std::array<std::vector<std::size_t>, HandModel::kJointCount> by_joint;
    std::array<double, HandModel::kJointCount> last_t;
    last_t.fill(-std::numeric_limits<double>::infinity());
    for (std::size_t i = 0; i < mag.size(); ++i) {
        const int j = mag[i].joint;
        if (mag[i].t <= last_t[j]) continue;  // stays out of by_joint: skipped
        last_t[j] = mag[i].t;
        by_joint[j].push_back(i);
    }

    std::vector<double> theta(mag.size(), 0.0);
    std::vector<bool> ok(mag.size(), false);
    for (int j = 0; j < HandModel::kJointCount; ++j) {
        const auto& idx = by_joint[j];
        if (idx.empty()) continue;
        const auto cal = calibs.find(j);
        if (cal == calibs.end()) continue;  // uncalibrated joint: all skipped
        std::vector<MagSample> samples(idx.size());
        for (std::size_t i = 0; i < idx.size(); ++i) {
            samples[i] = {mag[idx[i]].bx, mag[idx[i]].by, mag[idx[i]].t};
        }
        std::vector<std::size_t> faults;
        const auto decoded = decode_angles(samples, cal->second, params, &faults);
        std::vector<bool> faulted(idx.size(), false);
        for (std::size_t f : faults) faulted[f] = true;
        for (std::size_t i = 0; i < idx.size(); ++i) {
            if (faulted[i]) continue;
            theta[idx[i]] = decoded[i];
            ok[idx[i]] = true;
        }
    }

    out.angles.reserve(mag.size());
    for (std::size_t i = 0; i < mag.size(); ++i) {
        if (ok[i]) {
            out.angles.push_back({mag[i].t, mag[i].joint, theta[i]});
        } else {
            ++out.skipped;
        }
    }
    return out;
}

struct GroupOut {
    std::vector<JointVectorRecord> vectors;
    std::size_t ticks = 0;
    std::size_t skipped = 0;
};

// Collects per-sample angles into 21-vectors at each glove tick (records
// sharing one timestamp). Joints missing from a tick hold their last value;
// ticks before every joint has reported are skipped.
GroupOut group_vectors(const std::vector<AngleRecord>& angles) {
    GroupOut out;
    std::array<double, HandModel::kJointCount> last{};
    std::array<bool, HandModel::kJointCount> seen{};

    std::size_t i = 0;
    while (i < angles.size()) {
        const double t = angles[i].t;
        while (i < angles.size() && angles[i].t == t) {
            last[angles[i].joint] = angles[i].theta;
            seen[angles[i].joint] = true;
            ++i;
        }
        ++out.ticks;
        if (std::all_of(seen.begin(), seen.end(), [](bool b) { return b; })) {
            JointVectorRecord rec;
            rec.t = t;
            rec.theta.assign(last.begin(), last.end());
            out.vectors.push_back(std::move(rec));
        } else {
            ++out.skipped;
        }
    }
    return out;
}

struct FkOut {
    std::vector<FingertipsRecord> tips;
    std::size_t skipped = 0;
    std::size_t limit_warnings = 0;
};

FkOut run_fk(const HandModel& model,
             const std::vector<JointVectorRecord>& vectors) {
    FkOut out;
    out.tips.reserve(vectors.size());
    for (const auto& v : vectors) {
        if (v.theta.size() != model.joints.size()) {
            ++out.skipped;
            continue;
        }
        if (!check_limits(model, v.theta).empty()) ++out.limit_warnings;
        out.tips.push_back({v.t, forward_kinematics(model, v.theta)});
    }
    return out;
}

struct RetargetOut {
    std::vector<ResultRecord> results;
    std::size_t skipped = 0;
};

RetargetOut run_retarget(const HandModel& model, const RetargetConfig& cfg,
                         const std::vector<FingertipsRecord>& tips) {
    RetargetOut out;
    out.results.reserve(tips.size());
    std::vector<double> theta_last(model.joints.size(), 0.0);
    for (const auto& rec : tips) {
        try {
            const auto targets = scale_targets(rec.poses, model.lambda_f);
            const auto opp = opposition_distances(targets);
            auto res = solve_hand_retarget(model, targets, theta_last, opp, cfg);
            theta_last = res.theta;
            out.results.push_back(
                {rec.t, std::move(res.theta), res.cost, res.iterations, res.converged});
        } catch (const std::exception&) {
            ++out.skipped;
        }
    }
    return out;
}

struct MapOut {
    std::vector<PatternRecord> patterns;
    std::size_t skipped = 0;
};

const SensorCal* find_sensor(const TactileConfig& cfg, int rows, int cols) {
    for (const auto& [name, cal] : cfg.sensors) {
        if (cal.rows == rows && cal.cols == cols) return &cal;
    }
    return nullptr;
}

MapOut run_map(const TactileConfig& cfg, const std::vector<TactileRecord>& frames) {
    MapOut out;
    out.patterns.reserve(frames.size());
    for (const auto& rec : frames) {
        try {
            SensorGrid grid{rec.rows, rec.cols, rec.values, ""};
            const SensorCal* cal = find_sensor(cfg, rec.rows, rec.cols);
            const SensorGrid norm = cal ? normalize_grid(grid, cal->floor, cal->ceiling)
                                        : normalize_grid(grid, 0.0, 1.0);
            TaxelPattern pat;
            if (cfg.mode == "pressure") {
                pat = pressure_map(peak_pressure(norm), cfg.thresholds, cfg.layout);
            } else {
                pat = shape_map(norm, cfg.layout, cfg.activation_threshold);
            }
            PatternRecord pr;
            pr.t = rec.t;
            pr.finger = rec.finger;
            for (int k = 0; k < kTaxelCount; ++k) {
                pr.states[k] = static_cast<std::int8_t>(pat.states[k]);
            }
            out.patterns.push_back(std::move(pr));
        } catch (const std::exception&) {
            ++out.skipped;
        }
    }
    return out;
}

struct EncodeOut {
    std::vector<std::uint8_t> bytes;  // concatenated TAGF records
    std::size_t chains = 0;
    std::size_t skipped = 0;
};

// One five-module chain per tick; fingers hold their last pattern (neutral
// before first seen).
EncodeOut run_encode(const std::vector<PatternRecord>& patterns) {
    EncodeOut out;
    std::array<TaxelPattern, 5> current{};

    auto flush = [&] {
        std::array<ActuatorFrame, 5> frames;
        for (int f = 0; f < 5; ++f) frames[f] = encode_frame(current[f], f);
        const auto stream = serialize_chain(frames);
        const auto bytes = tagf_bytes(stream);
        out.bytes.insert(out.bytes.end(), bytes.begin(), bytes.end());
        ++out.chains;
    };

    std::size_t i = 0;
    while (i < patterns.size()) {
        const double t = patterns[i].t;
        bool any = false;
        while (i < patterns.size() && patterns[i].t == t) {
            const PatternRecord& pr = patterns[i];
            if (pr.finger >= 0 && pr.finger < 5) {
                for (int k = 0; k < kTaxelCount; ++k) {
                    current[pr.finger].states[k] =
                        static_cast<TaxelState>(pr.states[k]);
                }
                any = true;
            } else {
                ++out.skipped;
            }
            ++i;
        }
        if (any) flush();
    }
    return out;
}

struct ArmOut {
    std::vector<ResultRecord> results;
    std::size_t skipped = 0;
};

// Wrist increments against the first pose, applied to the arm's initial
// end-effector pose, then tracked with IK.
ArmOut run_arm(const ArmModel& arm, const RetargetConfig& cfg, double lambda,
               const std::vector<PoseRecord>& wrist) {
    ArmOut out;
    if (wrist.empty()) return out;
    std::vector<double> theta_last(arm.joints.size(), 0.0);
    const Pose robot_init = arm_fk(arm, theta_last);
    const Pose init = wrist.front().pose;
    for (const auto& rec : wrist) {
        try {
            const Pose target = wrist_target(rec.pose, init, robot_init, lambda);
            auto res = solve_arm_ik(arm, target, theta_last, cfg);
            theta_last = res.theta;
            out.results.push_back(
                {rec.t, std::move(res.theta), res.cost, res.iterations, res.converged});
        } catch (const std::exception&) {
            ++out.skipped;
        }
    }
    return out;
}

template <typename Rec>
void write_records(const std::string& path, const std::vector<Rec>& records) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot write " + path);
    for (const Rec& r : records) write_line(os, r);
}

}  // namespace

// ---- statistics ------------------------------------------------------------

ErrorStats error_stats(std::span<const double> errors_deg) {
    if (errors_deg.empty()) {
        throw std::invalid_argument("error_stats requires a non-empty sequence");
    }
    const auto backend = kernels::active_backend();
    const auto m = kernels::moments(errors_deg.data(), errors_deg.size(), backend);
    ErrorStats s;
    s.n = errors_deg.size();
    s.mean = m.mean();
    const double css =
        kernels::centered_sum_sq(errors_deg.data(), errors_deg.size(), s.mean, backend);
    s.sigma = std::sqrt(css / static_cast<double>(s.n));
    s.gauss_mu = s.mean;
    s.gauss_sigma = s.sigma;
    s.max_abs = m.max_abs();
    return s;
}

double drift_report(std::span<const double> unwrapped_rad,
                    double window_seconds, double sample_rate_hz) {
    const std::size_t w =
        static_cast<std::size_t>(std::llround(window_seconds * sample_rate_hz));
    if (w == 0) throw std::invalid_argument("window too small");
    if (unwrapped_rad.size() < 2 * w) {
        throw std::invalid_argument("stream shorter than two windows");
    }
    const double* data = unwrapped_rad.data();
    const std::size_t n = unwrapped_rad.size();

    auto window_mean = [&](std::size_t start) {
        double s = 0.0;
        for (std::size_t i = 0; i < w; ++i) s += data[start + i];
        return s / static_cast<double>(w);
    };

    const double mean_first = window_mean(0);
    const std::size_t base = n - w;
    const std::size_t max_lag = std::min<std::size_t>(w, base - w);

    // Zero-normalized cross-correlation of the candidate last window against
    // the first; offset-invariant, so a constant bias does not move the peak.
    double best_score = -2.0;
    std::size_t best_start = base;
    for (std::size_t lag = 0; lag <= max_lag; ++lag) {
        const std::size_t start = base - lag;
        const double mb = window_mean(start);
        double sab = 0.0, saa = 0.0, sbb = 0.0;
        for (std::size_t i = 0; i < w; ++i) {
            const double a = data[i] - mean_first;
            const double b = data[start + i] - mb;
            sab += a * b;
            saa += a * a;
            sbb += b * b;
        }
        const double denom = std::sqrt(saa * sbb);
        const double score = denom > 0.0 ? sab / denom : (saa == sbb ? 1.0 : 0.0);
        if (score > best_score + 1e-15) {
            best_score = score;
            best_start = start;
        }
    }

    return std::abs(mean_first - window_mean(best_start)) * kRadToDeg;
}

std::uint64_t hash_doubles(std::span<const double> values) {
    std::uint64_t h = 1469598103934665603ULL;
    for (double v : values) {
        std::uint64_t bits = std::bit_cast<std::uint64_t>(v);
        for (int i = 0; i < 8; ++i) {
            h ^= (bits >> (8 * i)) & 0xff;
            h *= 1099511628211ULL;
        }
    }
    return h;
}

// ---- replay ----------------------------------------------------------------

ReplaySession replay(ReplaySession session) {
    for (const auto& [name, path] : session.sources) {
        if (!std::filesystem::exists(path)) {
            throw std::runtime_error("stream '" + name + "' missing: " + path);
        }
    }
    const Config& cfg = session.config;
    session.stats = {};

    auto enabled = [&](const std::string& s) {
        return std::find(cfg.replay.stages.begin(), cfg.replay.stages.end(), s) !=
               cfg.replay.stages.end();
    };
    auto sink = [&](const std::string& stage) -> const std::string* {
        auto it = session.outputs.find(stage);
        return it == session.outputs.end() ? nullptr : &it->second;
    };
    auto push_stats = [&](const std::string& name, std::size_t in,
                          std::size_t out, std::size_t skipped, double ms) {
        session.stats.stages.push_back({name, in, out, skipped, ms});
    };

    std::vector<JointVectorRecord> vectors;

    if (enabled("decode") && session.sources.count("mag")) {
        const auto t0 = Clock::now();
        const auto mag = read_mag_log(session.sources.at("mag"));
        auto cal_it = session.sources.find("calibration");
        if (cal_it == session.sources.end()) {
            throw std::runtime_error("decode stage requires a 'calibration' source");
        }
        const auto calibs = load_calibrations(cal_it->second);
        auto decoded = run_decode(mag, calibs, cfg.mag);
        push_stats("decode", mag.size(), decoded.angles.size(), decoded.skipped,
                   ms_since(t0));
        if (const auto* path = sink("decode")) write_records(*path, decoded.angles);

        const auto t1 = Clock::now();
        auto grouped = group_vectors(decoded.angles);
        push_stats("joints", grouped.ticks, grouped.vectors.size(),
                   grouped.skipped, ms_since(t1));
        vectors = std::move(grouped.vectors);
        if (const auto* path = sink("joints")) write_records(*path, vectors);
    } else if (session.sources.count("joints")) {
        vectors = read_joint_vectors(session.sources.at("joints"));
    }

    std::vector<FingertipsRecord> tips;
    if (enabled("fk") && !vectors.empty()) {
        const auto t0 = Clock::now();
        auto fk = run_fk(cfg.model, vectors);
        session.stats.limit_warnings += fk.limit_warnings;
        push_stats("fk", vectors.size(), fk.tips.size(), fk.skipped, ms_since(t0));
        tips = std::move(fk.tips);
        if (const auto* path = sink("fk")) write_records(*path, tips);
    }

    if (enabled("retarget") && !tips.empty()) {
        const auto t0 = Clock::now();
        auto rt = run_retarget(cfg.model, cfg.retarget, tips);
        push_stats("retarget", tips.size(), rt.results.size(), rt.skipped,
                   ms_since(t0));
        if (const auto* path = sink("retarget")) write_records(*path, rt.results);
    }

    if (enabled("retarget") && session.sources.count("wrist")) {
        const auto t0 = Clock::now();
        const auto wrist = read_pose_log(session.sources.at("wrist"));
        auto arm = run_arm(cfg.arm, cfg.arm_retarget, cfg.replay.wrist_lambda, wrist);
        push_stats("arm", wrist.size(), arm.results.size(), arm.skipped,
                   ms_since(t0));
        if (const auto* path = sink("arm")) write_records(*path, arm.results);
    }

    std::vector<PatternRecord> patterns;
    if (enabled("map") && session.sources.count("tactile")) {
        const auto t0 = Clock::now();
        const auto frames = read_tactile_log(session.sources.at("tactile"));
        auto mapped = run_map(cfg.tactile, frames);
        push_stats("map", frames.size(), mapped.patterns.size(), mapped.skipped,
                   ms_since(t0));
        patterns = std::move(mapped.patterns);
        if (const auto* path = sink("map")) write_records(*path, patterns);
    }

    if (enabled("encode") && !patterns.empty()) {
        const auto t0 = Clock::now();
        auto enc = run_encode(patterns);
        push_stats("encode", patterns.size(), enc.chains, enc.skipped, ms_since(t0));
        if (const auto* path = sink("encode")) {
            std::ofstream os(*path, std::ios::binary);
            if (!os) throw std::runtime_error("cannot write " + *path);
            os.write(reinterpret_cast<const char*>(enc.bytes.data()),
                     static_cast<std::streamsize>(enc.bytes.size()));
        }
    }

    return session;
}

// ---- bench -----------------------------------------------------------------

namespace {

// Smooth per-joint trajectories spanning a comfortable fraction of the
// limits; frequencies/phases derived deterministically from the seed.
struct WaveGen {
    std::vector<double> mid, amp, freq, phase;

    WaveGen(std::span<const JointSpec> joints, std::uint64_t seed) {
        std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ULL);
        auto uni = [&](double lo, double hi) {
            return lo + (hi - lo) * (static_cast<double>(rng() >> 11) * 0x1p-53);
        };
        for (const JointSpec& j : joints) {
            const double m = 0.5 * (j.limit_min + j.limit_max);
            const double half = 0.5 * (j.limit_max - j.limit_min);
            mid.push_back(m);
            amp.push_back(0.6 * half);
            freq.push_back(uni(0.3, 0.9));
            phase.push_back(uni(0.0, kTwoPi));
        }
    }

    void eval(double t, std::vector<double>& theta) const {
        theta.resize(mid.size());
        for (std::size_t k = 0; k < mid.size(); ++k) {
            theta[k] = mid[k] + amp[k] * std::sin(kTwoPi * freq[k] * t + phase[k]);
        }
    }
};

BenchReport finish_report(std::string name, std::vector<double> times_us,
                          std::uint64_t payload_hash) {
    BenchReport r;
    r.workload = std::move(name);
    r.count = times_us.size();
    double total_us = 0.0;
    for (double t : times_us) total_us += t;
    r.per_second = r.count / (total_us * 1e-6);
    std::sort(times_us.begin(), times_us.end());
    r.median_us = times_us[times_us.size() / 2];
    r.p99_us = times_us[std::min(times_us.size() - 1,
                                 static_cast<std::size_t>(times_us.size() * 0.99))];
    r.payload_hash = payload_hash;
    return r;
}

BenchReport bench_hand(const Config& cfg, std::uint64_t seed) {
    const HandModel& model = cfg.model;
    const WaveGen gen(model.joints, seed);
    const std::size_t n = 2000;
    const double dt = 1.0 / cfg.replay.glove_rate_hz;

    std::vector<double> theta, theta_last(model.joints.size(), 0.0);
    std::vector<double> times_us;
    times_us.reserve(n);
    std::uint64_t h = 0;
    for (std::size_t i = 0; i < n; ++i) {
        gen.eval(static_cast<double>(i) * dt, theta);
        const auto targets = scale_targets(forward_kinematics(model, theta),
                                           model.lambda_f);
        const auto opp = opposition_distances(targets);
        const auto t0 = Clock::now();
        auto res = solve_hand_retarget(model, targets, theta_last, opp, cfg.retarget);
        times_us.push_back(ms_since(t0) * 1e3);
        theta_last = std::move(res.theta);
        h ^= hash_doubles(theta_last);
    }
    return finish_report("hand_retarget", std::move(times_us), h);
}

BenchReport bench_arm(const Config& cfg, std::uint64_t seed) {
    const ArmModel& arm = cfg.arm;
    const WaveGen gen(arm.joints, seed);
    const std::size_t n = 2000;
    const double dt = 1.0 / cfg.replay.tracker_rate_hz;

    std::vector<double> theta, theta_last(arm.joints.size(), 0.0);
    std::vector<double> times_us;
    std::uint64_t h = 0;
    for (std::size_t i = 0; i < n; ++i) {
        gen.eval(static_cast<double>(i) * dt, theta);
        // Mild motion around the warm start keeps targets reachable.
        for (double& v : theta) v *= 0.2;
        const Pose target = arm_fk(arm, theta);
        const auto t0 = Clock::now();
        auto res = solve_arm_ik(arm, target, theta_last, cfg.arm_retarget);
        times_us.push_back(ms_since(t0) * 1e3);
        theta_last = std::move(res.theta);
        h ^= hash_doubles(theta_last);
    }
    return finish_report("arm_ik", std::move(times_us), h);
}

BenchReport bench_full_chain(const Config& cfg, std::uint64_t seed) {
    const HandModel& model = cfg.model;
    const WaveGen gen(model.joints, seed);
    const double rate = cfg.replay.glove_rate_hz;
    const std::size_t ticks = static_cast<std::size_t>(5.0 * rate);
    const double b0 = 1.0;

    std::vector<FieldSimulator> sims;
    std::map<int, CalibrationState> calibs;
    for (int j = 0; j < HandModel::kJointCount; ++j) {
        sims.emplace_back(b0, 0.05 * j / 21.0, -0.03 * j / 21.0, 0.002 * b0, 16,
                          seed + static_cast<std::uint64_t>(j));
        CalibrationState c;
        c.ox = 0.05 * j / 21.0;
        c.oy = -0.03 * j / 21.0;
        c.b0 = b0;
        c.bx_min = c.ox - b0;
        c.bx_max = c.ox + b0;
        c.by_min = c.oy - b0;
        c.by_max = c.oy + b0;
        calibs[j] = c;
    }

    std::mt19937_64 grng(seed ^ 0xabcdef12345ULL);
    auto unit = [&] { return static_cast<double>(grng() >> 11) * 0x1p-53; };

    std::vector<double> theta, theta_last(model.joints.size(), 0.0);
    std::vector<double> times_us;
    std::uint64_t h = 0;
    std::vector<MagRecord> tick_records(HandModel::kJointCount);
    for (std::size_t i = 0; i < ticks; ++i) {
        const double t = static_cast<double>(i) / rate;
        gen.eval(t, theta);
        for (int j = 0; j < HandModel::kJointCount; ++j) {
            const MagSample s = sims[j].sample(theta[j], t);
            tick_records[j] = {t, j, s.bx, s.by};
        }
        SensorGrid grid{7, 6, std::vector<double>(42), "leaptac"};
        for (double& v : grid.values) v = unit();

        const auto t0 = Clock::now();
        const auto decoded = run_decode(tick_records, calibs, cfg.mag);
        auto grouped = group_vectors(decoded.angles);
        if (!grouped.vectors.empty()) {
            const auto& vec = grouped.vectors.front();
            const auto tips = forward_kinematics(model, vec.theta);
            const auto targets = scale_targets(tips, model.lambda_f);
            const auto opp = opposition_distances(targets);
            auto res = solve_hand_retarget(model, targets, theta_last, opp,
                                           cfg.retarget);
            theta_last = res.theta;
            const auto pat = shape_map(normalize_grid(grid, 0.0, 1.0),
                                       cfg.tactile.layout,
                                       cfg.tactile.activation_threshold);
            std::array<ActuatorFrame, 5> frames;
            for (int f = 0; f < 5; ++f) frames[f] = encode_frame(pat, f);
            const auto stream = serialize_chain(frames);
            h ^= hash_doubles(res.theta);
            h ^= std::hash<std::vector<bool>>{}(stream.payload);
        }
        times_us.push_back(ms_since(t0) * 1e3);
    }
    return finish_report("full_chain", std::move(times_us), h);
}

}  // namespace

std::vector<std::string> bench_workloads() {
    return {"hand_retarget", "arm_ik", "full_chain"};
}

BenchReport bench(const Config& config, const std::string& workload,
                  std::uint64_t seed) {
    if (workload == "hand_retarget") return bench_hand(config, seed);
    if (workload == "arm_ik") return bench_arm(config, seed);
    if (workload == "full_chain") return bench_full_chain(config, seed);
    std::string names;
    for (const auto& w : bench_workloads()) {
        if (!names.empty()) names += ", ";
        names += w;
    }
    throw std::invalid_argument("unknown workload '" + workload +
                                "' (available: " + names + ")");
}

}  // namespace tag
