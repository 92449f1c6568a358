// Command-line harness for the glove signal chain: calibration, decode,
// kinematics, retargeting, tactile mapping, actuator encoding, scan
// simulation, log replay, benchmarks and statistics.
//
// Exit codes: 0 success, 1 validation error (bad inputs/config/schema),
// 2 runtime error.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "tag/actuator_encode.hpp"
#include "tag/config.hpp"
#include "tag/harness.hpp"
#include "tag/jsonl.hpp"
#include "tag/mag_encoder.hpp"
#include "tag/retarget.hpp"
#include "tag/taxel_scan.hpp"

namespace {

using namespace tag;

struct GlobalOpts {
    std::string config_path;
    std::string out_path;
    std::uint64_t seed = 0;
};

Config load_or_default(const GlobalOpts& g) {
    return g.config_path.empty() ? default_config() : load_config(g.config_path);
}

std::ofstream open_out(const std::string& path) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot write " + path);
    return os;
}

int cmd_calibrate(const GlobalOpts& g, const std::string& mag_path) {
    const Config cfg = load_or_default(g);
    const auto mag = read_mag_log(mag_path);
    std::map<int, std::vector<MagSample>> sweeps;
    for (const auto& r : mag) sweeps[r.joint].push_back({r.bx, r.by, r.t});

    std::map<int, CalibrationState> calibs;
    for (const auto& [joint, sweep] : sweeps) {
        calibs[joint] = calibrate(sweep, cfg.mag);
    }
    if (g.out_path.empty()) throw std::invalid_argument("--out is required");
    save_calibrations(calibs, g.out_path);
    std::cout << "calibrated " << calibs.size() << " joints -> " << g.out_path
              << "\n";
    return 0;
}

int cmd_decode(const GlobalOpts& g, const std::string& mag_path,
               const std::string& calib_path) {
    const Config cfg = load_or_default(g);
    ReplaySession s;
    s.config = cfg;
    s.config.replay.stages = {"decode"};
    s.sources["mag"] = mag_path;
    s.sources["calibration"] = calib_path;
    if (!g.out_path.empty()) s.outputs["decode"] = g.out_path;
    s = replay(std::move(s));
    for (const auto& st : s.stats.stages) {
        std::cout << st.name << ": in=" << st.in << " out=" << st.out
                  << " skipped=" << st.skipped << " (" << st.wall_ms << " ms)\n";
    }
    return 0;
}

int cmd_fk(const GlobalOpts& g, const std::string& joints_path) {
    const Config cfg = load_or_default(g);
    const auto vectors = read_joint_vectors(joints_path);
    auto os = open_out(g.out_path.empty() ? "fk_out.jsonl" : g.out_path);
    std::size_t warnings = 0;
    for (const auto& v : vectors) {
        if (!check_limits(cfg.model, v.theta).empty()) ++warnings;
        write_line(os, FingertipsRecord{v.t, forward_kinematics(cfg.model, v.theta)});
    }
    if (warnings) {
        std::cerr << "warning: " << warnings << " records graze joint limits\n";
    }
    std::cout << vectors.size() << " poses written\n";
    return 0;
}

int cmd_retarget(const GlobalOpts& g, const std::string& joints_path,
                 const std::string& wrist_path) {
    Config cfg = load_or_default(g);
    ReplaySession s;
    s.config = cfg;
    s.config.replay.stages = {"fk", "retarget"};
    s.sources["joints"] = joints_path;
    if (!wrist_path.empty()) s.sources["wrist"] = wrist_path;
    if (!g.out_path.empty()) s.outputs["retarget"] = g.out_path;
    if (!wrist_path.empty() && !g.out_path.empty()) {
        s.outputs["arm"] = g.out_path + ".arm";
    }
    s = replay(std::move(s));
    for (const auto& st : s.stats.stages) {
        std::cout << st.name << ": in=" << st.in << " out=" << st.out
                  << " skipped=" << st.skipped << " (" << st.wall_ms << " ms)\n";
    }
    return 0;
}

int cmd_map(const GlobalOpts& g, const std::string& tactile_path,
            const std::string& mode) {
    Config cfg = load_or_default(g);
    if (!mode.empty()) cfg.tactile.mode = mode;
    ReplaySession s;
    s.config = cfg;
    s.config.replay.stages = {"map"};
    s.sources["tactile"] = tactile_path;
    if (!g.out_path.empty()) s.outputs["map"] = g.out_path;
    s = replay(std::move(s));
    for (const auto& st : s.stats.stages) {
        std::cout << st.name << ": in=" << st.in << " out=" << st.out
                  << " skipped=" << st.skipped << " (" << st.wall_ms << " ms)\n";
    }
    return 0;
}

int cmd_encode(const GlobalOpts& g, const std::string& patterns_path,
               bool hex) {
    Config cfg = load_or_default(g);
    ReplaySession s;
    s.config = cfg;
    s.config.replay.stages = {"encode"};
    // Patterns come pre-mapped; feed them through the encode stage only.
    const auto patterns = read_pattern_log(patterns_path);
    std::array<TaxelPattern, 5> current{};
    std::vector<std::uint8_t> bytes;
    std::size_t chains = 0;
    std::size_t i = 0;
    while (i < patterns.size()) {
        const double t = patterns[i].t;
        while (i < patterns.size() && patterns[i].t == t) {
            const auto& pr = patterns[i];
            for (int k = 0; k < kTaxelCount; ++k) {
                current[pr.finger].states[k] = static_cast<TaxelState>(pr.states[k]);
            }
            ++i;
        }
        std::array<ActuatorFrame, 5> frames;
        for (int f = 0; f < 5; ++f) frames[f] = encode_frame(current[f], f);
        const auto stream = serialize_chain(frames);
        if (hex) {
            std::cout << hex_dump(stream) << "\n";
        }
        const auto b = tagf_bytes(stream);
        bytes.insert(bytes.end(), b.begin(), b.end());
        ++chains;
    }
    if (!g.out_path.empty()) {
        auto os = open_out(g.out_path);
        os.write(reinterpret_cast<const char*>(bytes.data()),
                 static_cast<std::streamsize>(bytes.size()));
    }
    std::cout << chains << " chains, " << bytes.size() << " bytes\n";
    return 0;
}

int cmd_scan(const GlobalOpts& g, const std::string& matrix_path) {
    const Config cfg = load_or_default(g);
    const auto matrices = read_matrix_log(matrix_path);
    auto os = open_out(g.out_path.empty() ? "scan_out.jsonl" : g.out_path);
    double t = 0.0;
    for (const auto& m : matrices) {
        const auto result =
            full_scan({m.rows, m.cols, m.resistances}, cfg.scan.cfg, cfg.scan.k);
        TactileRecord rec;
        rec.t = t;
        rec.finger = 0;
        rec.rows = result.grid.rows;
        rec.cols = result.grid.cols;
        rec.values = result.grid.values;
        write_line(os, rec);
        t += 1.0;
    }
    std::cout << matrices.size() << " matrices scanned\n";
    return 0;
}

int cmd_replay(const GlobalOpts& g,
               const std::vector<std::string>& source_specs,
               const std::vector<std::string>& output_specs,
               const std::string& stages_csv) {
    Config cfg = load_or_default(g);
    if (!stages_csv.empty()) {
        cfg.replay.stages.clear();
        std::string cur;
        for (char c : stages_csv + ",") {
            if (c == ',') {
                if (!cur.empty()) cfg.replay.stages.push_back(cur);
                cur.clear();
            } else {
                cur += c;
            }
        }
    }
    auto parse_kv = [](const std::string& spec) {
        const auto eq = spec.find('=');
        if (eq == std::string::npos) {
            throw std::invalid_argument("expected name=path, got '" + spec + "'");
        }
        return std::pair<std::string, std::string>(spec.substr(0, eq),
                                                   spec.substr(eq + 1));
    };
    ReplaySession s;
    s.config = cfg;
    s.seed = g.seed;
    for (const auto& spec : source_specs) s.sources.insert(parse_kv(spec));
    for (const auto& spec : output_specs) s.outputs.insert(parse_kv(spec));
    s = replay(std::move(s));
    for (const auto& st : s.stats.stages) {
        std::cout << st.name << ": in=" << st.in << " out=" << st.out
                  << " skipped=" << st.skipped << " (" << st.wall_ms << " ms)\n";
    }
    if (s.stats.limit_warnings) {
        std::cerr << "warning: " << s.stats.limit_warnings
                  << " records graze joint limits\n";
    }
    return 0;
}

int cmd_bench(const GlobalOpts& g, const std::string& workload) {
    const Config cfg = load_or_default(g);
    const auto r = bench(cfg, workload, g.seed);
    std::cout << r.workload << ": " << r.count << " records, "
              << static_cast<std::uint64_t>(r.per_second) << "/s, median "
              << r.median_us << " us, p99 " << r.p99_us << " us, payload "
              << std::hex << r.payload_hash << std::dec << "\n";
    std::cout << "kernels: " << kernels::capability_string() << "\n";
    return 0;
}

int cmd_stats(const GlobalOpts& g, const std::string& errors_path,
              const std::string& drift_path, double window_s, double rate_hz,
              const std::string& csv_path) {
    if (!errors_path.empty()) {
        const auto records = read_value_log(errors_path);
        std::vector<double> errors;
        errors.reserve(records.size());
        for (const auto& r : records) errors.push_back(r.value);
        const auto s = error_stats(errors);
        std::cout << "n=" << s.n << " mean=" << s.mean << " sigma=" << s.sigma
                  << " max_abs=" << s.max_abs << " gauss=(" << s.gauss_mu << ", "
                  << s.gauss_sigma << ")\n";
        if (!csv_path.empty()) {
            auto os = open_out(csv_path);
            os << "index,t,error_deg\n";
            for (std::size_t i = 0; i < records.size(); ++i) {
                os << i << "," << format_double(records[i].t) << ","
                   << format_double(records[i].value) << "\n";
            }
        }
    }
    if (!drift_path.empty()) {
        const auto records = read_value_log(drift_path);
        std::vector<double> wrapped;
        wrapped.reserve(records.size());
        for (const auto& r : records) wrapped.push_back(r.value);
        const auto unwrapped = unwrap_stream(wrapped);
        const double d = drift_report(unwrapped, window_s, rate_hz);
        std::cout << "drift over " << window_s << " s windows: " << d << " deg\n";
    }
    if (errors_path.empty() && drift_path.empty()) {
        throw std::invalid_argument("stats needs --errors and/or --drift");
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"glove signal-chain toolkit"};
    app.require_subcommand(1);
    app.fallthrough();

    GlobalOpts g;
    app.add_option("--config", g.config_path, "pipeline config JSON");
    app.add_option("--seed", g.seed, "RNG seed for synthetic workloads");
    app.add_option("--out", g.out_path, "output path");

    std::string mag_path, calib_path, joints_path, wrist_path, tactile_path;
    std::string patterns_path, matrix_path, workload, mode, stages_csv;
    std::string errors_path, drift_path, csv_path;
    std::vector<std::string> source_specs, output_specs;
    double window_s = 30.0, rate_hz = 260.0;
    bool hex = false;

    auto* calibrate_cmd = app.add_subcommand("calibrate", "offset calibration from a sweep log")->fallthrough();
    calibrate_cmd->add_option("--mag", mag_path, "mag sample JSONL")->required();

    auto* decode_cmd = app.add_subcommand("decode", "mag samples to joint angles")->fallthrough();
    decode_cmd->add_option("--mag", mag_path, "mag sample JSONL")->required();
    decode_cmd->add_option("--calibration", calib_path, "calibration JSON")->required();

    auto* fk_cmd = app.add_subcommand("fk", "joint vectors to fingertip poses")->fallthrough();
    fk_cmd->add_option("--joints", joints_path, "joint vector JSONL")->required();

    auto* retarget_cmd = app.add_subcommand("retarget", "solve hand (and arm) retargeting")->fallthrough();
    retarget_cmd->add_option("--joints", joints_path, "joint vector JSONL")->required();
    retarget_cmd->add_option("--wrist", wrist_path, "wrist pose JSONL");

    auto* map_cmd = app.add_subcommand("map", "tactile grids to taxel patterns")->fallthrough();
    map_cmd->add_option("--tactile", tactile_path, "tactile frame JSONL")->required();
    map_cmd->add_option("--mode", mode, "shape|pressure");

    auto* encode_cmd = app.add_subcommand("encode", "patterns to TAGF bitstream")->fallthrough();
    encode_cmd->add_option("--patterns", patterns_path, "pattern JSONL")->required();
    encode_cmd->add_flag("--hex", hex, "dump each chain as hex");

    auto* scan_cmd = app.add_subcommand("scan", "simulate the resistive-matrix readout")->fallthrough();
    scan_cmd->add_option("--matrix", matrix_path, "matrix plant JSONL")->required();

    auto* replay_cmd = app.add_subcommand("replay", "run the stage chain over logs")->fallthrough();
    replay_cmd->add_option("--source", source_specs, "name=path stream (repeatable)");
    replay_cmd->add_option("--output", output_specs, "stage=path sink (repeatable)");
    replay_cmd->add_option("--stages", stages_csv, "comma-separated stage list");

    auto* bench_cmd = app.add_subcommand("bench", "throughput benchmarks")->fallthrough();
    bench_cmd->add_option("workload", workload, "hand_retarget|arm_ik|full_chain")
        ->required();

    auto* stats_cmd = app.add_subcommand("stats", "error statistics and drift")->fallthrough();
    stats_cmd->add_option("--errors", errors_path, "error value JSONL (degrees)");
    stats_cmd->add_option("--drift", drift_path, "angle value JSONL (radians)");
    stats_cmd->add_option("--window", window_s, "drift window seconds");
    stats_cmd->add_option("--rate", rate_hz, "sample rate Hz");
    stats_cmd->add_option("--csv", csv_path, "plot-ready CSV sink");

    CLI11_PARSE(app, argc, argv);

    try {
        if (calibrate_cmd->parsed()) return cmd_calibrate(g, mag_path);
        if (decode_cmd->parsed()) return cmd_decode(g, mag_path, calib_path);
        if (fk_cmd->parsed()) return cmd_fk(g, joints_path);
        if (retarget_cmd->parsed()) return cmd_retarget(g, joints_path, wrist_path);
        if (map_cmd->parsed()) return cmd_map(g, tactile_path, mode);
        if (encode_cmd->parsed()) return cmd_encode(g, patterns_path, hex);
        if (scan_cmd->parsed()) return cmd_scan(g, matrix_path);
        if (replay_cmd->parsed()) {
            return cmd_replay(g, source_specs, output_specs, stages_csv);
        }
        if (bench_cmd->parsed()) return cmd_bench(g, workload);
        if (stats_cmd->parsed()) {
            return cmd_stats(g, errors_path, drift_path, window_s, rate_hz, csv_path);
        }
    } catch (const ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
