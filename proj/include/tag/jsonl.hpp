#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "tag/geometry.hpp"
#include "tag/hand_model.hpp"

// Line-delimited JSON logs. Readers report schema violations with the
// offending line number; writers emit shortest-round-trip doubles with a
// fixed field order, so identical data always produces identical bytes.

namespace tag {

struct ParseError : std::runtime_error {
    ParseError(std::size_t line, const std::string& what)
        : std::runtime_error("line " + std::to_string(line) + ": " + what),
          line_number(line) {}
    std::size_t line_number;
};

// {"t": <s>, "joint": <0..20>, "bx": <adc>, "by": <adc>}
struct MagRecord {
    double t = 0.0;
    int joint = 0;
    double bx = 0.0;
    double by = 0.0;
};

// {"t": <s>, "joint": <id>, "theta": <rad>}
struct AngleRecord {
    double t = 0.0;
    int joint = 0;
    double theta = 0.0;
};

// {"t": <s>, "theta": [21 x rad]}
struct JointVectorRecord {
    double t = 0.0;
    std::vector<double> theta;
};

// {"t": <s>, "fingers": [5 x {"p": [3], "q": [w,x,y,z]}]}
struct FingertipsRecord {
    double t = 0.0;
    std::array<FingertipPose, 5> poses;
};

// {"t": <s>, "theta": [...], "cost": <f>, "iters": <n>, "converged": <b>}
struct ResultRecord {
    double t = 0.0;
    std::vector<double> theta;
    double cost = 0.0;
    int iters = 0;
    bool converged = false;
};

// {"t": <s>, "finger": <0..4>, "rows": <n>, "cols": <n>, "values": [...]}
struct TactileRecord {
    double t = 0.0;
    int finger = 0;
    int rows = 0;
    int cols = 0;
    std::vector<double> values;
};

// {"t": <s>, "finger": <0..4>, "states": [32 x -1|0|1]}
struct PatternRecord {
    double t = 0.0;
    int finger = 0;
    std::array<std::int8_t, 32> states{};
};

// {"t": <s>, "p": [3], "q": [w,x,y,z]}
struct PoseRecord {
    double t = 0.0;
    Pose pose;
};

// {"t": <s>, "value": <x>} -- generic scalar series (errors, angles, ...)
struct ValueRecord {
    double t = 0.0;
    double value = 0.0;
};

// {"rows": <n>, "cols": <n>, "resistances": [...]} -- matrix plant files
struct MatrixRecord {
    int rows = 0;
    int cols = 0;
    std::vector<double> resistances;
};

std::vector<MagRecord> read_mag_log(const std::string& path);
std::vector<JointVectorRecord> read_joint_vectors(const std::string& path);
std::vector<TactileRecord> read_tactile_log(const std::string& path);
std::vector<PoseRecord> read_pose_log(const std::string& path);
std::vector<ValueRecord> read_value_log(const std::string& path);
std::vector<MatrixRecord> read_matrix_log(const std::string& path);
std::vector<PatternRecord> read_pattern_log(const std::string& path);

void write_line(std::ostream& os, const MagRecord& r);
void write_line(std::ostream& os, const AngleRecord& r);
void write_line(std::ostream& os, const JointVectorRecord& r);
void write_line(std::ostream& os, const FingertipsRecord& r);
void write_line(std::ostream& os, const ResultRecord& r);
void write_line(std::ostream& os, const TactileRecord& r);
void write_line(std::ostream& os, const PatternRecord& r);
void write_line(std::ostream& os, const PoseRecord& r);
void write_line(std::ostream& os, const ValueRecord& r);

// Shortest round-trip decimal form of a double (std::to_chars).
std::string format_double(double v);

}  // namespace tag
