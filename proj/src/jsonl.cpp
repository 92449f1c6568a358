#include "tag/jsonl.hpp"

#include <charconv>
#include <fstream>
#include <ostream>

#include <json.hpp>

namespace tag {

namespace {

using nlohmann::json;

json parse_line(const std::string& line, std::size_t line_no) {
    json j = json::parse(line, nullptr, false);
    if (j.is_discarded()) throw ParseError(line_no, "malformed JSON");
    if (!j.is_object()) throw ParseError(line_no, "record is not an object");
    return j;
}

double get_num(const json& j, const char* key, std::size_t line_no) {
    auto it = j.find(key);
    if (it == j.end() || !it->is_number()) {
        throw ParseError(line_no, std::string("missing numeric field \"") + key + "\"");
    }
    return it->get<double>();
}

int get_int(const json& j, const char* key, std::size_t line_no) {
    auto it = j.find(key);
    if (it == j.end() || !it->is_number_integer()) {
        throw ParseError(line_no, std::string("missing integer field \"") + key + "\"");
    }
    return it->get<int>();
}

std::vector<double> get_array(const json& j, const char* key, std::size_t line_no,
                              std::size_t expect = 0) {
    auto it = j.find(key);
    if (it == j.end() || !it->is_array()) {
        throw ParseError(line_no, std::string("missing array field \"") + key + "\"");
    }
    std::vector<double> v;
    v.reserve(it->size());
    for (const auto& e : *it) {
        if (!e.is_number()) {
            throw ParseError(line_no, std::string("non-numeric entry in \"") + key + "\"");
        }
        v.push_back(e.get<double>());
    }
    if (expect && v.size() != expect) {
        throw ParseError(line_no, std::string("field \"") + key + "\" must hold " +
                                      std::to_string(expect) + " values");
    }
    return v;
}

template <typename Record, typename Fn>
std::vector<Record> read_log(const std::string& path, Fn parse) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::vector<Record> out;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        out.push_back(parse(parse_line(line, line_no), line_no));
    }
    return out;
}

void append_double(std::string& s, double v) { s += format_double(v); }

void append_array(std::string& s, const double* v, std::size_t n) {
    s += '[';
    for (std::size_t i = 0; i < n; ++i) {
        if (i) s += ',';
        append_double(s, v[i]);
    }
    s += ']';
}

void append_pose(std::string& s, const Pose& p) {
    s += "{\"p\":";
    const double pv[3] = {p.p.x, p.p.y, p.p.z};
    append_array(s, pv, 3);
    s += ",\"q\":";
    const double qv[4] = {p.q.w, p.q.x, p.q.y, p.q.z};
    append_array(s, qv, 4);
    s += '}';
}

}  // namespace

std::string format_double(double v) {
    char buf[32];
    auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

std::vector<MagRecord> read_mag_log(const std::string& path) {
    return read_log<MagRecord>(path, [](const json& j, std::size_t ln) {
        MagRecord r;
        r.t = get_num(j, "t", ln);
        r.joint = get_int(j, "joint", ln);
        r.bx = get_num(j, "bx", ln);
        r.by = get_num(j, "by", ln);
        if (r.joint < 0 || r.joint >= HandModel::kJointCount) {
            throw ParseError(ln, "joint index out of range");
        }
        return r;
    });
}

std::vector<JointVectorRecord> read_joint_vectors(const std::string& path) {
    return read_log<JointVectorRecord>(path, [](const json& j, std::size_t ln) {
        JointVectorRecord r;
        r.t = get_num(j, "t", ln);
        r.theta = get_array(j, "theta", ln);
        return r;
    });
}

std::vector<TactileRecord> read_tactile_log(const std::string& path) {
    return read_log<TactileRecord>(path, [](const json& j, std::size_t ln) {
        TactileRecord r;
        r.t = get_num(j, "t", ln);
        r.finger = get_int(j, "finger", ln);
        r.rows = get_int(j, "rows", ln);
        r.cols = get_int(j, "cols", ln);
        r.values = get_array(j, "values", ln);
        if (r.rows < 1 || r.cols < 1 ||
            r.values.size() != static_cast<std::size_t>(r.rows) * r.cols) {
            throw ParseError(ln, "values length does not match rows*cols");
        }
        return r;
    });
}

std::vector<PoseRecord> read_pose_log(const std::string& path) {
    return read_log<PoseRecord>(path, [](const json& j, std::size_t ln) {
        PoseRecord r;
        r.t = get_num(j, "t", ln);
        const auto p = get_array(j, "p", ln, 3);
        const auto q = get_array(j, "q", ln, 4);
        r.pose.p = {p[0], p[1], p[2]};
        r.pose.q = {q[0], q[1], q[2], q[3]};
        return r;
    });
}

std::vector<ValueRecord> read_value_log(const std::string& path) {
    return read_log<ValueRecord>(path, [](const json& j, std::size_t ln) {
        ValueRecord r;
        r.t = get_num(j, "t", ln);
        r.value = get_num(j, "value", ln);
        return r;
    });
}

std::vector<MatrixRecord> read_matrix_log(const std::string& path) {
    return read_log<MatrixRecord>(path, [](const json& j, std::size_t ln) {
        MatrixRecord r;
        r.rows = get_int(j, "rows", ln);
        r.cols = get_int(j, "cols", ln);
        r.resistances = get_array(j, "resistances", ln);
        if (r.rows < 1 || r.cols < 1 ||
            r.resistances.size() != static_cast<std::size_t>(r.rows) * r.cols) {
            throw ParseError(ln, "resistances length does not match rows*cols");
        }
        return r;
    });
}

std::vector<PatternRecord> read_pattern_log(const std::string& path) {
    return read_log<PatternRecord>(path, [](const json& j, std::size_t ln) {
        PatternRecord r;
        r.t = get_num(j, "t", ln);
        r.finger = get_int(j, "finger", ln);
        const auto s = get_array(j, "states", ln, 32);
        for (int k = 0; k < 32; ++k) {
            if (s[k] != -1.0 && s[k] != 0.0 && s[k] != 1.0) {
                throw ParseError(ln, "states entries must be -1, 0 or 1");
            }
            r.states[k] = static_cast<std::int8_t>(s[k]);
        }
        return r;
    });
}

void write_line(std::ostream& os, const MagRecord& r) {
    std::string s = "{\"t\":";
    append_double(s, r.t);
    s += ",\"joint\":" + std::to_string(r.joint) + ",\"bx\":";
    append_double(s, r.bx);
    s += ",\"by\":";
    append_double(s, r.by);
    s += "}\n";
    os << s;
}

void write_line(std::ostream& os, const AngleRecord& r) {
    std::string s = "{\"t\":";
    append_double(s, r.t);
    s += ",\"joint\":" + std::to_string(r.joint) + ",\"theta\":";
    append_double(s, r.theta);
    s += "}\n";
    os << s;
}

void write_line(std::ostream& os, const JointVectorRecord& r) {
    std::string s = "{\"t\":";
    append_double(s, r.t);
    s += ",\"theta\":";
    append_array(s, r.theta.data(), r.theta.size());
    s += "}\n";
    os << s;
}

void write_line(std::ostream& os, const FingertipsRecord& r) {
    std::string s = "{\"t\":";
    append_double(s, r.t);
    s += ",\"fingers\":[";
    for (int f = 0; f < 5; ++f) {
        if (f) s += ',';
        append_pose(s, Pose{r.poses[f].position, r.poses[f].orientation});
    }
    s += "]}\n";
    os << s;
}

void write_line(std::ostream& os, const ResultRecord& r) {
    std::string s = "{\"t\":";
    append_double(s, r.t);
    s += ",\"theta\":";
    append_array(s, r.theta.data(), r.theta.size());
    s += ",\"cost\":";
    append_double(s, r.cost);
    s += ",\"iters\":" + std::to_string(r.iters);
    s += ",\"converged\":";
    s += r.converged ? "true" : "false";
    s += "}\n";
    os << s;
}

void write_line(std::ostream& os, const TactileRecord& r) {
    std::string s = "{\"t\":";
    append_double(s, r.t);
    s += ",\"finger\":" + std::to_string(r.finger);
    s += ",\"rows\":" + std::to_string(r.rows);
    s += ",\"cols\":" + std::to_string(r.cols);
    s += ",\"values\":";
    append_array(s, r.values.data(), r.values.size());
    s += "}\n";
    os << s;
}

void write_line(std::ostream& os, const PatternRecord& r) {
    std::string s = "{\"t\":";
    append_double(s, r.t);
    s += ",\"finger\":" + std::to_string(r.finger);
    s += ",\"states\":[";
    for (int k = 0; k < 32; ++k) {
        if (k) s += ',';
        s += std::to_string(static_cast<int>(r.states[k]));
    }
    s += "]}\n";
    os << s;
}

void write_line(std::ostream& os, const PoseRecord& r) {
    std::string s = "{\"t\":";
    append_double(s, r.t);
    s += ",\"p\":";
    const double pv[3] = {r.pose.p.x, r.pose.p.y, r.pose.p.z};
    append_array(s, pv, 3);
    s += ",\"q\":";
    const double qv[4] = {r.pose.q.w, r.pose.q.x, r.pose.q.y, r.pose.q.z};
    append_array(s, qv, 4);
    s += "}\n";
    os << s;
}

void write_line(std::ostream& os, const ValueRecord& r) {
    std::string s = "{\"t\":";
    append_double(s, r.t);
    s += ",\"value\":";
    append_double(s, r.value);
    s += "}\n";
    os << s;
}

}  // namespace tag
