#include "tag/config.hpp"

#include <fstream>

#include <json.hpp>

namespace tag {

namespace {

using nlohmann::json;
using ordered_json = nlohmann::ordered_json;

Vec3 to_vec3(const json& j) {
    if (!j.is_array() || j.size() != 3) {
        throw std::invalid_argument("expected a 3-element array");
    }
    return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

Quat to_quat(const json& j) {
    if (!j.is_array() || j.size() != 4) {
        throw std::invalid_argument("expected a 4-element quaternion [w,x,y,z]");
    }
    return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>(),
            j[3].get<double>()};
}

Transform to_transform(const json& j) {
    Transform t;
    if (j.contains("p")) t.t = to_vec3(j.at("p"));
    if (j.contains("q")) t.q = to_quat(j.at("q"));
    return t;
}

ordered_json from_vec3(const Vec3& v) { return ordered_json::array({v.x, v.y, v.z}); }

ordered_json from_quat(const Quat& q) {
    return ordered_json::array({q.w, q.x, q.y, q.z});
}

ordered_json from_transform(const Transform& t) {
    ordered_json j;
    j["p"] = from_vec3(t.t);
    j["q"] = from_quat(t.q);
    return j;
}

template <typename T>
void maybe(const json& j, const char* key, T& out) {
    if (j.contains(key)) out = j.at(key).get<T>();
}

HandModel parse_model(const json& j) {
    HandModel m;
    const auto& joints = j.at("joints");
    if (!joints.is_array()) throw std::invalid_argument("joints must be an array");
    m.joints.resize(joints.size());
    m.rest.resize(joints.size());
    for (std::size_t i = 0; i < joints.size(); ++i) {
        const auto& js = joints[i];
        JointSpec spec;
        spec.axis = to_vec3(js.at("axis"));
        const auto& lim = js.at("limits");
        spec.limit_min = lim.at(0).get<double>();
        spec.limit_max = lim.at(1).get<double>();
        spec.parent = js.at("parent").get<int>();
        if (js.contains("name")) spec.name = js.at("name").get<std::string>();
        m.joints[i] = spec;
        m.rest[i] = to_transform(js.at("rest"));
    }
    const auto& fingers = j.at("fingers");
    if (!fingers.is_array() || fingers.size() != 5) {
        throw std::invalid_argument("fingers must list 5 chains");
    }
    for (int f = 0; f < 5; ++f) {
        m.fingers[f] = fingers[f].get<std::vector<int>>();
    }
    const auto& tips = j.at("tips");
    for (int f = 0; f < 5; ++f) m.tips[f] = to_transform(tips.at(f));
    if (j.contains("lambda_f")) {
        const auto& lf = j.at("lambda_f");
        for (int f = 0; f < 5; ++f) m.lambda_f[f] = lf.at(f).get<double>();
    }
    return validate_model(std::move(m));
}

ordered_json dump_model(const HandModel& m) {
    ordered_json j;
    j["joints"] = ordered_json::array();
    for (std::size_t i = 0; i < m.joints.size(); ++i) {
        const JointSpec& s = m.joints[i];
        ordered_json js;
        js["name"] = s.name;
        js["parent"] = s.parent;
        js["axis"] = from_vec3(s.axis);
        js["limits"] = ordered_json::array({s.limit_min, s.limit_max});
        js["rest"] = from_transform(m.rest[i]);
        j["joints"].push_back(js);
    }
    j["fingers"] = m.fingers;
    j["tips"] = ordered_json::array();
    for (const Transform& t : m.tips) j["tips"].push_back(from_transform(t));
    j["lambda_f"] = m.lambda_f;
    return j;
}

ArmModel parse_arm(const json& j) {
    ArmModel a;
    const auto& joints = j.at("joints");
    a.joints.resize(joints.size());
    a.rest.resize(joints.size());
    for (std::size_t i = 0; i < joints.size(); ++i) {
        const auto& js = joints[i];
        JointSpec spec;
        spec.axis = to_vec3(js.at("axis"));
        spec.limit_min = js.at("limits").at(0).get<double>();
        spec.limit_max = js.at("limits").at(1).get<double>();
        spec.parent = js.at("parent").get<int>();
        if (js.contains("name")) spec.name = js.at("name").get<std::string>();
        a.joints[i] = spec;
        a.rest[i] = to_transform(js.at("rest"));
    }
    a.tip = to_transform(j.at("tip"));
    return validate_arm(std::move(a));
}

ordered_json dump_arm(const ArmModel& a) {
    ordered_json j;
    j["joints"] = ordered_json::array();
    for (std::size_t i = 0; i < a.joints.size(); ++i) {
        const JointSpec& s = a.joints[i];
        ordered_json js;
        js["name"] = s.name;
        js["parent"] = s.parent;
        js["axis"] = from_vec3(s.axis);
        js["limits"] = ordered_json::array({s.limit_min, s.limit_max});
        js["rest"] = from_transform(a.rest[i]);
        j["joints"].push_back(js);
    }
    j["tip"] = from_transform(a.tip);
    return j;
}

RetargetConfig parse_retarget(const json& j, RetargetConfig base) {
    maybe(j, "w1", base.w1);
    maybe(j, "w2", base.w2);
    maybe(j, "alpha", base.alpha);
    maybe(j, "d_min", base.d_min);
    maybe(j, "d_max", base.d_max);
    maybe(j, "w_max", base.w_max);
    maybe(j, "tol", base.tol);
    maybe(j, "max_iters", base.max_iters);
    return base;
}

ordered_json dump_retarget(const RetargetConfig& c) {
    ordered_json j;
    j["w1"] = c.w1;
    j["w2"] = c.w2;
    j["alpha"] = c.alpha;
    j["d_min"] = c.d_min;
    j["d_max"] = c.d_max;
    j["w_max"] = c.w_max;
    j["tol"] = c.tol;
    j["max_iters"] = c.max_iters;
    return j;
}

TaxelLayout parse_layout(const json& j) {
    TaxelLayout l;
    const auto& coords = j.at("coords");
    if (!coords.is_array() || coords.size() != kTaxelCount) {
        throw std::invalid_argument("layout must list 32 coordinates");
    }
    for (int i = 0; i < kTaxelCount; ++i) {
        l.coords[i] = {coords[i].at(0).get<double>(), coords[i].at(1).get<double>()};
    }
    l.center = j.at("center").get<int>();
    l.ring7 = j.at("ring7").get<std::vector<int>>();
    l.ring19 = j.at("ring19").get<std::vector<int>>();
    return validate_layout(std::move(l));
}

ordered_json dump_layout(const TaxelLayout& l) {
    ordered_json j;
    j["coords"] = ordered_json::array();
    for (const TaxelCoord& c : l.coords) {
        j["coords"].push_back(ordered_json::array({c.x, c.y}));
    }
    j["center"] = l.center;
    j["ring7"] = l.ring7;
    j["ring19"] = l.ring19;
    return j;
}

}  // namespace

Config default_config() {
    Config c;
    c.model = default_hand_model();
    c.arm = default_arm_model();
    c.arm_retarget.alpha = 0.001;
    c.arm_retarget.max_iters = 200;
    c.tactile.layout = default_taxel_layout();
    c.tactile.sensors = {
        {"leaptac", {7, 6, 0.14, 3.0}},
        {"inspire", {12, 8, 0.38, 5.0}},
        {"xhand", {12, 10, 0.08, 2.0}},
        {"gelsight", {9, 7, 0.05, 2.0}},
    };
    return c;
}

Config load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config " + path);
    json j = json::parse(in, nullptr, false);
    if (j.is_discarded()) throw std::runtime_error("malformed JSON in " + path);

    Config c = default_config();
    if (j.contains("model")) c.model = parse_model(j.at("model"));
    if (j.contains("arm")) c.arm = parse_arm(j.at("arm"));
    if (j.contains("mag")) {
        maybe(j.at("mag"), "magnitude_epsilon_rel", c.mag.magnitude_epsilon_rel);
        maybe(j.at("mag"), "coverage_epsilon_rel", c.mag.coverage_epsilon_rel);
    }
    if (j.contains("retarget")) {
        c.retarget = parse_retarget(j.at("retarget"), c.retarget);
        if (j.at("retarget").contains("arm")) {
            c.arm_retarget = parse_retarget(j.at("retarget").at("arm"), c.arm_retarget);
        }
    }
    if (j.contains("tactile")) {
        const auto& t = j.at("tactile");
        if (t.contains("layout")) c.tactile.layout = parse_layout(t.at("layout"));
        if (t.contains("thresholds")) {
            const auto& th = t.at("thresholds");
            for (int i = 0; i < 3; ++i) c.tactile.thresholds[i] = th.at(i).get<double>();
        }
        maybe(t, "activation_threshold", c.tactile.activation_threshold);
        maybe(t, "mode", c.tactile.mode);
        if (t.contains("sensors")) {
            c.tactile.sensors.clear();
            for (const auto& [name, s] : t.at("sensors").items()) {
                SensorCal cal;
                cal.rows = s.at("rows").get<int>();
                cal.cols = s.at("cols").get<int>();
                cal.floor = s.at("floor").get<double>();
                cal.ceiling = s.at("ceiling").get<double>();
                c.tactile.sensors[name] = cal;
            }
        }
    }
    if (j.contains("scan")) {
        const auto& s = j.at("scan");
        maybe(s, "vcc", c.scan.cfg.vcc);
        maybe(s, "r_ref", c.scan.cfg.r_ref);
        maybe(s, "adc_bits", c.scan.cfg.adc_bits);
        maybe(s, "k", c.scan.k);
    }
    if (j.contains("replay")) {
        const auto& r = j.at("replay");
        maybe(r, "stages", c.replay.stages);
        maybe(r, "glove_rate_hz", c.replay.glove_rate_hz);
        maybe(r, "tracker_rate_hz", c.replay.tracker_rate_hz);
        maybe(r, "wrist_lambda", c.replay.wrist_lambda);
    }
    return c;
}

void save_config(const Config& c, const std::string& path) {
    ordered_json j;
    j["model"] = dump_model(c.model);
    j["arm"] = dump_arm(c.arm);
    j["mag"] = {{"magnitude_epsilon_rel", c.mag.magnitude_epsilon_rel},
                {"coverage_epsilon_rel", c.mag.coverage_epsilon_rel}};
    j["retarget"] = dump_retarget(c.retarget);
    j["retarget"]["arm"] = dump_retarget(c.arm_retarget);
    j["tactile"]["layout"] = dump_layout(c.tactile.layout);
    j["tactile"]["thresholds"] = c.tactile.thresholds;
    j["tactile"]["activation_threshold"] = c.tactile.activation_threshold;
    j["tactile"]["mode"] = c.tactile.mode;
    for (const auto& [name, s] : c.tactile.sensors) {
        j["tactile"]["sensors"][name] = {{"rows", s.rows},
                                         {"cols", s.cols},
                                         {"floor", s.floor},
                                         {"ceiling", s.ceiling}};
    }
    j["scan"] = {{"vcc", c.scan.cfg.vcc},
                 {"r_ref", c.scan.cfg.r_ref},
                 {"adc_bits", c.scan.cfg.adc_bits},
                 {"k", c.scan.k}};
    j["replay"] = {{"stages", c.replay.stages},
                   {"glove_rate_hz", c.replay.glove_rate_hz},
                   {"tracker_rate_hz", c.replay.tracker_rate_hz},
                   {"wrist_lambda", c.replay.wrist_lambda}};

    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write config " + path);
    out << j.dump(2) << "\n";
}

HandModel load_model(const std::string& json_text) {
    json j = json::parse(json_text, nullptr, false);
    if (j.is_discarded()) throw std::invalid_argument("malformed model JSON");
    if (j.contains("model")) return parse_model(j.at("model"));
    return parse_model(j);
}

std::map<int, CalibrationState> load_calibrations(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open calibration file " + path);
    json j = json::parse(in, nullptr, false);
    if (j.is_discarded()) {
        throw std::runtime_error("malformed calibration JSON in " + path);
    }
    std::map<int, CalibrationState> out;
    for (const auto& [key, v] : j.at("joints").items()) {
        CalibrationState s;
        s.ox = v.at("ox").get<double>();
        s.oy = v.at("oy").get<double>();
        s.b0 = v.at("b0").get<double>();
        s.bx_min = v.at("bx_min").get<double>();
        s.bx_max = v.at("bx_max").get<double>();
        s.by_min = v.at("by_min").get<double>();
        s.by_max = v.at("by_max").get<double>();
        out[std::stoi(key)] = s;
    }
    return out;
}

void save_calibrations(const std::map<int, CalibrationState>& calibs,
                       const std::string& path) {
    ordered_json joints;
    for (const auto& [id, s] : calibs) {
        joints[std::to_string(id)] = {
            {"ox", s.ox},         {"oy", s.oy},         {"b0", s.b0},
            {"bx_min", s.bx_min}, {"bx_max", s.bx_max}, {"by_min", s.by_min},
            {"by_max", s.by_max}};
    }
    ordered_json j;
    j["joints"] = joints;
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write calibration file " + path);
    out << j.dump(2) << "\n";
}

}  // namespace tag
