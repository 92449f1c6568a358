#pragma once

#include <map>
#include <string>

#include "tag/hand_model.hpp"
#include "tag/mag_encoder.hpp"
#include "tag/retarget.hpp"
#include "tag/tactile_map.hpp"
#include "tag/taxel_scan.hpp"

// One structured document drives the whole pipeline, with sections
// model, arm, mag, retarget, tactile, scan and replay. Any section or field
// missing from a loaded file keeps its default.

namespace tag {

struct SensorCal {
    int rows = 0;
    int cols = 0;
    double floor = 0.0;    // raw units mapped to 0
    double ceiling = 1.0;  // raw units mapped to 1
};

struct TactileConfig {
    TaxelLayout layout;
    std::array<double, 3> thresholds{0.1, 0.35, 0.7};
    double activation_threshold = 0.15;
    std::string mode = "shape";  // "shape" or "pressure"
    std::map<std::string, SensorCal> sensors;
};

struct ScanSection {
    ScanConfig cfg;
    double k = 7000.0;  // ohm-newtons; 0.14 N maps to 50 kOhm
};

struct ReplaySection {
    std::vector<std::string> stages{"decode", "fk", "retarget", "map", "encode"};
    double glove_rate_hz = 260.0;
    double tracker_rate_hz = 250.0;
    double wrist_lambda = 1.0;
};

struct Config {
    HandModel model;
    ArmModel arm;
    MagParams mag;
    RetargetConfig retarget;      // hand solve
    RetargetConfig arm_retarget;  // arm IK (alpha/w2 tuned separately)
    TactileConfig tactile;
    ScanSection scan;
    ReplaySection replay;
};

Config default_config();

// Parses a JSON config file over the defaults. Throws std::runtime_error /
// std::invalid_argument with a descriptive message on malformed content.
Config load_config(const std::string& path);

void save_config(const Config& cfg, const std::string& path);

// Model document loader (the "model" section schema as a standalone file or
// embedded object); validates every model invariant.
HandModel load_model(const std::string& json_text);

// Calibration states keyed by joint id, persisted as a JSON document.
std::map<int, CalibrationState> load_calibrations(const std::string& path);
void save_calibrations(const std::map<int, CalibrationState>& calibs,
                       const std::string& path);

}  // namespace tag
