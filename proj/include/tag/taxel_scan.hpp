#pragma once

#include <utility>
#include <vector>

#include "tag/tactile_map.hpp"

// Simulation of the resistive-matrix fingertip readout: two 8-channel
// analog multiplexers select one row and one column at a time, the selected
// taxel forms a voltage divider with a reference resistor, and the sampled
// voltage recovers the taxel resistance via Ohm's law. Applied force is
// modeled as inversely proportional to resistance. Serves as the
// sensing-side oracle for the tactile pipeline; crosstalk through parallel
// resistive paths is intentionally not modeled.

namespace tag {

struct ResistiveMatrix {
    int rows = 0;
    int cols = 0;
    std::vector<double> resistances;  // ohms, row-major, all > 0

    double at(int r, int c) const { return resistances[r * cols + c]; }
};

struct ScanConfig {
    double vcc = 3.3;       // drive voltage, volts
    double r_ref = 10000.0; // divider reference, ohms
    int adc_bits = 12;      // 0 disables quantization
};

inline constexpr int kMuxChannels = 8;

// Row-major visit order covering every (row, col) exactly once.
// Throws std::invalid_argument when a dimension exceeds the multiplexer
// channel count.
std::vector<std::pair<int, int>> scan_schedule(int rows, int cols);

// v = vcc * r_ref / (r + r_ref), then quantized to adc_bits over [0, vcc]
// (step vcc / (2^bits - 1)) when adc_bits > 0.
double divider_voltage(double r, const ScanConfig& cfg);

// r = r_ref * (vcc - v) / v. Throws std::runtime_error "saturated reading"
// for v <= 0 or v >= vcc.
double recover_resistance(double v, const ScanConfig& cfg);

// f = k / r for the material constant k (ohm-newtons).
double pressure_from_resistance(double r, double k);

struct ScanResult {
    SensorGrid grid;              // forces, newtons
    std::vector<bool> saturated;  // per cell, row-major
};

// Full matrix sweep through the divider model; saturated readings are
// clamped one ADC step inside the rails and flagged.
ScanResult full_scan(const ResistiveMatrix& matrix, const ScanConfig& cfg,
                     double k,
                     kernels::Backend backend = kernels::active_backend());

}  // namespace tag
