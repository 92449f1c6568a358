#include "tag/taxel_scan.hpp"

#include <cmath>
#include <stdexcept>

namespace tag {

std::vector<std::pair<int, int>> scan_schedule(int rows, int cols) {
    if (rows < 1 || cols < 1) {
        throw std::invalid_argument("scan dimensions must be >= 1");
    }
    if (rows > kMuxChannels || cols > kMuxChannels) {
        throw std::invalid_argument("exceeds multiplexer channels");
    }
    std::vector<std::pair<int, int>> order;
    order.reserve(static_cast<std::size_t>(rows) * cols);
    for (int r = 0; r < rows; ++r) {
        for (int c = 0; c < cols; ++c) order.emplace_back(r, c);
    }
    return order;
}

namespace {

double quantize(double v, const ScanConfig& cfg) {
    if (cfg.adc_bits <= 0) return v;
    const double step = cfg.vcc / static_cast<double>((1 << cfg.adc_bits) - 1);
    return std::round(v / step) * step;
}

}  // namespace

double divider_voltage(double r, const ScanConfig& cfg) {
    if (!(r > 0.0)) throw std::invalid_argument("resistance must be positive");
    return quantize(cfg.vcc * cfg.r_ref / (r + cfg.r_ref), cfg);
}

double recover_resistance(double v, const ScanConfig& cfg) {
    if (v <= 0.0 || v >= cfg.vcc) throw std::runtime_error("saturated reading");
    return cfg.r_ref * (cfg.vcc - v) / v;
}

double pressure_from_resistance(double r, double k) {
    if (!(r > 0.0)) throw std::invalid_argument("resistance must be positive");
    if (!(k > 0.0)) throw std::invalid_argument("k must be positive");
    return k / r;
}

ScanResult full_scan(const ResistiveMatrix& matrix, const ScanConfig& cfg,
                     double k, kernels::Backend backend) {
    const auto schedule = scan_schedule(matrix.rows, matrix.cols);
    if (matrix.resistances.size() !=
        static_cast<std::size_t>(matrix.rows) * matrix.cols) {
        throw std::invalid_argument("resistance count does not match dimensions");
    }
    for (double r : matrix.resistances) {
        if (!(r > 0.0) || !std::isfinite(r)) {
            throw std::invalid_argument("resistances must be positive and finite");
        }
    }

    const std::size_t n = schedule.size();
    std::vector<double> r_in(n), volts(n);
    for (std::size_t i = 0; i < n; ++i) {
        r_in[i] = matrix.at(schedule[i].first, schedule[i].second);
    }
    kernels::divider_voltages(r_in.data(), n, cfg.vcc, cfg.r_ref, volts.data(),
                              backend);

    ScanResult out;
    out.grid.rows = matrix.rows;
    out.grid.cols = matrix.cols;
    out.grid.meta = "scan";
    out.grid.values.assign(n, 0.0);
    out.saturated.assign(n, false);

    const double step = cfg.adc_bits > 0
                            ? cfg.vcc / static_cast<double>((1 << cfg.adc_bits) - 1)
                            : 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double v = quantize(volts[i], cfg);
        bool sat = false;
        if (v <= 0.0) {
            v = step > 0.0 ? step : cfg.vcc * 1e-12;
            sat = true;
        } else if (v >= cfg.vcc) {
            v = step > 0.0 ? cfg.vcc - step : cfg.vcc * (1.0 - 1e-12);
            sat = true;
        }
        const double r = recover_resistance(v, cfg);
        const std::size_t cell = static_cast<std::size_t>(schedule[i].first) *
                                     matrix.cols + schedule[i].second;
        out.grid.values[cell] = pressure_from_resistance(r, k);
        out.saturated[cell] = sat;
    }
    return out;
}

}  // namespace tag
