#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <set>
#include <stdexcept>

#include "tag/tactile_map.hpp"
#include "tag/taxel_scan.hpp"

using namespace tag;

namespace {

ScanConfig no_quant() {
    ScanConfig c;
    c.adc_bits = 0;
    return c;
}

double rand_in(std::mt19937_64& rng, double lo, double hi) {
    return lo + (hi - lo) * (static_cast<double>(rng() >> 11) * 0x1p-53);
}

}  // namespace

TEST_SUITE_BEGIN("taxel_scan");

TEST_CASE("scan schedule covers every pair exactly once, row-major") {
    const auto order = scan_schedule(7, 6);
    REQUIRE(order.size() == 42);
    std::set<std::pair<int, int>> seen(order.begin(), order.end());
    CHECK(seen.size() == 42);
    // Row-major: flattened index is strictly increasing.
    for (std::size_t i = 1; i < order.size(); ++i) {
        CHECK(order[i].first * 6 + order[i].second >
              order[i - 1].first * 6 + order[i - 1].second);
    }

    const auto single = scan_schedule(1, 1);
    REQUIRE(single.size() == 1);
    CHECK(single[0] == std::pair<int, int>{0, 0});

    CHECK_THROWS_WITH_AS(scan_schedule(9, 6), "exceeds multiplexer channels",
                         std::invalid_argument);
    CHECK_THROWS_WITH_AS(scan_schedule(6, 9), "exceeds multiplexer channels",
                         std::invalid_argument);
    CHECK_THROWS_AS(scan_schedule(0, 3), std::invalid_argument);
}

TEST_CASE("divider voltage: equal divider and the high-resistance limit") {
    const ScanConfig cfg = no_quant();
    CHECK(divider_voltage(cfg.r_ref, cfg) == doctest::Approx(cfg.vcc / 2).epsilon(1e-15));
    const double v = divider_voltage(1e12 * cfg.r_ref, cfg);
    ScanConfig q;  // default 12-bit
    const double step = q.vcc / 4095.0;
    CHECK(v < step);
    CHECK(divider_voltage(1e12 * q.r_ref, q) == 0.0);  // quantizes to the rail
    CHECK_THROWS_AS(divider_voltage(-5.0, cfg), std::invalid_argument);
}

TEST_CASE("divider voltage is strictly decreasing in resistance") {
    const ScanConfig cfg = no_quant();
    double prev = divider_voltage(1.0, cfg);
    for (double r = 10.0; r < 1e8; r *= 3.7) {
        const double v = divider_voltage(r, cfg);
        CHECK(v < prev);
        prev = v;
    }
}

TEST_CASE("recover resistance: algebraic spot values and saturation") {
    const ScanConfig cfg = no_quant();
    CHECK(recover_resistance(cfg.vcc / 2, cfg) ==
          doctest::Approx(cfg.r_ref).epsilon(1e-12));
    CHECK(recover_resistance(cfg.vcc / 3, cfg) ==
          doctest::Approx(2 * cfg.r_ref).epsilon(1e-12));
    CHECK_THROWS_WITH_AS(recover_resistance(0.0, cfg), "saturated reading",
                         std::runtime_error);
    CHECK_THROWS_WITH_AS(recover_resistance(cfg.vcc, cfg), "saturated reading",
                         std::runtime_error);
    CHECK_THROWS_AS(recover_resistance(-0.1, cfg), std::runtime_error);
}

TEST_CASE("noiseless divider round trip: relative error under 1e-9") {
    const ScanConfig cfg = no_quant();
    std::mt19937_64 rng(3);
    for (int i = 0; i < 5000; ++i) {
        const double r = std::exp(rand_in(rng, std::log(10.0), std::log(1e7)));
        const double back = recover_resistance(divider_voltage(r, cfg), cfg);
        CHECK(std::abs(back - r) / r <= 1e-9);
    }
}

TEST_CASE("pressure from resistance: inverse proportionality") {
    CHECK(pressure_from_resistance(7000.0, 7000.0) == 1.0);
    CHECK(pressure_from_resistance(14000.0, 7000.0) == 0.5);
    CHECK_THROWS_AS(pressure_from_resistance(0.0, 7000.0), std::invalid_argument);
    CHECK_THROWS_AS(pressure_from_resistance(100.0, -1.0), std::invalid_argument);
}

TEST_CASE("full scan: uniform matrix gives a uniform force map") {
    const ScanConfig cfg = no_quant();
    ResistiveMatrix m{7, 6, std::vector<double>(42, cfg.r_ref)};
    const auto result = full_scan(m, cfg, cfg.r_ref);
    REQUIRE(result.grid.values.size() == 42);
    for (double f : result.grid.values) {
        CHECK(f == doctest::Approx(1.0).epsilon(1e-12));
    }
    for (bool s : result.saturated) CHECK(!s);
}

TEST_CASE("full scan: single low-resistance taxel stands out") {
    ScanConfig cfg;  // 12-bit
    const double k = 7000.0;
    ResistiveMatrix m{7, 6, std::vector<double>(42, 50.0 * cfg.r_ref)};
    m.resistances[17] = cfg.r_ref / 10.0;
    const auto result = full_scan(m, cfg, k);
    const double peak = result.grid.values[17];
    for (std::size_t i = 0; i < result.grid.values.size(); ++i) {
        if (i != 17) CHECK(result.grid.values[i] < peak / 100.0);
    }
}

TEST_CASE("plant-and-recover within the analytic quantization bound") {
    ScanConfig cfg;  // 12-bit default
    const double k = 7000.0;
    const double step = cfg.vcc / 4095.0;
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 50; ++trial) {
        ResistiveMatrix m{7, 6, std::vector<double>(42)};
        for (double& r : m.resistances) {
            r = std::exp(rand_in(rng, std::log(cfg.r_ref / 20.0),
                                 std::log(cfg.r_ref * 20.0)));
        }
        const auto result = full_scan(m, cfg, k);
        for (int i = 0; i < 42; ++i) {
            CHECK(!result.saturated[i]);
            const double truth = k / m.resistances[i];
            // Two quantization steps of slack in the voltage domain, mapped
            // through the divider inversion at the quantized operating point.
            const double v = divider_voltage(m.resistances[i], cfg);
            const double f_lo = k / recover_resistance(v - step, cfg);
            const double f_hi = k / recover_resistance(v + step, cfg);
            const double bound =
                std::max(std::abs(f_hi - truth), std::abs(truth - f_lo));
            CHECK(std::abs(result.grid.values[i] - truth) <= bound);
        }
    }
}

TEST_CASE("saturated cells are flagged and clamped") {
    ScanConfig cfg;  // 12-bit
    ResistiveMatrix m{2, 2, {cfg.r_ref, 1e12 * cfg.r_ref, cfg.r_ref, cfg.r_ref}};
    const auto result = full_scan(m, cfg, 7000.0);
    CHECK(result.saturated[1]);
    CHECK(!result.saturated[0]);
    CHECK(result.grid.values[1] > 0.0);  // clamped, near the floor
    CHECK(result.grid.values[1] < result.grid.values[0] / 1000.0);
}

TEST_CASE("scan output feeds shape mapping with correct locality") {
    ScanConfig cfg;
    const double k = 7000.0;
    // One pressed taxel at matrix position (2, 3) on the 7x6 fingertip.
    ResistiveMatrix m{7, 6, std::vector<double>(42, 40.0 * cfg.r_ref)};
    m.resistances[2 * 6 + 3] = cfg.r_ref / 5.0;
    const auto scanned = full_scan(m, cfg, k);
    const auto norm = normalize_grid(scanned.grid, 0.0, k / (cfg.r_ref / 5.0));
    const TaxelLayout layout = default_taxel_layout();
    // Taxels sit off the hot node, so the bilinear tent tops out well below
    // 1 at the nearest taxel; 0.2 catches the local peak only.
    const auto pattern = shape_map(norm, layout, 0.2);

    const double px = (3 + 0.5) / 6.0, py = (2 + 0.5) / 7.0;
    int active = 0;
    for (int t = 0; t < kTaxelCount; ++t) {
        if (pattern.states[t] == TaxelState::protrude) {
            ++active;
            const double dx = layout.coords[t].x - px;
            const double dy = layout.coords[t].y - py;
            CHECK(std::sqrt(dx * dx + dy * dy) <= 0.25);
        }
    }
    CHECK(active >= 1);
}

TEST_CASE("full scan validates matrix contents") {
    ScanConfig cfg;
    ResistiveMatrix bad{2, 2, {1.0, -2.0, 3.0, 4.0}};
    CHECK_THROWS_AS(full_scan(bad, cfg, 7000.0), std::invalid_argument);
    ResistiveMatrix wrong{2, 2, {1.0, 2.0, 3.0}};
    CHECK_THROWS_AS(full_scan(wrong, cfg, 7000.0), std::invalid_argument);
}

TEST_SUITE_END();
