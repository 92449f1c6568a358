#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "tag/kernels.hpp"

// Robot-side tactile grids rendered onto the 32-taxel fingertip array.
// Shape mode preserves spatial topology: each taxel samples the normalized
// grid at its mapped coordinate via bilinear interpolation. Pressure mode
// renders force magnitude as area: the peak pressure selects one of three
// nested rings (1, 7, or 19 taxels) to protrude.

namespace tag {

struct SensorGrid {
    int rows = 0;
    int cols = 0;
    std::vector<double> values;  // row-major
    std::string meta;            // sensor identity, e.g. "leaptac"

    double at(int r, int c) const { return values[r * cols + c]; }
};

// Throws std::invalid_argument on dimension/value problems.
void validate_grid(const SensorGrid& grid);

enum class TaxelState : std::int8_t { retract = -1, neutral = 0, protrude = 1 };

inline constexpr int kTaxelCount = 32;

struct TaxelPattern {
    std::array<TaxelState, kTaxelCount> states{};
};

struct TaxelCoord {
    double x = 0.0;  // unit square, x across columns
    double y = 0.0;  // y across rows, row 0 at the bottom
};

struct TaxelLayout {
    std::array<TaxelCoord, kTaxelCount> coords;
    int center = 0;           // the single-taxel ring
    std::vector<int> ring7;   // 7 indices including center
    std::vector<int> ring19;  // 19 indices including ring7
};

// Checks coordinate distinctness, central symmetry about (0.5, 0.5), and
// ring sizes/nesting; throws std::invalid_argument otherwise.
TaxelLayout validate_layout(TaxelLayout layout);

// Six staggered rows (5-6-5-5-6-5 bottom to top) on a centrally symmetric
// hexagonal-like packing; rings grown from the taxel nearest the centroid by
// ascending distance (ties broken by index).
TaxelLayout default_taxel_layout();

// Clamp to [floor, ceiling] then map affinely onto [0, 1].
SensorGrid normalize_grid(const SensorGrid& grid, double floor, double ceiling,
                          kernels::Backend backend = kernels::active_backend());

// Bilinear samples of a normalized grid at every taxel coordinate. Cell
// centers sit at half-cell insets, so a taxel coincident with a grid node
// reproduces that node's value exactly.
std::array<double, kTaxelCount> sample_intensities(
    const SensorGrid& grid, const TaxelLayout& layout,
    kernels::Backend backend = kernels::active_backend());

// Shape mode: protrude where the sampled intensity reaches the activation
// threshold; retraction is never commanded by the mapping modes.
TaxelPattern shape_map(const SensorGrid& grid, const TaxelLayout& layout,
                       double activation_threshold,
                       kernels::Backend backend = kernels::active_backend());

double peak_pressure(const SensorGrid& grid,
                     kernels::Backend backend = kernels::active_backend());

// Pressure mode: the largest ring whose threshold is met (>=) protrudes.
// Requires exactly three strictly ascending thresholds in (0, 1].
TaxelPattern pressure_map(double p_max, const std::array<double, 3>& thresholds,
                          const TaxelLayout& layout);

}  // namespace tag
