#include "tag/tactile_map.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace tag {

namespace {

constexpr double kCoordTol = 1e-9;

void require(bool ok, const char* msg) {
    if (!ok) throw std::invalid_argument(msg);
}

}  // namespace

void validate_grid(const SensorGrid& grid) {
    require(grid.rows >= 1 && grid.cols >= 1, "grid dimensions must be >= 1");
    require(grid.values.size() ==
                static_cast<std::size_t>(grid.rows) * grid.cols,
            "grid value count does not match dimensions");
    for (double v : grid.values) {
        require(std::isfinite(v), "grid values must be finite");
    }
}

TaxelLayout validate_layout(TaxelLayout layout) {
    for (int i = 0; i < kTaxelCount; ++i) {
        const TaxelCoord& a = layout.coords[i];
        require(a.x >= 0.0 && a.x <= 1.0 && a.y >= 0.0 && a.y <= 1.0,
                "taxel coordinates must lie in the unit square");
        for (int j = i + 1; j < kTaxelCount; ++j) {
            const TaxelCoord& b = layout.coords[j];
            require(std::abs(a.x - b.x) > kCoordTol ||
                        std::abs(a.y - b.y) > kCoordTol,
                    "taxel coordinates must be distinct");
        }
    }
    // Central symmetry: every taxel has a mirror about (0.5, 0.5).
    for (int i = 0; i < kTaxelCount; ++i) {
        const double mx = 1.0 - layout.coords[i].x;
        const double my = 1.0 - layout.coords[i].y;
        bool found = false;
        for (int j = 0; j < kTaxelCount && !found; ++j) {
            found = std::abs(layout.coords[j].x - mx) < kCoordTol &&
                    std::abs(layout.coords[j].y - my) < kCoordTol;
        }
        require(found, "layout is not centrally symmetric");
    }

    require(layout.center >= 0 && layout.center < kTaxelCount,
            "center index out of range");
    require(layout.ring7.size() == 7, "ring7 must contain 7 indices");
    require(layout.ring19.size() == 19, "ring19 must contain 19 indices");
    auto contains = [](const std::vector<int>& v, int x) {
        return std::find(v.begin(), v.end(), x) != v.end();
    };
    auto in_range_distinct = [&](const std::vector<int>& v) {
        for (std::size_t i = 0; i < v.size(); ++i) {
            require(v[i] >= 0 && v[i] < kTaxelCount, "ring index out of range");
            for (std::size_t j = i + 1; j < v.size(); ++j) {
                require(v[i] != v[j], "ring indices must be distinct");
            }
        }
    };
    in_range_distinct(layout.ring7);
    in_range_distinct(layout.ring19);
    require(contains(layout.ring7, layout.center), "ring7 must contain center");
    for (int i : layout.ring7) {
        require(contains(layout.ring19, i), "ring19 must contain ring7");
    }
    return layout;
}

TaxelLayout default_taxel_layout() {
    TaxelLayout l;
    const int counts[6] = {5, 6, 5, 5, 6, 5};
    int idx = 0;
    for (int r = 0; r < 6; ++r) {
        const double y = (2.0 * r + 1.0) / 12.0;
        for (int c = 0; c < counts[r]; ++c) {
            const double x = (2.0 * c + 1.0) / (2.0 * counts[r]);
            l.coords[idx++] = {x, y};
        }
    }

    // Ring seeds: the taxel nearest the centroid, then ascending distance.
    auto dist2 = [&](int i, double px, double py) {
        const double dx = l.coords[i].x - px;
        const double dy = l.coords[i].y - py;
        return dx * dx + dy * dy;
    };
    int center = 0;
    for (int i = 1; i < kTaxelCount; ++i) {
        if (dist2(i, 0.5, 0.5) < dist2(center, 0.5, 0.5) - kCoordTol) center = i;
    }
    std::array<int, kTaxelCount> order;
    std::iota(order.begin(), order.end(), 0);
    const double cx = l.coords[center].x, cy = l.coords[center].y;
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
        const double da = dist2(a, cx, cy), db = dist2(b, cx, cy);
        if (std::abs(da - db) > kCoordTol) return da < db;
        return a < b;
    });
    l.center = center;
    l.ring7.assign(order.begin(), order.begin() + 7);
    l.ring19.assign(order.begin(), order.begin() + 19);
    return validate_layout(std::move(l));
}

SensorGrid normalize_grid(const SensorGrid& grid, double floor, double ceiling,
                          kernels::Backend backend) {
    validate_grid(grid);
    if (!(ceiling > floor)) {
        throw std::invalid_argument("ceiling must exceed floor");
    }
    SensorGrid out = grid;
    kernels::normalize_affine(grid.values.data(), grid.values.size(), floor,
                              ceiling, out.values.data(), backend);
    return out;
}

std::array<double, kTaxelCount> sample_intensities(const SensorGrid& grid,
                                                   const TaxelLayout& layout,
                                                   kernels::Backend backend) {
    validate_grid(grid);
    for (double v : grid.values) {
        if (v < -1e-12 || v > 1.0 + 1e-12) {
            throw std::invalid_argument("grid is not normalized to [0, 1]");
        }
    }
    // Map unit-square coordinates onto the cell-center extent: centers sit
    // at ((c + 0.5)/cols, (r + 0.5)/rows).
    std::array<double, kTaxelCount> u, v, out;
    const double cmax = static_cast<double>(grid.cols - 1);
    const double rmax = static_cast<double>(grid.rows - 1);
    for (int k = 0; k < kTaxelCount; ++k) {
        u[k] = std::clamp(layout.coords[k].x * grid.cols - 0.5, 0.0, cmax);
        v[k] = std::clamp(layout.coords[k].y * grid.rows - 0.5, 0.0, rmax);
    }
    kernels::bilinear_sample(grid.values.data(), grid.rows, grid.cols, u.data(),
                             v.data(), out.data(), kTaxelCount, backend);
    return out;
}

TaxelPattern shape_map(const SensorGrid& grid, const TaxelLayout& layout,
                       double activation_threshold, kernels::Backend backend) {
    const auto intensity = sample_intensities(grid, layout, backend);
    TaxelPattern p;
    for (int k = 0; k < kTaxelCount; ++k) {
        p.states[k] = intensity[k] >= activation_threshold
                          ? TaxelState::protrude
                          : TaxelState::neutral;
    }
    return p;
}

double peak_pressure(const SensorGrid& grid, kernels::Backend backend) {
    validate_grid(grid);
    return kernels::moments(grid.values.data(), grid.values.size(), backend).max;
}

TaxelPattern pressure_map(double p_max, const std::array<double, 3>& thresholds,
                          const TaxelLayout& layout) {
    for (int i = 0; i < 3; ++i) {
        require(thresholds[i] > 0.0 && thresholds[i] <= 1.0,
                "thresholds must lie in (0, 1]");
        if (i > 0) {
            require(thresholds[i] > thresholds[i - 1],
                    "thresholds must be strictly ascending");
        }
    }
    TaxelPattern p;
    const std::vector<int>* active = nullptr;
    static const std::vector<int> empty;
    std::vector<int> center_only{layout.center};
    if (p_max >= thresholds[2]) {
        active = &layout.ring19;
    } else if (p_max >= thresholds[1]) {
        active = &layout.ring7;
    } else if (p_max >= thresholds[0]) {
        active = &center_only;
    } else {
        active = &empty;
    }
    for (int k : *active) p.states[k] = TaxelState::protrude;
    return p;
}

}  // namespace tag
