#include <algorithm>
#include <cmath>
#include <limits>

#include "kernels_internal.hpp"

namespace tag::kernels::detail {

namespace {

void decode_angles_scalar(const double* bx, const double* by, std::size_t n,
                          double ox, double oy, double* theta, double* r2) {
    for (std::size_t i = 0; i < n; ++i) {
        const double dx = bx[i] - ox;
        const double dy = by[i] - oy;
        theta[i] = std::atan2(dy, dx);
        if (r2) r2[i] = dx * dx + dy * dy;
    }
}

void bilinear_sample_scalar(const double* grid, int rows, int cols,
                            const double* u, const double* v, double* out,
                            std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) {
        double c0f = std::floor(u[i]);
        double r0f = std::floor(v[i]);
        int c0 = static_cast<int>(c0f);
        int r0 = static_cast<int>(r0f);
        // Coordinates on the far edge still need a valid cell; keep lookups
        // in bounds on both ends even for out-of-contract inputs.
        if (c0 > cols - 2) { c0 = cols > 1 ? cols - 2 : 0; c0f = c0; }
        if (r0 > rows - 2) { r0 = rows > 1 ? rows - 2 : 0; r0f = r0; }
        if (c0 < 0) { c0 = 0; c0f = 0.0; }
        if (r0 < 0) { r0 = 0; r0f = 0.0; }
        const double fu = u[i] - c0f;
        const double fv = v[i] - r0f;
        const int c1 = cols > 1 ? c0 + 1 : c0;
        const int r1 = rows > 1 ? r0 + 1 : r0;
        const double g00 = grid[r0 * cols + c0];
        const double g01 = grid[r0 * cols + c1];
        const double g10 = grid[r1 * cols + c0];
        const double g11 = grid[r1 * cols + c1];
        const double top = g00 + fu * (g01 - g00);
        const double bot = g10 + fu * (g11 - g10);
        out[i] = top + fv * (bot - top);
    }
}

Moments moments_scalar(const double* x, std::size_t n) {
    Moments m;
    m.n = n;
    if (n == 0) return m;
    m.min = m.max = x[0];
    for (std::size_t i = 0; i < n; ++i) {
        const double v = x[i];
        m.sum += v;
        m.sum_sq += v * v;
        m.min = std::min(m.min, v);
        m.max = std::max(m.max, v);
    }
    return m;
}

double centered_sum_sq_scalar(const double* x, std::size_t n, double mu) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double d = x[i] - mu;
        s += d * d;
    }
    return s;
}

void divider_voltages_scalar(const double* r, std::size_t n, double vcc,
                             double r_ref, double* v) {
    const double num = vcc * r_ref;
    for (std::size_t i = 0; i < n; ++i) v[i] = num / (r[i] + r_ref);
}

void normalize_affine_scalar(const double* x, std::size_t n, double lo,
                             double hi, double* out) {
    const double inv = 1.0 / (hi - lo);
    for (std::size_t i = 0; i < n; ++i) {
        out[i] = std::clamp((x[i] - lo) * inv, 0.0, 1.0);
    }
}

}  // namespace

const KernelTable& scalar_table() {
    static const KernelTable t{
        decode_angles_scalar, bilinear_sample_scalar, moments_scalar,
        centered_sum_sq_scalar, divider_voltages_scalar,
        normalize_affine_scalar,
    };
    return t;
}

}  // namespace tag::kernels::detail
