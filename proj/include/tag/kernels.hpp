#pragma once

#include <cstddef>
#include <string>

// Batch arithmetic kernels for the hot paths of the signal chain: offset
// correction + atan2 angle decode, bilinear grid sampling, moment
// reductions, and voltage-divider evaluation.
//
// Every kernel exists as a scalar reference implementation and, on x86-64
// with AVX2+FMA, a vectorized variant. The scalar path defines the
// semantics; vector variants are equivalence-tested against it. Dispatch is
// resolved once at startup from CPUID and may be overridden with the
// TAG_KERNEL_BACKEND environment variable ("scalar" or "avx2").

namespace tag::kernels {

enum class Backend { scalar, avx2 };

const char* backend_name(Backend b);
bool backend_available(Backend b);

// Active backend: best available unless overridden by TAG_KERNEL_BACKEND.
Backend active_backend();

// Human-readable capability summary, e.g. "avx2 fma (active: avx2)".
std::string capability_string();

// theta[i] = atan2(by[i] - oy, bx[i] - ox).
// If r2 is non-null, r2[i] receives the squared magnitude of the
// offset-corrected field vector. Inputs must be finite.
void decode_angles(const double* bx, const double* by, std::size_t n,
                   double ox, double oy, double* theta, double* r2,
                   Backend backend);

// Bilinear sample of a row-major rows x cols grid at continuous coordinates
// (u[i], v[i]), u along columns in [0, cols-1], v along rows in [0, rows-1].
// Coordinates must already be clamped to that extent.
void bilinear_sample(const double* grid, int rows, int cols,
                     const double* u, const double* v, double* out,
                     std::size_t n, Backend backend);

struct Moments {
    double sum = 0.0;
    double sum_sq = 0.0;
    double min = 0.0;
    double max = 0.0;
    std::size_t n = 0;

    double mean() const { return n ? sum / static_cast<double>(n) : 0.0; }
    double max_abs() const { return min < -max ? -min : max < 0 ? -min : max; }
};

Moments moments(const double* x, std::size_t n, Backend backend);

// Sum of (x[i] - mu)^2; second pass of the two-pass variance.
double centered_sum_sq(const double* x, std::size_t n, double mu,
                       Backend backend);

// v[i] = vcc * r_ref / (r[i] + r_ref).
void divider_voltages(const double* r, std::size_t n, double vcc,
                      double r_ref, double* v, Backend backend);

// out[i] = clamp((x[i] - lo) / (hi - lo), 0, 1). Requires hi > lo.
void normalize_affine(const double* x, std::size_t n, double lo, double hi,
                      double* out, Backend backend);

}  // namespace tag::kernels
