#include <cmath>
#include <cstdint>
#include <immintrin.h>

#include "kernels_internal.hpp"

// AVX2+FMA variants. Semantics are defined by the scalar reference table;
// tests/unit/test_kernels.cpp holds the equivalence suite.

namespace tag::kernels::detail {

namespace {

constexpr double kTanPi8 = 0.41421356237309504880;  // tan(pi/8)
constexpr double kPiD = 3.14159265358979323846;
constexpr double kHalfPi = 1.57079632679489661923;
constexpr double kQuarterPi = 0.78539816339744830962;

// Minimax fit of atan(u)/u in powers of u^2 on |u| <= tan(pi/8),
// max approximation error 4.7e-20; evaluation rounding dominates.
constexpr double kAtanCoeff[13] = {
    1.00000000000000000000e+00,  -3.33333333333333259318e-01,
    1.99999999999970146103e-01,  -1.42857142853297092167e-01,
    1.11111110853221090045e-01,  -9.09090805903119136833e-02,
    7.69228109993774361586e-02,  -6.66620525997652646488e-02,
    5.87683400461416066696e-02,  -5.21731257406159096290e-02,
    4.49950072898403219401e-02,  -3.33878245012119503898e-02,
    1.51137650966009246672e-02,
};

inline __m256d abs_pd(__m256d x) {
    const __m256d mask = _mm256_castsi256_pd(_mm256_set1_epi64x(0x7fffffffffffffffLL));
    return _mm256_and_pd(x, mask);
}

inline __m256d signbit_pd(__m256d x) {
    const __m256d mask = _mm256_castsi256_pd(_mm256_set1_epi64x(0x8000000000000000ULL));
    return _mm256_and_pd(x, mask);
}

// All-ones lanes where the sign bit of x is set (true for -0.0, unlike x < 0).
inline __m256d signbit_mask(__m256d x) {
    const __m256i sbit = _mm256_set1_epi64x(0x8000000000000000ULL);
    const __m256i bits = _mm256_castpd_si256(signbit_pd(x));
    return _mm256_castsi256_pd(_mm256_cmpeq_epi64(bits, sbit));
}

// Four-quadrant arctangent, one 4-lane vector at a time.
inline __m256d atan2_pd(__m256d y, __m256d x) {
    const __m256d ax = abs_pd(x);
    const __m256d ay = abs_pd(y);
    const __m256d den = _mm256_max_pd(ax, ay);
    const __m256d num = _mm256_min_pd(ax, ay);

    __m256d t = _mm256_div_pd(num, den);
    // den == 0 means both inputs are (signed) zero; pin the ratio to 0.
    const __m256d zero = _mm256_setzero_pd();
    const __m256d den_zero = _mm256_cmp_pd(den, zero, _CMP_EQ_OQ);
    t = _mm256_blendv_pd(t, zero, den_zero);

    // Second reduction onto |u| <= tan(pi/8): atan(t) = pi/4 + atan((t-1)/(t+1)).
    const __m256d one = _mm256_set1_pd(1.0);
    const __m256d reduce = _mm256_cmp_pd(t, _mm256_set1_pd(kTanPi8), _CMP_GT_OQ);
    const __m256d u_red = _mm256_div_pd(_mm256_sub_pd(t, one), _mm256_add_pd(t, one));
    const __m256d u = _mm256_blendv_pd(t, u_red, reduce);

    const __m256d s = _mm256_mul_pd(u, u);
    __m256d p = _mm256_set1_pd(kAtanCoeff[12]);
    for (int i = 11; i >= 0; --i) {
        p = _mm256_fmadd_pd(p, s, _mm256_set1_pd(kAtanCoeff[i]));
    }
    __m256d z = _mm256_mul_pd(u, p);
    z = _mm256_add_pd(z, _mm256_and_pd(reduce, _mm256_set1_pd(kQuarterPi)));

    // Undo the min/max swap, then the x-axis reflection; z stays >= 0.
    const __m256d swapped = _mm256_cmp_pd(ay, ax, _CMP_GT_OQ);
    z = _mm256_blendv_pd(z, _mm256_sub_pd(_mm256_set1_pd(kHalfPi), z), swapped);
    const __m256d x_neg = signbit_mask(x);
    z = _mm256_blendv_pd(z, _mm256_sub_pd(_mm256_set1_pd(kPiD), z), x_neg);

    return _mm256_or_pd(z, signbit_pd(y));
}

void decode_angles_avx2(const double* bx, const double* by, std::size_t n,
                        double ox, double oy, double* theta, double* r2) {
    const __m256d vox = _mm256_set1_pd(ox);
    const __m256d voy = _mm256_set1_pd(oy);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d dx = _mm256_sub_pd(_mm256_loadu_pd(bx + i), vox);
        const __m256d dy = _mm256_sub_pd(_mm256_loadu_pd(by + i), voy);
        _mm256_storeu_pd(theta + i, atan2_pd(dy, dx));
        if (r2) {
            const __m256d m = _mm256_fmadd_pd(dx, dx, _mm256_mul_pd(dy, dy));
            _mm256_storeu_pd(r2 + i, m);
        }
    }
    for (; i < n; ++i) {
        const double dx = bx[i] - ox;
        const double dy = by[i] - oy;
        theta[i] = std::atan2(dy, dx);
        if (r2) r2[i] = dx * dx + dy * dy;
    }
}

void bilinear_sample_avx2(const double* grid, int rows, int cols,
                          const double* u, const double* v, double* out,
                          std::size_t n) {
    const int cstep = cols > 1 ? 1 : 0;
    const int rstep = rows > 1 ? cols : 0;
    const __m256d c_hi = _mm256_set1_pd(static_cast<double>(cols > 1 ? cols - 2 : 0));
    const __m256d r_hi = _mm256_set1_pd(static_cast<double>(rows > 1 ? rows - 2 : 0));
    const __m256d zero = _mm256_setzero_pd();
    const __m128i vcols = _mm_set1_epi32(cols);

    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d uu = _mm256_loadu_pd(u + i);
        const __m256d vv = _mm256_loadu_pd(v + i);
        const __m256d c0f = _mm256_max_pd(_mm256_min_pd(_mm256_floor_pd(uu), c_hi), zero);
        const __m256d r0f = _mm256_max_pd(_mm256_min_pd(_mm256_floor_pd(vv), r_hi), zero);
        const __m256d fu = _mm256_sub_pd(uu, c0f);
        const __m256d fv = _mm256_sub_pd(vv, r0f);

        const __m128i c0i = _mm256_cvttpd_epi32(c0f);
        const __m128i r0i = _mm256_cvttpd_epi32(r0f);
        const __m128i base = _mm_add_epi32(_mm_mullo_epi32(r0i, vcols), c0i);

        const __m256d g00 = _mm256_i32gather_pd(grid, base, 8);
        const __m256d g01 = _mm256_i32gather_pd(grid, _mm_add_epi32(base, _mm_set1_epi32(cstep)), 8);
        const __m256d g10 = _mm256_i32gather_pd(grid, _mm_add_epi32(base, _mm_set1_epi32(rstep)), 8);
        const __m256d g11 = _mm256_i32gather_pd(grid, _mm_add_epi32(base, _mm_set1_epi32(rstep + cstep)), 8);

        const __m256d top = _mm256_fmadd_pd(fu, _mm256_sub_pd(g01, g00), g00);
        const __m256d bot = _mm256_fmadd_pd(fu, _mm256_sub_pd(g11, g10), g10);
        _mm256_storeu_pd(out + i, _mm256_fmadd_pd(fv, _mm256_sub_pd(bot, top), top));
    }
    if (i < n) {
        scalar_table().bilinear_sample(grid, rows, cols, u + i, v + i, out + i, n - i);
    }
}

Moments moments_avx2(const double* x, std::size_t n) {
    Moments m;
    m.n = n;
    if (n == 0) return m;
    if (n < 8) return scalar_table().moments(x, n);

    __m256d sum = _mm256_setzero_pd();
    __m256d sumsq = _mm256_setzero_pd();
    __m256d vmin = _mm256_loadu_pd(x);
    __m256d vmax = vmin;
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d v = _mm256_loadu_pd(x + i);
        sum = _mm256_add_pd(sum, v);
        sumsq = _mm256_fmadd_pd(v, v, sumsq);
        vmin = _mm256_min_pd(vmin, v);
        vmax = _mm256_max_pd(vmax, v);
    }
    alignas(32) double lanes[4];
    _mm256_store_pd(lanes, sum);
    m.sum = lanes[0] + lanes[1] + lanes[2] + lanes[3];
    _mm256_store_pd(lanes, sumsq);
    m.sum_sq = lanes[0] + lanes[1] + lanes[2] + lanes[3];
    _mm256_store_pd(lanes, vmin);
    m.min = std::min(std::min(lanes[0], lanes[1]), std::min(lanes[2], lanes[3]));
    _mm256_store_pd(lanes, vmax);
    m.max = std::max(std::max(lanes[0], lanes[1]), std::max(lanes[2], lanes[3]));
    for (; i < n; ++i) {
        const double v = x[i];
        m.sum += v;
        m.sum_sq += v * v;
        m.min = std::min(m.min, v);
        m.max = std::max(m.max, v);
    }
    return m;
}

double centered_sum_sq_avx2(const double* x, std::size_t n, double mu) {
    const __m256d vmu = _mm256_set1_pd(mu);
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d d = _mm256_sub_pd(_mm256_loadu_pd(x + i), vmu);
        acc = _mm256_fmadd_pd(d, d, acc);
    }
    alignas(32) double lanes[4];
    _mm256_store_pd(lanes, acc);
    double s = lanes[0] + lanes[1] + lanes[2] + lanes[3];
    for (; i < n; ++i) {
        const double d = x[i] - mu;
        s += d * d;
    }
    return s;
}

void divider_voltages_avx2(const double* r, std::size_t n, double vcc,
                           double r_ref, double* v) {
    const __m256d num = _mm256_set1_pd(vcc * r_ref);
    const __m256d ref = _mm256_set1_pd(r_ref);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d rr = _mm256_add_pd(_mm256_loadu_pd(r + i), ref);
        _mm256_storeu_pd(v + i, _mm256_div_pd(num, rr));
    }
    if (i < n) scalar_table().divider_voltages(r + i, n - i, vcc, r_ref, v + i);
}

void normalize_affine_avx2(const double* x, std::size_t n, double lo,
                           double hi, double* out) {
    const double inv = 1.0 / (hi - lo);
    const __m256d vlo = _mm256_set1_pd(lo);
    const __m256d vinv = _mm256_set1_pd(inv);
    const __m256d zero = _mm256_setzero_pd();
    const __m256d one = _mm256_set1_pd(1.0);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d t = _mm256_mul_pd(_mm256_sub_pd(_mm256_loadu_pd(x + i), vlo), vinv);
        _mm256_storeu_pd(out + i, _mm256_max_pd(_mm256_min_pd(t, one), zero));
    }
    if (i < n) scalar_table().normalize_affine(x + i, n - i, lo, hi, out + i);
}

}  // namespace

const KernelTable& avx2_table() {
    static const KernelTable t{
        decode_angles_avx2, bilinear_sample_avx2, moments_avx2,
        centered_sum_sq_avx2, divider_voltages_avx2, normalize_affine_avx2,
    };
    return t;
}

bool cpu_has_avx2_fma() {
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
}

}  // namespace tag::kernels::detail
