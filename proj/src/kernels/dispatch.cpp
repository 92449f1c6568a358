#include <cstdlib>
#include <cstring>

#include "kernels_internal.hpp"

namespace tag::kernels {

namespace {

using detail::KernelTable;

const KernelTable& table_for(Backend b) {
#if defined(TAGKIT_BUILD_AVX2)
    if (b == Backend::avx2) return detail::avx2_table();
#endif
    (void)b;
    return detail::scalar_table();
}

Backend resolve_active() {
    Backend best = Backend::scalar;
#if defined(TAGKIT_BUILD_AVX2)
    if (detail::cpu_has_avx2_fma()) best = Backend::avx2;
#endif
    if (const char* env = std::getenv("TAG_KERNEL_BACKEND")) {
        if (std::strcmp(env, "scalar") == 0) return Backend::scalar;
        if (std::strcmp(env, "avx2") == 0 && backend_available(Backend::avx2)) {
            return Backend::avx2;
        }
    }
    return best;
}

}  // namespace

const char* backend_name(Backend b) {
    switch (b) {
        case Backend::scalar: return "scalar";
        case Backend::avx2: return "avx2";
    }
    return "?";
}

bool backend_available(Backend b) {
    if (b == Backend::scalar) return true;
#if defined(TAGKIT_BUILD_AVX2)
    if (b == Backend::avx2) return detail::cpu_has_avx2_fma();
#endif
    return false;
}

Backend active_backend() {
    static const Backend active = resolve_active();
    return active;
}

std::string capability_string() {
    std::string s;
#if defined(TAGKIT_BUILD_AVX2)
    if (detail::cpu_has_avx2_fma()) s += "avx2 fma";
#endif
    if (s.empty()) s = "scalar only";
    s += " (active: ";
    s += backend_name(active_backend());
    s += ")";
    return s;
}

void decode_angles(const double* bx, const double* by, std::size_t n,
                   double ox, double oy, double* theta, double* r2,
                   Backend backend) {
    table_for(backend).decode_angles(bx, by, n, ox, oy, theta, r2);
}

void bilinear_sample(const double* grid, int rows, int cols, const double* u,
                     const double* v, double* out, std::size_t n,
                     Backend backend) {
    table_for(backend).bilinear_sample(grid, rows, cols, u, v, out, n);
}

Moments moments(const double* x, std::size_t n, Backend backend) {
    return table_for(backend).moments(x, n);
}

double centered_sum_sq(const double* x, std::size_t n, double mu,
                       Backend backend) {
    return table_for(backend).centered_sum_sq(x, n, mu);
}

void divider_voltages(const double* r, std::size_t n, double vcc,
                      double r_ref, double* v, Backend backend) {
    table_for(backend).divider_voltages(r, n, vcc, r_ref, v);
}

void normalize_affine(const double* x, std::size_t n, double lo, double hi,
                      double* out, Backend backend) {
    table_for(backend).normalize_affine(x, n, lo, hi, out);
}

}  // namespace tag::kernels
