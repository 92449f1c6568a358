#pragma once

#include "tag/kernels.hpp"

// Per-backend entry points wired up by dispatch.cpp.

namespace tag::kernels::detail {

struct KernelTable {
    void (*decode_angles)(const double*, const double*, std::size_t, double,
                          double, double*, double*);
    void (*bilinear_sample)(const double*, int, int, const double*,
                            const double*, double*, std::size_t);
    Moments (*moments)(const double*, std::size_t);
    double (*centered_sum_sq)(const double*, std::size_t, double);
    void (*divider_voltages)(const double*, std::size_t, double, double,
                             double*);
    void (*normalize_affine)(const double*, std::size_t, double, double,
                             double*);
};

const KernelTable& scalar_table();

#if defined(TAGKIT_BUILD_AVX2)
const KernelTable& avx2_table();
bool cpu_has_avx2_fma();
#endif

}  // namespace tag::kernels::detail
