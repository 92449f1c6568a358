#include <doctest.h>

#include <cmath>
#include <cstdint>
#include <bit>
#include <random>
#include <vector>

#include "tag/kernels.hpp"

using namespace tag;

namespace {

std::uint64_t ulp_distance(double a, double b) {
    if (a == b) return 0;
    if (std::isnan(a) || std::isnan(b)) return ~0ULL;
    auto key = [](double x) {
        auto bits = std::bit_cast<std::int64_t>(x);
        return bits < 0 ? std::numeric_limits<std::int64_t>::min() - bits : bits;
    };
    const auto ka = key(a), kb = key(b);
    return static_cast<std::uint64_t>(ka > kb ? ka - kb : kb - ka);
}

std::vector<double> uniform(std::mt19937_64& rng, std::size_t n, double lo,
                            double hi) {
    std::vector<double> v(n);
    for (double& x : v) {
        x = lo + (hi - lo) * (static_cast<double>(rng() >> 11) * 0x1p-53);
    }
    return v;
}

bool have_avx2() { return kernels::backend_available(kernels::Backend::avx2); }

}  // namespace

TEST_SUITE_BEGIN("kernels");

TEST_CASE("scalar decode matches std::atan2 and magnitudes") {
    std::mt19937_64 rng(7);
    const auto bx = uniform(rng, 257, -3.0, 3.0);
    const auto by = uniform(rng, 257, -3.0, 3.0);
    std::vector<double> theta(bx.size()), r2(bx.size());
    kernels::decode_angles(bx.data(), by.data(), bx.size(), 0.25, -0.5,
                           theta.data(), r2.data(), kernels::Backend::scalar);
    for (std::size_t i = 0; i < bx.size(); ++i) {
        const double dx = bx[i] - 0.25, dy = by[i] + 0.5;
        CHECK(theta[i] == std::atan2(dy, dx));
        CHECK(r2[i] == dx * dx + dy * dy);
    }
}

TEST_CASE("avx2 decode equivalence on random annulus inputs") {
    if (!have_avx2()) return;
    std::mt19937_64 rng(11);
    for (const std::size_t n : {1u, 3u, 4u, 5u, 17u, 1000u}) {
        std::vector<double> bx(n), by(n);
        for (std::size_t i = 0; i < n; ++i) {
            const double r = 1e-6 + 10.0 * (static_cast<double>(rng() >> 11) * 0x1p-53);
            const double a = 2.0 * 3.14159265358979 *
                             (static_cast<double>(rng() >> 11) * 0x1p-53);
            bx[i] = r * std::cos(a);
            by[i] = r * std::sin(a);
        }
        std::vector<double> ts(n), rs(n), tv(n), rv(n);
        kernels::decode_angles(bx.data(), by.data(), n, 0.0, 0.0, ts.data(),
                               rs.data(), kernels::Backend::scalar);
        kernels::decode_angles(bx.data(), by.data(), n, 0.0, 0.0, tv.data(),
                               rv.data(), kernels::Backend::avx2);
        for (std::size_t i = 0; i < n; ++i) {
            CHECK(std::abs(tv[i] - ts[i]) <= 1e-14);
            CHECK(ulp_distance(tv[i], ts[i]) <= 16);
            CHECK(rv[i] == doctest::Approx(rs[i]).epsilon(1e-15));
        }
    }
}

TEST_CASE("avx2 decode equivalence on axes and quadrant boundaries") {
    if (!have_avx2()) return;
    std::vector<double> bx, by;
    const double vals[] = {-2.0, -1.0, -0.5, 0.5, 1.0, 2.0};
    for (double x : vals) {
        for (double y : vals) {
            bx.push_back(x);
            by.push_back(y);
        }
        bx.push_back(x);
        by.push_back(0.0);
        bx.push_back(0.0);
        by.push_back(x);
    }
    std::vector<double> ts(bx.size()), tv(bx.size());
    kernels::decode_angles(bx.data(), by.data(), bx.size(), 0.0, 0.0, ts.data(),
                           nullptr, kernels::Backend::scalar);
    kernels::decode_angles(bx.data(), by.data(), bx.size(), 0.0, 0.0, tv.data(),
                           nullptr, kernels::Backend::avx2);
    for (std::size_t i = 0; i < bx.size(); ++i) {
        CHECK(std::abs(tv[i] - ts[i]) <= 1e-14);
    }
}

TEST_CASE("bilinear: exact at nodes, equivalent across backends") {
    std::mt19937_64 rng(23);
    for (auto [rows, cols] : {std::pair{7, 6}, {12, 8}, {1, 5}, {5, 1}}) {
        const auto grid = uniform(rng, static_cast<std::size_t>(rows) * cols, 0.0, 1.0);
        std::vector<double> u, v;
        for (int r = 0; r < rows; ++r) {
            for (int c = 0; c < cols; ++c) {
                u.push_back(c);
                v.push_back(r);
            }
        }
        // plus random interior coordinates
        const auto ru = uniform(rng, 64, 0.0, cols - 1.0);
        const auto rv = uniform(rng, 64, 0.0, rows - 1.0);
        u.insert(u.end(), ru.begin(), ru.end());
        v.insert(v.end(), rv.begin(), rv.end());

        std::vector<double> out_s(u.size()), out_v(u.size());
        kernels::bilinear_sample(grid.data(), rows, cols, u.data(), v.data(),
                                 out_s.data(), u.size(), kernels::Backend::scalar);
        std::size_t node = 0;
        for (int r = 0; r < rows; ++r) {
            for (int c = 0; c < cols; ++c, ++node) {
                CHECK(out_s[node] == grid[static_cast<std::size_t>(r) * cols + c]);
            }
        }
        if (have_avx2()) {
            kernels::bilinear_sample(grid.data(), rows, cols, u.data(), v.data(),
                                     out_v.data(), u.size(), kernels::Backend::avx2);
            for (std::size_t i = 0; i < u.size(); ++i) {
                CHECK(std::abs(out_v[i] - out_s[i]) <= 1e-15);
            }
        }
    }
}

TEST_CASE("bilinear stays within the bounds of its four neighbors") {
    std::mt19937_64 rng(31);
    const int rows = 9, cols = 7;
    const auto grid = uniform(rng, rows * cols, -5.0, 5.0);
    const auto u = uniform(rng, 512, 0.0, cols - 1.0);
    const auto v = uniform(rng, 512, 0.0, rows - 1.0);
    std::vector<double> out(u.size());
    kernels::bilinear_sample(grid.data(), rows, cols, u.data(), v.data(),
                             out.data(), u.size(), kernels::active_backend());
    for (std::size_t i = 0; i < u.size(); ++i) {
        const int c0 = std::min(static_cast<int>(u[i]), cols - 2);
        const int r0 = std::min(static_cast<int>(v[i]), rows - 2);
        double lo = 1e300, hi = -1e300;
        for (int dr = 0; dr < 2; ++dr) {
            for (int dc = 0; dc < 2; ++dc) {
                const double g = grid[(r0 + dr) * cols + (c0 + dc)];
                lo = std::min(lo, g);
                hi = std::max(hi, g);
            }
        }
        CHECK(out[i] >= lo - 1e-12);
        CHECK(out[i] <= hi + 1e-12);
    }
}

TEST_CASE("moments and centered sums agree across backends") {
    std::mt19937_64 rng(47);
    for (const std::size_t n : {0u, 1u, 5u, 8u, 129u, 100000u}) {
        const auto x = uniform(rng, n, -2.0, 7.0);
        const auto ms = kernels::moments(x.data(), n, kernels::Backend::scalar);
        CHECK(ms.n == n);
        if (n > 0) {
            double mn = x[0], mx = x[0];
            for (double v : x) {
                mn = std::min(mn, v);
                mx = std::max(mx, v);
            }
            CHECK(ms.min == mn);
            CHECK(ms.max == mx);
        }
        if (!have_avx2()) continue;
        const auto mv = kernels::moments(x.data(), n, kernels::Backend::avx2);
        CHECK(mv.n == ms.n);
        CHECK(mv.min == ms.min);
        CHECK(mv.max == ms.max);
        CHECK(mv.sum == doctest::Approx(ms.sum).epsilon(1e-12));
        CHECK(mv.sum_sq == doctest::Approx(ms.sum_sq).epsilon(1e-12));
        const double mu = n ? ms.sum / n : 0.0;
        const double cs = kernels::centered_sum_sq(x.data(), n, mu,
                                                   kernels::Backend::scalar);
        const double cv = kernels::centered_sum_sq(x.data(), n, mu,
                                                   kernels::Backend::avx2);
        CHECK(cv == doctest::Approx(cs).epsilon(1e-12));
    }
}

TEST_CASE("divider and normalize kernels match across backends") {
    std::mt19937_64 rng(59);
    const auto r = uniform(rng, 1003, 1.0, 1e6);
    std::vector<double> vs(r.size()), vv(r.size());
    kernels::divider_voltages(r.data(), r.size(), 3.3, 1e4, vs.data(),
                              kernels::Backend::scalar);
    for (std::size_t i = 0; i < r.size(); ++i) {
        CHECK(vs[i] == 3.3 * 1e4 / (r[i] + 1e4));
    }
    const auto x = uniform(rng, 1003, -2.0, 5.0);
    std::vector<double> ns(x.size()), nv(x.size());
    kernels::normalize_affine(x.data(), x.size(), 0.5, 2.5, ns.data(),
                              kernels::Backend::scalar);
    for (std::size_t i = 0; i < x.size(); ++i) {
        CHECK(ns[i] >= 0.0);
        CHECK(ns[i] <= 1.0);
    }
    if (!have_avx2()) return;
    kernels::divider_voltages(r.data(), r.size(), 3.3, 1e4, vv.data(),
                              kernels::Backend::avx2);
    kernels::normalize_affine(x.data(), x.size(), 0.5, 2.5, nv.data(),
                              kernels::Backend::avx2);
    for (std::size_t i = 0; i < r.size(); ++i) {
        CHECK(vv[i] == vs[i]);
        CHECK(nv[i] == ns[i]);
    }
}

TEST_CASE("backend dispatch reports a usable configuration") {
    CHECK(kernels::backend_available(kernels::Backend::scalar));
    const auto active = kernels::active_backend();
    CHECK(kernels::backend_available(active));
    CHECK(!kernels::capability_string().empty());
}

TEST_SUITE_END();
