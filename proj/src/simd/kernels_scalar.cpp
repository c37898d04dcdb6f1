#include "ohlrelay/simd/kernels.hpp"

#include <bit>
#include <cmath>
#include <cstdint>
#include <limits>

namespace ohl::simd {

namespace {

// Cephes exp constants.
constexpr double kLog2E = 1.4426950408889634074;
constexpr double kC1 = 6.93145751953125e-1;
constexpr double kC2 = 1.42860682030941723212e-6;
constexpr double kP0 = 1.26177193074810590878e-4;
constexpr double kP1 = 3.02994407707441961300e-2;
constexpr double kP2 = 9.99999999999999999910e-1;
constexpr double kQ0 = 3.00198505138664455042e-6;
constexpr double kQ1 = 2.52448340349684104192e-3;
constexpr double kQ2 = 2.27265548208155028766e-1;
constexpr double kQ3 = 2.00000000000000000005e0;

}  // namespace

double fast_exp(double x) {
    if (x < -700.0) return 0.0;
    if (x > 709.0) return std::numeric_limits<double>::infinity();
    const double n = std::nearbyint(x * kLog2E);
    double r = std::fma(-n, kC1, x);
    r = std::fma(-n, kC2, r);
    const double xx = r * r;
    double p = std::fma(kP0, xx, kP1);
    p = std::fma(p, xx, kP2);
    p *= r;
    double q = std::fma(kQ0, xx, kQ1);
    q = std::fma(q, xx, kQ2);
    q = std::fma(q, xx, kQ3);
    const double e = std::fma(2.0, p / (q - p), 1.0);
    // Scale by 2^n through the exponent bits; n is in [-1010, 1024] here so
    // the result stays normal.
    const auto pow2 = std::bit_cast<double>(
        static_cast<std::uint64_t>(static_cast<std::int64_t>(n) + 1023) << 52);
    return e * pow2;
}

void gain_batch_scalar(const double* x, const double* y, std::size_t n,
                       double c, double h_max, double* h) {
    for (std::size_t i = 0; i < n; ++i) {
        const double t = std::fma(x[i], x[i], y[i] * y[i]);
        h[i] = h_max * fast_exp(-c * t);
    }
}

}  // namespace ohl::simd
