#include <doctest.h>

#include <cmath>
#include <cstring>
#include <vector>

#include "ohlrelay/rng.hpp"
#include "ohlrelay/simd/kernels.hpp"

using namespace ohl;

TEST_CASE("fast_exp matches std::exp to a few ulp") {
    Rng r(RngStream{3, 1});
    double worst = 0.0;
    for (int i = 0; i < 200000; ++i) {
        const double x = -700.0 + 1400.0 * r.uniform01();
        const double got = simd::fast_exp(x);
        const double ref = std::exp(x);
        if (ref > 0.0) worst = std::max(worst, std::fabs(got - ref) / ref);
    }
    CHECK(worst < 1e-14);
    CHECK(simd::fast_exp(0.0) == 1.0);
    CHECK(simd::fast_exp(-1e4) == 0.0);
}

TEST_CASE("scalar kernel computes the far-field gain formula") {
    const double c = 3.7, h_max = 0.42;
    std::vector<double> x = {0.0, 0.1, -0.5, 2.0};
    std::vector<double> y = {0.0, -0.2, 0.3, 1.0};
    std::vector<double> h(4);
    simd::gain_batch_scalar(x.data(), y.data(), 4, c, h_max, h.data());
    for (int i = 0; i < 4; ++i) {
        const double ref =
            h_max * simd::fast_exp(-c * (x[i] * x[i] + y[i] * y[i]));
        CHECK(h[i] == ref);
        CHECK(h[i] <= h_max);
        CHECK(h[i] >= 0.0);
    }
}

TEST_CASE("dispatched kernel is bit-identical to the scalar reference") {
    Rng r(RngStream{3, 2});
    // Deliberately awkward length so the vector path exercises its tail.
    const std::size_t n = 1003;
    std::vector<double> x(n), y(n), hs(n), hd(n);
    for (std::size_t i = 0; i < n; ++i) {
        x[i] = 4.0 * (r.uniform01() - 0.5);
        y[i] = 4.0 * (r.uniform01() - 0.5);
    }
    // Edge values: zero offset, large offset that underflows the exp.
    x[0] = y[0] = 0.0;
    x[1] = 50.0;
    const double c = 2.0 * 1e6 * 1e6 * 150e-6 * 150e-6 / (600.0 * 600.0);
    simd::gain_batch_scalar(x.data(), y.data(), n, c, 0.9, hs.data());
    simd::gain_batch()(x.data(), y.data(), n, c, 0.9, hd.data());
    CHECK(std::memcmp(hs.data(), hd.data(), n * sizeof(double)) == 0);
    CHECK(simd::active_kernel_name() != nullptr);
}
