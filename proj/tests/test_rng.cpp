#include <doctest.h>

#include <cmath>
#include <set>
#include <vector>

#include "ohlrelay/rng.hpp"

using namespace ohl;

TEST_CASE("identical stream ids reproduce bit-identical sequences") {
    Rng a(RngStream{42, 7});
    Rng b(RngStream{42, 7});
    for (int i = 0; i < 1000; ++i) CHECK(a.next_u64() == b.next_u64());
}

TEST_CASE("distinct seeds or stream ids diverge") {
    Rng a(RngStream{42, 7});
    Rng b(RngStream{42, 8});
    Rng c(RngStream{43, 7});
    int same_ab = 0, same_ac = 0;
    for (int i = 0; i < 64; ++i) {
        const std::uint64_t x = a.next_u64();
        if (x == b.next_u64()) ++same_ab;
        if (x == c.next_u64()) ++same_ac;
    }
    CHECK(same_ab == 0);
    CHECK(same_ac == 0);
}

TEST_CASE("substream derivation is deterministic and collision-free") {
    const RngStream root{1, 99};
    std::set<std::uint64_t> ids;
    for (std::uint64_t i = 0; i < 10000; ++i) {
        const RngStream s = root.substream(i);
        CHECK(s.seed == root.seed);
        CHECK(s.stream_id == root.substream(i).stream_id);
        ids.insert(s.stream_id);
    }
    CHECK(ids.size() == 10000);
}

TEST_CASE("uniform01 stays in (0, 1]") {
    Rng r(RngStream{5, 5});
    double lo = 1.0, hi = 0.0;
    for (int i = 0; i < 200000; ++i) {
        const double u = r.uniform01();
        CHECK(u > 0.0);
        CHECK(u <= 1.0);
        lo = std::min(lo, u);
        hi = std::max(hi, u);
    }
    CHECK(lo < 1e-4);
    CHECK(hi > 1.0 - 1e-4);
}

TEST_CASE("normal moments") {
    Rng r(RngStream{11, 3});
    const int n = 400000;
    double sum = 0.0, sum2 = 0.0;
    for (int i = 0; i < n; ++i) {
        const double z = r.normal();
        sum += z;
        sum2 += z * z;
    }
    const double mean = sum / n;
    const double var = sum2 / n - mean * mean;
    // 5-sigma bands for n = 4e5: sd(mean) ~ 1/sqrt(n), sd(var) ~ sqrt(2/n).
    CHECK(std::fabs(mean) < 5.0 / std::sqrt((double)n));
    CHECK(std::fabs(var - 1.0) < 5.0 * std::sqrt(2.0 / n));
}

TEST_CASE("substreams are pairwise uncorrelated at lag zero") {
    const RngStream root{7, 0};
    Rng a(root.substream(0));
    Rng b(root.substream(1));
    const int n = 100000;
    double acc = 0.0;
    for (int i = 0; i < n; ++i)
        acc += (a.uniform01() - 0.5) * (b.uniform01() - 0.5);
    // Correlation of independent uniforms: sd = 1/12 / sqrt(n) on the mean.
    CHECK(std::fabs(acc / n) < 5.0 / 12.0 / std::sqrt((double)n));
}
