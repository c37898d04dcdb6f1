#include "ohlrelay/simd/kernels.hpp"

namespace ohl::simd {

namespace {

struct Selection {
    GainBatchFn fn;
    const char* name;
};

Selection detect() {
#if defined(__x86_64__) || defined(_M_X64)
    if (__builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma"))
        return {gain_batch_avx2, "avx2"};
#endif
    return {gain_batch_scalar, "scalar"};
}

const Selection& selection() {
    static const Selection s = detect();
    return s;
}

}  // namespace

GainBatchFn gain_batch() { return selection().fn; }

const char* active_kernel_name() { return selection().name; }

}  // namespace ohl::simd
