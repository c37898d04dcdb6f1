#pragma once

#include <cstddef>

namespace ohl::simd {

// Batched far-field fading gain, the Monte-Carlo hot loop:
//   h[i] = h_max * exp(-c * (x[i]^2 + y[i]^2))
// The scalar reference and the AVX2 variant run the same exp algorithm
// (Cephes-style rational approximation with FMA) in the same operation
// order, so their outputs are bit-identical and equivalence is testable
// exactly.
using GainBatchFn = void (*)(const double* x, const double* y, std::size_t n,
                             double c, double h_max, double* h);

void gain_batch_scalar(const double* x, const double* y, std::size_t n,
                       double c, double h_max, double* h);

#if defined(__x86_64__) || defined(_M_X64)
void gain_batch_avx2(const double* x, const double* y, std::size_t n, double c,
                     double h_max, double* h);
#endif

// Best kernel for this CPU, detected once at startup.
GainBatchFn gain_batch();
const char* active_kernel_name();

// Scalar reference exp shared by both paths; ~2 ulp, range-clamped.
double fast_exp(double x);

}  // namespace ohl::simd
