#pragma once

#include <vector>

#include "ohlrelay/channel.hpp"
#include "ohlrelay/numerics.hpp"

namespace ohl {

// Inputs of the per-hop analytical error models.
struct HopErrorInputs {
    FadingModel fading;
    double tx_power_prev_w = 4.0;  // P_{t,i'}
    double threshold_w = 1e-8;     // P_th (OHL only)
    double sigma_bg_w = 6e-9;      // optical-domain background noise std
    double sigma_prime_w = 6.1e-9; // combined DF/destination noise std
};

enum class ChainComposition { ohl_chain, df_chain };

struct EndToEndResult {
    std::vector<double> per_hop_pe;
    double e2e_pe = 0.0;
    ChainComposition composition = ChainComposition::ohl_chain;
};

// Per-hop OHL error probability:
//   1/2 Q(P_th / sigma) + 1/2 E_h[ Q((P h - P_th) / sigma) ]
// with the fading expectation evaluated after integration by parts, so the
// Gaussian boundary layer at h = P_th / P is resolved for any gamma.
double pe_ohl_hop(const HopErrorInputs& in, const QuadratureSpec& spec = {});

// Per-hop DF error probability E_h[ Q(P h / (2 sigma')) ] by quadrature.
// With use_q_approx the three-term exponential Q replaces the exact Q
// inside the integrand (for cross-checking the closed form).
double pe_df_hop_quadrature(const HopErrorInputs& in,
                            const QuadratureSpec& spec = {},
                            bool use_q_approx = false);

// Coefficients of the three-term exponential Q approximation. Overridable
// only so validation harnesses can prove they detect a corrupted term.
struct DfClosedFormCoeffs {
    double a[3] = {5.0 / 24.0, 4.0 / 24.0, 1.0 / 24.0};
    double b[3] = {2.0, 11.0 / 20.0, 0.5};
};

// Closed form of the DF hop error using the three-term Q approximation:
//   (gamma/2) h_max^{-gamma} sum_j a_j k_j^{-gamma/2} igamma(gamma/2, k_j h_max^2)
// with k_j = b_j P^2 / (4 sigma'^2). Evaluated in the log domain.
double pe_df_hop_closed(const HopErrorInputs& in,
                        const DfClosedFormCoeffs& coeffs = {});

// End-to-end composition 1 - prod(1 - p_i), evaluated through log1p so
// per-hop probabilities near 1e-12 survive.
double pe_e2e(const std::vector<double>& per_hop, ChainComposition composition);

// The optimizer's surrogate (P_th/P * w^2/r_a^2)^{gamma+1}. Trend-accurate
// only. Throws std::domain_error when the base is >= 1 (out of the
// operating regime).
double pe_ohl_approx(const HopErrorInputs& in);

}  // namespace ohl
