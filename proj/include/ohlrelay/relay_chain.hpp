#pragma once

#include <vector>

#include "ohlrelay/channel.hpp"

namespace ohl {

// Noise sources shared by every hop. Thermal noise is referred to the
// optical domain through the responsivity so signal and noise live in the
// same units (watts).
struct NoiseBudget {
    double background_sigma_w = 6e-9;  // std of additive background noise
    double n_sp = 1.1;
    double planck_h = 6.6e-34;
    double optical_freq_hz = 1.9e14;
    double bandwidth_hz = 2e8;
    double responsivity_a_per_w = 0.8;
    double thermal_sigma_a = 1e-9;

    double thermal_equiv_w() const { return thermal_sigma_a / responsivity_a_per_w; }
    // Combined destination / DF decision noise sigma'.
    double sigma_prime_w() const {
        const double t = thermal_equiv_w();
        return std::sqrt(t * t + background_sigma_w * background_sigma_w);
    }
};

enum class RelayType { AF, OHL, DF };

struct RelayNodeConfig {
    RelayType relay_type = RelayType::OHL;
    double target_tx_power_w = 4.0;  // P_bar_t
    double ohl_threshold_w = 1e-8;   // P_th (OHL only)
    double ohl_output_w = 1e-6;      // P_o (OHL only)
    double edfa_gain = 0.0;          // fixed G for OHL; 0 = auto for AF

    double ohl_fixed_gain() const { return target_tx_power_w / ohl_output_w; }
};

struct Hop {
    LinkGeometry geom;
    BeamConfig beam;
};

struct RelayChainConfig {
    std::vector<Hop> hops;               // N_r + 1 links
    std::vector<RelayNodeConfig> relays; // N_r intermediate relays
    double source_power_w = 4.0;         // P_t

    std::size_t relay_count() const { return relays.size(); }
    void validate() const;  // throws std::invalid_argument on inconsistency
};

// ASE power of an EDFA with the given gain: n_sp * h * f * B0 * G.
double ase_power(const NoiseBudget& noise, double gain);

// AGC gain per AF node: target power divided by the expected input power
// (expectation over equiprobable bits and the fading mean). The
// instantaneous variant divides by the realized input instead.
std::vector<double> af_auto_gains(const RelayChainConfig& cfg,
                                  const NoiseBudget& noise);

// Destination optical power of an AF chain for one realization, by exact
// recursive application of P_in,i = (G P_in,i' + P_ASE,i') h_i + P_bg,i.
// Negative totals (Gaussian background excursions) are clamped at zero at
// readout only.
double af_chain_output(const RelayChainConfig& cfg, const NoiseBudget& noise,
                       const std::vector<double>& gains,
                       const std::vector<double>& h,
                       const std::vector<double>& bg_draws);

// Photodetector: i = R * P + n_th.
double photodetect(const NoiseBudget& noise, double p_optical_w,
                   double thermal_draw_a);

// Hard limiting: P_o if p_in >= P_th (boundary inclusive), else 0.
double ohl_decide(const RelayNodeConfig& node, double p_in_w);

struct OhlStepResult {
    double p_tx_next_w = 0.0;
    int decided_bit = 0;
};

// One OHL relay stage: channel, background noise, hard decision, fixed-gain
// EDFA. With use_ase_approx the attenuated upstream ASE term at the input
// and the local ASE on the output are dropped (the paper's approximation);
// exact mode keeps both.
OhlStepResult ohl_chain_step(const RelayNodeConfig& node,
                             const NoiseBudget& noise, double p_prev_tx_w,
                             double h, double bg_draw_w, bool use_ase_approx);

// DF soft decision with per-slot channel knowledge: decide 1 iff
// p_in >= level / 2, where level is the received power a mark would carry.
// Ties decide 1.
int df_decide(const NoiseBudget& noise, double p_rx_signal_level_w,
              double p_in_w);

}  // namespace ohl
