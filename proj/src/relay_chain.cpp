#include "ohlrelay/relay_chain.hpp"

#include <cmath>
#include <stdexcept>

namespace ohl {

void RelayChainConfig::validate() const {
    if (hops.empty())
        throw std::invalid_argument("RelayChainConfig: needs at least one hop");
    if (relays.size() + 1 != hops.size())
        throw std::invalid_argument(
            "RelayChainConfig: hop count must equal relay count + 1");
    if (source_power_w <= 0.0)
        throw std::invalid_argument("RelayChainConfig: source power must be > 0");
    for (const auto& r : relays) {
        if (r.target_tx_power_w <= 0.0)
            throw std::invalid_argument("RelayNodeConfig: target power must be > 0");
        if (r.relay_type == RelayType::OHL &&
            (r.ohl_threshold_w <= 0.0 || r.ohl_output_w <= 0.0))
            throw std::invalid_argument("RelayNodeConfig: OHL levels must be > 0");
    }
}

double ase_power(const NoiseBudget& noise, double gain) {
    if (gain < 1.0) throw std::invalid_argument("ase_power: gain must be >= 1");
    return noise.n_sp * noise.planck_h * noise.optical_freq_hz *
           noise.bandwidth_hz * gain;
}

std::vector<double> af_auto_gains(const RelayChainConfig& cfg,
                                  const NoiseBudget& noise) {
    cfg.validate();
    std::vector<double> gains(cfg.relays.size());
    // Expected input at relay i over equiprobable bits and mean fading.
    const auto& first = cfg.hops.front();
    double e_in = 0.5 * cfg.source_power_w *
                  FadingModel::for_link(first.geom, first.beam.receiver_radius_m)
                      .mean_gain();
    for (std::size_t i = 0; i < cfg.relays.size(); ++i) {
        const double g = cfg.relays[i].target_tx_power_w / e_in;
        gains[i] = g;
        const auto& hop = cfg.hops[i + 1];
        const double eh =
            FadingModel::for_link(hop.geom, hop.beam.receiver_radius_m)
                .mean_gain();
        e_in = (g * e_in + ase_power(noise, g)) * eh;
    }
    return gains;
}

double af_chain_output(const RelayChainConfig& cfg, const NoiseBudget& noise,
                       const std::vector<double>& gains,
                       const std::vector<double>& h,
                       const std::vector<double>& bg_draws) {
    cfg.validate();
    if (gains.size() != cfg.relays.size() || h.size() != cfg.hops.size() ||
        bg_draws.size() != cfg.hops.size())
        throw std::invalid_argument("af_chain_output: list sizes misaligned");
    double p_in = cfg.source_power_w * h[0] + bg_draws[0];
    for (std::size_t i = 0; i < cfg.relays.size(); ++i) {
        p_in = (gains[i] * p_in + ase_power(noise, gains[i])) * h[i + 1] +
               bg_draws[i + 1];
    }
    return p_in < 0.0 ? 0.0 : p_in;
}

double photodetect(const NoiseBudget& noise, double p_optical_w,
                   double thermal_draw_a) {
    return noise.responsivity_a_per_w * p_optical_w + thermal_draw_a;
}

double ohl_decide(const RelayNodeConfig& node, double p_in_w) {
    return p_in_w >= node.ohl_threshold_w ? node.ohl_output_w : 0.0;
}

OhlStepResult ohl_chain_step(const RelayNodeConfig& node,
                             const NoiseBudget& noise, double p_prev_tx_w,
                             double h, double bg_draw_w, bool use_ase_approx) {
    const double g = node.edfa_gain > 0.0 ? node.edfa_gain : node.ohl_fixed_gain();
    double p_in = p_prev_tx_w * h + bg_draw_w;
    if (!use_ase_approx) p_in += ase_power(noise, g) * h;
    const double p_ohl = ohl_decide(node, p_in);
    OhlStepResult out;
    out.decided_bit = p_ohl > 0.0 ? 1 : 0;
    out.p_tx_next_w = g * p_ohl;
    if (!use_ase_approx) out.p_tx_next_w += ase_power(noise, g);
    return out;
}

int df_decide(const NoiseBudget&, double p_rx_signal_level_w, double p_in_w) {
    return p_in_w >= 0.5 * p_rx_signal_level_w ? 1 : 0;
}

}  // namespace ohl
