#pragma once

#include <cstdint>
#include <string>

#include "ohlrelay/constellation.hpp"
#include "ohlrelay/lens.hpp"
#include "ohlrelay/relay_chain.hpp"

namespace ohl {

// Flat experiment configuration. Defaults are the baseline simulation
// parameter set; the same values live in configs/table1_defaults.cfg.
struct ExperimentConfig {
    double tx_power_w = 4.0;
    double ohl_output_w = 1e-6;
    double sigma_theta_intra_rad = 50e-6;
    double sigma_theta_inter_rad = 150e-6;
    double aperture_radius_m = 0.1;
    double wavelength_m = 1550e-9;
    double optical_freq_hz = 1.9e14;
    double bandwidth_hz = 2e8;
    double n_sp = 1.1;
    double planck_h = 6.6e-34;
    double p_bg_w = 6e-9;
    double responsivity_a_per_w = 0.8;
    double sigma_thermal = 1e-9;  // photocurrent std, amperes

    double altitude_m = 600e3;
    double inclination_deg = 53.0;
    long long planes = 20;
    long long sats_per_plane = 25;
    double perturbation_max_deg = 1.0;
    double max_intra_link_m = 2e6;
    double max_inter_link_m = 1e6;
    double clearance_m = 100e3;
    double corridor_half_angle_deg = 15.0;

    double lens_w0_m = 2e-3;
    double lens_spacing_m = 40e-3;
    double lens_focal_min_m = 15e-3;
    double lens_focal_max_m = 60e-3;

    // Ground endpoints 14,125 km apart; the destination sits on the ground
    // track two planes over, so shortest routes mix intra-plane hops with a
    // handful of inter-orbit crossings.
    double ground_lat_src_deg = -38.706;
    double ground_lon_src_deg = -37.146;
    double ground_lat_dst_deg = 38.706;
    double ground_lon_dst_deg = 73.146;

    std::uint64_t seed = 1;

    void validate() const;  // throws std::invalid_argument on bad physics

    NoiseBudget noise_budget() const;
    ConstellationConfig constellation() const;
    LinkLimits link_limits() const;
    LensSystem lens_system() const;
};

// key = value text, '#' comments, unknown keys rejected.
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::string& path);

// Canonical serialization: fixed key order, shortest round-trip numerals.
// parse(serialize(c)) == c bit-for-bit.
std::string serialize_config(const ExperimentConfig& cfg);

// FNV-1a 64 over the canonical serialization, zero-padded hex.
std::string config_hash(const ExperimentConfig& cfg);

}  // namespace ohl
