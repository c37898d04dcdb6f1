#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ohlrelay/relay_chain.hpp"
#include "ohlrelay/rng.hpp"

namespace ohl {

enum class ChannelMode { farfield, exact_integral };

struct McPlan {
    long long trials = 1'000'000;
    long long batch_size = 8192;
    RngStream rng;
    ChannelMode channel_mode = ChannelMode::farfield;
    double confidence_z = 3.0;
    bool use_ase_approx = true;          // OHL chains: drop attenuated ASE terms
    bool af_instantaneous_gain = false;  // AF: divide by realized input power
    int threads = 1;

    void validate() const;  // trials >= 1e4, batch_size divides trials
};

struct McResult {
    double ber_estimate = 0.0;
    double std_error = 0.0;
    long long trials_run = 0;
    std::vector<long long> per_hop_flip_counts;
};

// Bit-level simulation of an OHL / DF relay chain (destination performs the
// soft decision with combined noise). Pointing errors are redrawn i.i.d.
// per bit on every hop. Batches consume independent substreams, so the
// estimate is bit-identical for any thread count.
McResult simulate_chain_ber(const RelayChainConfig& cfg,
                            const NoiseBudget& noise, const McPlan& plan);

// AF chain with recursive power propagation, deterministic ASE terms, and
// photodetection. dest_threshold_w = 0 selects the genie-aided midpoint of
// the per-realization noise-free eye.
McResult simulate_af_ber(const RelayChainConfig& cfg, const NoiseBudget& noise,
                         const McPlan& plan, double dest_threshold_w = 0.0);

struct ValidationReport {
    double analytic_pe = 0.0;
    double mc_pe = 0.0;
    double std_error = 0.0;
    double z_margin = 0.0;  // signed (|gap| - z * stderr) / stderr beyond band
    bool pass = false;
    std::string verdict() const { return pass ? "pass" : "fail"; }
    std::string to_string() const;  // deterministic, for CI golden comparison
};

// Pass iff |analytic - estimate| <= z * stderr + model_tol * analytic. The
// model tolerance band is for analytic paths built on the approximate Q.
ValidationReport validate_report(double analytic, const McResult& mc,
                                 double confidence_z = 3.0,
                                 double model_tolerance = 0.0);

}  // namespace ohl
