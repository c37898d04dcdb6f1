#pragma once

#include "ohlrelay/error_analysis.hpp"
#include "ohlrelay/relay_chain.hpp"

namespace ohl {

struct OptimizerSettings {
    double epsilon_rel = 1e-3;
    int max_inner = 50;
    int max_outer = 50;
};

struct JointOptimum {
    double threshold_star_w = 0.0;
    double beam_width_star_m = 0.0;
    double achieved_pe = 1.0;  // pe_ohl_hop at the converged pair
    int outer_iterations = 0;
    int inner_iterations_total = 0;
    bool converged = false;
};

// Thrown when the stationarity relation has no positive solution (the
// integral term is >= 1, i.e. noise is comparable to signal).
class StationarityInfeasible : public std::runtime_error {
public:
    explicit StationarityInfeasible(const std::string& w)
        : std::runtime_error(w) {}
};

// One fixed-point refinement of the OHL threshold. Evaluates
//   I = E_h[ exp(-(P h - P_th)^2 / (2 sigma^2)) ]
// at the current threshold and returns sigma * sqrt(-2 ln I).
double threshold_fixed_point_step(const HopErrorInputs& in, double p_th_current,
                                  const QuadratureSpec& spec = {});

struct ThresholdResult {
    double threshold_w = 0.0;
    int iterations = 0;
    bool converged = false;
};

// Iterates the fixed point until the relative change drops below
// epsilon_rel or max_inner is reached.
ThresholdResult threshold_optimize(const HopErrorInputs& in,
                                   const OptimizerSettings& settings = {},
                                   const QuadratureSpec& spec = {});

// Closed-form beam width from the surrogate's stationarity condition,
// principal Lambert-W branch. Throws StationarityInfeasible when the
// Lambert argument drops below -1/e (no interior optimum).
double beamwidth_closed_form(const HopErrorInputs& in, const LinkGeometry& geom);

// Alternating joint optimization: closed-form beam width given the
// threshold, fixed-point threshold given the beam width (warm-started),
// until both relative changes fall below epsilon_rel.
JointOptimum joint_optimize(const LinkGeometry& geom, const NoiseBudget& noise,
                            double tx_power_w,
                            const OptimizerSettings& settings = {},
                            double init_threshold_w = 0.0,
                            double init_beam_width_m = 0.0);

struct SearchGrid {
    int threshold_points = 256;
    int beam_points = 256;
    // Log-spaced ranges; zeros mean "choose from the link geometry".
    double threshold_min_w = 0.0, threshold_max_w = 0.0;
    double beam_min_m = 0.0, beam_max_m = 0.0;
};

// Brute-force 2-D grid argmin of pe_ohl_hop followed by one golden-section
// refinement per axis. Oracle for joint_optimize.
JointOptimum exhaustive_joint_search(const LinkGeometry& geom,
                                     const NoiseBudget& noise,
                                     double tx_power_w,
                                     const SearchGrid& grid = {});

// Helper shared by both optimizers: the hop-error inputs induced by a
// candidate beam width on this link.
HopErrorInputs hop_inputs_for_beam(const LinkGeometry& geom,
                                   const NoiseBudget& noise, double tx_power_w,
                                   double beam_width_m, double threshold_w);

}  // namespace ohl
