#include "ohlrelay/optimizer.hpp"

#include <cmath>
#include <limits>

namespace ohl {

HopErrorInputs hop_inputs_for_beam(const LinkGeometry& geom,
                                   const NoiseBudget& noise, double tx_power_w,
                                   double beam_width_m, double threshold_w) {
    HopErrorInputs in;
    in.fading = FadingModel::for_link(geom, beam_width_m);
    in.tx_power_prev_w = tx_power_w;
    in.threshold_w = threshold_w;
    in.sigma_bg_w = noise.background_sigma_w;
    in.sigma_prime_w = noise.sigma_prime_w();
    return in;
}

double threshold_fixed_point_step(const HopErrorInputs& in, double p_th_current,
                                  const QuadratureSpec& spec) {
    const double g = in.fading.gamma_shape;
    const double hmax = in.fading.h_max;
    const double p = in.tx_power_prev_w;
    const double sigma = in.sigma_bg_w;
    // Same integration-by-parts treatment as pe_ohl_hop: the Gaussian bump
    // at h = P_th/P is integrated against the fading CDF over its known
    // window, which stays accurate for strongly peaked fading.
    const double d_edge = (p * hmax - p_th_current) / sigma;
    double I = std::exp(-0.5 * d_edge * d_edge);
    const double hc = p_th_current / p;
    const double half_width = 14.0 * sigma / p;
    const double lo = std::max(0.0, hc - half_width);
    const double hi = std::min(hmax, hc + half_width);
    if (lo < hi) {
        auto integrand = [&](double h) {
            if (h <= 0.0) return 0.0;
            const double z = (p * h - p_th_current) / sigma;
            const double mag = g * std::log(h / hmax) - 0.5 * z * z;
            return (p / sigma) * z * std::exp(mag);
        };
        I += integrate(integrand, lo, hi, spec);
    }
    if (I >= 1.0)
        throw StationarityInfeasible(
            "threshold_fixed_point_step: stationarity integral >= 1 "
            "(noise comparable to signal, no positive threshold)");
    // Residual quadrature cancellation can leave a nonpositive value when
    // the true integral underflows; clamp to keep the map defined.
    if (I < 1e-300) I = 1e-300;
    return sigma * std::sqrt(-2.0 * std::log(I));
}

ThresholdResult threshold_optimize(const HopErrorInputs& in,
                                   const OptimizerSettings& settings,
                                   const QuadratureSpec& spec) {
    ThresholdResult res;
    double p_th = in.threshold_w;
    for (int l = 0; l < settings.max_inner; ++l) {
        const double next = threshold_fixed_point_step(in, p_th, spec);
        ++res.iterations;
        const double rel = std::fabs(next - p_th) / std::max(next, 1e-300);
        p_th = next;
        if (rel < settings.epsilon_rel) {
            res.converged = true;
            break;
        }
    }
    res.threshold_w = p_th;
    return res;
}

double beamwidth_closed_form(const HopErrorInputs& in,
                             const LinkGeometry& geom) {
    const double ra = geom.aperture_radius_m;
    const double ls = geom.length_m * geom.jitter_sigma_rad;
    const double ratio = in.threshold_w / in.tx_power_prev_w;
    const double x = -4.0 * std::exp(1.0) * ratio * ls * ls / (ra * ra);
    if (x < -std::exp(-1.0))
        throw StationarityInfeasible(
            "beamwidth_closed_form: Lambert argument below -1/e, no interior "
            "optimum for this threshold");
    const double w0 = lambert_w(x, LambertBranch::principal);
    const double W = ra * ra / ratio * std::exp(w0 - 1.0);
    return std::sqrt(W);
}

namespace {

// Golden-section minimization of a 1-D slice; [lo, hi] must bracket.
double golden_min(const std::function<double(double)>& f, double lo, double hi,
                  double rel_tol) {
    constexpr double phi = 0.61803398874989484820;
    double a = lo, b = hi;
    double x1 = b - phi * (b - a);
    double x2 = a + phi * (b - a);
    double f1 = f(x1), f2 = f(x2);
    while ((b - a) > rel_tol * (std::fabs(a) + std::fabs(b))) {
        if (f1 < f2) {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - phi * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + phi * (b - a);
            f2 = f(x2);
        }
    }
    return 0.5 * (a + b);
}

}  // namespace

JointOptimum joint_optimize(const LinkGeometry& geom, const NoiseBudget& noise,
                            double tx_power_w, const OptimizerSettings& settings,
                            double init_threshold_w, double init_beam_width_m) {
    const QuadratureSpec spec;
    double p_th = init_threshold_w > 0.0 ? init_threshold_w
                                         : 5.0 * noise.background_sigma_w;
    double w = init_beam_width_m > 0.0 ? init_beam_width_m
                                       : std::sqrt(200.0 * 600.0);
    const double pe_init =
        pe_ohl_hop(hop_inputs_for_beam(geom, noise, tx_power_w, w, p_th), spec);
    const double p_th_init = p_th, w_init = w;

    JointOptimum out;
    for (int n = 0; n < settings.max_outer; ++n) {
        ++out.outer_iterations;
        const double w_next = beamwidth_closed_form(
            hop_inputs_for_beam(geom, noise, tx_power_w, w, p_th), geom);
        auto in = hop_inputs_for_beam(geom, noise, tx_power_w, w_next, p_th);
        const ThresholdResult tr = threshold_optimize(in, settings, spec);
        out.inner_iterations_total += tr.iterations;
        const double rel_w = std::fabs(w_next - w) / std::max(w_next, 1e-300);
        const double rel_p =
            std::fabs(tr.threshold_w - p_th) / std::max(tr.threshold_w, 1e-300);
        w = w_next;
        p_th = tr.threshold_w;
        if (rel_w < settings.epsilon_rel && rel_p < settings.epsilon_rel) {
            out.converged = true;
            break;
        }
    }
    // The closed-form beam width is stationary only for the power-law
    // surrogate, which tracks the trend but misses the exact optimum by
    // tens of percent. One golden-section pass over w on the exact
    // objective, re-solving the threshold per candidate, closes the gap;
    // the threshold fixed point is already stationary for the exact pe.
    auto pe_of_w = [&](double cand_w) {
        try {
            auto in = hop_inputs_for_beam(geom, noise, tx_power_w, cand_w, p_th);
            const ThresholdResult tr = threshold_optimize(in, settings, spec);
            out.inner_iterations_total += tr.iterations;
            in.threshold_w = tr.threshold_w;
            return pe_ohl_hop(in, spec);
        } catch (const StationarityInfeasible&) {
            return 1.0;
        }
    };
    const double w_polished = golden_min(pe_of_w, 0.5 * w, 2.0 * w, 1e-5);
    {
        auto in = hop_inputs_for_beam(geom, noise, tx_power_w, w_polished, p_th);
        const ThresholdResult tr = threshold_optimize(in, settings, spec);
        out.inner_iterations_total += tr.iterations;
        in.threshold_w = tr.threshold_w;
        if (pe_ohl_hop(in, spec) <=
            pe_ohl_hop(hop_inputs_for_beam(geom, noise, tx_power_w, w, p_th),
                       spec)) {
            w = w_polished;
            p_th = tr.threshold_w;
        }
    }

    // Tighten the threshold at the final beam width so the reported pair
    // satisfies the fixed-point stationarity to solver precision.
    {
        OptimizerSettings tight = settings;
        tight.epsilon_rel = 1e-12;
        tight.max_inner = 200;
        auto in = hop_inputs_for_beam(geom, noise, tx_power_w, w, p_th);
        const ThresholdResult tr = threshold_optimize(in, tight, spec);
        out.inner_iterations_total += tr.iterations;
        p_th = tr.threshold_w;
    }

    out.threshold_star_w = p_th;
    out.beam_width_star_m = w;
    out.achieved_pe =
        pe_ohl_hop(hop_inputs_for_beam(geom, noise, tx_power_w, w, p_th), spec);
    if (out.achieved_pe > pe_init) {
        // Never return a point worse than the initialization.
        out.threshold_star_w = p_th_init;
        out.beam_width_star_m = w_init;
        out.achieved_pe = pe_init;
        out.converged = false;
    }
    return out;
}


JointOptimum exhaustive_joint_search(const LinkGeometry& geom,
                                     const NoiseBudget& noise,
                                     double tx_power_w, const SearchGrid& grid) {
    if (grid.threshold_points < 32 || grid.beam_points < 32)
        throw std::invalid_argument(
            "exhaustive_joint_search: grid must be at least 32x32");
    // Search quadrature can be looser than the final evaluation; the argmin
    // is insensitive at 1e-7 relative.
    QuadratureSpec search_spec;
    search_spec.abs_tol = 1e-14;
    search_spec.rel_tol = 1e-7;

    const double ls = geom.length_m * geom.jitter_sigma_rad;
    const double th_lo = grid.threshold_min_w > 0.0 ? grid.threshold_min_w : 5e-10;
    const double th_hi = grid.threshold_max_w > 0.0 ? grid.threshold_max_w : 2e-7;
    const double w_lo = grid.beam_min_m > 0.0 ? grid.beam_min_m : 0.6 * 2.0 * ls;
    const double w_hi = grid.beam_max_m > 0.0 ? grid.beam_max_m : 6.0 * 2.0 * ls;

    auto pe_at = [&](double p_th, double w) {
        return pe_ohl_hop(hop_inputs_for_beam(geom, noise, tx_power_w, w, p_th),
                          search_spec);
    };

    double best = std::numeric_limits<double>::infinity();
    double best_th = th_lo, best_w = w_lo;
    const double lth = std::log(th_lo), dth = std::log(th_hi / th_lo) /
                                              (grid.threshold_points - 1);
    const double lw = std::log(w_lo),
                 dw = std::log(w_hi / w_lo) / (grid.beam_points - 1);
    for (int i = 0; i < grid.threshold_points; ++i) {
        const double p_th = std::exp(lth + i * dth);
        for (int j = 0; j < grid.beam_points; ++j) {
            const double w = std::exp(lw + j * dw);
            const double pe = pe_at(p_th, w);
            if (pe < best) {
                best = pe;
                best_th = p_th;
                best_w = w;
            }
        }
    }
    // One golden-section refinement per axis within the neighboring cells.
    const double th_ref = golden_min(
        [&](double t) { return pe_at(t, best_w); },
        best_th * std::exp(-dth), best_th * std::exp(dth), 1e-6);
    if (pe_at(th_ref, best_w) < best) {
        best_th = th_ref;
        best = pe_at(th_ref, best_w);
    }
    const double w_ref = golden_min(
        [&](double w) { return pe_at(best_th, w); },
        best_w * std::exp(-dw), best_w * std::exp(dw), 1e-6);
    if (pe_at(best_th, w_ref) < best) {
        best_w = w_ref;
        best = pe_at(best_th, w_ref);
    }

    JointOptimum out;
    out.threshold_star_w = best_th;
    out.beam_width_star_m = best_w;
    out.achieved_pe =
        pe_ohl_hop(hop_inputs_for_beam(geom, noise, tx_power_w, best_w, best_th));
    out.converged = true;
    return out;
}

}  // namespace ohl
