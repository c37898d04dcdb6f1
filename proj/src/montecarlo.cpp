#include "ohlrelay/montecarlo.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "ohlrelay/parallel.hpp"
#include "ohlrelay/simd/kernels.hpp"

namespace ohl {

void McPlan::validate() const {
    if (trials < 10'000)
        throw std::invalid_argument("McPlan: trials must be >= 1e4");
    if (batch_size < 1 || trials % batch_size != 0)
        throw std::invalid_argument("McPlan: batch_size must divide trials");
}

namespace {

struct BatchCounts {
    long long errors = 0;
    std::vector<long long> flips;
};

struct HopDerived {
    double c = 0.0;      // 2 (L sigma_theta / w)^2, exponent per unit normal
    double h_max = 0.0;
    LinkGeometry geom;
    double wi = 0.0;
};

std::vector<HopDerived> derive_hops(const RelayChainConfig& cfg) {
    std::vector<HopDerived> out;
    out.reserve(cfg.hops.size());
    for (const auto& hop : cfg.hops) {
        HopDerived d;
        const double w = hop.beam.receiver_radius_m;
        const double ls = hop.geom.length_m * hop.geom.jitter_sigma_rad;
        d.c = 2.0 * ls * ls / (w * w);
        d.h_max = hop.geom.aperture_radius_m * hop.geom.aperture_radius_m /
                  (w * w);
        d.geom = hop.geom;
        d.wi = w;
        out.push_back(d);
    }
    return out;
}

// Fills h[0..n) for one hop from the normal draws; the far-field path runs
// the dispatched SIMD kernel, the exact path integrates per trial.
void fill_gains(const HopDerived& hop, ChannelMode mode, const double* zx,
                const double* zy, std::size_t n, double* h) {
    if (mode == ChannelMode::farfield) {
        simd::gain_batch()(zx, zy, n, hop.c, hop.h_max, h);
        return;
    }
    for (std::size_t i = 0; i < n; ++i) {
        const PointingError err{hop.geom.jitter_sigma_rad * zx[i],
                                hop.geom.jitter_sigma_rad * zy[i]};
        h[i] = channel_gain_exact(hop.geom, hop.wi, err);
    }
}

BatchCounts run_chain_batch(const RelayChainConfig& cfg,
                            const NoiseBudget& noise, const McPlan& plan,
                            std::size_t batch_index,
                            const std::vector<HopDerived>& hops) {
    const std::size_t b = static_cast<std::size_t>(plan.batch_size);
    Rng rng(plan.rng.substream(batch_index));
    std::vector<double> zx(b), zy(b), bg(b), th(b), h(b), p(b);
    std::vector<std::uint8_t> src(b), cur(b);
    BatchCounts out;
    out.flips.assign(cfg.hops.size(), 0);

    for (std::size_t i = 0; i < b; ++i) {
        src[i] = rng.bit() ? 1 : 0;
        cur[i] = src[i];
        p[i] = src[i] ? cfg.source_power_w : 0.0;
    }

    const double t_equiv = noise.thermal_equiv_w();
    double ase_prev = 0.0;        // upstream ASE reaching this hop (exact mode)
    double nominal_on = cfg.source_power_w;  // mark-level tx power upstream

    for (std::size_t k = 0; k < cfg.hops.size(); ++k) {
        for (std::size_t i = 0; i < b; ++i) rng.normal_pair(zx[i], zy[i]);
        for (std::size_t i = 0; i < b; ++i) rng.normal_pair(bg[i], th[i]);
        fill_gains(hops[k], plan.channel_mode, zx.data(), zy.data(), b, h.data());

        const bool is_dest = (k + 1 == cfg.hops.size());
        if (!is_dest && cfg.relays[k].relay_type == RelayType::OHL) {
            const auto& node = cfg.relays[k];
            const double g =
                node.edfa_gain > 0.0 ? node.edfa_gain : node.ohl_fixed_gain();
            const double ase = plan.use_ase_approx ? 0.0 : ase_power(noise, g);
            const double p_th = node.ohl_threshold_w;
            for (std::size_t i = 0; i < b; ++i) {
                const double p_in = p[i] * h[i] + ase_prev * h[i] +
                                    noise.background_sigma_w * bg[i];
                const std::uint8_t dec = p_in >= p_th ? 1 : 0;
                out.flips[k] += dec != cur[i];
                cur[i] = dec;
                p[i] = dec ? g * node.ohl_output_w : 0.0;
            }
            ase_prev = ase;  // zero in approx mode, P_ASE in exact mode
            nominal_on = g * node.ohl_output_w;
        } else {
            // DF relay or the destination's soft decision: per-slot channel
            // knowledge, threshold at half the mark level, combined noise.
            const double retransmit =
                is_dest ? 0.0 : cfg.relays[k].target_tx_power_w;
            for (std::size_t i = 0; i < b; ++i) {
                const double level = nominal_on * h[i];
                const double p_in = p[i] * h[i] + ase_prev * h[i] +
                                    noise.background_sigma_w * bg[i] +
                                    t_equiv * th[i];
                const std::uint8_t dec = p_in >= 0.5 * level ? 1 : 0;
                out.flips[k] += dec != cur[i];
                cur[i] = dec;
                p[i] = dec ? retransmit : 0.0;
            }
            ase_prev = 0.0;
            if (!is_dest) nominal_on = retransmit;
        }
    }
    for (std::size_t i = 0; i < b; ++i) out.errors += cur[i] != src[i];
    return out;
}

McResult merge_batches(const RelayChainConfig& cfg, const McPlan& plan,
                       const std::vector<BatchCounts>& counts) {
    McResult res;
    res.per_hop_flip_counts.assign(cfg.hops.size(), 0);
    long long errors = 0;
    for (const auto& c : counts) {
        errors += c.errors;
        for (std::size_t k = 0; k < c.flips.size(); ++k)
            res.per_hop_flip_counts[k] += c.flips[k];
    }
    res.trials_run = plan.trials;
    res.ber_estimate = static_cast<double>(errors) / plan.trials;
    res.std_error = std::sqrt(res.ber_estimate * (1.0 - res.ber_estimate) /
                              plan.trials);
    return res;
}

}  // namespace

McResult simulate_chain_ber(const RelayChainConfig& cfg,
                            const NoiseBudget& noise, const McPlan& plan) {
    cfg.validate();
    plan.validate();
    for (const auto& r : cfg.relays)
        if (r.relay_type == RelayType::AF)
            throw std::invalid_argument(
                "simulate_chain_ber: AF chains go through simulate_af_ber");
    const std::vector<HopDerived> hops = derive_hops(cfg);
    const std::size_t n_batches =
        static_cast<std::size_t>(plan.trials / plan.batch_size);
    std::vector<BatchCounts> counts(n_batches);
    parallel_for(n_batches, plan.threads, [&](std::size_t bi) {
        counts[bi] = run_chain_batch(cfg, noise, plan, bi, hops);
    });
    return merge_batches(cfg, plan, counts);
}

McResult simulate_af_ber(const RelayChainConfig& cfg, const NoiseBudget& noise,
                         const McPlan& plan, double dest_threshold_w) {
    cfg.validate();
    plan.validate();
    const std::vector<HopDerived> hops = derive_hops(cfg);
    const std::vector<double> gains = af_auto_gains(cfg, noise);
    const std::size_t n_batches =
        static_cast<std::size_t>(plan.trials / plan.batch_size);
    std::vector<BatchCounts> counts(n_batches);

    parallel_for(n_batches, plan.threads, [&](std::size_t bi) {
        const std::size_t b = static_cast<std::size_t>(plan.batch_size);
        Rng rng(plan.rng.substream(bi));
        std::vector<double> zx(b), zy(b), bg(b), th(b), h(b);
        std::vector<double> p(b), eye_on(b), eye_off(b);
        std::vector<std::uint8_t> src(b);
        BatchCounts bc;
        bc.flips.assign(cfg.hops.size(), 0);

        for (std::size_t i = 0; i < b; ++i) {
            src[i] = rng.bit() ? 1 : 0;
            p[i] = src[i] ? cfg.source_power_w : 0.0;
            eye_on[i] = cfg.source_power_w;  // noise-free propagation of a mark
            eye_off[i] = 0.0;                // and of a space
        }
        for (std::size_t k = 0; k < cfg.hops.size(); ++k) {
            for (std::size_t i = 0; i < b; ++i) rng.normal_pair(zx[i], zy[i]);
            for (std::size_t i = 0; i < b; ++i) rng.normal_pair(bg[i], th[i]);
            fill_gains(hops[k], plan.channel_mode, zx.data(), zy.data(), b,
                       h.data());
            for (std::size_t i = 0; i < b; ++i) {
                const double bg_w = noise.background_sigma_w * bg[i];
                p[i] = p[i] * h[i] + bg_w;
                eye_on[i] *= h[i];
                eye_off[i] *= h[i];
                if (k < cfg.relays.size()) {
                    double g = gains[k];
                    if (plan.af_instantaneous_gain && p[i] > 0.0)
                        g = cfg.relays[k].target_tx_power_w / p[i];
                    const double ase = ase_power(noise, g);
                    p[i] = g * p[i] + ase;
                    eye_on[i] = g * eye_on[i] + ase;
                    eye_off[i] = g * eye_off[i] + ase;
                } else {
                    const double p_dest = p[i] < 0.0 ? 0.0 : p[i];
                    const double threshold =
                        dest_threshold_w > 0.0
                            ? dest_threshold_w
                            : 0.5 * (eye_on[i] + eye_off[i]);
                    const double stat =
                        p_dest + noise.thermal_equiv_w() * th[i];
                    const std::uint8_t dec = stat >= threshold ? 1 : 0;
                    bc.flips[k] += dec != src[i];
                    if (dec != src[i]) ++bc.errors;
                }
            }
        }
        counts[bi] = std::move(bc);
    });
    return merge_batches(cfg, plan, counts);
}

ValidationReport validate_report(double analytic, const McResult& mc,
                                 double confidence_z, double model_tolerance) {
    ValidationReport r;
    r.analytic_pe = analytic;
    r.mc_pe = mc.ber_estimate;
    r.std_error = mc.std_error;
    const double gap = std::fabs(analytic - mc.ber_estimate);
    const double band =
        confidence_z * mc.std_error + model_tolerance * std::fabs(analytic);
    r.pass = gap <= band;
    r.z_margin = mc.std_error > 0.0 ? (gap - band) / mc.std_error
                                    : (r.pass ? 0.0 : 1.0);
    return r;
}

std::string ValidationReport::to_string() const {
    char buf[256];
    std::snprintf(buf, sizeof(buf),
                  "analytic_pe=%.10e mc_pe=%.10e std_error=%.10e "
                  "z_margin=%.6f verdict=%s",
                  analytic_pe, mc_pe, std_error, z_margin, verdict().c_str());
    return buf;
}

}  // namespace ohl
