// Command-line front end: sweeps, route optimization, snapshot studies,
// lens solving, and the self-validation suite. All outputs are plain text
// or CSV with provenance headers.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <limits>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ohlrelay/config.hpp"
#include "ohlrelay/csv.hpp"
#include "ohlrelay/error_analysis.hpp"
#include "ohlrelay/montecarlo.hpp"
#include "ohlrelay/optimizer.hpp"

namespace {

using namespace ohl;

struct GlobalOpts {
    std::string config_path;
    std::string out_path;
    std::uint64_t seed = 0;
    bool seed_set = false;
    int threads = 1;
};

ExperimentConfig effective_config(const GlobalOpts& g) {
    ExperimentConfig cfg =
        g.config_path.empty() ? ExperimentConfig{} : load_config(g.config_path);
    if (g.seed_set) cfg.seed = g.seed;
    cfg.validate();
    return cfg;
}

void emit_text(const GlobalOpts& g, const std::string& text) {
    if (g.out_path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream out(g.out_path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + g.out_path);
    out << text;
}

void emit_table(const GlobalOpts& g, const CsvTable& table) {
    emit_text(g, table.to_string());
}

// Rounds the trial budget up to a whole number of batches so any
// requested count is valid.
McPlan make_plan(long long trials, RngStream rng, int threads) {
    McPlan plan;
    const long long batches = (trials + plan.batch_size - 1) / plan.batch_size;
    plan.trials = std::max<long long>(batches, 2) * plan.batch_size;
    plan.rng = rng;
    plan.threads = threads;
    return plan;
}

LinkGeometry make_geometry(const ExperimentConfig& cfg, double length_m,
                           double sigma_theta_rad, LinkClass cls) {
    LinkGeometry geom;
    geom.length_m = length_m;
    geom.jitter_sigma_rad = sigma_theta_rad;
    geom.aperture_radius_m = cfg.aperture_radius_m;
    geom.wavelength_m = cfg.wavelength_m;
    geom.link_class = cls;
    return geom;
}

LinkGeometry make_geometry(const ExperimentConfig& cfg,
                           const LinkCandidate& link) {
    return make_geometry(cfg, link.length_m, link.sigma_theta_rad,
                         link.link_class);
}

Hop make_hop(const LinkGeometry& geom, double beam_width_m) {
    Hop hop;
    hop.geom = geom;
    hop.beam = BeamConfig::from_receiver_radius(geom, beam_width_m);
    return hop;
}

HopErrorInputs hop_inputs(const ExperimentConfig& cfg, const LinkGeometry& geom,
                          double beam_width_m, double threshold_w,
                          double tx_power_w) {
    HopErrorInputs in;
    in.fading = FadingModel::for_link(geom, beam_width_m);
    in.tx_power_prev_w = tx_power_w;
    in.threshold_w = threshold_w;
    const NoiseBudget noise = cfg.noise_budget();
    in.sigma_bg_w = noise.background_sigma_w;
    in.sigma_prime_w = noise.sigma_prime_w();
    return in;
}

Vec3 ground_point(double lat_deg, double lon_deg) {
    const double lat = lat_deg * M_PI / 180.0;
    const double lon = lon_deg * M_PI / 180.0;
    const double r = 6371e3;
    return Vec3{r * std::cos(lat) * std::cos(lon),
                r * std::cos(lat) * std::sin(lon), r * std::sin(lat)};
}

struct RoutedScenario {
    ConstellationSnapshot snapshot;
    RoutePath path;
};

RoutedScenario build_scenario(const ExperimentConfig& cfg,
                              std::uint64_t snapshot_index,
                              const std::string& epoch_tag) {
    RoutedScenario sc;
    sc.snapshot = generate_snapshot(cfg.constellation(),
                                    RngStream{cfg.seed, 1000 + snapshot_index},
                                    epoch_tag);
    const auto limits = cfg.link_limits();
    const auto links = feasible_links(sc.snapshot, limits);
    const Vec3 src_pt =
        ground_point(cfg.ground_lat_src_deg, cfg.ground_lon_src_deg);
    const Vec3 dst_pt =
        ground_point(cfg.ground_lat_dst_deg, cfg.ground_lon_dst_deg);
    auto candidates = filter_candidates(sc.snapshot, src_pt, dst_pt,
                                        cfg.corridor_half_angle_deg);
    const int src = nearest_satellite(sc.snapshot, src_pt);
    const int dst = nearest_satellite(sc.snapshot, dst_pt);
    auto ensure = [&candidates](int id) {
        for (int c : candidates)
            if (c == id) return;
        candidates.push_back(id);
    };
    ensure(src);
    ensure(dst);
    sc.path = route(sc.snapshot, links, candidates, src, dst);
    return sc;
}

struct PathOptimization {
    std::vector<JointOptimum> proposed;
    std::vector<JointOptimum> exhaustive;  // empty when skipped
    double e2e_proposed = 0.0;
    double e2e_exhaustive = 0.0;
    double seconds_proposed = 0.0;
    double seconds_exhaustive = 0.0;
};

// Optimizes every link of the path. The last link's relay output feeds the
// destination's soft decision, so its contribution to the end-to-end error
// uses the DF model at the link's optimized beam width.
PathOptimization optimize_path_links(const ExperimentConfig& cfg,
                                     const RoutePath& path,
                                     bool with_exhaustive,
                                     const SearchGrid& grid = {}) {
    const NoiseBudget noise = cfg.noise_budget();
    PathOptimization out;
    const auto t0 = std::chrono::steady_clock::now();
    for (const auto& link : path.links) {
        const LinkGeometry geom = make_geometry(cfg, link);
        out.proposed.push_back(joint_optimize(geom, noise, cfg.tx_power_w));
    }
    const auto t1 = std::chrono::steady_clock::now();
    if (with_exhaustive) {
        for (const auto& link : path.links) {
            const LinkGeometry geom = make_geometry(cfg, link);
            out.exhaustive.push_back(
                exhaustive_joint_search(geom, noise, cfg.tx_power_w, grid));
        }
    }
    const auto t2 = std::chrono::steady_clock::now();
    out.seconds_proposed = std::chrono::duration<double>(t1 - t0).count();
    out.seconds_exhaustive = std::chrono::duration<double>(t2 - t1).count();

    auto compose = [&](const std::vector<JointOptimum>& opts) {
        std::vector<double> per_hop;
        for (std::size_t i = 0; i < opts.size(); ++i) {
            const LinkGeometry geom = make_geometry(cfg, path.links[i]);
            if (i + 1 == opts.size()) {
                const HopErrorInputs in =
                    hop_inputs(cfg, geom, opts[i].beam_width_star_m,
                               opts[i].threshold_star_w, cfg.tx_power_w);
                per_hop.push_back(pe_df_hop_quadrature(in));
            } else {
                per_hop.push_back(opts[i].achieved_pe);
            }
        }
        return pe_e2e(per_hop, ChainComposition::ohl_chain);
    };
    out.e2e_proposed = compose(out.proposed);
    if (with_exhaustive) out.e2e_exhaustive = compose(out.exhaustive);
    return out;
}

std::string u64_str(std::uint64_t v) { return std::to_string(v); }

CsvTable provenance_table(const ExperimentConfig& cfg,
                          const std::string& command) {
    CsvTable t;
    t.command = command;
    t.config_hash = config_hash(cfg);
    t.seed = u64_str(cfg.seed);
    return t;
}

// ---------------------------------------------------------------- commands

int cmd_sweep_threshold(const GlobalOpts& g, int points, double pth_min,
                        double pth_max, double length_m, double sigma_override,
                        double beam_width_m, bool with_af, long long af_trials) {
    const ExperimentConfig cfg = effective_config(g);
    const double sigma =
        sigma_override > 0.0 ? sigma_override : cfg.sigma_theta_inter_rad;
    const LinkGeometry geom =
        make_geometry(cfg, length_m, sigma, LinkClass::inter_orbit);
    const NoiseBudget noise = cfg.noise_budget();

    std::ostringstream cmd;
    cmd << "sweep-threshold points=" << points
        << " pth_min=" << format_cell(pth_min)
        << " pth_max=" << format_cell(pth_max)
        << " length_m=" << format_cell(length_m)
        << " sigma_theta_rad=" << format_cell(sigma)
        << " beam_width_m=" << format_cell(beam_width_m)
        << " with_af=" << (with_af ? 1 : 0);
    CsvTable t = provenance_table(cfg, cmd.str());
    t.header = {"p_th_w", "pe_ohl", "pe_df"};
    if (with_af) {
        t.header.push_back("pe_af_mc");
        t.header.push_back("pe_af_stderr");
    }

    // Single-relay topology: source -> OHL relay -> destination. The DF and
    // AF rows use the same two hops. AF and DF do not depend on the
    // threshold, so they are computed once.
    const HopErrorInputs df_in =
        hop_inputs(cfg, geom, beam_width_m, 0.0, cfg.tx_power_w);
    const double pe_df_link = pe_df_hop_quadrature(df_in);
    const double pe_df_total =
        pe_e2e({pe_df_link, pe_df_link}, ChainComposition::df_chain);

    double pe_af = 0.0, pe_af_se = 0.0;
    if (with_af) {
        RelayChainConfig chain;
        chain.source_power_w = cfg.tx_power_w;
        chain.hops = {make_hop(geom, beam_width_m), make_hop(geom, beam_width_m)};
        RelayNodeConfig af;
        af.relay_type = RelayType::AF;
        af.target_tx_power_w = cfg.tx_power_w;
        chain.relays = {af};
        const McPlan plan = make_plan(af_trials, RngStream{cfg.seed, 10}, g.threads);
        const McResult r = simulate_af_ber(chain, noise, plan);
        pe_af = r.ber_estimate;
        pe_af_se = r.std_error;
    }

    for (int i = 0; i < points; ++i) {
        const double f = points == 1 ? 0.0
                                     : static_cast<double>(i) / (points - 1);
        const double pth = pth_min * std::pow(pth_max / pth_min, f);
        const HopErrorInputs in =
            hop_inputs(cfg, geom, beam_width_m, pth, cfg.tx_power_w);
        const double pe_hop = pe_ohl_hop(in);
        const double pe_total =
            pe_e2e({pe_hop, pe_df_link}, ChainComposition::ohl_chain);
        std::vector<double> row = {pth, pe_total, pe_df_total};
        if (with_af) {
            row.push_back(pe_af);
            row.push_back(pe_af_se);
        }
        t.add_row(std::move(row));
    }
    emit_table(g, t);
    return 0;
}

int cmd_sweep_relays(const GlobalOpts& g, int nr_min, int nr_max,
                     double total_distance_m, double fixed_hop_length_m,
                     double beam_width_m, bool with_af, long long af_trials) {
    const ExperimentConfig cfg = effective_config(g);
    const NoiseBudget noise = cfg.noise_budget();

    std::ostringstream cmd;
    cmd << "sweep-relays nr_min=" << nr_min << " nr_max=" << nr_max
        << " total_distance_m=" << format_cell(total_distance_m)
        << " fixed_hop_length_m=" << format_cell(fixed_hop_length_m)
        << " beam_width_m=" << format_cell(beam_width_m)
        << " with_af=" << (with_af ? 1 : 0);
    CsvTable t = provenance_table(cfg, cmd.str());
    t.header = {"n_relays", "pe_ohl_e2e", "pe_df_e2e"};
    if (with_af) {
        t.header.push_back("pe_af_e2e_mc");
        t.header.push_back("pe_af_stderr");
    }

    for (int nr = nr_min; nr <= nr_max; ++nr) {
        const int hops = nr + 1;
        const double hop_len = fixed_hop_length_m > 0.0
                                   ? fixed_hop_length_m
                                   : total_distance_m / hops;
        const LinkGeometry geom = make_geometry(
            cfg, hop_len, cfg.sigma_theta_inter_rad, LinkClass::inter_orbit);

        // OHL: per-hop optimal threshold at the fixed beam width.
        HopErrorInputs in =
            hop_inputs(cfg, geom, beam_width_m, 5.0 * cfg.p_bg_w,
                       cfg.tx_power_w);
        const ThresholdResult th = threshold_optimize(in);
        in.threshold_w = th.threshold_w;
        const double pe_relay = pe_ohl_hop(in);
        const double pe_dest = pe_df_hop_quadrature(in);
        std::vector<double> per_hop(hops - 1, pe_relay);
        per_hop.push_back(pe_dest);
        const double pe_ohl_total =
            pe_e2e(per_hop, ChainComposition::ohl_chain);

        const double pe_df_total = pe_e2e(
            std::vector<double>(hops, pe_df_hop_quadrature(in)),
            ChainComposition::df_chain);

        std::vector<double> row = {static_cast<double>(nr), pe_ohl_total,
                                   pe_df_total};
        if (with_af) {
            RelayChainConfig chain;
            chain.source_power_w = cfg.tx_power_w;
            RelayNodeConfig af;
            af.relay_type = RelayType::AF;
            af.target_tx_power_w = cfg.tx_power_w;
            for (int k = 0; k < hops; ++k)
                chain.hops.push_back(make_hop(geom, beam_width_m));
            chain.relays.assign(nr, af);
            const McPlan plan =
                make_plan(af_trials,
                          RngStream{cfg.seed, 20 + static_cast<std::uint64_t>(nr)},
                          g.threads);
            const McResult r = simulate_af_ber(chain, noise, plan);
            row.push_back(r.ber_estimate);
            row.push_back(r.std_error);
        }
        t.add_row(std::move(row));
    }
    emit_table(g, t);
    return 0;
}

int cmd_snapshot(const GlobalOpts& g, std::uint64_t snapshot_index,
                 const std::string& epoch_tag) {
    const ExperimentConfig cfg = effective_config(g);
    const ConstellationSnapshot snap =
        generate_snapshot(cfg.constellation(),
                          RngStream{cfg.seed, 1000 + snapshot_index}, epoch_tag);
    emit_text(g, snapshot_to_json(snap));
    return 0;
}

int cmd_route(const GlobalOpts& g, const std::string& snapshot_path) {
    const ExperimentConfig cfg = effective_config(g);
    const ConstellationSnapshot snap =
        snapshot_from_json(load_text_file(snapshot_path));
    const auto links = feasible_links(snap, cfg.link_limits());
    const Vec3 src_pt =
        ground_point(cfg.ground_lat_src_deg, cfg.ground_lon_src_deg);
    const Vec3 dst_pt =
        ground_point(cfg.ground_lat_dst_deg, cfg.ground_lon_dst_deg);
    auto candidates =
        filter_candidates(snap, src_pt, dst_pt, cfg.corridor_half_angle_deg);
    const int src = nearest_satellite(snap, src_pt);
    const int dst = nearest_satellite(snap, dst_pt);
    auto ensure = [&candidates](int id) {
        for (int c : candidates)
            if (c == id) return;
        candidates.push_back(id);
    };
    ensure(src);
    ensure(dst);
    const RoutePath path = route(snap, links, candidates, src, dst);
    emit_text(g, route_to_json(path));
    return 0;
}

int cmd_optimize_path(const GlobalOpts& g, const std::string& snapshot_path,
                      const std::string& route_path) {
    const ExperimentConfig cfg = effective_config(g);
    const ConstellationSnapshot snap =
        snapshot_from_json(load_text_file(snapshot_path));
    const RoutePath path = route_from_json(load_text_file(route_path));
    if (!validate_route(snap, path, cfg.link_limits())) {
        std::cerr << "optimize-path: route does not match snapshot "
                     "constraints\n";
        return 4;
    }

    const PathOptimization opt = optimize_path_links(cfg, path, true);
    const LensSystem lens = cfg.lens_system();

    CsvTable t = provenance_table(
        cfg, "optimize-path snapshot=" + snap.epoch_tag +
                 " links=" + std::to_string(path.links.size()));
    t.header = {"link_index",  "link_class",        "length_m",
                "sigma_theta", "p_th_star_w",       "w_star_m",
                "focal_len_m", "pe_hop",            "pe_hop_exhaustive",
                "rel_gap"};
    for (std::size_t i = 0; i < path.links.size(); ++i) {
        const auto& link = path.links[i];
        const auto& jo = opt.proposed[i];
        const auto& ex = opt.exhaustive[i];
        double focal = std::numeric_limits<double>::quiet_NaN();
        const double theta =
            divergence_for_target(jo.beam_width_star_m, link.length_m);
        const double w0 = waist_for_divergence(theta, cfg.wavelength_m);
        try {
            focal = solve_focal_length(lens, w0).focal_length_m;
        } catch (const std::domain_error&) {
            // Out of the lens range; reported as NaN in the table.
        }
        const double rel_gap =
            ex.achieved_pe > 0.0
                ? (jo.achieved_pe - ex.achieved_pe) / ex.achieved_pe
                : 0.0;
        t.add_row({static_cast<double>(i),
                   link.link_class == LinkClass::intra_orbit ? 0.0 : 1.0,
                   link.length_m, link.sigma_theta_rad, jo.threshold_star_w,
                   jo.beam_width_star_m, focal, jo.achieved_pe, ex.achieved_pe,
                   rel_gap});
    }
    const double e2e_gap =
        opt.e2e_exhaustive > 0.0
            ? (opt.e2e_proposed - opt.e2e_exhaustive) / opt.e2e_exhaustive
            : 0.0;
    t.add_row({-1.0, 0.0, path.total_length_m, 0.0, 0.0, 0.0, 0.0,
               opt.e2e_proposed, opt.e2e_exhaustive, e2e_gap});
    emit_table(g, t);
    return 0;
}

int cmd_snapshot_study(const GlobalOpts& g, int num_snapshots) {
    const ExperimentConfig cfg = effective_config(g);
    CsvTable t = provenance_table(
        cfg, "snapshot-study num_snapshots=" + std::to_string(num_snapshots));
    t.header = {"snapshot_id", "n_relays", "n_links", "total_length_m",
                "e2e_pe_proposed", "e2e_pe_exhaustive"};
    for (int s = 0; s < num_snapshots; ++s) {
        const RoutedScenario sc = build_scenario(
            cfg, static_cast<std::uint64_t>(s), "S" + std::to_string(s + 1));
        const PathOptimization opt = optimize_path_links(cfg, sc.path, true);
        t.add_row({static_cast<double>(s),
                   static_cast<double>(sc.path.relay_count),
                   static_cast<double>(sc.path.links.size()),
                   sc.path.total_length_m, opt.e2e_proposed,
                   opt.e2e_exhaustive});
        // Wall-clock numbers go to stderr so the table stays byte-identical
        // across runs.
        std::fprintf(stderr,
                     "snapshot %d: proposed %.3f s, exhaustive %.3f s\n", s,
                     opt.seconds_proposed, opt.seconds_exhaustive);
    }
    emit_table(g, t);
    return 0;
}

int cmd_lens(const GlobalOpts& g, double target_wi_m, double link_length_m) {
    const ExperimentConfig cfg = effective_config(g);
    const LensSystem lens = cfg.lens_system();
    const double theta = divergence_for_target(target_wi_m, link_length_m);
    const double w0 = waist_for_divergence(theta, cfg.wavelength_m);

    LensSolution sol;
    try {
        sol = solve_focal_length(lens, w0);
    } catch (const std::domain_error& e) {
        std::cerr << "lens: " << e.what() << "\n";
        return 3;
    }
    const double f_paper = paper_focal_length(lens, w0);
    const double rel_diff =
        std::isnan(f_paper)
            ? std::numeric_limits<double>::quiet_NaN()
            : std::fabs(sol.focal_length_m - f_paper) / sol.focal_length_m;
    std::ostringstream out;
    out << "target_wi_m=" << format_cell(target_wi_m) << "\n"
        << "link_length_m=" << format_cell(link_length_m) << "\n"
        << "theta_star_rad=" << format_cell(theta) << "\n"
        << "waist_star_m=" << format_cell(w0) << "\n"
        << "focal_m=" << format_cell(sol.focal_length_m) << "\n"
        << "focal_paper_m=" << format_cell(f_paper) << "\n"
        << "forward_residual=" << format_cell(sol.forward_residual) << "\n"
        << "rel_difference=" << format_cell(rel_diff) << "\n";
    emit_text(g, out.str());
    return 0;
}

// ---------------------------------------------------------------- validate

struct CheckList {
    std::ostringstream report;
    int failures = 0;

    void add(const std::string& name, bool ok, const std::string& detail = "") {
        report << name << ": " << (ok ? "pass" : "fail");
        if (!ok && !detail.empty()) report << " (" << detail << ")";
        report << "\n";
        if (!ok) ++failures;
    }
};

void validate_numerics(CheckList& c) {
    const double q3 = q_exact(3.0);
    c.add("numerics.q_exact_reference",
          std::fabs(q3 - 1.3498980316300946e-3) < 1e-15);
    c.add("numerics.q_approx3_envelope",
          std::fabs(q_approx3(3.0) - q3) / q3 < 0.25);

    bool lam_ok = true;
    for (double x : {-0.3, -0.1, 0.5, 1.0, 5.0, 20.0}) {
        const double w = lambert_w(x);
        if (std::fabs(w * std::exp(w) - x) > 1e-12 * std::max(1.0, std::fabs(x)))
            lam_ok = false;
    }
    for (double x : {-0.3, -0.05}) {
        const double w = lambert_w(x, LambertBranch::minus_one);
        if (std::fabs(w * std::exp(w) - x) > 1e-12) lam_ok = false;
    }
    c.add("numerics.lambert_w_residual", lam_ok);

    bool gam_ok = true;
    for (double x : {0.25, 1.0, 4.0}) {
        const double lhs = lower_incomplete_gamma(0.5, x);
        const double rhs = std::sqrt(M_PI) * std::erf(std::sqrt(x));
        if (std::fabs(lhs - rhs) > 1e-10 * rhs) gam_ok = false;
        const double one = lower_incomplete_gamma(1.0, x);
        if (std::fabs(one - (-std::expm1(-x))) > 1e-12) gam_ok = false;
    }
    c.add("numerics.incomplete_gamma_identities", gam_ok);

    const double third = integrate([](double x) { return x * x; }, 0.0, 1.0);
    c.add("numerics.quadrature_polynomial", std::fabs(third - 1.0 / 3.0) < 1e-12);
}

void validate_channel(CheckList& c, const ExperimentConfig& cfg) {
    const LinkGeometry geom = make_geometry(cfg, 1e6, cfg.sigma_theta_inter_rad,
                                            LinkClass::inter_orbit);
    const double w = 400.0;
    const FadingModel fm = FadingModel::for_link(geom, w);

    const double mass =
        integrate([&](double h) { return fm.pdf(h); }, 0.0, fm.h_max,
                  QuadratureSpec{1e-14, 1e-11, 200});
    c.add("channel.fading_pdf_normalization", std::fabs(mass - 1.0) < 1e-9);

    // Centered exact gain has the closed form 1 - exp(-2 r_a^2 / w^2); the
    // far-field model uses the flat-intensity normalization (half that) but
    // must share the angular profile.
    const double exact0 = channel_gain_exact(geom, w, PointingError{});
    const double closed0 =
        -std::expm1(-2.0 * geom.aperture_radius_m * geom.aperture_radius_m /
                    (w * w));
    const double far0 = channel_gain_farfield(fm, geom, w, PointingError{});
    const PointingError off{1e-4, 0.5e-4};
    const double profile_gap =
        std::fabs(channel_gain_exact(geom, w, off) / exact0 -
                  channel_gain_farfield(fm, geom, w, off) / far0);
    c.add("channel.farfield_vs_exact_center",
          std::fabs(exact0 - closed0) / closed0 < 1e-9 && profile_gap < 1e-3,
          "center_rel=" + format_cell(std::fabs(exact0 - closed0) / closed0) +
              " profile_gap=" + format_cell(profile_gap));

    // Two-sided K-S of sampled gains against the analytic CDF.
    const int n = 100000;
    Rng rng(RngStream{cfg.seed, 42});
    std::vector<double> hs(n);
    for (int i = 0; i < n; ++i) {
        const PointingError err = sample_pointing(geom, rng);
        hs[i] = channel_gain_farfield(fm, geom, w, err);
    }
    std::sort(hs.begin(), hs.end());
    double ks = 0.0;
    for (int i = 0; i < n; ++i) {
        const double f = fm.cdf(hs[i]);
        ks = std::max(ks, std::fabs(f - static_cast<double>(i) / n));
        ks = std::max(ks, std::fabs(static_cast<double>(i + 1) / n - f));
    }
    c.add("channel.fading_ks", ks < 0.005, "ks=" + format_cell(ks));
}

void validate_hop(CheckList& c, const ExperimentConfig& cfg,
                  const GlobalOpts& g, long long trials, bool corrupt) {
    const LinkGeometry geom = make_geometry(cfg, 1e6, cfg.sigma_theta_inter_rad,
                                            LinkClass::inter_orbit);
    const double w = 400.0;
    HopErrorInputs in = hop_inputs(cfg, geom, w, 0.0, cfg.tx_power_w);

    DfClosedFormCoeffs coeffs;
    if (corrupt) coeffs.a[0] *= 2.0;
    const double closed = pe_df_hop_closed(in, coeffs);
    const double quad_approx = pe_df_hop_quadrature(in, {}, true);
    const double quad_exact = pe_df_hop_quadrature(in, {}, false);
    c.add("hop.df_closed_vs_approx_quadrature",
          std::fabs(closed - quad_approx) / quad_approx < 1e-6,
          "closed=" + format_cell(closed) +
              " quad=" + format_cell(quad_approx));
    c.add("hop.df_closed_vs_exact_quadrature",
          std::fabs(closed - quad_exact) / quad_exact < 0.25);

    const ThresholdResult th = threshold_optimize(in);
    in.threshold_w = th.threshold_w;
    const double pe_ohl = pe_ohl_hop(in);

    const NoiseBudget noise = cfg.noise_budget();
    RelayChainConfig chain;
    chain.source_power_w = cfg.tx_power_w;
    chain.hops = {make_hop(geom, w), make_hop(geom, w)};
    RelayNodeConfig node;
    node.relay_type = RelayType::OHL;
    node.target_tx_power_w = cfg.tx_power_w;
    node.ohl_threshold_w = th.threshold_w;
    node.ohl_output_w = cfg.ohl_output_w;
    chain.relays = {node};

    const McPlan plan = make_plan(trials, RngStream{cfg.seed, 43}, g.threads);
    const McResult mc = simulate_chain_ber(chain, noise, plan);
    const double pe_dest = pe_df_hop_quadrature(in);
    const double analytic =
        pe_e2e({pe_ohl, pe_dest}, ChainComposition::ohl_chain);
    const ValidationReport rep = validate_report(analytic, mc);
    c.add("hop.ohl_vs_mc", rep.pass, rep.to_string());

    RelayChainConfig df_chain;
    df_chain.source_power_w = cfg.tx_power_w;
    df_chain.hops = {make_hop(geom, w)};
    McPlan df_plan = plan;
    df_plan.rng = RngStream{cfg.seed, 44};
    const McResult df_mc = simulate_chain_ber(df_chain, noise, df_plan);
    const ValidationReport df_rep = validate_report(quad_exact, df_mc);
    c.add("hop.df_vs_mc", df_rep.pass, df_rep.to_string());
}

void validate_chain(CheckList& c, const ExperimentConfig& cfg,
                    const GlobalOpts& g, long long trials) {
    const LinkGeometry geom = make_geometry(cfg, 8e5, cfg.sigma_theta_inter_rad,
                                            LinkClass::inter_orbit);
    const double w = 350.0;
    HopErrorInputs in = hop_inputs(cfg, geom, w, 0.0, cfg.tx_power_w);
    const ThresholdResult th = threshold_optimize(in);
    in.threshold_w = th.threshold_w;

    const NoiseBudget noise = cfg.noise_budget();
    const int hops = 4;
    RelayChainConfig chain;
    chain.source_power_w = cfg.tx_power_w;
    RelayNodeConfig node;
    node.relay_type = RelayType::OHL;
    node.target_tx_power_w = cfg.tx_power_w;
    node.ohl_threshold_w = th.threshold_w;
    node.ohl_output_w = cfg.ohl_output_w;
    for (int k = 0; k < hops; ++k) chain.hops.push_back(make_hop(geom, w));
    chain.relays.assign(hops - 1, node);

    const McPlan plan = make_plan(trials, RngStream{cfg.seed, 45}, g.threads);
    const McResult mc = simulate_chain_ber(chain, noise, plan);
    const double pe_relay = pe_ohl_hop(in);
    const double pe_dest = pe_df_hop_quadrature(in);
    std::vector<double> per_hop(hops - 1, pe_relay);
    per_hop.push_back(pe_dest);
    const double analytic = pe_e2e(per_hop, ChainComposition::ohl_chain);
    const ValidationReport rep = validate_report(analytic, mc);
    c.add("chain.ohl_multi_hop_vs_mc", rep.pass, rep.to_string());

    // DF chain: every node re-decides with the combined noise.
    RelayChainConfig dfc;
    dfc.source_power_w = cfg.tx_power_w;
    RelayNodeConfig dfn;
    dfn.relay_type = RelayType::DF;
    dfn.target_tx_power_w = cfg.tx_power_w;
    for (int k = 0; k < hops; ++k) dfc.hops.push_back(make_hop(geom, w));
    dfc.relays.assign(hops - 1, dfn);
    McPlan df_plan = plan;
    df_plan.rng = RngStream{cfg.seed, 46};
    const McResult df_mc = simulate_chain_ber(dfc, noise, df_plan);
    const double df_analytic =
        pe_e2e(std::vector<double>(hops, pe_df_hop_quadrature(in)),
               ChainComposition::df_chain);
    const ValidationReport df_rep = validate_report(df_analytic, df_mc);
    c.add("chain.df_multi_hop_vs_mc", df_rep.pass, df_rep.to_string());

    // AF has no closed form; sanity-bound the estimate only.
    RelayChainConfig afc;
    afc.source_power_w = cfg.tx_power_w;
    RelayNodeConfig afn;
    afn.relay_type = RelayType::AF;
    afn.target_tx_power_w = cfg.tx_power_w;
    for (int k = 0; k < hops; ++k) afc.hops.push_back(make_hop(geom, w));
    afc.relays.assign(hops - 1, afn);
    McPlan af_plan = plan;
    af_plan.trials = make_plan(std::min<long long>(trials, 200000),
                               af_plan.rng, af_plan.threads).trials;
    af_plan.rng = RngStream{cfg.seed, 47};
    const McResult af_mc = simulate_af_ber(afc, noise, af_plan);
    c.add("chain.af_sanity",
          af_mc.ber_estimate >= 0.0 && af_mc.ber_estimate < 0.5);
}

void validate_optimizer(CheckList& c, const ExperimentConfig& cfg) {
    const LinkGeometry geom = make_geometry(cfg, 1e6, cfg.sigma_theta_inter_rad,
                                            LinkClass::inter_orbit);
    const NoiseBudget noise = cfg.noise_budget();
    const JointOptimum jo = joint_optimize(geom, noise, cfg.tx_power_w);
    c.add("optimizer.joint_converged", jo.converged);

    HopErrorInputs in = hop_inputs(cfg, geom, jo.beam_width_star_m,
                                   jo.threshold_star_w, cfg.tx_power_w);
    const double mapped =
        threshold_fixed_point_step(in, jo.threshold_star_w);
    c.add("optimizer.fixed_point_residual",
          std::fabs(mapped - jo.threshold_star_w) / jo.threshold_star_w < 1e-6,
          "residual=" +
              format_cell(std::fabs(mapped - jo.threshold_star_w) /
                          jo.threshold_star_w));

    const JointOptimum ex = exhaustive_joint_search(geom, noise, cfg.tx_power_w);
    const double gap = (jo.achieved_pe - ex.achieved_pe) / ex.achieved_pe;
    c.add("optimizer.joint_vs_exhaustive", gap < 0.05,
          "rel_gap=" + format_cell(gap));
}

int cmd_validate(const GlobalOpts& g, const std::string& suite,
                 long long trials, bool corrupt) {
    const ExperimentConfig cfg = effective_config(g);
    CheckList checks;
    const bool all = suite == "all";
    if (all || suite == "numerics") validate_numerics(checks);
    if (all || suite == "channel") validate_channel(checks, cfg);
    if (all || suite == "hop") validate_hop(checks, cfg, g, trials, corrupt);
    if (all || suite == "chain") validate_chain(checks, cfg, g, trials);
    if (all || suite == "optimizer") validate_optimizer(checks, cfg);
    checks.report << (checks.failures == 0 ? "all checks passed"
                                           : std::to_string(checks.failures) +
                                                 " check(s) failed")
                  << "\n";
    emit_text(g, checks.report.str());
    return checks.failures == 0 ? 0 : 4;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Multi-hop optical inter-satellite relay analysis"};
    app.require_subcommand(1);

    GlobalOpts g;
    app.add_option("--config", g.config_path, "Configuration file (key = value)");
    app.add_option("--out", g.out_path, "Output file (default stdout)");
    auto* seed_opt = app.add_option("--seed", g.seed, "Seed override");
    app.add_option("--threads", g.threads, "Worker threads");

    // sweep-threshold
    int st_points = 200;
    double st_pth_min = 1e-9, st_pth_max = 1e-7;
    double st_length = 1e6, st_sigma = 0.0, st_beam = 400.0;
    bool st_af = false;
    long long st_af_trials = 200000;
    auto* st = app.add_subcommand("sweep-threshold",
                                  "Error probability vs decision threshold");
    st->fallthrough();
    st->add_option("--points", st_points)->check(CLI::PositiveNumber);
    st->add_option("--pth-min", st_pth_min)->check(CLI::PositiveNumber);
    st->add_option("--pth-max", st_pth_max)->check(CLI::PositiveNumber);
    st->add_option("--length-m", st_length)->check(CLI::PositiveNumber);
    st->add_option("--sigma-theta-rad", st_sigma);
    st->add_option("--beam-width-m", st_beam)->check(CLI::PositiveNumber);
    st->add_flag("--with-af", st_af, "Add the Monte-Carlo AF column");
    st->add_option("--af-trials", st_af_trials)->check(CLI::PositiveNumber);

    // sweep-relays
    int sr_min = 1, sr_max = 14;
    double sr_total = 4e6, sr_fixed_hop = 0.0, sr_beam = 400.0;
    bool sr_af = false;
    long long sr_af_trials = 100000;
    auto* sr = app.add_subcommand("sweep-relays",
                                  "Error probability vs relay count");
    sr->fallthrough();
    sr->add_option("--nr-min", sr_min)->check(CLI::PositiveNumber);
    sr->add_option("--nr-max", sr_max)->check(CLI::PositiveNumber);
    sr->add_option("--total-distance-m", sr_total)->check(CLI::PositiveNumber);
    sr->add_option("--fixed-hop-length-m", sr_fixed_hop,
                   "Use this per-hop length instead of total/(N_r+1)");
    sr->add_option("--beam-width-m", sr_beam)->check(CLI::PositiveNumber);
    sr->add_flag("--with-af", sr_af, "Add the Monte-Carlo AF column");
    sr->add_option("--af-trials", sr_af_trials)->check(CLI::PositiveNumber);

    // snapshot
    std::uint64_t sn_index = 0;
    std::string sn_tag = "S1";
    auto* sn = app.add_subcommand("snapshot", "Generate a constellation snapshot");
    sn->fallthrough();
    sn->add_option("--index", sn_index, "Snapshot stream index");
    sn->add_option("--epoch-tag", sn_tag);

    // route
    std::string rt_snapshot;
    auto* rt = app.add_subcommand("route",
                                  "Route between the configured ground points");
    rt->fallthrough();
    rt->add_option("--snapshot", rt_snapshot)->required();

    // optimize-path
    std::string op_snapshot, op_route;
    auto* op = app.add_subcommand("optimize-path",
                                  "Per-link joint optimization of a route");
    op->fallthrough();
    op->add_option("--snapshot", op_snapshot)->required();
    op->add_option("--route", op_route)->required();

    // snapshot-study
    int ss_count = 4;
    auto* ss = app.add_subcommand("snapshot-study",
                                  "End-to-end BER across routed snapshots");
    ss->fallthrough();
    ss->add_option("--num-snapshots", ss_count)->check(CLI::PositiveNumber);

    // lens
    double ln_target = 0.0, ln_length = 0.0;
    auto* ln = app.add_subcommand("lens", "Solve the transmit lens focal length");
    ln->fallthrough();
    ln->add_option("--target-wi-m", ln_target)->required()->check(CLI::PositiveNumber);
    ln->add_option("--link-length-m", ln_length)->required()->check(CLI::PositiveNumber);

    // validate
    std::string va_suite = "all";
    long long va_trials = 2000000;
    bool va_corrupt = false;
    auto* va = app.add_subcommand("validate", "Cross-check oracle suites");
    va->fallthrough();
    va->add_option("--suite", va_suite)
        ->check(CLI::IsMember({"all", "numerics", "channel", "hop", "chain",
                               "optimizer"}));
    va->add_option("--trials", va_trials)->check(CLI::PositiveNumber);
    va->add_flag("--inject-coefficient-fault", va_corrupt,
                 "Corrupt a closed-form coefficient (harness sensitivity)")
        ->group("");  // hidden

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    g.seed_set = seed_opt->count() > 0;

    try {
        if (st->parsed())
            return cmd_sweep_threshold(g, st_points, st_pth_min, st_pth_max,
                                       st_length, st_sigma, st_beam, st_af,
                                       st_af_trials);
        if (sr->parsed())
            return cmd_sweep_relays(g, sr_min, sr_max, sr_total, sr_fixed_hop,
                                    sr_beam, sr_af, sr_af_trials);
        if (sn->parsed()) return cmd_snapshot(g, sn_index, sn_tag);
        if (rt->parsed()) return cmd_route(g, rt_snapshot);
        if (op->parsed()) return cmd_optimize_path(g, op_snapshot, op_route);
        if (ss->parsed()) return cmd_snapshot_study(g, ss_count);
        if (ln->parsed()) return cmd_lens(g, ln_target, ln_length);
        if (va->parsed()) return cmd_validate(g, va_suite, va_trials, va_corrupt);
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const ohl::StationarityInfeasible& e) {
        std::cerr << "infeasible: " << e.what() << "\n";
        return 3;
    } catch (const std::domain_error& e) {
        std::cerr << "infeasible: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
    return 2;
}
